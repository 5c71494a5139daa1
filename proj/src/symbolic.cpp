#include "kanbench/symbolic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

#include "kanbench/error.hpp"
#include "kanbench/kernels.hpp"

namespace kanbench {

namespace {

constexpr std::array<std::string_view, kCandidateCount> kNames = {
    "constant", "identity", "square", "cube", "quartic", "reciprocal", "sqrt_abs", "exp",
    "log_abs",  "abs",      "sin",    "cos",  "tanh",    "sigmoid",    "gaussian",
};

constexpr double kGuard = 1e-6;
constexpr double kTie = 1e-12;
constexpr double kSearchLimit = 10.0;
constexpr int kCoarsePoints = 41;
constexpr int kRefinePoints = 21;
constexpr int kRefineLevels = 2;

struct Stats {
    double sum_y = 0.0;
    double ss_y = 0.0;  // centred
    std::size_t n = 0;
};

// Least-squares (c, d) for y ≈ c·f + d from raw moments; returns the
// residual sum of squares.
double solve_linear(const kernels::Moments& m, const Stats& s, double& c, double& d) {
    const auto n = static_cast<double>(s.n);
    const double mean_f = m.sum_f / n;
    const double mean_y = s.sum_y / n;
    const double sff = m.sum_ff - m.sum_f * mean_f;
    const double sfy = m.sum_fy - m.sum_f * mean_y;
    if (!(sff > 1e-12 * std::max(1.0, m.sum_ff))) {
        c = 0.0;
        d = mean_y;
        return s.ss_y;
    }
    c = sfy / sff;
    d = mean_y - c * mean_f;
    return std::max(0.0, s.ss_y - c * sfy);
}

double r2_from(double ss_res, double ss_tot) {
    if (ss_tot <= 0.0) return ss_res <= 0.0 ? 1.0 : 0.0;
    return 1.0 - ss_res / ss_tot;
}

// Exact (two-pass) c, d, R² and max residual for a fixed (a, b).
AffineFit finalize(Candidate cand, double a, double b, std::span<const double> xs, std::span<const double> ys) {
    const std::size_t n = xs.size();
    std::vector<double> f(n);
    double mean_f = 0.0;
    double mean_y = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        f[i] = apply_candidate(cand, a * xs[i] + b);
        mean_f += f[i];
        mean_y += ys[i];
    }
    mean_f /= static_cast<double>(n);
    mean_y /= static_cast<double>(n);
    double sff = 0.0;
    double sfy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sff += (f[i] - mean_f) * (f[i] - mean_f);
        sfy += (f[i] - mean_f) * (ys[i] - mean_y);
        syy += (ys[i] - mean_y) * (ys[i] - mean_y);
    }
    AffineFit fit;
    fit.candidate = cand;
    fit.a = a;
    fit.b = b;
    if (std::isfinite(sff) && sff > 1e-12 * std::max(1.0, sff + mean_f * mean_f * n)) {
        fit.c = sfy / sff;
        fit.d = mean_y - fit.c * mean_f;
    } else {
        fit.c = 0.0;
        fit.d = mean_y;
    }
    double ss_res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ys[i] - (fit.c * f[i] + fit.d);
        ss_res += r * r;
        fit.max_abs_residual = std::max(fit.max_abs_residual, std::abs(r));
    }
    fit.r2 = r2_from(ss_res, syy);
    return fit;
}

}  // namespace

int complexity_rank(Candidate c) { return static_cast<int>(c); }

std::string_view to_string(Candidate c) { return kNames[static_cast<std::size_t>(c)]; }

Candidate candidate_from_string(std::string_view name) {
    for (std::size_t i = 0; i < kCandidateCount; ++i) {
        if (kNames[i] == name) return kCandidates[i];
    }
    throw Error(ErrorCode::invalid_config, "unknown symbolic candidate '" + std::string(name) + "'");
}

double apply_candidate(Candidate c, double t) {
    switch (c) {
    case Candidate::constant: return 1.0;
    case Candidate::identity: return t;
    case Candidate::square: return t * t;
    case Candidate::cube: return t * t * t;
    case Candidate::quartic: return (t * t) * (t * t);
    case Candidate::reciprocal: return 1.0 / (std::abs(t) < kGuard ? std::copysign(kGuard, t) : t);
    case Candidate::sqrt_abs: return std::sqrt(std::abs(t));
    case Candidate::exp: return std::exp(t);
    case Candidate::log_abs: return std::log(std::abs(t) + kGuard);
    case Candidate::abs: return std::abs(t);
    case Candidate::sin: return std::sin(t);
    case Candidate::cos: return std::cos(t);
    case Candidate::tanh: return std::tanh(t);
    case Candidate::sigmoid: return 1.0 / (1.0 + std::exp(-t));
    case Candidate::gaussian: return std::exp(-(t * t));
    }
    return 0.0;
}

AffineFit fit_affine(Candidate candidate, std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size() || xs.size() < kMinFitSamples) {
        throw Error(ErrorCode::insufficient_samples, "fit_affine needs at least 8 paired samples");
    }
    const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
    if (!(*lo < *hi)) throw Error(ErrorCode::degenerate_samples, "all sample abscissae are identical");
    for (double x : xs) {
        if (!std::isfinite(x)) throw Error(ErrorCode::degenerate_samples, "non-finite sample abscissa");
    }

    if (candidate == Candidate::constant || candidate == Candidate::identity) {
        return finalize(candidate, 1.0, 0.0, xs, ys);
    }

    const std::size_t n = xs.size();
    Stats stats;
    stats.n = n;
    for (double y : ys) stats.sum_y += y;
    const double mean_y = stats.sum_y / static_cast<double>(n);
    for (double y : ys) stats.ss_y += (y - mean_y) * (y - mean_y);

    std::vector<double> f(n);
    double best_r2 = -std::numeric_limits<double>::infinity();
    double best_a = 1.0;
    double best_b = 0.0;
    auto scan = [&](double a_center, double b_center, double half_width, int points) {
        const double step = 2.0 * half_width / (points - 1);
        for (int ia = 0; ia < points; ++ia) {
            const double a = a_center - half_width + ia * step;
            for (int ib = 0; ib < points; ++ib) {
                const double b = b_center - half_width + ib * step;
                bool finite = true;
                for (std::size_t i = 0; i < n; ++i) {
                    f[i] = apply_candidate(candidate, a * xs[i] + b);
                    if (!(std::abs(f[i]) < 1e100)) {
                        finite = false;
                        break;
                    }
                }
                if (!finite) continue;
                const kernels::Moments m = kernels::moments(f, ys);
                double c = 0.0;
                double d = 0.0;
                const double r2 = r2_from(solve_linear(m, stats, c, d), stats.ss_y);
                if (r2 > best_r2 + kTie) {
                    best_r2 = r2;
                    best_a = a;
                    best_b = b;
                }
            }
        }
        return step;
    };
    double step = scan(0.0, 0.0, kSearchLimit, kCoarsePoints);
    for (int level = 0; level < kRefineLevels; ++level) {
        const double ca = best_a;
        const double cb = best_b;
        step = scan(ca, cb, step, kRefinePoints);
    }
    return finalize(candidate, best_a, best_b, xs, ys);
}

EdgeSamples collect_edge_samples(const KanNetwork& net, const Matrix& inputs, std::size_t max_samples) {
    const auto [out, cache] = kan_forward(net, inputs);
    (void)out;
    EdgeSamples samples(net.layer_count());
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        const Matrix& x = cache.activations[l];
        samples[l].resize(x.cols());
        for (std::size_t i = 0; i < x.cols(); ++i) {
            std::vector<double> column(x.rows());
            for (std::size_t s = 0; s < x.rows(); ++s) column[s] = x(s, i);
            std::sort(column.begin(), column.end());
            if (column.size() > max_samples && max_samples >= 2) {
                std::vector<double> thinned(max_samples);
                const double stride = static_cast<double>(column.size() - 1) / static_cast<double>(max_samples - 1);
                for (std::size_t q = 0; q < max_samples; ++q) {
                    thinned[q] = column[static_cast<std::size_t>(std::llround(q * stride))];
                }
                column = std::move(thinned);
            }
            samples[l][i] = std::move(column);
        }
    }
    return samples;
}

SymbolicNetwork symbolify_network(const KanNetwork& net, const EdgeSamples& samples) {
    if (samples.size() != net.layer_count()) {
        throw Error(ErrorCode::insufficient_samples, "one sample set per layer required");
    }
    SymbolicNetwork snet;
    snet.layer_sizes = net.layer_sizes();
    snet.edges.resize(net.layer_count());
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        const std::size_t n_in = net.layer_sizes()[l];
        const std::size_t n_out = net.layer_sizes()[l + 1];
        if (samples[l].size() != n_in) throw Error(ErrorCode::insufficient_samples, "one sample set per input neuron required");
        snet.edges[l].resize(n_in * n_out);
        for (std::size_t i = 0; i < n_in; ++i) {
            const auto& xs = samples[l][i];
            const std::set<double> distinct(xs.begin(), xs.end());
            if (distinct.size() < kMinFitSamples) {
                throw Error(ErrorCode::insufficient_samples, "edge input (" + std::to_string(l) + ", " +
                                                                 std::to_string(i) + ") has fewer than 8 distinct samples");
            }
            for (std::size_t j = 0; j < n_out; ++j) {
                const Spline phi = net.edge(l, j, i);
                std::vector<double> ys(xs.size());
                for (std::size_t s = 0; s < xs.size(); ++s) ys[s] = spline_eval(phi, xs[s]);
                EdgeAudit audit{l, j, i, xs.size(), {}};
                AffineFit best;
                bool have = false;
                for (std::size_t q = 0; q < kCandidateCount; ++q) {
                    const AffineFit fit = fit_affine(kCandidates[q], xs, ys);
                    audit.r2[q] = fit.r2;
                    if (!have || fit.r2 > best.r2 + kTie) {
                        best = fit;
                        have = true;
                    }
                }
                snet.edge(l, j, i) = best;
                snet.audit.push_back(audit);
            }
        }
    }
    return snet;
}

Matrix symbolic_eval(const SymbolicNetwork& snet, const Matrix& batch) {
    if (batch.cols() != snet.layer_sizes.front()) {
        throw Error(ErrorCode::shape_mismatch, "batch width does not match the symbolic network input");
    }
    Matrix x = batch;
    for (std::size_t l = 0; l < snet.layer_count(); ++l) {
        const std::size_t n_in = snet.layer_sizes[l];
        const std::size_t n_out = snet.layer_sizes[l + 1];
        Matrix y(x.rows(), n_out, 0.0);
        for (std::size_t s = 0; s < x.rows(); ++s) {
            for (std::size_t j = 0; j < n_out; ++j) {
                double acc = 0.0;
                for (std::size_t i = 0; i < n_in; ++i) acc += snet.edge(l, j, i)(x(s, i));
                y(s, j) = acc;
            }
        }
        x = std::move(y);
    }
    return x;
}

namespace {

std::string number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace

std::string candidate_expression(Candidate c, const std::string& t) {
    switch (c) {
    case Candidate::constant: return "1";
    case Candidate::identity: return t;
    case Candidate::square: return "(" + t + ")^2";
    case Candidate::cube: return "(" + t + ")^3";
    case Candidate::quartic: return "(" + t + ")^4";
    case Candidate::reciprocal: return "1/(" + t + ")";
    case Candidate::sqrt_abs: return "sqrt(abs(" + t + "))";
    case Candidate::exp: return "exp(" + t + ")";
    case Candidate::log_abs: return "log(abs(" + t + ")+1e-06)";
    case Candidate::abs: return "abs(" + t + ")";
    case Candidate::sin: return "sin(" + t + ")";
    case Candidate::cos: return "cos(" + t + ")";
    case Candidate::tanh: return "tanh(" + t + ")";
    case Candidate::sigmoid: return "sigmoid(" + t + ")";
    case Candidate::gaussian: return "exp(-(" + t + ")^2)";
    }
    return "?";
}

std::string formula_dump(const SymbolicNetwork& snet) {
    std::vector<std::string> current;
    for (std::size_t i = 0; i < snet.layer_sizes.front(); ++i) current.push_back("x" + std::to_string(i));
    for (std::size_t l = 0; l < snet.layer_count(); ++l) {
        const std::size_t n_in = snet.layer_sizes[l];
        const std::size_t n_out = snet.layer_sizes[l + 1];
        std::vector<std::string> next(n_out);
        for (std::size_t j = 0; j < n_out; ++j) {
            std::string sum;
            for (std::size_t i = 0; i < n_in; ++i) {
                const AffineFit& e = snet.edge(l, j, i);
                const std::string arg = number(e.a) + "*" + current[i] + " + " + number(e.b);
                if (!sum.empty()) sum += " + ";
                sum += number(e.c) + "*" + candidate_expression(e.candidate, arg) + " + " + number(e.d);
            }
            next[j] = (l + 1 < snet.layer_count()) ? "(" + sum + ")" : sum;
        }
        current = std::move(next);
    }
    std::ostringstream out;
    for (std::size_t j = 0; j < current.size(); ++j) out << "y" << j << " = " << current[j] << "\n";
    return out.str();
}

}  // namespace kanbench
