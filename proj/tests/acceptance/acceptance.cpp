// Acceptance suite. Prints one PASS/FAIL/BLOCKED line per criterion.
//
//   acceptance                 run every criterion
//   acceptance --only <id>     run one criterion ("3" or "3-wine-smote")
//   acceptance --work <dir>    scratch directory for benchmark outputs
//
// Exit status: 0 all selected criteria passed, 1 any failed, 77 when the
// only non-passing criteria are blocked by missing input data.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "c_harness.hpp"
#include "kanbench/bench.hpp"
#include "kanbench/optim.hpp"
#include "kanbench/serialize.hpp"
#include "kanbench/spline.hpp"
#include "oracles.hpp"

using namespace kanbench;
namespace fs = std::filesystem;

namespace {

const fs::path kRoot = KANBENCH_SOURCE_DIR;
fs::path g_work = fs::temp_directory_path() / "kanbench_acceptance";

enum class Status { pass, fail, blocked };

struct Outcome {
    Status status = Status::pass;
    std::string detail;
};

std::string fmt(const char* pattern, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, pattern, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

BenchConfig default_config() { return load_bench_config(kRoot / "config/default_bench.json"); }

struct CachedRun {
    BenchReport report;
    double seconds = 0;
};

// The default benchmark is shared by several criteria within one process.
const CachedRun& default_run() {
    static std::optional<CachedRun> cached;
    if (!cached) {
        BenchConfig cfg = default_config();
        cfg.output_dir = g_work / "default_run";
        const auto t0 = std::chrono::steady_clock::now();
        CachedRun r;
        r.report = run_benchmark(cfg);
        r.seconds = seconds_since(t0);
        emit_report(r.report, cfg.output_dir);
        cached = std::move(r);
    }
    return *cached;
}

const DatasetResult* find_result(const BenchReport& r, const std::string& name) {
    for (const auto& d : r.datasets) {
        if (d.name == name) return &d;
    }
    return nullptr;
}

std::vector<std::string> missing_datasets(const BenchReport& r) {
    std::vector<std::string> out;
    for (const auto& d : r.datasets) {
        if (!d.ok) out.push_back(d.name);
    }
    return out;
}

std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (const auto& x : v) s += (s.empty() ? "" : ", ") + x;
    return s;
}

// 1 -------------------------------------------------------------------------
Outcome param_counts() {
    const auto t0 = std::chrono::steady_clock::now();
    const BenchConfig cfg = default_config();
    std::vector<std::size_t> got;
    for (const auto& d : cfg.datasets) {
        got.push_back(mlp_init(d.mlp.layer_sizes, d.mlp.activations, 0).params().size());
        got.push_back(kan_init(d.kan.layer_sizes, d.kan.grid, d.kan.degree, 0).params().size());
        if (got[got.size() - 2] != mlp_param_count(d.mlp.layer_sizes)) return {Status::fail, "mlp storage != formula"};
        if (got.back() != kan_param_count(d.kan.layer_sizes, d.kan.grid, d.kan.degree)) {
            return {Status::fail, "kan storage != formula"};
        }
    }
    const std::vector<std::size_t> want{65, 36, 739, 448, 892, 414, 4866, 2160};
    std::string list;
    for (auto n : got) list += std::to_string(n) + " ";
    const double s = seconds_since(t0);
    const bool ok = got == want && s < 1.0;
    return {ok ? Status::pass : Status::fail, fmt("counts %s(want 65 36 739 448 892 414 4866 2160), %.3f s", list.c_str(), s)};
}

// 2 -------------------------------------------------------------------------
Outcome moons() {
    const auto& run = default_run();
    const DatasetResult* d = find_result(run.report, "moons");
    if (!d || !d->ok) return {Status::fail, "moons row did not complete: " + (d ? d->error : "absent")};
    const double mlp = d->rows[0].pre_accuracy, pre = d->rows[1].pre_accuracy, post = *d->rows[1].post_accuracy;
    const double t = d->rows[0].train_seconds + d->rows[1].train_seconds;
    const bool ok = mlp >= 0.95 && pre >= 0.95 && std::abs(post - pre) <= 0.03 && t <= 300;
    return {ok ? Status::pass : Status::fail,
            fmt("MLP %.4f (>= 0.95), KAN pre %.4f (>= 0.95), post %.4f (|post-pre| = %.4f <= 0.03), train %.1f s",
                mlp, pre, post, std::abs(post - pre), t)};
}

// 3 -------------------------------------------------------------------------
Outcome wine() {
    const auto& run = default_run();
    const DatasetResult* d = find_result(run.report, "wine");
    if (!d || !d->ok) return {Status::fail, "wine row did not complete: " + (d ? d->error : "absent")};
    const double mlp = d->rows[0].pre_accuracy, kan = d->rows[1].pre_accuracy;
    const bool ok = d->samples == 213 && mlp >= 0.90 && kan >= 0.90;
    return {ok ? Status::pass : Status::fail,
            fmt("samples after SMOTE %zu (want 213), MLP %.4f, KAN %.4f (both >= 0.90)", d->samples, mlp, kan)};
}

// 4 -------------------------------------------------------------------------
Outcome drybean() {
    const BenchConfig cfg = default_config();
    const DatasetEntry& e = find_dataset(cfg, "drybean");
    const bool fewer = kan_param_count(e.kan.layer_sizes, e.kan.grid, e.kan.degree) == 414 &&
                       mlp_param_count(e.mlp.layer_sizes) == 892;
    if (!fs::exists(e.source.path)) {
        return {Status::blocked, fmt("%s not present (dataset not bundled); params 414 < 892 %s",
                                     e.source.path.string().c_str(), fewer ? "holds" : "VIOLATED")};
    }
    const auto& run = default_run();
    const DatasetResult* d = find_result(run.report, "drybean");
    if (!d || !d->ok) return {Status::fail, "drybean row did not complete: " + (d ? d->error : "absent")};
    const double mlp = d->rows[0].pre_accuracy, kan = d->rows[1].pre_accuracy;
    const bool ok = fewer && d->rows[1].params < d->rows[0].params && mlp >= 0.88 && kan >= 0.88;
    return {ok ? Status::pass : Status::fail,
            fmt("MLP %.4f, KAN %.4f (both >= 0.88), params %zu < %zu", mlp, kan, d->rows[1].params, d->rows[0].params)};
}

// 5 -------------------------------------------------------------------------
Outcome degradation() {
    const auto& run = default_run();
    std::string table;
    bool ok = true;
    std::size_t checked = 0;
    for (const auto& d : run.report.datasets) {
        if (!d.ok) continue;
        const auto& k = d.rows[1];
        const bool row_ok = *k.post_accuracy <= k.pre_accuracy + 0.01;
        ok = ok && row_ok;
        ++checked;
        table += fmt("%s pre %.4f post %.4f%s; ", d.name.c_str(), k.pre_accuracy, *k.post_accuracy, row_ok ? "" : " VIOLATION");
    }
    const auto missing = missing_datasets(run.report);
    std::string detail = table + "post <= pre + 0.01 on " + std::to_string(checked) + " dataset(s)";
    if (!missing.empty()) detail += "; not run: " + join(missing);
    if (!ok) return {Status::fail, detail};
    if (checked == 0) return {Status::blocked, detail};
    return {Status::pass, detail};
}

// 6 -------------------------------------------------------------------------
Outcome spline_properties() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> g_dist(1, 16), k_dist(1, 5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst_pou = 0, worst_deriv = 0;
    std::size_t negatives = 0, support = 0, cases = 0;
    while (cases < 1000) {
        const int g = g_dist(rng), k = k_dist(rng);
        const double lo = -5 + 4 * u(rng), hi = lo + 0.2 + 6 * u(rng);
        const KnotVector kv = build_knot_vector(lo, hi, g, k);
        const double x = lo + (hi - lo) * u(rng);
        // Finite differences are only meaningful away from knots.
        bool near_knot = false;
        for (double t : kv.knots) near_knot = near_knot || std::abs(x - t) < 1e-4 * kv.spacing();
        if (near_knot) continue;
        ++cases;
        const auto b = basis_values(kv, x);
        double sum = 0;
        for (std::size_t i = 0; i < b.size(); ++i) {
            sum += b[i];
            negatives += b[i] < 0.0;
            const bool inside = kv.knots[i] <= x && x < kv.knots[i + k + 1];
            support += !inside && b[i] != 0.0;
        }
        worst_pou = std::max(worst_pou, std::abs(sum - 1.0));
        const auto d = basis_derivatives(kv, x);
        double scale = 0;
        for (double v : d) scale = std::max(scale, std::abs(v));
        const double h = 1e-6 * kv.spacing();
        for (std::size_t i = 0; i < d.size(); ++i) {
            const double fd = (basis_values(kv, x + h)[i] - basis_values(kv, x - h)[i]) / (2 * h);
            // relative to the largest derivative at this point so that
            // nearly-vanishing entries do not divide by ~0
            worst_deriv = std::max(worst_deriv, std::abs(d[i] - fd) / std::max(std::abs(fd), 1e-3 * scale));
        }
    }
    const double s = seconds_since(t0);
    const bool ok = worst_pou <= 1e-9 && negatives == 0 && support == 0 && worst_deriv <= 1e-5 && s < 10;
    return {ok ? Status::pass : Status::fail,
            fmt("%zu cases: max |sum-1| %.2e, negatives %zu, support violations %zu, max derivative rel err %.2e, %.2f s",
                cases, worst_pou, negatives, support, worst_deriv, s)};
}

// 7 -------------------------------------------------------------------------
double weighted(const Matrix& out, const Matrix& w) {
    double s = 0;
    for (std::size_t i = 0; i < out.size(); ++i) s += out.data()[i] * w.data()[i];
    return s;
}

bool kan_near_knot(const KanNetwork& net, const KanForwardCache& cache) {
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        const Matrix& a = cache.activations[l];
        for (std::size_t r = 0; r < a.rows(); ++r) {
            for (std::size_t i = 0; i < a.cols(); ++i) {
                const auto& kv = net.knots(l, i);
                for (double t : kv.knots) {
                    if (std::abs(a(r, i) - t) < 1e-3 * kv.spacing()) return true;
                }
            }
        }
    }
    return false;
}

Outcome gradient_checks() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<std::size_t> width(1, 4), depth(2, 4);
    std::uniform_real_distribution<double> u(-1, 1);
    const double h = 1e-6;
    double worst_kan = 0, worst_mlp = 0;
    int kan_nets = 0, mlp_nets = 0;
    while (kan_nets < 20) {
        std::vector<std::size_t> sizes(depth(rng));
        for (auto& s : sizes) s = width(rng);
        auto net = kan_init(sizes, 2 + static_cast<int>(rng() % 5), 1 + static_cast<int>(rng() % 3), rng());
        for (double& c : net.params()) c = 0.6 * u(rng);
        Matrix x(3, sizes[0]), w(3, sizes.back());
        for (double& v : x.data()) v = 0.95 * u(rng);
        for (double& v : w.data()) v = u(rng);
        auto [out, cache] = kan_forward(net, x);
        if (kan_near_knot(net, cache)) continue;
        ++kan_nets;
        const auto g = kan_backward(net, cache, w);
        for (std::size_t p = 0; p < g.size(); ++p) {
            KanNetwork a = net, b = net;
            a.params()[p] += h;
            b.params()[p] -= h;
            const double fd = (weighted(kan_predict(a, x), w) - weighted(kan_predict(b, x), w)) / (2 * h);
            worst_kan = std::max(worst_kan, oracle::rel_error(g[p], fd, 1e-6));
        }
    }
    const Activation hidden[] = {Activation::relu, Activation::sigmoid};
    const Activation last[] = {Activation::sigmoid, Activation::softmax, Activation::linear};
    while (mlp_nets < 20) {
        std::vector<std::size_t> sizes(depth(rng));
        for (auto& s : sizes) s = width(rng);
        std::vector<Activation> acts;
        for (std::size_t l = 0; l + 2 < sizes.size(); ++l) acts.push_back(hidden[rng() % 2]);
        acts.push_back(last[rng() % 3]);
        auto net = mlp_init(sizes, acts, rng());
        for (double& p : net.params()) p = u(rng);
        Matrix x(3, sizes[0]), w(3, sizes.back());
        for (double& v : x.data()) v = u(rng);
        for (double& v : w.data()) v = u(rng);
        auto [out, cache] = mlp_forward(net, x);
        bool kink = false;
        for (std::size_t l = 0; l + 1 < net.layer_count(); ++l) {
            if (acts[l] != Activation::relu) continue;
            for (double z : cache.pre[l].data()) kink = kink || std::abs(z) < 1e-4;
        }
        if (kink) continue;
        ++mlp_nets;
        const auto g = mlp_backward(net, cache, w);
        for (std::size_t p = 0; p < g.size(); ++p) {
            MlpNetwork a = net, b = net;
            a.params()[p] += h;
            b.params()[p] -= h;
            const double fd = (weighted(mlp_predict(a, x), w) - weighted(mlp_predict(b, x), w)) / (2 * h);
            worst_mlp = std::max(worst_mlp, oracle::rel_error(g[p], fd, 1e-6));
        }
    }
    const double s = seconds_since(t0);
    const bool ok = worst_kan <= 1e-4 && worst_mlp <= 1e-4 && s < 30;
    return {ok ? Status::pass : Status::fail,
            fmt("20 KAN nets max rel err %.2e, 20 MLP nets max rel err %.2e (<= 1e-4), %.2f s", worst_kan, worst_mlp, s)};
}

// 8 -------------------------------------------------------------------------
Outcome optimizer_oracles() {
    auto rosen = [](std::span<const double> x, std::span<double> g) {
        const double a = 1 - x[0], b = x[1] - x[0] * x[0];
        g[0] = -2 * a - 400 * x[0] * b;
        g[1] = 200 * b;
        return a * a + 100 * b * b;
    };
    LbfgsOptions opt;
    opt.max_iters = 200;
    opt.tolerance = 1e-12;
    const auto r = lbfgs_minimize(rosen, {-1.2, 1.0}, opt);
    const double err = std::max(std::abs(r.x[0] - 1), std::abs(r.x[1] - 1));

    // Hand-derived: x0 = 1, lr = 0.01, gradients 0.5, -2, 1 (see unit tests).
    AdamState st = adam_init(1);
    std::vector<double> x{1.0};
    const double grads[] = {0.5, -2.0, 1.0};
    const double expect[] = {0.990000000199999996, 0.99559503510200558975, 0.99669677173323052363};
    double adam_err = 0;
    for (int t = 0; t < 3; ++t) {
        std::vector<double> g{grads[t]};
        adam_step(st, x, g, 0.01);
        adam_err = std::max(adam_err, std::abs(x[0] - expect[t]));
    }
    const bool ok = err <= 1e-6 && r.trace.size() <= 200 && adam_err <= 1e-12;
    return {ok ? Status::pass : Status::fail,
            fmt("L-BFGS Rosenbrock |x-(1,1)|inf %.2e in %zu iterations; Adam max trace error %.2e", err,
                r.trace.size(), adam_err)};
}

// 9 -------------------------------------------------------------------------
Outcome symbolic_recovery() {
    const double pi = std::numbers::pi;
    KanNetwork net({1, 1}, 24, 3, {{-pi, pi}});
    auto target = [](double x) { return 1.5 * std::sin(2 * x - 0.3) + 0.2; };
    std::vector<double> xs, ys;
    for (int i = 0; i <= 400; ++i) {
        xs.push_back(-pi + 2 * pi * i / 400.0);
        ys.push_back(target(xs.back()));
    }
    const Spline s = fit_spline_lsq(xs, ys, net.knots(0, 0), 1e-10);
    std::copy(s.coeffs.begin(), s.coeffs.end(), net.edge_coeffs(0, 0, 0).begin());
    Matrix x(xs.size(), 1);
    for (std::size_t i = 0; i < xs.size(); ++i) x(i, 0) = xs[i];
    const SymbolicNetwork snet = symbolify_network(net, collect_edge_samples(net, x));
    const AffineFit& e = snet.edge(0, 0, 0);
    double sq = 0;
    for (double v : xs) sq += std::pow(e(v) - target(v), 2);
    const double rms = std::sqrt(sq / xs.size());
    const bool ok = e.candidate == Candidate::sin && e.r2 >= 0.999 && rms <= 1e-2;
    return {ok ? Status::pass : Status::fail,
            fmt("selected %s, R2 %.6f (>= 0.999), RMS vs target %.2e (<= 1e-2)", std::string(to_string(e.candidate)).c_str(),
                e.r2, rms)};
}

// 10 ------------------------------------------------------------------------
Outcome codegen_equivalence() {
    const auto& run = default_run();
    const DatasetResult* d = find_result(run.report, "moons");
    if (!d || !d->ok) return {Status::fail, "moons row did not complete"};
    Matrix x(1000, 2);
    std::mt19937_64 rng(10);
    for (std::size_t c = 0; c < 2; ++c) {
        const Interval dom = d->kan->domains(0)[c];
        std::uniform_real_distribution<double> u(dom.lo, dom.hi);
        for (std::size_t r = 0; r < 1000; ++r) x(r, c) = static_cast<float>(u(rng));
    }
    const std::size_t mlp_sites = count_multiplication_sites(d->mlp_source);
    const std::size_t sym_sites = count_multiplication_sites(d->symbolic_source);
    const bool audit = mlp_sites == d->rows[0].cost.muls && sym_sites == d->rows[1].cost.muls;
    const std::string audit_text = fmt("mul-site audit %zu/%zu vs cost %zu/%zu", mlp_sites, sym_sites,
                                       d->rows[0].cost.muls, d->rows[1].cost.muls);
    const auto mlp_out = harness::run_emitted(d->mlp_source, "moons_mlp_infer", x, 1, "acc_mlp");
    const auto sym_out = harness::run_emitted(d->symbolic_source, "moons_kan_symbolic_infer", x, 1, "acc_sym");
    if (!mlp_out || !sym_out) {
        std::fprintf(stderr, "warning: no C99 toolchain; falling back to the static audit\n");
        return {audit ? Status::pass : Status::fail, "no C compiler; " + audit_text};
    }
    if (mlp_out->rows() != 1000 || sym_out->rows() != 1000) return {Status::fail, "emitted source failed to build/run"};
    const Matrix mlp_ref = mlp_predict(*d->mlp, x), sym_ref = symbolic_eval(*d->symbolic, x);
    double worst_mlp = 0, worst_sym = 0;
    for (std::size_t i = 0; i < 1000; ++i) {
        worst_mlp = std::max(worst_mlp, std::abs(mlp_out->data()[i] - mlp_ref.data()[i]));
        worst_sym = std::max(worst_sym, std::abs(sym_out->data()[i] - sym_ref.data()[i]));
    }
    const bool ok = worst_mlp <= 1e-5 && worst_sym <= 1e-5 && audit;
    return {ok ? Status::pass : Status::fail,
            fmt("1000 inputs: MLP max abs diff %.2e, symbolic KAN max abs diff %.2e (<= 1e-5); ", worst_mlp, worst_sym) +
                audit_text};
}

// 11 ------------------------------------------------------------------------
Outcome cost_direction() {
    const auto& run = default_run();
    std::string detail;
    bool ok = true;
    for (const auto& d : run.report.datasets) {
        if (!d.ok) continue;
        const CostReport& m = d.rows[0].cost;
        const CostReport& k = d.rows[1].cost;
        const bool weighted_ok = k.weighted_dsp_equiv() > m.weighted_dsp_equiv();
        const bool trans_ok = k.transcendental_calls > m.transcendental_calls;
        ok = ok && weighted_ok && trans_ok;
        detail += fmt("%s: weighted KAN %g vs MLP %g%s, transcendental %zu vs %zu%s; ", d.name.c_str(),
                      k.weighted_dsp_equiv(), m.weighted_dsp_equiv(), weighted_ok ? "" : " (NOT greater)",
                      k.transcendental_calls, m.transcendental_calls, trans_ok ? "" : " (NOT greater)");
    }
    const auto missing = missing_datasets(run.report);
    if (!missing.empty()) detail += "not run: " + join(missing);
    if (!ok) return {Status::fail, detail};
    if (!missing.empty()) return {Status::blocked, detail};
    return {Status::pass, detail};
}

// 12 ------------------------------------------------------------------------
std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome determinism() {
    std::vector<fs::path> dirs = {g_work / "det_a", g_work / "det_b"};
    for (const auto& dir : dirs) {
        fs::remove_all(dir);
        BenchConfig cfg = default_config();
        cfg.output_dir = dir;
        emit_report(run_benchmark(cfg), dir);
    }
    std::size_t compared = 0;
    std::vector<std::string> differ;
    for (const auto& entry : fs::directory_iterator(dirs[0])) {
        const std::string name = entry.path().filename().string();
        if (name != "report.csv" && name.rfind("loss_", 0) != 0) continue;
        ++compared;
        if (slurp(entry.path()) != slurp(dirs[1] / name)) differ.push_back(name);
    }
    const std::string detail =
        fmt("%zu files compared (report.csv + loss CSVs), %zu differ", compared, differ.size()) +
        (differ.empty() ? "" : ": " + join(differ));
    return {differ.empty() && compared > 1 ? Status::pass : Status::fail, detail};
}

struct Criterion {
    int number;
    const char* id;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    std::string only;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--only" && i + 1 < argc) only = argv[++i];
        else if (a == "--work" && i + 1 < argc) g_work = argv[++i];
        else {
            std::fprintf(stderr, "usage: acceptance [--only <id>] [--work <dir>]\n");
            return 2;
        }
    }
    const std::vector<Criterion> criteria = {
        {1, "param-counts", param_counts},       {2, "moons", moons},
        {3, "wine-smote", wine},                 {4, "drybean", drybean},
        {5, "degradation", degradation},         {6, "spline-properties", spline_properties},
        {7, "gradient-checks", gradient_checks}, {8, "optimizer-oracles", optimizer_oracles},
        {9, "symbolic-recovery", symbolic_recovery}, {10, "codegen-equivalence", codegen_equivalence},
        {11, "cost-direction", cost_direction},  {12, "determinism", determinism},
    };
    bool any_fail = false, any_blocked = false, matched = false;
    for (const auto& c : criteria) {
        const std::string full = std::to_string(c.number) + "-" + c.id;
        if (!only.empty() && only != full && only != std::to_string(c.number)) continue;
        matched = true;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {Status::fail, std::string("exception: ") + e.what()};
        }
        const char* tag = o.status == Status::pass ? "PASS" : o.status == Status::fail ? "FAIL" : "BLOCKED";
        std::printf("[%s] criterion %d (%s): %s [%.2f s]\n", tag, c.number, c.id, o.detail.c_str(), seconds_since(t0));
        std::fflush(stdout);
        any_fail = any_fail || o.status == Status::fail;
        any_blocked = any_blocked || o.status == Status::blocked;
    }
    if (!matched) {
        std::fprintf(stderr, "no criterion matches '%s'\n", only.c_str());
        return 2;
    }
    if (any_fail) return 1;
    return any_blocked ? 77 : 0;
}
