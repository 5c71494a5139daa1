#include "kanbench/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "kanbench/error.hpp"
#include "kanbench/kernels.hpp"

namespace kanbench {

AdamState adam_init(std::size_t n) {
    AdamState s;
    s.m.assign(n, 0.0);
    s.v.assign(n, 0.0);
    return s;
}

void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads, double lr) {
    if (state.m.size() != params.size() || state.v.size() != params.size() || grads.size() != params.size()) {
        throw Error(ErrorCode::dimension_mismatch, "Adam state, parameters and gradients must agree in size");
    }
    ++state.step;
    const double t = static_cast<double>(state.step);
    const double correction1 = 1.0 - std::pow(state.beta1, t);
    const double correction2 = 1.0 - std::pow(state.beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i];
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g;
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g * g;
        const double m_hat = state.m[i] / correction1;
        const double v_hat = state.v[i] / correction2;
        params[i] -= lr * m_hat / (std::sqrt(v_hat) + state.epsilon);
    }
}

namespace {

// Minimiser of the cubic through (x1, f1, g1) and (x2, f2, g2), kept inside
// [lo, hi]; falls back to bisection when the cubic has no real minimiser.
double cubic_interpolate(double x1, double f1, double g1, double x2, double f2, double g2, double lo, double hi) {
    const double d1 = g1 + g2 - 3.0 * (f1 - f2) / (x1 - x2);
    const double d2_square = d1 * d1 - g1 * g2;
    if (d2_square >= 0.0) {
        const double d2 = std::sqrt(d2_square);
        double t = (x1 <= x2) ? x2 - (x2 - x1) * ((g2 + d2 - d1) / (g2 - g1 + 2.0 * d2))
                              : x1 - (x1 - x2) * ((g1 + d2 - d1) / (g1 - g2 + 2.0 * d2));
        if (std::isfinite(t)) return std::clamp(t, lo, hi);
    }
    return 0.5 * (lo + hi);
}

double norm2(const std::vector<double>& v) {
    return std::sqrt(kernels::dot(v, v));
}

}  // namespace

LbfgsMinimizer::LbfgsMinimizer(Objective objective, std::vector<double> x0, LbfgsOptions options)
    : objective_(std::move(objective)), options_(options), x_(std::move(x0)) {
    for (double v : x_) {
        if (!std::isfinite(v)) throw Error(ErrorCode::non_finite, "L-BFGS start point is not finite");
    }
    g_.assign(x_.size(), 0.0);
    f_ = objective_(x_, g_);
    ++evals_;
    if (!std::isfinite(f_)) throw Error(ErrorCode::non_finite, "objective is not finite at the start point");
    if (grad_norm() <= options_.tolerance) status_ = LbfgsStatus::converged;
}

double LbfgsMinimizer::grad_norm() const noexcept { return norm2(g_); }

LbfgsMinimizer::Probe LbfgsMinimizer::evaluate(double t) {
    std::vector<double> trial(x_);
    kernels::axpy(t, direction_, trial);
    Probe p;
    p.t = t;
    p.g.assign(x_.size(), 0.0);
    p.f = objective_(trial, p.g);
    ++evals_;
    if (!std::isfinite(p.f)) p.f = std::numeric_limits<double>::infinity();
    p.gtd = kernels::dot(p.g, direction_);
    return p;
}

std::vector<double> LbfgsMinimizer::two_loop() const {
    std::vector<double> q(g_);
    const std::size_t m = s_hist_.size();
    std::vector<double> alpha(m);
    std::vector<double> rho(m);
    for (std::size_t i = m; i-- > 0;) {
        rho[i] = 1.0 / kernels::dot(y_hist_[i], s_hist_[i]);
        alpha[i] = rho[i] * kernels::dot(s_hist_[i], q);
        kernels::axpy(-alpha[i], y_hist_[i], q);
    }
    if (m > 0) {
        const double gamma = kernels::dot(s_hist_[m - 1], y_hist_[m - 1]) / kernels::dot(y_hist_[m - 1], y_hist_[m - 1]);
        for (double& v : q) v *= gamma;
    }
    for (std::size_t i = 0; i < m; ++i) {
        const double beta = rho[i] * kernels::dot(y_hist_[i], q);
        kernels::axpy(alpha[i] - beta, s_hist_[i], q);
    }
    for (double& v : q) v = -v;
    return q;
}

bool LbfgsMinimizer::step() {
    if (status_ != LbfgsStatus::running) return false;
    if (iterations_ >= options_.max_iters) {
        status_ = LbfgsStatus::max_iters;
        return false;
    }

    direction_ = two_loop();
    double gtd0 = kernels::dot(g_, direction_);
    if (!(gtd0 < 0.0)) {
        // Lost positive definiteness; restart from steepest descent.
        s_hist_.clear();
        y_hist_.clear();
        direction_ = two_loop();
        gtd0 = kernels::dot(g_, direction_);
    }
    double t = 1.0;
    if (s_hist_.empty()) {
        double l1 = 0.0;
        for (double v : g_) l1 += std::abs(v);
        t = std::min(1.0, 1.0 / l1);
    }

    const double f0 = f_;
    const std::size_t evals_before = evals_;
    Probe prev{0.0, f0, gtd0, g_};
    Probe accepted;
    bool done = false;
    bool bracketed = false;
    Probe lo;
    Probe hi;
    std::size_t ls_evals = 0;

    // Bracketing phase.
    while (ls_evals < options_.max_line_search_evals) {
        Probe cur = evaluate(t);
        ++ls_evals;
        if (cur.f > f0 + options_.c1 * cur.t * gtd0 || (ls_evals > 1 && cur.f >= prev.f)) {
            lo = prev;
            hi = cur;
            bracketed = true;
            break;
        }
        if (std::abs(cur.gtd) <= -options_.c2 * gtd0) {
            accepted = cur;
            done = true;
            break;
        }
        if (cur.gtd >= 0.0) {
            lo = cur;
            hi = prev;
            bracketed = true;
            break;
        }
        const double min_step = cur.t + 0.01 * (cur.t - prev.t);
        const double max_step = cur.t * 10.0;
        const double next = cubic_interpolate(prev.t, prev.f, prev.gtd, cur.t, cur.f, cur.gtd, min_step, max_step);
        prev = std::move(cur);
        t = next;
    }

    // Zoom phase: lo always satisfies sufficient decrease with the lower value.
    while (!done && bracketed && ls_evals < options_.max_line_search_evals) {
        const double a = std::min(lo.t, hi.t);
        const double b = std::max(lo.t, hi.t);
        if ((b - a) * norm2(direction_) < 1e-14) break;
        double trial = cubic_interpolate(lo.t, lo.f, lo.gtd, hi.t, hi.f, hi.gtd, a, b);
        // Keep the trial away from the bracket ends.
        const double margin = 0.1 * (b - a);
        if (std::min(b - trial, trial - a) < margin) trial = (std::abs(trial - b) < std::abs(trial - a)) ? b - margin : a + margin;
        Probe cur = evaluate(trial);
        ++ls_evals;
        if (cur.f > f0 + options_.c1 * cur.t * gtd0 || cur.f >= lo.f) {
            hi = std::move(cur);
        } else {
            if (std::abs(cur.gtd) <= -options_.c2 * gtd0) {
                accepted = std::move(cur);
                done = true;
                break;
            }
            if (cur.gtd * (hi.t - lo.t) >= 0.0) hi = lo;
            lo = std::move(cur);
        }
    }

    if (!done) {
        // Fall back to the best sufficient-decrease point found, if any.
        if (bracketed && lo.t > 0.0 && lo.f < f0) {
            accepted = lo;
        } else if (!bracketed && prev.t > 0.0 && prev.f < f0) {
            accepted = prev;
        } else {
            status_ = LbfgsStatus::line_search_failure;
            return false;
        }
    }

    std::vector<double> x_new(x_);
    kernels::axpy(accepted.t, direction_, x_new);
    std::vector<double> s(x_.size());
    std::vector<double> y(x_.size());
    for (std::size_t i = 0; i < x_.size(); ++i) {
        s[i] = x_new[i] - x_[i];
        y[i] = accepted.g[i] - g_[i];
    }
    if (kernels::dot(s, y) > 1e-10) {
        if (s_hist_.size() == options_.history) {
            s_hist_.erase(s_hist_.begin());
            y_hist_.erase(y_hist_.begin());
        }
        s_hist_.push_back(std::move(s));
        y_hist_.push_back(std::move(y));
    }
    x_ = std::move(x_new);
    g_ = std::move(accepted.g);
    f_ = accepted.f;
    ++iterations_;
    trace_.push_back({iterations_, f_, grad_norm(), accepted.t, evals_ - evals_before});

    if (!done) {
        status_ = LbfgsStatus::line_search_failure;
    } else if (grad_norm() <= options_.tolerance) {
        status_ = LbfgsStatus::converged;
    } else if (iterations_ >= options_.max_iters) {
        status_ = LbfgsStatus::max_iters;
    }
    return true;
}

LbfgsResult lbfgs_minimize(Objective objective, std::vector<double> x0, LbfgsOptions options) {
    LbfgsMinimizer minimizer(std::move(objective), std::move(x0), options);
    while (minimizer.step()) {
    }
    return {minimizer.x(), minimizer.value(), minimizer.status(), minimizer.trace()};
}

}  // namespace kanbench
