#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace kanbench {

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    std::uint64_t step = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

AdamState adam_init(std::size_t n);

/// One bias-corrected Adam update of `params` in place.
void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads, double lr);

/// Returns f(x) and writes ∇f(x) into grad.
using Objective = std::function<double(std::span<const double> x, std::span<double> grad)>;

struct LbfgsOptions {
    std::size_t history = 10;
    std::size_t max_iters = 100;
    double tolerance = 1e-8;  // on ‖∇f‖₂
    double c1 = 1e-4;
    double c2 = 0.9;
    std::size_t max_line_search_evals = 25;
};

enum class LbfgsStatus { running, converged, max_iters, line_search_failure };

struct LbfgsIteration {
    std::size_t iteration = 0;
    double value = 0.0;
    double grad_norm = 0.0;
    double step = 0.0;
    std::size_t evaluations = 0;
};

struct LbfgsResult {
    std::vector<double> x;
    double value = 0.0;
    LbfgsStatus status = LbfgsStatus::running;
    std::vector<LbfgsIteration> trace;
};

/// Limited-memory BFGS with a strong-Wolfe line search, driven one
/// iteration at a time so callers can interleave bookkeeping.
class LbfgsMinimizer {
public:
    LbfgsMinimizer(Objective objective, std::vector<double> x0, LbfgsOptions options = {});

    /// Performs one iteration. Returns false once the minimizer has stopped
    /// (see status()).
    bool step();

    const std::vector<double>& x() const noexcept { return x_; }
    double value() const noexcept { return f_; }
    double grad_norm() const noexcept;
    LbfgsStatus status() const noexcept { return status_; }
    std::size_t iterations() const noexcept { return iterations_; }
    /// Search direction used by the most recent iteration.
    const std::vector<double>& last_direction() const noexcept { return direction_; }
    const std::vector<LbfgsIteration>& trace() const noexcept { return trace_; }

private:
    struct Probe {
        double t = 0.0;
        double f = 0.0;
        double gtd = 0.0;
        std::vector<double> g;
    };
    Probe evaluate(double t);
    std::vector<double> two_loop() const;

    Objective objective_;
    LbfgsOptions options_;
    std::vector<double> x_;
    std::vector<double> g_;
    double f_ = 0.0;
    std::vector<std::vector<double>> s_hist_;
    std::vector<std::vector<double>> y_hist_;
    std::vector<double> direction_;
    std::size_t iterations_ = 0;
    std::size_t evals_ = 0;
    LbfgsStatus status_ = LbfgsStatus::running;
    std::vector<LbfgsIteration> trace_;
};

LbfgsResult lbfgs_minimize(Objective objective, std::vector<double> x0, LbfgsOptions options = {});

}  // namespace kanbench
