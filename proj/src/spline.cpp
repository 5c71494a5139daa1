#include "kanbench/spline.hpp"

#include <algorithm>
#include <cmath>

#include "kanbench/error.hpp"
#include "kanbench/linalg.hpp"

namespace kanbench {

namespace {

constexpr double kRidgeFloor = 1e-8;

// Cox-de Boor triangle for degree p at interval `span` (Piegl & Tiller,
// BasisFuns). out has p + 1 entries for basis functions span-p .. span.
void cox_de_boor(const std::vector<double>& t, std::size_t span, int p, double x, double* out) {
    double left[16];
    double right[16];
    out[0] = 1.0;
    for (int j = 1; j <= p; ++j) {
        left[j] = x - t[span + 1 - j];
        right[j] = t[span + j] - x;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            const double tmp = out[r] / (right[r + 1] + left[j - r]);
            out[r] = saved + right[r + 1] * tmp;
            saved = left[j - r] * tmp;
        }
        out[j] = saved;
    }
}

}  // namespace

double KnotVector::clamp(double x) const noexcept {
    return std::clamp(x, domain_lo, domain_hi);
}

KnotVector build_knot_vector(double domain_lo, double domain_hi, int grid, int degree) {
    if (!(domain_lo < domain_hi) || !std::isfinite(domain_lo) || !std::isfinite(domain_hi)) {
        throw Error(ErrorCode::invalid_domain, "domain_lo must be < domain_hi");
    }
    if (grid < 1) throw Error(ErrorCode::invalid_grid, "grid interval count must be >= 1");
    if (degree < 0 || degree > 15) throw Error(ErrorCode::invalid_grid, "degree must lie in [0, 15]");

    KnotVector kv;
    kv.domain_lo = domain_lo;
    kv.domain_hi = domain_hi;
    kv.grid = grid;
    kv.degree = degree;
    const double h = (domain_hi - domain_lo) / grid;
    const int count = grid + 2 * degree + 1;
    kv.knots.resize(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) kv.knots[i] = domain_lo + (i - degree) * h;
    kv.knots[degree] = domain_lo;
    kv.knots[degree + grid] = domain_hi;
    return kv;
}

std::size_t find_span(const KnotVector& kv, double x) {
    const double cx = kv.clamp(x);
    const auto k = static_cast<std::size_t>(kv.degree);
    const std::size_t last = k + static_cast<std::size_t>(kv.grid) - 1;
    auto guess = static_cast<std::ptrdiff_t>(std::floor((cx - kv.domain_lo) / kv.spacing())) +
                 static_cast<std::ptrdiff_t>(k);
    std::size_t span = static_cast<std::size_t>(
        std::clamp<std::ptrdiff_t>(guess, static_cast<std::ptrdiff_t>(k), static_cast<std::ptrdiff_t>(last)));
    // Correct floating-point misses of the closed-form guess against the stored knots.
    while (span > k && cx < kv.knots[span]) --span;
    while (span < last && cx >= kv.knots[span + 1]) ++span;
    return span;
}

std::size_t local_basis(const KnotVector& kv, double x, std::span<double> out) {
    const std::size_t span = find_span(kv, x);
    cox_de_boor(kv.knots, span, kv.degree, kv.clamp(x), out.data());
    return span - static_cast<std::size_t>(kv.degree);
}

std::size_t local_basis_derivatives(const KnotVector& kv, double x, std::span<double> out) {
    const int k = kv.degree;
    if (k == 0) throw Error(ErrorCode::degree_zero, "degree-0 B-splines have no classical derivative");
    const std::size_t span = find_span(kv, x);
    const std::size_t first = span - static_cast<std::size_t>(k);
    if (x < kv.domain_lo || x > kv.domain_hi) {
        std::fill(out.begin(), out.begin() + k + 1, 0.0);
        return first;
    }
    // Degree k-1 values at this span cover basis functions span-k+1 .. span.
    double lower[16];
    cox_de_boor(kv.knots, span, k - 1, x, lower);
    const auto& t = kv.knots;
    for (int m = 0; m <= k; ++m) {
        const std::size_t i = first + static_cast<std::size_t>(m);
        // B'_{i,k} = k/(t_{i+k}-t_i) B_{i,k-1} - k/(t_{i+k+1}-t_{i+1}) B_{i+1,k-1}
        const double left = (m >= 1) ? lower[m - 1] : 0.0;
        const double right = (m <= k - 1) ? lower[m] : 0.0;
        out[m] = k * left / (t[i + k] - t[i]) - k * right / (t[i + k + 1] - t[i + 1]);
    }
    return first;
}

std::vector<double> basis_values(const KnotVector& kv, double x) {
    std::vector<double> dense(kv.basis_count(), 0.0);
    double local[16];
    const std::size_t first = local_basis(kv, x, {local, static_cast<std::size_t>(kv.degree + 1)});
    for (int m = 0; m <= kv.degree; ++m) dense[first + m] = local[m];
    return dense;
}

std::vector<double> basis_derivatives(const KnotVector& kv, double x) {
    std::vector<double> dense(kv.basis_count(), 0.0);
    double local[16];
    const std::size_t first =
        local_basis_derivatives(kv, x, {local, static_cast<std::size_t>(kv.degree + 1)});
    for (int m = 0; m <= kv.degree; ++m) dense[first + m] = local[m];
    return dense;
}

double spline_eval(const Spline& s, double x) {
    double local[16];
    const std::size_t first = local_basis(s.kv, x, {local, static_cast<std::size_t>(s.kv.degree + 1)});
    double acc = 0.0;
    for (int m = 0; m <= s.kv.degree; ++m) acc += s.coeffs[first + m] * local[m];
    return acc;
}

double spline_derivative(const Spline& s, double x) {
    double local[16];
    const std::size_t first =
        local_basis_derivatives(s.kv, x, {local, static_cast<std::size_t>(s.kv.degree + 1)});
    double acc = 0.0;
    for (int m = 0; m <= s.kv.degree; ++m) acc += s.coeffs[first + m] * local[m];
    return acc;
}

Spline fit_spline_lsq(std::span<const double> xs, std::span<const double> ys, const KnotVector& kv,
                      double ridge) {
    if (xs.empty() || xs.size() != ys.size()) {
        throw Error(ErrorCode::empty_input, "fit_spline_lsq needs equally sized, non-empty samples");
    }
    const std::size_t n = kv.basis_count();
    const std::size_t width = static_cast<std::size_t>(kv.degree + 1);
    std::vector<double> normal(n * n, 0.0);
    std::vector<double> rhs(n, 0.0);
    double local[16];
    for (std::size_t s = 0; s < xs.size(); ++s) {
        const std::size_t first = local_basis(kv, xs[s], {local, width});
        for (std::size_t a = 0; a < width; ++a) {
            rhs[first + a] += local[a] * ys[s];
            for (std::size_t b = 0; b < width; ++b) normal[(first + a) * n + first + b] += local[a] * local[b];
        }
    }
    const double lambda = std::max(ridge, kRidgeFloor);
    for (std::size_t i = 0; i < n; ++i) normal[i * n + i] += lambda;
    return Spline{kv, linalg::solve_spd(normal, rhs, n)};
}

}  // namespace kanbench
