#pragma once

// Uniform B-splines on an extended (non-clamped) knot grid.
//
// A grid of G intervals over [lo, hi] is extended by k uniform steps on each
// side, giving G + 2k + 1 knots and exactly G + k degree-k basis functions
// whose partition of unity covers [lo, hi]. Inputs outside the domain are
// clamped onto it.

#include <cstddef>
#include <span>
#include <vector>

namespace kanbench {

struct KnotVector {
    std::vector<double> knots;
    double domain_lo = -1.0;
    double domain_hi = 1.0;
    int grid = 1;    // G, interval count
    int degree = 0;  // k

    std::size_t basis_count() const noexcept { return static_cast<std::size_t>(grid + degree); }
    double spacing() const noexcept { return (domain_hi - domain_lo) / grid; }
    double clamp(double x) const noexcept;

    friend bool operator==(const KnotVector&, const KnotVector&) = default;
};

struct Spline {
    KnotVector kv;
    std::vector<double> coeffs;  // length G + k
};

/// The k + 1 possibly-nonzero basis values at a point. Entry m belongs to
/// basis function `first + m`.
struct LocalBasis {
    std::size_t first = 0;
    std::vector<double> values;
};

KnotVector build_knot_vector(double domain_lo, double domain_hi, int grid, int degree);

/// Index of the knot interval holding clamp(x): the greatest i with
/// knots[i] <= x, restricted to [k, k + G - 1].
std::size_t find_span(const KnotVector& kv, double x);

/// Writes the k + 1 local basis values at x into `out` (size k + 1) and
/// returns the index of the first supported basis function.
std::size_t local_basis(const KnotVector& kv, double x, std::span<double> out);
/// Local derivatives of the basis functions at x, same layout as
/// local_basis. Zero when x lies outside the domain (clamped region).
std::size_t local_basis_derivatives(const KnotVector& kv, double x, std::span<double> out);

std::vector<double> basis_values(const KnotVector& kv, double x);
std::vector<double> basis_derivatives(const KnotVector& kv, double x);

double spline_eval(const Spline& s, double x);
double spline_derivative(const Spline& s, double x);

Spline fit_spline_lsq(std::span<const double> xs, std::span<const double> ys, const KnotVector& kv,
                      double ridge);

}  // namespace kanbench
