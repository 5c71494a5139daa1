#pragma once

// Data-parallel inner loops. Each kernel has a scalar reference and an AVX2
// variant; the public entry points dispatch once on the detected CPU. The
// AVX2 variants use a fixed lane/tail reduction order, so a given machine
// always produces the same bits.

#include <cstddef>
#include <span>
#include <string_view>

namespace kanbench::kernels {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa);

/// Best ISA available on this CPU (honours KANBENCH_ISA=scalar).
Isa detected_isa();
Isa active_isa();
/// Forces the dispatch target; requesting avx2 on a CPU without it falls
/// back to scalar. Returns the ISA actually selected.
Isa set_active_isa(Isa isa);

/// Sufficient statistics for a one-dimensional linear least-squares fit
/// y ≈ c·f + d.
struct Moments {
    double sum_f = 0.0;
    double sum_ff = 0.0;
    double sum_fy = 0.0;
};

double dot(std::span<const double> a, std::span<const double> b);
/// y += alpha·x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
Moments moments(std::span<const double> f, std::span<const double> y);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
Moments moments(const double* f, const double* y, std::size_t n);
}  // namespace scalar

namespace avx2 {
bool compiled();
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
Moments moments(const double* f, const double* y, std::size_t n);
}  // namespace avx2

}  // namespace kanbench::kernels
