#pragma once

#include <cstddef>
#include <vector>

namespace kanbench::linalg {

/// Solves A x = b for a symmetric positive definite row-major n×n matrix
/// by Cholesky factorisation. Throws Error(non_finite) if A is not SPD.
std::vector<double> solve_spd(std::vector<double> a, std::vector<double> b, std::size_t n);

}  // namespace kanbench::linalg
