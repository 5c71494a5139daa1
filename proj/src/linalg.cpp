#include "kanbench/linalg.hpp"

#include <cmath>

#include "kanbench/error.hpp"

namespace kanbench::linalg {

std::vector<double> solve_spd(std::vector<double> a, std::vector<double> b, std::size_t n) {
    // In-place lower Cholesky factor.
    for (std::size_t j = 0; j < n; ++j) {
        double diag = a[j * n + j];
        for (std::size_t p = 0; p < j; ++p) diag -= a[j * n + p] * a[j * n + p];
        if (!(diag > 0.0)) throw Error(ErrorCode::non_finite, "matrix is not positive definite");
        const double ljj = std::sqrt(diag);
        a[j * n + j] = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double v = a[i * n + j];
            for (std::size_t p = 0; p < j; ++p) v -= a[i * n + p] * a[j * n + p];
            a[i * n + j] = v / ljj;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        double v = b[i];
        for (std::size_t p = 0; p < i; ++p) v -= a[i * n + p] * b[p];
        b[i] = v / a[i * n + i];
    }
    for (std::size_t i = n; i-- > 0;) {
        double v = b[i];
        for (std::size_t p = i + 1; p < n; ++p) v -= a[p * n + i] * b[p];
        b[i] = v / a[i * n + i];
    }
    return b;
}

}  // namespace kanbench::linalg
