#include "kanbench/kernels.hpp"

namespace kanbench::kernels::scalar {

double dot(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

Moments moments(const double* f, const double* y, std::size_t n) {
    Moments m;
    for (std::size_t i = 0; i < n; ++i) {
        m.sum_f += f[i];
        m.sum_ff += f[i] * f[i];
        m.sum_fy += f[i] * y[i];
    }
    return m;
}

}  // namespace kanbench::kernels::scalar
