#include "kanbench/kernels.hpp"

#if defined(KANBENCH_HAVE_AVX2)
#include <immintrin.h>
#endif

namespace kanbench::kernels::avx2 {

#if defined(KANBENCH_HAVE_AVX2)

namespace {

inline double hsum(__m256d v) {
    // (v0 + v2) + (v1 + v3)
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d pair = _mm_add_pd(lo, hi);
    const __m128d swapped = _mm_unpackhi_pd(pair, pair);
    return _mm_cvtsd_f64(_mm_add_sd(pair, swapped));
}

}  // namespace

bool compiled() { return true; }

double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

Moments moments(const double* f, const double* y, std::size_t n) {
    __m256d sf = _mm256_setzero_pd();
    __m256d sff = _mm256_setzero_pd();
    __m256d sfy = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vf = _mm256_loadu_pd(f + i);
        sf = _mm256_add_pd(sf, vf);
        sff = _mm256_fmadd_pd(vf, vf, sff);
        sfy = _mm256_fmadd_pd(vf, _mm256_loadu_pd(y + i), sfy);
    }
    Moments m{hsum(sf), hsum(sff), hsum(sfy)};
    for (; i < n; ++i) {
        m.sum_f += f[i];
        m.sum_ff += f[i] * f[i];
        m.sum_fy += f[i] * y[i];
    }
    return m;
}

#else

bool compiled() { return false; }
double dot(const double* a, const double* b, std::size_t n) { return scalar::dot(a, b, n); }
void axpy(double alpha, const double* x, double* y, std::size_t n) { scalar::axpy(alpha, x, y, n); }
Moments moments(const double* f, const double* y, std::size_t n) { return scalar::moments(f, y, n); }

#endif

}  // namespace kanbench::kernels::avx2
