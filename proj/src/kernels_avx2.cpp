// AVX2/FMA kernel variants. This translation unit is compiled with
// -mavx2 -mfma and must only be reached after a runtime CPU check.

#include "semictrl/kernels.hpp"

#if defined(SEMICTRL_HAVE_AVX2)

#include <immintrin.h>

#include <cstring>

namespace semictrl::kernels {

namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d shuf = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

double sum_sq_avx2(const double* x, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_loadu_pd(x + i);
        acc0 = _mm256_fmadd_pd(v, v, acc0);
    }
    double acc = hsum(acc0);
    for (; i < n; ++i) acc += x[i] * x[i];
    return acc;
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

void scale_avx2(double a, double* x, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) x[i] *= a;
}

void matvec_avx2(const double* a, std::size_t rows, std::size_t cols,
                 const double* x, double* y) {
    for (std::size_t i = 0; i < rows; ++i) y[i] = dot_avx2(a + i * cols, x, cols);
}

void matvec_acc_avx2(const double* a, std::size_t rows, std::size_t cols,
                     const double* x, double* y) {
    for (std::size_t i = 0; i < rows; ++i) y[i] += dot_avx2(a + i * cols, x, cols);
}

void matmul_avx2(const double* a, const double* b, double* c,
                 std::size_t m, std::size_t k, std::size_t n) {
    std::memset(c, 0, m * n * sizeof(double));
    for (std::size_t i = 0; i < m; ++i) {
        double* crow = c + i * n;
        const double* arow = a + i * k;
        for (std::size_t l = 0; l < k; ++l) axpy_avx2(arow[l], b + l * n, crow, n);
    }
}

void horner_avx2(const double* coeffs, std::size_t n_coeffs,
                 const double* x, double* y, std::size_t n) {
    if (n_coeffs == 0) {
        std::memset(y, 0, n * sizeof(double));
        return;
    }
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vx = _mm256_loadu_pd(x + i);
        __m256d p = _mm256_set1_pd(coeffs[n_coeffs - 1]);
        for (std::size_t j = n_coeffs - 1; j-- > 0;)
            p = _mm256_fmadd_pd(vx, p, _mm256_set1_pd(coeffs[j]));
        _mm256_storeu_pd(y + i, p);
    }
    for (; i < n; ++i) {
        double p = coeffs[n_coeffs - 1];
        for (std::size_t j = n_coeffs - 1; j-- > 0;) p = coeffs[j] + x[i] * p;
        y[i] = p;
    }
}

}  // namespace

const KernelTable* avx2_table_impl() {
    static const KernelTable table{
        "avx2",      dot_avx2,    sum_sq_avx2,     axpy_avx2,  scale_avx2,
        matvec_avx2, matvec_acc_avx2, matmul_avx2, horner_avx2,
    };
    return &table;
}

}  // namespace semictrl::kernels

#endif  // SEMICTRL_HAVE_AVX2
