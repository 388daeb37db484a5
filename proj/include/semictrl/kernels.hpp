#pragma once

#include <cstddef>

// Dense double-precision kernels behind the toolkit's inner loops
// (convolution quadrature, semigroup application, pointwise nonlinearities).
// A scalar reference implementation is always available; on x86-64 an
// AVX2/FMA variant is selected at runtime when the CPU supports it.
// Matrices are row-major.

namespace semictrl::kernels {

struct KernelTable {
    const char* name;

    // sum_i x[i]*y[i]
    double (*dot)(const double* x, const double* y, std::size_t n);
    // sum_i x[i]^2
    double (*sum_sq)(const double* x, std::size_t n);
    // y += a*x
    void (*axpy)(double a, const double* x, double* y, std::size_t n);
    // x *= a
    void (*scale)(double a, double* x, std::size_t n);
    // y = A x,  A is rows x cols
    void (*matvec)(const double* a, std::size_t rows, std::size_t cols,
                   const double* x, double* y);
    // y += A x
    void (*matvec_acc)(const double* a, std::size_t rows, std::size_t cols,
                       const double* x, double* y);
    // C = A B,  A is m x k, B is k x n, C is m x n (overwritten)
    void (*matmul)(const double* a, const double* b, double* c,
                   std::size_t m, std::size_t k, std::size_t n);
    // y[i] = sum_j coeffs[j] * x[i]^j  (degree-ascending coefficients)
    void (*horner)(const double* coeffs, std::size_t n_coeffs,
                   const double* x, double* y, std::size_t n);
};

enum class Backend {
    auto_detect,  // pick the widest variant the CPU supports
    scalar,
    avx2,
};

// Reference implementation; always valid.
const KernelTable& scalar_table();

// AVX2 table, or nullptr when the binary or the CPU lacks AVX2+FMA.
const KernelTable* avx2_table();

// Table used by the rest of the toolkit. Defaults to auto-detection on
// first use; set_backend() overrides it (throws std::runtime_error if the
// requested backend is unavailable).
const KernelTable& active();
void set_backend(Backend b);
Backend active_backend();

}  // namespace semictrl::kernels
