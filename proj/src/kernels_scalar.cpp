#include "semictrl/kernels.hpp"

#include <cstring>

namespace semictrl::kernels {

namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

double sum_sq_scalar(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
    return acc;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale_scalar(double a, double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void matvec_scalar(const double* a, std::size_t rows, std::size_t cols,
                   const double* x, double* y) {
    for (std::size_t i = 0; i < rows; ++i) y[i] = dot_scalar(a + i * cols, x, cols);
}

void matvec_acc_scalar(const double* a, std::size_t rows, std::size_t cols,
                       const double* x, double* y) {
    for (std::size_t i = 0; i < rows; ++i) y[i] += dot_scalar(a + i * cols, x, cols);
}

void matmul_scalar(const double* a, const double* b, double* c,
                   std::size_t m, std::size_t k, std::size_t n) {
    std::memset(c, 0, m * n * sizeof(double));
    for (std::size_t i = 0; i < m; ++i) {
        double* crow = c + i * n;
        const double* arow = a + i * k;
        for (std::size_t l = 0; l < k; ++l) axpy_scalar(arow[l], b + l * n, crow, n);
    }
}

void horner_scalar(const double* coeffs, std::size_t n_coeffs,
                   const double* x, double* y, std::size_t n) {
    if (n_coeffs == 0) {
        std::memset(y, 0, n * sizeof(double));
        return;
    }
    for (std::size_t i = 0; i < n; ++i) {
        double p = coeffs[n_coeffs - 1];
        for (std::size_t j = n_coeffs - 1; j-- > 0;) p = coeffs[j] + x[i] * p;
        y[i] = p;
    }
}

}  // namespace

const KernelTable& scalar_table() {
    static const KernelTable table{
        "scalar",      dot_scalar,        sum_sq_scalar, axpy_scalar,
        scale_scalar,  matvec_scalar,     matvec_acc_scalar,
        matmul_scalar, horner_scalar,
    };
    return table;
}

}  // namespace semictrl::kernels
