#pragma once

#include <cstddef>
#include <vector>

// Small dense linear algebra for desk-scale problems (state dimension
// up to a few dozen). Row-major storage throughout; element loops are
// delegated to the runtime-selected kernel table.

namespace semictrl {

using Vec = std::vector<double>;

class Mat {
public:
    Mat() = default;
    Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Mat identity(std::size_t n) {
        Mat m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double* row(std::size_t i) { return data_.data() + i * cols_; }
    const double* row(std::size_t i) const { return data_.data() + i * cols_; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    bool operator==(const Mat& other) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Vector helpers (kernel-backed).
double dot(const Vec& x, const Vec& y);
double norm2(const Vec& x);
void axpy(double a, const Vec& x, Vec& y);
void scale_in_place(double a, Vec& x);

// y = A x
Vec matvec(const Mat& a, const Vec& x);
void matvec_into(const Mat& a, const double* x, double* y);
// y += A x
void matvec_acc_into(const Mat& a, const double* x, double* y);
// C = A B
Mat matmul(const Mat& a, const Mat& b);
Mat transpose(const Mat& a);

double frobenius_norm(const Mat& a);
double max_abs(const Mat& a);
bool all_finite(const Mat& a);

// LU factorization with partial pivoting.
struct LuFactors {
    Mat lu;
    std::vector<int> pivots;
    bool singular = false;
};
LuFactors lu_factor(Mat a);
Vec lu_solve(const LuFactors& f, Vec b);
// Solves A X = B columnwise.
Mat lu_solve_matrix(const LuFactors& f, const Mat& b);

// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
// Eigenvalues ascending; eigenvectors are the columns of `vectors`.
struct SymmetricEigen {
    Vec values;
    Mat vectors;
};
SymmetricEigen symmetric_eigen(Mat a);

// Largest singular value (operator 2-norm), exact to eigensolver
// tolerance via the Gram matrix of the smaller side.
double spectral_norm(const Mat& a);

// Matrix exponential by scaling-and-squaring with a degree-13 Pade
// approximant. Throws on non-finite input.
Mat matrix_exponential(const Mat& a);

}  // namespace semictrl
