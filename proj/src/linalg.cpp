#include "semictrl/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "semictrl/kernels.hpp"

namespace semictrl {

namespace {
const kernels::KernelTable& K() { return kernels::active(); }
}  // namespace

double dot(const Vec& x, const Vec& y) {
    if (x.size() != y.size()) throw std::invalid_argument("dot: size mismatch");
    return K().dot(x.data(), y.data(), x.size());
}

double norm2(const Vec& x) { return std::sqrt(K().sum_sq(x.data(), x.size())); }

void axpy(double a, const Vec& x, Vec& y) {
    if (x.size() != y.size()) throw std::invalid_argument("axpy: size mismatch");
    K().axpy(a, x.data(), y.data(), x.size());
}

void scale_in_place(double a, Vec& x) { K().scale(a, x.data(), x.size()); }

Vec matvec(const Mat& a, const Vec& x) {
    if (a.cols() != x.size()) throw std::invalid_argument("matvec: size mismatch");
    Vec y(a.rows());
    K().matvec(a.data(), a.rows(), a.cols(), x.data(), y.data());
    return y;
}

void matvec_into(const Mat& a, const double* x, double* y) {
    K().matvec(a.data(), a.rows(), a.cols(), x, y);
}

void matvec_acc_into(const Mat& a, const double* x, double* y) {
    K().matvec_acc(a.data(), a.rows(), a.cols(), x, y);
}

Mat matmul(const Mat& a, const Mat& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matmul: size mismatch");
    Mat c(a.rows(), b.cols());
    K().matmul(a.data(), b.data(), c.data(), a.rows(), a.cols(), b.cols());
    return c;
}

Mat transpose(const Mat& a) {
    Mat t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

double frobenius_norm(const Mat& a) {
    return std::sqrt(K().sum_sq(a.data(), a.rows() * a.cols()));
}

double max_abs(const Mat& a) {
    double m = 0.0;
    const double* p = a.data();
    for (std::size_t i = 0, n = a.rows() * a.cols(); i < n; ++i)
        m = std::max(m, std::abs(p[i]));
    return m;
}

bool all_finite(const Mat& a) {
    const double* p = a.data();
    for (std::size_t i = 0, n = a.rows() * a.cols(); i < n; ++i)
        if (!std::isfinite(p[i])) return false;
    return true;
}

LuFactors lu_factor(Mat a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("lu_factor: square matrix required");
    const std::size_t n = a.rows();
    LuFactors f;
    f.pivots.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        double best = std::abs(a(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::abs(a(i, k)) > best) {
                best = std::abs(a(i, k));
                p = i;
            }
        }
        f.pivots[k] = static_cast<int>(p);
        if (best == 0.0) {
            f.singular = true;
            continue;
        }
        if (p != k)
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
        const double inv = 1.0 / a(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            a(i, k) *= inv;
            K().axpy(-a(i, k), a.row(k) + (k + 1), a.row(i) + (k + 1), n - k - 1);
        }
    }
    f.lu = std::move(a);
    return f;
}

Vec lu_solve(const LuFactors& f, Vec b) {
    if (f.singular) throw std::runtime_error("lu_solve: singular matrix");
    const std::size_t n = f.lu.rows();
    if (b.size() != n) throw std::invalid_argument("lu_solve: size mismatch");
    for (std::size_t k = 0; k < n; ++k) {
        std::swap(b[k], b[static_cast<std::size_t>(f.pivots[k])]);
        for (std::size_t i = k + 1; i < n; ++i) b[i] -= f.lu(i, k) * b[k];
    }
    for (std::size_t k = n; k-- > 0;) {
        for (std::size_t j = k + 1; j < n; ++j) b[k] -= f.lu(k, j) * b[j];
        b[k] /= f.lu(k, k);
    }
    return b;
}

Mat lu_solve_matrix(const LuFactors& f, const Mat& b) {
    const std::size_t n = f.lu.rows();
    if (b.rows() != n) throw std::invalid_argument("lu_solve_matrix: size mismatch");
    Mat x(n, b.cols());
    Vec col(n);
    for (std::size_t j = 0; j < b.cols(); ++j) {
        for (std::size_t i = 0; i < n; ++i) col[i] = b(i, j);
        Vec sol = lu_solve(f, std::move(col));
        for (std::size_t i = 0; i < n; ++i) x(i, j) = sol[i];
        col = Vec(n);
    }
    return x;
}

SymmetricEigen symmetric_eigen(Mat a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("symmetric_eigen: square matrix required");
    const std::size_t n = a.rows();
    Mat v = Mat::identity(n);
    if (n == 0) return {Vec{}, v};

    auto off_norm = [&a, n]() {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) s += a(i, j) * a(i, j);
        return std::sqrt(2.0 * s);
    };

    const double scale = std::max(frobenius_norm(a), 1e-300);
    const double tol = 1e-15 * scale;
    for (int sweep = 0; sweep < 100 && off_norm() > tol; ++sweep) {
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) <= 1e-18 * scale) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t i = 0; i < n; ++i) {
                    const double aip = a(i, p), aiq = a(i, q);
                    a(i, p) = c * aip - s * aiq;
                    a(i, q) = s * aip + c * aiq;
                }
                for (std::size_t j = 0; j < n; ++j) {
                    const double apj = a(p, j), aqj = a(q, j);
                    a(p, j) = c * apj - s * aqj;
                    a(q, j) = s * apj + c * aqj;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double vip = v(i, p), viq = v(i, q);
                    v(i, p) = c * vip - s * viq;
                    v(i, q) = s * vip + c * viq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&a](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

    SymmetricEigen e;
    e.values.resize(n);
    e.vectors = Mat(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        e.values[j] = a(order[j], order[j]);
        for (std::size_t i = 0; i < n; ++i) e.vectors(i, j) = v(i, order[j]);
    }
    return e;
}

double spectral_norm(const Mat& a) {
    if (a.rows() == 0 || a.cols() == 0) return 0.0;
    Mat gram = (a.rows() <= a.cols()) ? matmul(a, transpose(a))
                                      : matmul(transpose(a), a);
    SymmetricEigen e = symmetric_eigen(std::move(gram));
    const double lam = e.values.empty() ? 0.0 : e.values.back();
    return std::sqrt(std::max(lam, 0.0));
}

Mat matrix_exponential(const Mat& a) {
    if (a.rows() != a.cols())
        throw std::invalid_argument("matrix_exponential: square matrix required");
    if (!all_finite(a))
        throw std::runtime_error("matrix_exponential: non-finite entries in generator");
    const std::size_t n = a.rows();

    double norm1 = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double colsum = 0.0;
        for (std::size_t i = 0; i < n; ++i) colsum += std::abs(a(i, j));
        norm1 = std::max(norm1, colsum);
    }

    constexpr double theta13 = 5.371920351148152;
    int squarings = 0;
    Mat as = a;
    if (norm1 > theta13) {
        squarings = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
        const double f = std::ldexp(1.0, -squarings);
        for (std::size_t i = 0; i < n * n; ++i) as.data()[i] *= f;
    }

    static const double b[] = {
        64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
        1187353796428800.0,  129060195264000.0,   10559470521600.0,
        670442572800.0,      33522128640.0,       1323241920.0,
        40840800.0,          960960.0,            16380.0,
        182.0,               1.0};

    const Mat a2 = matmul(as, as);
    const Mat a4 = matmul(a2, a2);
    const Mat a6 = matmul(a2, a4);
    const Mat id = Mat::identity(n);

    auto lincomb = [&](double c6, const Mat& m6, double c4, const Mat& m4,
                       double c2, const Mat& m2, double c0) {
        Mat r(n, n);
        for (std::size_t i = 0; i < n * n; ++i)
            r.data()[i] = c6 * m6.data()[i] + c4 * m4.data()[i] + c2 * m2.data()[i] +
                          c0 * id.data()[i];
        return r;
    };

    Mat w1 = lincomb(b[13], a6, b[11], a4, b[9], a2, 0.0);
    Mat w2 = lincomb(b[7], a6, b[5], a4, b[3], a2, b[1]);
    Mat w = matmul(a6, w1);
    for (std::size_t i = 0; i < n * n; ++i) w.data()[i] += w2.data()[i];
    const Mat u = matmul(as, w);

    Mat z1 = lincomb(b[12], a6, b[10], a4, b[8], a2, 0.0);
    Mat v = matmul(a6, z1);
    Mat z2 = lincomb(b[6], a6, b[4], a4, b[2], a2, b[0]);
    for (std::size_t i = 0; i < n * n; ++i) v.data()[i] += z2.data()[i];

    Mat num(n, n), den(n, n);
    for (std::size_t i = 0; i < n * n; ++i) {
        num.data()[i] = v.data()[i] + u.data()[i];
        den.data()[i] = v.data()[i] - u.data()[i];
    }

    LuFactors f = lu_factor(std::move(den));
    if (f.singular) throw std::runtime_error("matrix_exponential: Pade denominator singular");
    Mat r = lu_solve_matrix(f, num);

    for (int s = 0; s < squarings; ++s) r = matmul(r, r);
    return r;
}

}  // namespace semictrl
