#include "semictrl/core.hpp"

#include <cmath>

#include "semictrl/kernels.hpp"

namespace semictrl {

std::vector<double> trapezoid_weights(const TimeGrid& grid) {
    std::vector<double> w(grid.nodes(), grid.dt());
    w.front() = 0.5 * grid.dt();
    w.back() = 0.5 * grid.dt();
    return w;
}

GeneratorSpec GeneratorSpec::diagonal(Vec eigenvalues) {
    if (eigenvalues.empty())
        throw ConfigError("generator.eigenvalues", "must be nonempty");
    GeneratorSpec g;
    g.kind = Kind::diagonal_spectral;
    g.dim = static_cast<int>(eigenvalues.size());
    g.eigenvalues = std::move(eigenvalues);
    return g;
}

GeneratorSpec GeneratorSpec::dense(Mat matrix) {
    if (matrix.rows() == 0 || matrix.rows() != matrix.cols())
        throw ConfigError("generator.matrix", "must be square and nonempty");
    GeneratorSpec g;
    g.kind = Kind::dense;
    g.dim = static_cast<int>(matrix.rows());
    g.matrix = std::move(matrix);
    return g;
}

Mat GeneratorSpec::as_matrix() const {
    if (kind == Kind::dense) return matrix;
    Mat a(dim, dim);
    for (int i = 0; i < dim; ++i) a(i, i) = eigenvalues[i];
    return a;
}

NonlinearMap NonlinearMap::zero(int dim) {
    NonlinearMap f;
    f.kind_ = Kind::zero;
    f.dim_ = dim;
    return f;
}

namespace {

// Full ascending coefficient list of p(x) = sum_j c[j] x^(j+2).
Vec full_poly(const Vec& coeffs_from_degree2) {
    Vec full(coeffs_from_degree2.size() + 2, 0.0);
    for (std::size_t j = 0; j < coeffs_from_degree2.size(); ++j)
        full[j + 2] = coeffs_from_degree2[j];
    return full;
}

Vec poly_derivative(const Vec& full) {
    if (full.size() <= 1) return Vec{0.0};
    Vec d(full.size() - 1);
    for (std::size_t j = 1; j < full.size(); ++j)
        d[j - 1] = static_cast<double>(j) * full[j];
    return d;
}

}  // namespace

NonlinearMap NonlinearMap::pointwise_polynomial(int dim, Vec coeffs_from_degree2) {
    if (dim < 1) throw ConfigError("nonlinearity.dim", "must be >= 1");
    NonlinearMap f;
    f.kind_ = Kind::pointwise_polynomial;
    f.dim_ = dim;
    f.coeffs_ = std::move(coeffs_from_degree2);
    f.deriv_coeffs_ = poly_derivative(full_poly(f.coeffs_));
    return f;
}

Mat dst_matrix(int n) {
    Mat s(n, n);
    const double norm = std::sqrt(2.0 / (n + 1));
    const double pi = 3.14159265358979323846264338327950288;
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            s(j, k) = norm * std::sin((j + 1) * (k + 1) * pi / (n + 1));
    return s;
}

NonlinearMap NonlinearMap::collocation_polynomial(int dim, Vec coeffs_from_degree2) {
    if (dim < 1) throw ConfigError("nonlinearity.dim", "must be >= 1");
    NonlinearMap f;
    f.kind_ = Kind::custom;
    f.dim_ = dim;
    f.coeffs_ = coeffs_from_degree2;

    const Mat s = dst_matrix(dim);
    const Vec poly = full_poly(coeffs_from_degree2);
    const Vec dpoly = poly_derivative(poly);
    const std::size_t n = static_cast<std::size_t>(dim);

    f.value_fn_ = [s, poly, n](const Vec& a) {
        Vec phys(n), img(n);
        matvec_into(s, a.data(), phys.data());
        kernels::active().horner(poly.data(), poly.size(), phys.data(), img.data(), n);
        Vec out(n);
        matvec_into(s, img.data(), out.data());
        return out;
    };
    f.deriv_fn_ = [s, dpoly, n](const Vec& a, const Vec& h) {
        Vec phys(n), slope(n), hp(n);
        matvec_into(s, a.data(), phys.data());
        kernels::active().horner(dpoly.data(), dpoly.size(), phys.data(), slope.data(), n);
        matvec_into(s, h.data(), hp.data());
        for (std::size_t i = 0; i < n; ++i) hp[i] *= slope[i];
        Vec out(n);
        matvec_into(s, hp.data(), out.data());
        return out;
    };
    f.jacobian_fn_ = [s, dpoly, n](const Vec& a) {
        Vec phys(n), slope(n);
        matvec_into(s, a.data(), phys.data());
        kernels::active().horner(dpoly.data(), dpoly.size(), phys.data(), slope.data(), n);
        Mat ds(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) ds(i, j) = slope[i] * s(i, j);
        return matmul(s, ds);
    };
    return f;
}

NonlinearMap NonlinearMap::custom(int dim,
                                  std::function<Vec(const Vec&)> value,
                                  std::function<Vec(const Vec&, const Vec&)> derivative_action,
                                  std::function<Mat(const Vec&)> jacobian) {
    if (dim < 1) throw ConfigError("nonlinearity.dim", "must be >= 1");
    if (!value || !derivative_action)
        throw ConfigError("nonlinearity", "custom map needs value and derivative evaluators");
    NonlinearMap f;
    f.kind_ = Kind::custom;
    f.dim_ = dim;
    f.value_fn_ = std::move(value);
    f.deriv_fn_ = std::move(derivative_action);
    f.jacobian_fn_ = std::move(jacobian);
    return f;
}

void NonlinearMap::value_into(const double* x, double* y) const {
    const std::size_t n = static_cast<std::size_t>(dim_);
    switch (kind_) {
        case Kind::zero:
            for (std::size_t i = 0; i < n; ++i) y[i] = 0.0;
            return;
        case Kind::pointwise_polynomial: {
            // y_i = x_i^2 * q(x_i) with q the degree-shifted coefficients
            kernels::active().horner(coeffs_.data(), coeffs_.size(), x, y, n);
            for (std::size_t i = 0; i < n; ++i) y[i] *= x[i] * x[i];
            return;
        }
        case Kind::custom: {
            Vec out = value_fn_(Vec(x, x + n));
            for (std::size_t i = 0; i < n; ++i) y[i] = out[i];
            return;
        }
    }
}

Vec NonlinearMap::value(const Vec& x) const {
    if (static_cast<int>(x.size()) != dim_)
        throw DimensionError("NonlinearMap::value: state dimension mismatch");
    Vec y(x.size());
    value_into(x.data(), y.data());
    return y;
}

void NonlinearMap::derivative_action_into(const double* x, const double* h, double* y) const {
    const std::size_t n = static_cast<std::size_t>(dim_);
    switch (kind_) {
        case Kind::zero:
            for (std::size_t i = 0; i < n; ++i) y[i] = 0.0;
            return;
        case Kind::pointwise_polynomial: {
            kernels::active().horner(deriv_coeffs_.data(), deriv_coeffs_.size(), x, y, n);
            for (std::size_t i = 0; i < n; ++i) y[i] *= h[i];
            return;
        }
        case Kind::custom: {
            Vec out = deriv_fn_(Vec(x, x + n), Vec(h, h + n));
            for (std::size_t i = 0; i < n; ++i) y[i] = out[i];
            return;
        }
    }
}

Vec NonlinearMap::derivative_action(const Vec& x, const Vec& h) const {
    if (static_cast<int>(x.size()) != dim_ || static_cast<int>(h.size()) != dim_)
        throw DimensionError("NonlinearMap::derivative_action: dimension mismatch");
    Vec y(x.size());
    derivative_action_into(x.data(), h.data(), y.data());
    return y;
}

Mat NonlinearMap::jacobian(const Vec& x) const {
    if (static_cast<int>(x.size()) != dim_)
        throw DimensionError("NonlinearMap::jacobian: state dimension mismatch");
    const std::size_t n = static_cast<std::size_t>(dim_);
    switch (kind_) {
        case Kind::zero:
            return Mat(n, n);
        case Kind::pointwise_polynomial: {
            Vec slope(n);
            kernels::active().horner(deriv_coeffs_.data(), deriv_coeffs_.size(), x.data(),
                                     slope.data(), n);
            Mat j(n, n);
            for (std::size_t i = 0; i < n; ++i) j(i, i) = slope[i];
            return j;
        }
        case Kind::custom: {
            if (jacobian_fn_) return jacobian_fn_(x);
            // Assemble columnwise from the derivative action.
            Mat j(n, n);
            Vec e(n, 0.0), col(n);
            for (std::size_t c = 0; c < n; ++c) {
                e[c] = 1.0;
                derivative_action_into(x.data(), e.data(), col.data());
                for (std::size_t r = 0; r < n; ++r) j(r, c) = col[r];
                e[c] = 0.0;
            }
            return j;
        }
    }
    return Mat(n, n);
}

SemilinearSystem::SemilinearSystem(GeneratorSpec generator_, Mat input_matrix_,
                                   NonlinearMap nonlinearity_)
    : generator(std::move(generator_)),
      input_matrix(std::move(input_matrix_)),
      nonlinearity(std::move(nonlinearity_)) {
    if (static_cast<int>(input_matrix.rows()) != generator.dim)
        throw DimensionError("SemilinearSystem: input matrix rows must equal state dim");
    if (input_matrix.cols() == 0)
        throw DimensionError("SemilinearSystem: input dimension must be >= 1");
    if (nonlinearity.dim() != generator.dim)
        throw DimensionError("SemilinearSystem: nonlinearity dim must equal state dim");
}

ControlSignal constant_control(const TimeGrid& grid, const Vec& value) {
    ControlSignal u(grid, static_cast<int>(value.size()));
    for (int k = 0; k < grid.nodes(); ++k)
        for (std::size_t j = 0; j < value.size(); ++j) u.values(k, j) = value[j];
    return u;
}

ControlSignal zero_control(const TimeGrid& grid, int input_dim) {
    return ControlSignal(grid, input_dim);
}

void axpy_signal(double a, const ControlSignal& x, ControlSignal& y) {
    if (!(x.grid == y.grid) || x.input_dim() != y.input_dim())
        throw DimensionError("axpy_signal: grid or input dimension mismatch");
    kernels::active().axpy(a, x.values.data(), y.values.data(),
                           x.values.rows() * x.values.cols());
}

ControlSignal scaled_signal(double a, const ControlSignal& x) {
    ControlSignal y = x;
    kernels::active().scale(a, y.values.data(), y.values.rows() * y.values.cols());
    return y;
}

Vec flatten(const ControlSignal& u) {
    return Vec(u.values.data(), u.values.data() + u.values.rows() * u.values.cols());
}

double l2_norm(const ControlSignal& u) {
    const auto w = trapezoid_weights(u.grid);
    const std::size_t m = u.values.cols();
    double acc = 0.0;
    for (int k = 0; k < u.grid.nodes(); ++k)
        acc += w[k] * kernels::active().sum_sq(u.node(k), m);
    return std::sqrt(acc);
}

double l2_distance(const ControlSignal& a, const ControlSignal& b) {
    ControlSignal d = a;
    axpy_signal(-1.0, b, d);
    return l2_norm(d);
}

Trajectory zero_trajectory(const TimeGrid& grid, int state_dim) {
    Trajectory t;
    t.grid = grid;
    t.states = Mat(static_cast<std::size_t>(grid.nodes()), state_dim);
    t.converged = true;
    t.picard_iterations = 0;
    return t;
}

double sup_norm(const Trajectory& x) {
    const std::size_t n = x.states.cols();
    double m = 0.0;
    for (int k = 0; k < x.grid.nodes(); ++k)
        m = std::max(m, std::sqrt(kernels::active().sum_sq(x.states.row(k), n)));
    return m;
}

}  // namespace semictrl
