#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "semictrl/linalg.hpp"

// Shared domain types: the uniform time grid, the system triple
// (generator A, input operator B, nonlinearity f), control signals with
// their discretized L2 norm, and state trajectories with the sup norm.

namespace semictrl {

inline constexpr const char* kToolkitVersion = "0.1.0";

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The iterate escaped past the blow-up threshold: the solution does not
// exist on the full interval at this tolerance.
class BlowUpError : public Error {
public:
    BlowUpError(double time, double norm)
        : Error("solution blow-up near t = " + std::to_string(time) +
                " (iterate norm " + std::to_string(norm) + ")"),
          time(time),
          norm(norm) {}
    double time;
    double norm;
};

class NoConvergenceError : public Error {
public:
    using Error::Error;
};

// The discretized linear system is not exactly controllable at this
// resolution; minimal-norm synthesis (and with it the steering loop's
// hypothesis) fails.
class SingularGramianError : public Error {
public:
    SingularGramianError(double min_eigenvalue, double floor)
        : Error("singular controllability Gramian (min eigenvalue " +
                std::to_string(min_eigenvalue) + " <= regularization floor " +
                std::to_string(floor) + ")"),
          min_eigenvalue(min_eigenvalue),
          floor(floor) {}
    double min_eigenvalue;
    double floor;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    ConfigError(std::string field_path, const std::string& what)
        : Error(field_path + ": " + what), field_path(std::move(field_path)) {}
    std::string field_path;
};

// Uniform grid on [0, tau]; node k sits at k*dt, node n_steps exactly at tau.
struct TimeGrid {
    double t_start = 0.0;
    double t_end = 0.0;
    int n_steps = 0;

    TimeGrid() = default;
    TimeGrid(double t_end, int n_steps) : t_end(t_end), n_steps(n_steps) {
        if (!(t_end > 0.0)) throw ConfigError("grid.t_end", "must be > 0");
        if (n_steps < 1) throw ConfigError("grid.n_steps", "must be >= 1");
    }

    double dt() const { return (t_end - t_start) / n_steps; }
    int nodes() const { return n_steps + 1; }
    double time(int k) const { return k == n_steps ? t_end : t_start + k * dt(); }

    bool operator==(const TimeGrid&) const = default;
};

// Composite trapezoid weights on the grid nodes.
std::vector<double> trapezoid_weights(const TimeGrid& grid);

// Discretized generator A: either a diagonal spectral representation
// (eigenvalue list) or a dense matrix.
struct GeneratorSpec {
    enum class Kind { diagonal_spectral, dense };

    Kind kind = Kind::diagonal_spectral;
    int dim = 0;
    Vec eigenvalues;  // diagonal_spectral
    Mat matrix;       // dense

    static GeneratorSpec diagonal(Vec eigenvalues);
    static GeneratorSpec dense(Mat matrix);

    Mat as_matrix() const;
};

// Nonlinear term f with f(0) = 0 and Df(0) = 0.
class NonlinearMap {
public:
    enum class Kind { zero, pointwise_polynomial, custom };

    static NonlinearMap zero(int dim);
    // coeffs[j] multiplies x^(j+2), applied componentwise; no constant or
    // linear term, so the equilibrium structure holds by construction.
    static NonlinearMap pointwise_polynomial(int dim, Vec coeffs_from_degree2);
    // Same componentwise polynomial, but applied in sine-collocation space:
    // f(a) = S p(S a) with S the orthonormal DST-I matrix. Keeps a diagonal
    // generator while the nonlinearity stays pointwise in physical space.
    static NonlinearMap collocation_polynomial(int dim, Vec coeffs_from_degree2);
    static NonlinearMap custom(int dim,
                               std::function<Vec(const Vec&)> value,
                               std::function<Vec(const Vec&, const Vec&)> derivative_action,
                               std::function<Mat(const Vec&)> jacobian = nullptr);

    int dim() const { return dim_; }
    Kind kind() const { return kind_; }
    bool is_zero() const { return kind_ == Kind::zero; }
    const Vec& coefficients() const { return coeffs_; }

    Vec value(const Vec& x) const;
    void value_into(const double* x, double* y) const;
    // h |-> Df(x) h
    Vec derivative_action(const Vec& x, const Vec& h) const;
    void derivative_action_into(const double* x, const double* h, double* y) const;
    Mat jacobian(const Vec& x) const;

private:
    NonlinearMap() = default;
    Kind kind_ = Kind::zero;
    int dim_ = 0;
    Vec coeffs_;        // degree >= 2 coefficients, ascending
    Vec deriv_coeffs_;  // full ascending coefficients of p'
    std::function<Vec(const Vec&)> value_fn_;
    std::function<Vec(const Vec&, const Vec&)> deriv_fn_;
    std::function<Mat(const Vec&)> jacobian_fn_;
};

// Orthonormal DST-I matrix, symmetric and involutory.
Mat dst_matrix(int n);

// The Eq.-style system triple: x' = A x + f(x) + B u.
struct SemilinearSystem {
    GeneratorSpec generator;
    Mat input_matrix;  // n x m
    NonlinearMap nonlinearity = NonlinearMap::zero(0);

    SemilinearSystem() = default;
    SemilinearSystem(GeneratorSpec generator, Mat input_matrix, NonlinearMap nonlinearity);

    int state_dim() const { return generator.dim; }
    int input_dim() const { return static_cast<int>(input_matrix.cols()); }
};

// Input trajectory sampled at grid nodes; values is (n_steps+1) x m.
struct ControlSignal {
    TimeGrid grid;
    Mat values;

    ControlSignal() = default;
    ControlSignal(TimeGrid grid, int input_dim)
        : grid(grid), values(static_cast<std::size_t>(grid.nodes()), input_dim) {}

    int input_dim() const { return static_cast<int>(values.cols()); }
    double* node(int k) { return values.row(k); }
    const double* node(int k) const { return values.row(k); }
};

ControlSignal constant_control(const TimeGrid& grid, const Vec& value);
ControlSignal zero_control(const TimeGrid& grid, int input_dim);
// y += a x (same grid and input dimension)
void axpy_signal(double a, const ControlSignal& x, ControlSignal& y);
ControlSignal scaled_signal(double a, const ControlSignal& x);
Vec flatten(const ControlSignal& u);

// sqrt of the trapezoid quadrature of |u(t)|^2 over [0, tau].
double l2_norm(const ControlSignal& u);
double l2_distance(const ControlSignal& a, const ControlSignal& b);

// State path x(t); states is (n_steps+1) x n.
struct Trajectory {
    TimeGrid grid;
    Mat states;
    bool converged = false;
    int picard_iterations = 0;

    int state_dim() const { return static_cast<int>(states.cols()); }
    Vec state(int k) const {
        return Vec(states.row(k), states.row(k) + states.cols());
    }
    Vec final_state() const { return state(grid.n_steps); }
};

Trajectory zero_trajectory(const TimeGrid& grid, int state_dim);

// Max over nodes of the Euclidean state norm.
double sup_norm(const Trajectory& x);

}  // namespace semictrl
