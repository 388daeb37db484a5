#pragma once

#include "semictrl/core.hpp"
#include "semictrl/semigroup.hpp"

// Solution operator L_t of the linearization along a base trajectory,
//   L_t du = int_0^t T(t-s) Df(xbar(s)) L_s du ds + int_0^t T(t-s) B du(s) ds,
// its LTI special case (base = 0, Df(0) = 0), the controllability
// Gramian, and minimal-norm control synthesis.
//
// Flattened input layout: column block k holds the m columns of grid
// node k, so column index = k*m + component.

namespace semictrl {

struct LinearizedOperator {
    TimeGrid grid;
    int state_dim = 0;
    int input_dim = 0;
    Mat matrix;  // n x ((n_steps+1) * m)
};

// Column block k carries w_k T(tau - t_k) B with trapezoid weight w_k, so
// applying the matrix to a flattened signal is the trapezoid quadrature of
// the LTI controllability integral.
LinearizedOperator lti_controllability_map(const SemilinearSystem& sys,
                                           const SemigroupModel& sg);

// Causal forward accumulation over the grid; the implicit diagonal
// contribution of each new node is resolved by an inner fixed-point sweep.
Trajectory solve_linearized(const SemilinearSystem& sys, const SemigroupModel& sg,
                            const Trajectory& base, const ControlSignal& du);

// Picard iteration on the same discretized integral equation; agrees with
// the forward route to solver tolerance and serves as its cross-check.
Trajectory solve_linearized_picard(const SemilinearSystem& sys, const SemigroupModel& sg,
                                   const Trajectory& base, const ControlSignal& du,
                                   double tol = 1e-13, int max_iterations = 400);

// Dense endpoint matrix of L_tau along the base trajectory; reduces to
// lti_controllability_map when the base is the zero trajectory.
LinearizedOperator materialize_L(const SemilinearSystem& sys, const SemigroupModel& sg,
                                 const Trajectory& base);

// Same, additionally reporting |L_t| for every grid node t (operator norm
// from discretized-L2 inputs on [0,t] to the state space).
struct MaterializedDetail {
    LinearizedOperator op;
    Vec node_operator_norms;
};
MaterializedDetail materialize_L_detailed(const SemilinearSystem& sys,
                                          const SemigroupModel& sg,
                                          const Trajectory& base);

Vec apply(const LinearizedOperator& op, const ControlSignal& du);

// Gram matrix of an operator matrix with respect to the weighted L2 inner
// product on inputs: W = L D^{-1} L^T with D the trapezoid weights.
Mat weighted_gram(const Mat& op_matrix, const TimeGrid& grid, int input_dim);

struct Gramian {
    Mat matrix;
    double tau = 0.0;
    // relative eigenvalue floor used by the inversion; at or below it the
    // discretized pair counts as not exactly controllable
    double regularization = 0.0;
};

Gramian gramian(const LinearizedOperator& op);

// u(s) = B* T*(tau-s) W^{-1} target for the LTI map; for a trajectory-
// dependent operator the same weighted adjoint formula D^{-1} L^T W^{-1}.
// Throws SingularGramianError when W is not positive definite beyond the
// regularization floor.
ControlSignal min_norm_control(const LinearizedOperator& op, const Gramian& w,
                               const Vec& target);

// Operator norm of L_tau from weighted-L2 inputs to the state space.
double operator_norm(const LinearizedOperator& op);

}  // namespace semictrl
