#pragma once

#include <functional>

#include "semictrl/core.hpp"
#include "semictrl/semigroup.hpp"

// Picard iteration on the mild-solution integral equation
//   x(t) = T(t) x0 + int_0^t T(t-s) (f(x(s)) + B u(s)) ds,
// with sub-interval stitching when the fixed-point map fails to
// contract on the full horizon.

namespace semictrl {

struct PicardConfig {
    // sup-norm tolerance on successive iterates
    double tol = 1e-12;
    int max_iterations = 80;
    // iterate escape threshold; crossing it raises BlowUpError
    double blowup_threshold = 1e6;
    int max_subinterval_halvings = 20;
};

// Throws BlowUpError when an iterate escapes, NoConvergenceError when the
// iteration budget and halving depth are exhausted.
Trajectory solve_mild(const SemilinearSystem& sys, const SemigroupModel& sg,
                      const ControlSignal& u, const Vec& x0, const PicardConfig& cfg);

// The controllability map u -> S(u): solve_mild with x0 = 0.
std::function<Trajectory(const ControlSignal&)> solution_map(const SemilinearSystem& sys,
                                                             const SemigroupModel& sg,
                                                             const PicardConfig& cfg);

}  // namespace semictrl
