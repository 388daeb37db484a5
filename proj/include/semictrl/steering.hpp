#pragma once

#include <string>
#include <vector>

#include "semictrl/core.hpp"
#include "semictrl/linearized.hpp"
#include "semictrl/mild_solver.hpp"

// Steers the semilinear system from the origin to a target state by the
// correction scheme u_{k+1} = u_k + R(x* - S_tau(u_k)), where R is the
// minimal-norm right inverse of the linearized controllability map:
// either the frozen LTI map or the map re-linearized along the current
// trajectory (Newton mode).

namespace semictrl {

enum class SteerMode { frozen, full_newton };

enum class SteerStatus {
    converged,
    stalled,          // residual failed to decrease three times in a row
    max_iterations,
};

const char* to_string(SteerStatus s);

struct SteeringResult {
    bool success = false;
    SteerStatus status = SteerStatus::max_iterations;
    ControlSignal control;
    Vec final_state;
    std::vector<double> residual_history;  // |x* - S_tau(u_k)| per iteration
    // geometric mean of successive residual ratios; 0 when fewer than two
    // residuals were observed
    double contraction_estimate = 0.0;
    int iterations = 0;
};

// Throws SingularGramianError when the LTI Gramian is not positive
// definite (the hypothesis of the controllability theorem fails) and
// propagates BlowUpError from the mild solver.
SteeringResult steer(const SemilinearSystem& sys, const SemigroupModel& sg,
                     const Vec& x_target, SteerMode mode, double tol, int max_iter,
                     const PicardConfig& cfg);

struct ProbeEntry {
    int direction_index = 0;
    double radius = 0.0;
    bool success = false;
    std::string outcome;  // steer status or error category
    double final_residual = 0.0;
    double contraction_estimate = 0.0;
    int iterations = 0;
};

// Frozen-mode steering over every (direction, radius) cell; failures are
// recorded, never raised. Cells are independent and may run on multiple
// threads; the table order is deterministic either way.
std::vector<ProbeEntry> reachable_radius_probe(const SemilinearSystem& sys,
                                               const SemigroupModel& sg,
                                               const std::vector<Vec>& directions,
                                               const std::vector<double>& radii,
                                               double tol, int max_iter,
                                               const PicardConfig& cfg, int threads = 1);

}  // namespace semictrl
