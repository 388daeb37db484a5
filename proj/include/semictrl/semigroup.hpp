#pragma once

#include <vector>

#include "semictrl/core.hpp"

// Discretized strongly continuous semigroup T(t) = e^{At} on the grid,
// with eagerly cached node powers and the bound M = max_k |T(k dt)|
// that enters every Gronwall estimate.

namespace semictrl {

struct SemigroupModel {
    GeneratorSpec generator;
    TimeGrid grid;
    Mat step_operator;        // T(dt)
    std::vector<Mat> powers;  // T(k dt) for k = 0..n_steps
    double bound_M = 1.0;
};

// For diagonal generators the powers are exact componentwise exponentials;
// dense generators go through the scaled Pade matrix exponential.
SemigroupModel build_semigroup(const GeneratorSpec& generator, const TimeGrid& grid);

const Mat& semigroup_power(const SemigroupModel& model, int k);

// T(k dt) x. Throws std::out_of_range for k outside [0, n_steps].
Vec apply_semigroup(const SemigroupModel& model, int k, const Vec& x);

double semigroup_bound(const SemigroupModel& model);

}  // namespace semictrl
