#include "semictrl/semigroup.hpp"

#include <cmath>
#include <stdexcept>

namespace semictrl {

SemigroupModel build_semigroup(const GeneratorSpec& generator, const TimeGrid& grid) {
    SemigroupModel model;
    model.generator = generator;
    model.grid = grid;
    const int n = generator.dim;
    const int nodes = grid.nodes();
    model.powers.reserve(nodes);

    if (generator.kind == GeneratorSpec::Kind::diagonal_spectral) {
        for (double lam : generator.eigenvalues)
            if (!std::isfinite(lam))
                throw Error("build_semigroup: non-finite eigenvalue in generator");
        double bound = 0.0;
        for (int k = 0; k < nodes; ++k) {
            Mat p(n, n);
            double node_norm = 0.0;
            for (int i = 0; i < n; ++i) {
                p(i, i) = std::exp(generator.eigenvalues[i] * grid.time(k));
                node_norm = std::max(node_norm, std::abs(p(i, i)));
            }
            bound = std::max(bound, node_norm);
            model.powers.push_back(std::move(p));
        }
        model.step_operator = model.powers.size() > 1 ? model.powers[1] : Mat::identity(n);
        model.bound_M = bound;
        return model;
    }

    if (!all_finite(generator.matrix))
        throw Error("build_semigroup: non-finite entries in generator");
    Mat a_dt = generator.matrix;
    const double dt = grid.dt();
    for (std::size_t i = 0; i < a_dt.rows() * a_dt.cols(); ++i) a_dt.data()[i] *= dt;

    model.step_operator = matrix_exponential(a_dt);
    model.powers.push_back(Mat::identity(n));
    for (int k = 1; k < nodes; ++k)
        model.powers.push_back(matmul(model.powers.back(), model.step_operator));

    double bound = 0.0;
    for (const Mat& p : model.powers) bound = std::max(bound, spectral_norm(p));
    model.bound_M = bound;
    return model;
}

const Mat& semigroup_power(const SemigroupModel& model, int k) {
    if (k < 0 || k >= static_cast<int>(model.powers.size()))
        throw std::out_of_range("semigroup_power: node index outside grid");
    return model.powers[static_cast<std::size_t>(k)];
}

Vec apply_semigroup(const SemigroupModel& model, int k, const Vec& x) {
    const Mat& p = semigroup_power(model, k);
    if (x.size() != p.cols())
        throw DimensionError("apply_semigroup: state dimension mismatch");
    return matvec(p, x);
}

double semigroup_bound(const SemigroupModel& model) { return model.bound_M; }

}  // namespace semictrl
