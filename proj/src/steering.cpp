#include "semictrl/steering.hpp"

#include <atomic>
#include <cmath>
#include <thread>

namespace semictrl {

const char* to_string(SteerStatus s) {
    switch (s) {
        case SteerStatus::converged: return "converged";
        case SteerStatus::stalled: return "stalled";
        case SteerStatus::max_iterations: return "max_iterations";
    }
    return "unknown";
}

namespace {

double contraction_from_history(const std::vector<double>& history) {
    if (history.size() < 2) return 0.0;
    for (double r : history)
        if (r == 0.0) return 0.0;
    const double ratio = history.back() / history.front();
    return std::pow(ratio, 1.0 / static_cast<double>(history.size() - 1));
}

}  // namespace

SteeringResult steer(const SemilinearSystem& sys, const SemigroupModel& sg,
                     const Vec& x_target, SteerMode mode, double tol, int max_iter,
                     const PicardConfig& cfg) {
    if (static_cast<int>(x_target.size()) != sys.state_dim())
        throw DimensionError("steer: target dimension mismatch");
    for (double v : x_target)
        if (!std::isfinite(v)) throw Error("steer: non-finite target");
    if (max_iter < 1) throw ConfigError("steer.max_iterations", "must be >= 1");

    const LinearizedOperator lti = lti_controllability_map(sys, sg);
    const Gramian w = gramian(lti);

    SteeringResult result;
    // u_0: linear minimal-norm control; throws SingularGramianError before
    // any iteration when the main theorem's hypothesis fails.
    result.control = min_norm_control(lti, w, x_target);

    const Vec origin(static_cast<std::size_t>(sys.state_dim()), 0.0);
    int nondecreasing = 0;
    Trajectory traj;
    for (int iter = 1; iter <= max_iter; ++iter) {
        traj = solve_mild(sys, sg, result.control, origin, cfg);
        Vec r = x_target;
        axpy(-1.0, traj.final_state(), r);
        const double res = norm2(r);
        result.residual_history.push_back(res);
        result.final_state = traj.final_state();
        result.iterations = iter;

        if (res <= tol) {
            result.success = true;
            result.status = SteerStatus::converged;
            break;
        }
        if (result.residual_history.size() >= 2) {
            const double prev = result.residual_history[result.residual_history.size() - 2];
            nondecreasing = (res >= prev) ? nondecreasing + 1 : 0;
            if (nondecreasing >= 3) {
                result.status = SteerStatus::stalled;
                break;
            }
        }
        if (iter == max_iter) {
            result.status = SteerStatus::max_iterations;
            break;
        }

        ControlSignal correction = [&] {
            if (mode == SteerMode::frozen) return min_norm_control(lti, w, r);
            const LinearizedOperator lk = materialize_L(sys, sg, traj);
            return min_norm_control(lk, gramian(lk), r);
        }();
        axpy_signal(1.0, correction, result.control);
    }

    result.contraction_estimate = contraction_from_history(result.residual_history);
    return result;
}

std::vector<ProbeEntry> reachable_radius_probe(const SemilinearSystem& sys,
                                               const SemigroupModel& sg,
                                               const std::vector<Vec>& directions,
                                               const std::vector<double>& radii,
                                               double tol, int max_iter,
                                               const PicardConfig& cfg, int threads) {
    struct Cell {
        int d;
        int r;
    };
    std::vector<Cell> cells;
    for (int d = 0; d < static_cast<int>(directions.size()); ++d)
        for (int r = 0; r < static_cast<int>(radii.size()); ++r) cells.push_back({d, r});

    std::vector<ProbeEntry> table(cells.size());
    std::atomic<std::size_t> next{0};

    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            const Cell cell = cells[i];
            ProbeEntry& entry = table[i];
            entry.direction_index = cell.d;
            entry.radius = radii[cell.r];

            Vec target = directions[cell.d];
            scale_in_place(entry.radius, target);
            try {
                SteeringResult s = steer(sys, sg, target, SteerMode::frozen, tol, max_iter, cfg);
                entry.success = s.success;
                entry.outcome = to_string(s.status);
                entry.final_residual =
                    s.residual_history.empty() ? 0.0 : s.residual_history.back();
                entry.contraction_estimate = s.contraction_estimate;
                entry.iterations = s.iterations;
            } catch (const SingularGramianError&) {
                entry.outcome = "singular_gramian";
            } catch (const BlowUpError&) {
                entry.outcome = "blow_up";
            } catch (const NoConvergenceError&) {
                entry.outcome = "no_convergence";
            }
        }
    };

    const int nthreads = std::max(1, threads);
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return table;
}

}  // namespace semictrl
