#include "semictrl/mild_solver.hpp"

#include <cmath>

#include "semictrl/kernels.hpp"

namespace semictrl {

namespace {

// All windows share the global grid; [lo, hi] are node indices. The
// trapezoid convolution against the semigroup is accumulated with the
// one-step recurrence
//   x_{k+1} = P x_k + dt/2 (P g_k + g_{k+1}),   P = T(dt),
// which reproduces the full trapezoid sum with cached powers: each g_j
// enters with weight dt/2 when it is the endpoint and is promoted to the
// interior weight dt by the next application of P.
class WindowSolver {
public:
    WindowSolver(const SemilinearSystem& sys, const SemigroupModel& sg,
                 const ControlSignal& u, const PicardConfig& cfg, Mat& states)
        : sys_(sys),
          sg_(sg),
          u_(u),
          cfg_(cfg),
          states_(states),
          n_(static_cast<std::size_t>(sys.state_dim())),
          step_(sg.step_operator),
          bu_(static_cast<std::size_t>(sg.grid.nodes()), n_),
          total_iterations_(0) {
        for (int k = 0; k < sg.grid.nodes(); ++k)
            matvec_into(sys_.input_matrix, u_.node(k), bu_.row(k));
    }

    int solve(int lo, int hi, const Vec& x_start, int depth) {
        linear_part(lo, hi, x_start);
        if (picard(lo, hi)) return total_iterations_;

        if (depth >= cfg_.max_subinterval_halvings || hi - lo < 2)
            throw NoConvergenceError(
                "solve_mild: Picard iteration did not converge (depth " +
                std::to_string(depth) + ", window [" +
                std::to_string(sg_.grid.time(lo)) + ", " +
                std::to_string(sg_.grid.time(hi)) + "])");

        const int mid = lo + (hi - lo) / 2;
        solve(lo, mid, x_start, depth + 1);
        Vec x_mid(states_.row(mid), states_.row(mid) + n_);
        return solve(mid, hi, x_mid, depth + 1);
    }

private:
    // Writes T(t - t_lo) x_start + int T(t-s) B u(s) ds into lin_ rows lo..hi.
    void linear_part(int lo, int hi, const Vec& x_start) {
        lin_ = Mat(states_.rows(), n_);
        for (std::size_t j = 0; j < n_; ++j) lin_(lo, j) = x_start[j];
        Vec tmp(n_), acc(n_);
        const double half_dt = 0.5 * sg_.grid.dt();
        for (int k = lo; k < hi; ++k) {
            // P (x_k + dt/2 g_k)
            for (std::size_t j = 0; j < n_; ++j)
                tmp[j] = lin_(k, j) + half_dt * bu_(k, j);
            matvec_into(step_, tmp.data(), acc.data());
            for (std::size_t j = 0; j < n_; ++j)
                lin_(k + 1, j) = acc[j] + half_dt * bu_(k + 1, j);
        }
    }

    bool picard(int lo, int hi) {
        const std::size_t span = static_cast<std::size_t>(hi - lo + 1);
        Mat x(span, n_), fx(span, n_), conv(span, n_);
        for (std::size_t r = 0; r < span; ++r)
            for (std::size_t j = 0; j < n_; ++j) x(r, j) = lin_(lo + static_cast<int>(r), j);
        check_blowup(x, lo);

        const double half_dt = 0.5 * sg_.grid.dt();
        Vec tmp(n_), acc(n_);
        for (int it = 1; it <= cfg_.max_iterations; ++it) {
            ++total_iterations_;
            for (std::size_t r = 0; r < span; ++r)
                sys_.nonlinearity.value_into(x.row(r), fx.row(r));

            // conv_r = trapezoid of T(t_r - s) f(x(s)) over the window
            for (std::size_t j = 0; j < n_; ++j) conv(0, j) = 0.0;
            for (std::size_t r = 0; r + 1 < span; ++r) {
                for (std::size_t j = 0; j < n_; ++j)
                    tmp[j] = conv(r, j) + half_dt * fx(r, j);
                matvec_into(step_, tmp.data(), acc.data());
                for (std::size_t j = 0; j < n_; ++j)
                    conv(r + 1, j) = acc[j] + half_dt * fx(r + 1, j);
            }

            double residual = 0.0;
            for (std::size_t r = 0; r < span; ++r) {
                double row_sq = 0.0;
                for (std::size_t j = 0; j < n_; ++j) {
                    const double next = lin_(lo + static_cast<int>(r), j) + conv(r, j);
                    const double d = next - x(r, j);
                    row_sq += d * d;
                    x(r, j) = next;
                }
                residual = std::max(residual, std::sqrt(row_sq));
            }
            check_blowup(x, lo);

            if (residual <= cfg_.tol) {
                for (std::size_t r = 0; r < span; ++r)
                    for (std::size_t j = 0; j < n_; ++j)
                        states_(lo + static_cast<int>(r), j) = x(r, j);
                return true;
            }
        }
        return false;
    }

    void check_blowup(const Mat& x, int lo) const {
        for (std::size_t r = 0; r < x.rows(); ++r) {
            const double norm = std::sqrt(kernels::active().sum_sq(x.row(r), n_));
            if (!(norm <= cfg_.blowup_threshold))
                throw BlowUpError(sg_.grid.time(lo + static_cast<int>(r)), norm);
        }
    }

    const SemilinearSystem& sys_;
    const SemigroupModel& sg_;
    const ControlSignal& u_;
    const PicardConfig& cfg_;
    Mat& states_;
    std::size_t n_;
    const Mat& step_;
    Mat bu_;
    Mat lin_;
    int total_iterations_;
};

}  // namespace

Trajectory solve_mild(const SemilinearSystem& sys, const SemigroupModel& sg,
                      const ControlSignal& u, const Vec& x0, const PicardConfig& cfg) {
    if (!(cfg.tol > 0.0) || !(cfg.blowup_threshold > 0.0) || cfg.max_iterations < 1)
        throw ConfigError("picard", "tol and blowup_threshold must be > 0, max_iterations >= 1");
    if (!(u.grid == sg.grid))
        throw DimensionError("solve_mild: control grid differs from semigroup grid");
    if (static_cast<int>(x0.size()) != sys.state_dim())
        throw DimensionError("solve_mild: initial state dimension mismatch");
    if (u.input_dim() != sys.input_dim())
        throw DimensionError("solve_mild: input dimension mismatch");
    if (sys.state_dim() != sg.generator.dim)
        throw DimensionError("solve_mild: semigroup dimension mismatch");

    Trajectory traj;
    traj.grid = sg.grid;
    traj.states = Mat(static_cast<std::size_t>(sg.grid.nodes()), sys.state_dim());

    WindowSolver solver(sys, sg, u, cfg, traj.states);
    traj.picard_iterations = solver.solve(0, sg.grid.n_steps, x0, 0);
    traj.converged = true;
    return traj;
}

std::function<Trajectory(const ControlSignal&)> solution_map(const SemilinearSystem& sys,
                                                             const SemigroupModel& sg,
                                                             const PicardConfig& cfg) {
    const Vec origin(static_cast<std::size_t>(sys.state_dim()), 0.0);
    return [&sys, &sg, cfg, origin](const ControlSignal& u) {
        return solve_mild(sys, sg, u, origin, cfg);
    };
}

}  // namespace semictrl
