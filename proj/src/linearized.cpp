#include "semictrl/linearized.hpp"

#include <cmath>

#include "semictrl/kernels.hpp"

namespace semictrl {

namespace {

void check_dims(const SemilinearSystem& sys, const SemigroupModel& sg) {
    if (sys.state_dim() != sg.generator.dim)
        throw DimensionError("linearized: system and semigroup dimensions differ");
}

void check_base(const SemilinearSystem& sys, const SemigroupModel& sg,
                const Trajectory& base) {
    check_dims(sys, sg);
    if (!(base.grid == sg.grid))
        throw DimensionError("linearized: base trajectory grid differs from semigroup grid");
    if (base.state_dim() != sys.state_dim())
        throw DimensionError("linearized: base trajectory state dimension mismatch");
}

// Solves (I - c Df(xbar)) y = b by the contraction y <- b + c Df(xbar) y.
void implicit_node_solve(const NonlinearMap& f, const double* xbar, double c, const Vec& b,
                         Vec& y, Vec& scratch) {
    y = b;
    if (f.is_zero()) return;
    for (int it = 0; it < 256; ++it) {
        f.derivative_action_into(xbar, y.data(), scratch.data());
        double diff = 0.0;
        double scale = 1.0;
        for (std::size_t j = 0; j < y.size(); ++j) {
            const double next = b[j] + c * scratch[j];
            diff = std::max(diff, std::abs(next - y[j]));
            scale = std::max(scale, std::abs(next));
            y[j] = next;
        }
        if (diff <= 1e-15 * scale) return;
    }
    throw NoConvergenceError("linearized: implicit node solve did not contract (dt too large "
                             "for the local derivative norm)");
}

// Matrix version of the same contraction: (I - c Df) Y = Rhs.
Mat implicit_apply_inv(const Mat& df, double c, const Mat& rhs) {
    Mat y = rhs;
    if (max_abs(df) == 0.0) return y;
    Mat prod(y.rows(), y.cols());
    for (int it = 0; it < 256; ++it) {
        kernels::active().matmul(df.data(), y.data(), prod.data(), df.rows(), df.cols(),
                                 y.cols());
        double diff = 0.0;
        double scale = 1.0;
        for (std::size_t i = 0, n = y.rows() * y.cols(); i < n; ++i) {
            const double next = rhs.data()[i] + c * prod.data()[i];
            diff = std::max(diff, std::abs(next - y.data()[i]));
            scale = std::max(scale, std::abs(next));
            y.data()[i] = next;
        }
        if (diff <= 1e-15 * scale) return y;
    }
    throw NoConvergenceError("linearized: implicit node solve did not contract (dt too large "
                             "for the local derivative norm)");
}

}  // namespace

LinearizedOperator lti_controllability_map(const SemilinearSystem& sys,
                                           const SemigroupModel& sg) {
    check_dims(sys, sg);
    const int n = sys.state_dim();
    const int m = sys.input_dim();
    const int nodes = sg.grid.nodes();
    const auto w = trapezoid_weights(sg.grid);

    LinearizedOperator op;
    op.grid = sg.grid;
    op.state_dim = n;
    op.input_dim = m;
    op.matrix = Mat(n, static_cast<std::size_t>(nodes) * m);
    for (int k = 0; k < nodes; ++k) {
        const Mat block = matmul(semigroup_power(sg, sg.grid.n_steps - k), sys.input_matrix);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j)
                op.matrix(i, static_cast<std::size_t>(k) * m + j) = w[k] * block(i, j);
    }
    return op;
}

Trajectory solve_linearized(const SemilinearSystem& sys, const SemigroupModel& sg,
                            const Trajectory& base, const ControlSignal& du) {
    check_base(sys, sg, base);
    if (!(du.grid == sg.grid) || du.input_dim() != sys.input_dim())
        throw DimensionError("solve_linearized: control grid or input dimension mismatch");

    const std::size_t n = static_cast<std::size_t>(sys.state_dim());
    const int steps = sg.grid.n_steps;
    const double half_dt = 0.5 * sg.grid.dt();
    const NonlinearMap& f = sys.nonlinearity;

    Trajectory traj;
    traj.grid = sg.grid;
    traj.states = Mat(static_cast<std::size_t>(sg.grid.nodes()), n);
    traj.converged = true;

    Vec h(n), tmp(n), rhs(n), y(n), scratch(n), bdu(n);
    for (int k = 0; k < steps; ++k) {
        // h_k = Df(xbar_k) dx_k + B du_k
        matvec_into(sys.input_matrix, du.node(k), bdu.data());
        f.derivative_action_into(base.states.row(k), traj.states.row(k), h.data());
        for (std::size_t j = 0; j < n; ++j)
            tmp[j] = traj.states(k, j) + half_dt * (h[j] + bdu[j]);
        matvec_into(sg.step_operator, tmp.data(), rhs.data());
        matvec_into(sys.input_matrix, du.node(k + 1), bdu.data());
        kernels::active().axpy(half_dt, bdu.data(), rhs.data(), n);

        implicit_node_solve(f, base.states.row(k + 1), half_dt, rhs, y, scratch);
        for (std::size_t j = 0; j < n; ++j) traj.states(k + 1, j) = y[j];
    }
    traj.picard_iterations = 0;
    return traj;
}

Trajectory solve_linearized_picard(const SemilinearSystem& sys, const SemigroupModel& sg,
                                   const Trajectory& base, const ControlSignal& du,
                                   double tol, int max_iterations) {
    check_base(sys, sg, base);
    if (!(du.grid == sg.grid) || du.input_dim() != sys.input_dim())
        throw DimensionError("solve_linearized_picard: control grid or input dimension mismatch");

    const std::size_t n = static_cast<std::size_t>(sys.state_dim());
    const int nodes = sg.grid.nodes();
    const double half_dt = 0.5 * sg.grid.dt();
    const NonlinearMap& f = sys.nonlinearity;

    // lin = trapezoid convolution of B du against the semigroup
    Mat lin(static_cast<std::size_t>(nodes), n);
    Mat bdu(static_cast<std::size_t>(nodes), n);
    for (int k = 0; k < nodes; ++k) matvec_into(sys.input_matrix, du.node(k), bdu.row(k));
    Vec tmp(n), acc(n);
    for (int k = 0; k + 1 < nodes; ++k) {
        for (std::size_t j = 0; j < n; ++j) tmp[j] = lin(k, j) + half_dt * bdu(k, j);
        matvec_into(sg.step_operator, tmp.data(), acc.data());
        for (std::size_t j = 0; j < n; ++j) lin(k + 1, j) = acc[j] + half_dt * bdu(k + 1, j);
    }

    Mat x = lin, hx(static_cast<std::size_t>(nodes), n), conv(static_cast<std::size_t>(nodes), n);
    Trajectory traj;
    traj.grid = sg.grid;
    for (int it = 1; it <= max_iterations; ++it) {
        for (int k = 0; k < nodes; ++k)
            f.derivative_action_into(base.states.row(k), x.row(k), hx.row(k));
        for (std::size_t j = 0; j < n; ++j) conv(0, j) = 0.0;
        for (int k = 0; k + 1 < nodes; ++k) {
            for (std::size_t j = 0; j < n; ++j) tmp[j] = conv(k, j) + half_dt * hx(k, j);
            matvec_into(sg.step_operator, tmp.data(), acc.data());
            for (std::size_t j = 0; j < n; ++j) conv(k + 1, j) = acc[j] + half_dt * hx(k + 1, j);
        }
        double residual = 0.0;
        for (int k = 0; k < nodes; ++k) {
            double row_sq = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double next = lin(k, j) + conv(k, j);
                const double d = next - x(k, j);
                row_sq += d * d;
                x(k, j) = next;
            }
            residual = std::max(residual, std::sqrt(row_sq));
        }
        if (residual <= tol) {
            traj.states = std::move(x);
            traj.converged = true;
            traj.picard_iterations = it;
            return traj;
        }
    }
    throw NoConvergenceError("solve_linearized_picard: no convergence");
}

namespace {

// One-step transition form of the discretized linearized equation:
//   dx_{k+1} = E_k dx_k + F_k du_k + G_{k+1} du_{k+1}
// with E_k = Inv_{k+1}(P + dt/2 P Df_k), F_k = Inv_{k+1}(dt/2 P B),
// G_k = Inv_k(dt/2 B) and Inv_j(M) = (I - dt/2 Df_j)^{-1} M.
struct TransitionBuilder {
    TransitionBuilder(const SemilinearSystem& sys, const SemigroupModel& sg,
                      const Trajectory& base)
        : sys_(sys), sg_(sg), half_dt_(0.5 * sg.grid.dt()), pb_(matmul(sg.step_operator,
                                                                        sys.input_matrix)) {
        const int nodes = sg.grid.nodes();
        df_.reserve(nodes);
        for (int k = 0; k < nodes; ++k) df_.push_back(sys.nonlinearity.jacobian(base.state(k)));
    }

    Mat E(int k) const {
        Mat base = sg_.step_operator;
        // P + dt/2 P Df_k
        Mat pdf = matmul(sg_.step_operator, df_[k]);
        for (std::size_t i = 0, s = base.rows() * base.cols(); i < s; ++i)
            base.data()[i] += half_dt_ * pdf.data()[i];
        return implicit_apply_inv(df_[k + 1], half_dt_, base);
    }

    Mat F(int k) const {
        Mat rhs = pb_;
        for (std::size_t i = 0, s = rhs.rows() * rhs.cols(); i < s; ++i)
            rhs.data()[i] *= half_dt_;
        return implicit_apply_inv(df_[k + 1], half_dt_, rhs);
    }

    Mat G(int k) const {
        Mat rhs = sys_.input_matrix;
        for (std::size_t i = 0, s = rhs.rows() * rhs.cols(); i < s; ++i)
            rhs.data()[i] *= half_dt_;
        return implicit_apply_inv(df_[k], half_dt_, rhs);
    }

    const SemilinearSystem& sys_;
    const SemigroupModel& sg_;
    double half_dt_;
    Mat pb_;
    std::vector<Mat> df_;
};

void write_block(Mat& matrix, int node, int m, const Mat& block, bool accumulate) {
    for (std::size_t i = 0; i < block.rows(); ++i)
        for (int j = 0; j < m; ++j) {
            double& cell = matrix(i, static_cast<std::size_t>(node) * m + j);
            cell = (accumulate ? cell : 0.0) + block(i, j);
        }
}

LinearizedOperator materialize_impl(const SemilinearSystem& sys, const SemigroupModel& sg,
                                    const Trajectory& base, Vec* node_norms) {
    check_base(sys, sg, base);
    const int n = sys.state_dim();
    const int m = sys.input_dim();
    const int steps = sg.grid.n_steps;
    const double dt = sg.grid.dt();

    TransitionBuilder tb(sys, sg, base);

    LinearizedOperator op;
    op.grid = sg.grid;
    op.state_dim = n;
    op.input_dim = m;
    op.matrix = Mat(n, static_cast<std::size_t>(sg.grid.nodes()) * m);

    // Backward accumulation of Psi_k = d dx_N / d dx_k.
    write_block(op.matrix, steps, m, tb.G(steps), false);
    Mat psi = Mat::identity(n);
    for (int k = steps - 1; k >= 0; --k) {
        write_block(op.matrix, k, m, matmul(psi, tb.F(k)), false);
        psi = matmul(psi, tb.E(k));
        if (k >= 1) write_block(op.matrix, k, m, matmul(psi, tb.G(k)), true);
    }

    if (node_norms) {
        // Forward recursion for the weighted Gram matrix of L_t. V_t carries
        // per-node input weights (dt/2 at node 0, dt elsewhere); promoting to
        // the [0,t] trapezoid weights needs only the endpoint correction
        // (1/dt) G_t G_t^T since its weight there is dt/2 instead of dt.
        node_norms->assign(sg.grid.nodes(), 0.0);
        Mat v(n, n);
        auto add_outer = [n](Mat& acc, const Mat& b, double factor) {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    double s = 0.0;
                    for (std::size_t c = 0; c < b.cols(); ++c) s += b(i, c) * b(j, c);
                    acc(i, j) += factor * s;
                }
        };
        Mat c_prev(n, m);  // C_t(t): zero at t = 0, G_t afterwards
        for (int t = 0; t < steps; ++t) {
            const Mat e = tb.E(t);
            const Mat f = tb.F(t);
            const Mat g_next = tb.G(t + 1);
            // V_{t+1} = E V E^T + (1/w_t)[(E c + F)(.)^T - (E c)(E c)^T] + (1/dt) G G^T
            Mat ev = matmul(e, v);
            v = matmul(ev, transpose(e));
            Mat ec = matmul(e, c_prev);
            const double w_t = (t == 0) ? 0.5 * dt : dt;
            Mat ecf = ec;
            for (std::size_t i = 0, s = ecf.rows() * ecf.cols(); i < s; ++i)
                ecf.data()[i] += f.data()[i];
            add_outer(v, ecf, 1.0 / w_t);
            add_outer(v, ec, -1.0 / w_t);
            add_outer(v, g_next, 1.0 / dt);

            Mat w_mat = v;
            add_outer(w_mat, g_next, 1.0 / dt);  // endpoint weight correction
            for (int i = 0; i < n; ++i)          // symmetrize rounding
                for (int j = i + 1; j < n; ++j) {
                    const double s = 0.5 * (w_mat(i, j) + w_mat(j, i));
                    w_mat(i, j) = s;
                    w_mat(j, i) = s;
                }
            SymmetricEigen eig = symmetric_eigen(std::move(w_mat));
            (*node_norms)[t + 1] = std::sqrt(std::max(eig.values.back(), 0.0));
            c_prev = g_next;
        }
    }
    return op;
}

}  // namespace

LinearizedOperator materialize_L(const SemilinearSystem& sys, const SemigroupModel& sg,
                                 const Trajectory& base) {
    return materialize_impl(sys, sg, base, nullptr);
}

MaterializedDetail materialize_L_detailed(const SemilinearSystem& sys,
                                          const SemigroupModel& sg,
                                          const Trajectory& base) {
    MaterializedDetail d;
    d.op = materialize_impl(sys, sg, base, &d.node_operator_norms);
    return d;
}

Vec apply(const LinearizedOperator& op, const ControlSignal& du) {
    if (!(du.grid == op.grid) || du.input_dim() != op.input_dim)
        throw DimensionError("apply: control grid or input dimension mismatch");
    const Vec u = flatten(du);
    Vec y(static_cast<std::size_t>(op.state_dim));
    matvec_into(op.matrix, u.data(), y.data());
    return y;
}

Mat weighted_gram(const Mat& op_matrix, const TimeGrid& grid, int input_dim) {
    const auto w = trapezoid_weights(grid);
    const std::size_t n = op_matrix.rows();
    Mat gram(n, n);
    for (int k = 0; k < grid.nodes(); ++k) {
        const double inv_w = 1.0 / w[k];
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j) {
                double s = 0.0;
                for (int c = 0; c < input_dim; ++c) {
                    const std::size_t col = static_cast<std::size_t>(k) * input_dim + c;
                    s += op_matrix(i, col) * op_matrix(j, col);
                }
                gram(i, j) += inv_w * s;
            }
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) gram(i, j) = gram(j, i);
    return gram;
}

Gramian gramian(const LinearizedOperator& op) {
    Gramian g;
    g.matrix = weighted_gram(op.matrix, op.grid, op.input_dim);
    g.tau = op.grid.t_end;
    SymmetricEigen eig = symmetric_eigen(g.matrix);
    g.regularization = 1e-12 * std::max(eig.values.back(), 0.0);
    return g;
}

ControlSignal min_norm_control(const LinearizedOperator& op, const Gramian& w,
                               const Vec& target) {
    if (static_cast<int>(target.size()) != op.state_dim)
        throw DimensionError("min_norm_control: target dimension mismatch");
    SymmetricEigen eig = symmetric_eigen(w.matrix);
    if (!(eig.values.front() > w.regularization))
        throw SingularGramianError(eig.values.front(), w.regularization);

    // y = W^{-1} target through the eigendecomposition
    const std::size_t n = eig.values.size();
    Vec vt_target(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t r = 0; r < n; ++r) s += eig.vectors(r, i) * target[r];
        vt_target[i] = s / eig.values[i];
    }
    Vec y(n, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += eig.vectors(r, i) * vt_target[i];
        y[r] = s;
    }

    // u_k = (1/w_k) block_k^T y
    const auto weights = trapezoid_weights(op.grid);
    ControlSignal u(op.grid, op.input_dim);
    for (int k = 0; k < op.grid.nodes(); ++k) {
        const double inv_w = 1.0 / weights[k];
        for (int c = 0; c < op.input_dim; ++c) {
            const std::size_t col = static_cast<std::size_t>(k) * op.input_dim + c;
            double s = 0.0;
            for (std::size_t r = 0; r < n; ++r) s += op.matrix(r, col) * y[r];
            u.values(k, c) = inv_w * s;
        }
    }
    return u;
}

double operator_norm(const LinearizedOperator& op) {
    SymmetricEigen eig = symmetric_eigen(weighted_gram(op.matrix, op.grid, op.input_dim));
    return std::sqrt(std::max(eig.values.back(), 0.0));
}

}  // namespace semictrl
