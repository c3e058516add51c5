#pragma once

#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace scenred {

/// Discrete-time system x_{t+1} = A x_t + B u_t + eta_t.
struct LinearSystem {
    Eigen::MatrixXd A;
    Eigen::MatrixXd B;

    LinearSystem(Eigen::MatrixXd A_, Eigen::MatrixXd B_) : A(std::move(A_)), B(std::move(B_)) {
        if (A.rows() != A.cols()) throw std::invalid_argument("LinearSystem: A must be square");
        if (B.rows() != A.rows()) throw std::invalid_argument("LinearSystem: B row count must equal state dim");
    }

    int n() const { return static_cast<int>(A.rows()); }
    int m() const { return static_cast<int>(B.cols()); }
};

/// Prediction matrices of the stacked trajectory
///   xbar = F x0 + G ubar + Gamma etabar,
/// where xbar = (x_{t+1},...,x_{t+N}), ubar = (u_t,...,u_{t+N-1}) and
/// etabar = (eta_t,...,eta_{t+N-1}).
struct StackedDynamics {
    Eigen::MatrixXd F;      // nN x n
    Eigen::MatrixXd G;      // nN x mN
    Eigen::MatrixXd Gamma;  // nN x nN, block lower triangular with identity diagonal
    int n = 0;
    int m = 0;
    int N = 0;

    Eigen::VectorXd predict(const Eigen::VectorXd& x0, const Eigen::VectorXd& u,
                            const Eigen::VectorXd& eta) const {
        return F * x0 + G * u + Gamma * eta;
    }
};

/// Halfspace set { x : H x <= h }.
struct Polytope {
    Eigen::MatrixXd H;
    Eigen::VectorXd h;

    Polytope() = default;
    Polytope(Eigen::MatrixXd H_, Eigen::VectorXd h_) : H(std::move(H_)), h(std::move(h_)) {
        if (H.rows() != h.size()) throw std::invalid_argument("Polytope: row counts of H and h must match");
    }

    int rows() const { return static_cast<int>(H.rows()); }
    int dim() const { return static_cast<int>(H.cols()); }

    bool contains(const Eigen::VectorXd& x, double tol = 0.0) const {
        return ((H * x).array() <= h.array() + tol).all();
    }
};

inline StackedDynamics build_stacked(const LinearSystem& sys, int N) {
    if (N < 1) throw std::invalid_argument("build_stacked: horizon must be >= 1");
    const int n = sys.n();
    const int m = sys.m();

    StackedDynamics sd;
    sd.n = n;
    sd.m = m;
    sd.N = N;
    sd.F.setZero(static_cast<Eigen::Index>(n) * N, n);
    sd.G.setZero(static_cast<Eigen::Index>(n) * N, static_cast<Eigen::Index>(m) * N);
    sd.Gamma.setZero(static_cast<Eigen::Index>(n) * N, static_cast<Eigen::Index>(n) * N);

    // powers[k] = A^k
    std::vector<Eigen::MatrixXd> powers(N + 1);
    powers[0] = Eigen::MatrixXd::Identity(n, n);
    for (int k = 1; k <= N; ++k) powers[k] = sys.A * powers[k - 1];

    for (int k = 0; k < N; ++k) {
        sd.F.block(static_cast<Eigen::Index>(k) * n, 0, n, n) = powers[k + 1];
        for (int i = 0; i <= k; ++i) {
            sd.G.block(static_cast<Eigen::Index>(k) * n, static_cast<Eigen::Index>(i) * m, n, m) =
                powers[k - i] * sys.B;
            sd.Gamma.block(static_cast<Eigen::Index>(k) * n, static_cast<Eigen::Index>(i) * n, n, n) =
                powers[k - i];
        }
    }
    return sd;
}

/// Step-by-step simulation; returns the flat trajectory (x_{t+1},...,x_{t+N}).
inline Eigen::VectorXd simulate(const LinearSystem& sys, const Eigen::VectorXd& x0,
                                const Eigen::VectorXd& u_seq, const Eigen::VectorXd& eta_seq) {
    const int n = sys.n();
    const int m = sys.m();
    if (x0.size() != n) throw std::invalid_argument("simulate: x0 dimension mismatch");
    if (u_seq.size() % m != 0) throw std::invalid_argument("simulate: input sequence length mismatch");
    const int N = static_cast<int>(u_seq.size()) / m;
    if (eta_seq.size() != static_cast<Eigen::Index>(n) * N)
        throw std::invalid_argument("simulate: disturbance sequence length mismatch");

    Eigen::VectorXd traj(static_cast<Eigen::Index>(n) * N);
    Eigen::VectorXd x = x0;
    for (int k = 0; k < N; ++k) {
        x = sys.A * x + sys.B * u_seq.segment(static_cast<Eigen::Index>(k) * m, m) +
            eta_seq.segment(static_cast<Eigen::Index>(k) * n, n);
        traj.segment(static_cast<Eigen::Index>(k) * n, n) = x;
    }
    return traj;
}

/// Axis-aligned per-step box as a halfspace polytope; infinite bounds are
/// skipped. Upper-bound rows come first, then lower-bound rows.
inline Polytope box_polytope(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper) {
    if (lower.size() != upper.size()) throw std::invalid_argument("box_polytope: bound length mismatch");
    const int d = static_cast<int>(lower.size());
    const double inf = std::numeric_limits<double>::infinity();
    int q = 0;
    for (int i = 0; i < d; ++i) {
        if (upper[i] < inf) ++q;
        if (lower[i] > -inf) ++q;
    }
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(q, d);
    Eigen::VectorXd h(q);
    int r = 0;
    for (int i = 0; i < d; ++i) {
        if (upper[i] < inf) {
            H(r, i) = 1.0;
            h[r] = upper[i];
            ++r;
        }
    }
    for (int i = 0; i < d; ++i) {
        if (lower[i] > -inf) {
            H(r, i) = -1.0;
            h[r] = -lower[i];
            ++r;
        }
    }
    return Polytope(std::move(H), std::move(h));
}

/// Stacks a per-step polytope block-diagonally over steps first..last of the
/// horizon (1-based, matching the trajectory layout x_{t+1},...,x_{t+N}).
/// Rows are emitted only for steps in range; columns always span all N steps.
inline Polytope stack_constraints(const Polytope& step, int N, int first = 1, int last = -1) {
    if (last < 0) last = N;
    if (N < 1 || first < 1 || last > N || first > last)
        throw std::invalid_argument("stack_constraints: invalid step range");
    const int d = step.dim();
    const int q = step.rows();
    const int steps = last - first + 1;
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(q) * steps,
                                              static_cast<Eigen::Index>(d) * N);
    Eigen::VectorXd h(static_cast<Eigen::Index>(q) * steps);
    for (int s = 0; s < steps; ++s) {
        const int block = first - 1 + s;
        H.block(static_cast<Eigen::Index>(s) * q, static_cast<Eigen::Index>(block) * d, q, d) = step.H;
        h.segment(static_cast<Eigen::Index>(s) * q, q) = step.h;
    }
    return Polytope(std::move(H), std::move(h));
}

/// Full-horizon stacking of per-step box bounds (state set X_N or input set U_N).
inline Polytope stack_box_constraints(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper, int N) {
    return stack_constraints(box_polytope(lower, upper), N);
}

} // namespace scenred
