#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "scenred/dynamics.hpp"
#include "scenred/guarantees.hpp"
#include "scenred/milp.hpp"
#include "scenred/scenario.hpp"

namespace scenred {

/// The three problem variants: full-set problem, reduced-set problem without
/// guarantees, reduced-set problem with tightening and cost correction.
enum class Variant { exact, p1, p2 };

inline const char* variant_name(Variant v) {
    switch (v) {
        case Variant::exact: return "EXACT";
        case Variant::p1: return "P1";
        case Variant::p2: return "P2";
    }
    return "?";
}

inline Variant variant_from_string(const std::string& s) {
    if (s == "EXACT" || s == "exact") return Variant::exact;
    if (s == "P1" || s == "p1") return Variant::p1;
    if (s == "P2" || s == "p2") return Variant::p2;
    throw std::invalid_argument("unknown variant '" + s + "'");
}

/// One open-loop chance-constrained problem instance. For P1/P2 `scenarios`
/// holds the reduced centers with their aggregated probabilities; for EXACT
/// it holds the full set.
struct OCPInstance {
    Eigen::VectorXd x0;
    StackedDynamics stacked;
    Polytope X_N;
    Polytope U_N;
    ScenarioSet scenarios;
    double epsilon = 0.0;
    Variant variant = Variant::exact;
    std::optional<GuaranteePackage> guarantee;  // required for P2
    double correction = 0.0;                    // 0 unless P2

    void validate() const {
        if (!(epsilon >= 0.0 && epsilon < 1.0))
            throw std::invalid_argument("OCPInstance: epsilon must lie in [0,1)");
        if (x0.size() != stacked.n) throw std::invalid_argument("OCPInstance: x0 dimension mismatch");
        if (scenarios.trajectory_dim() != stacked.n * stacked.N)
            throw std::invalid_argument("OCPInstance: scenario dimension mismatch");
        if (X_N.dim() != stacked.n * stacked.N)
            throw std::invalid_argument("OCPInstance: state constraint dimension mismatch");
        if (U_N.dim() != stacked.m * stacked.N)
            throw std::invalid_argument("OCPInstance: input constraint dimension mismatch");
        if (variant == Variant::p2) {
            if (!guarantee)
                throw std::invalid_argument("OCPInstance: P2 requires a guarantee package");
            if (static_cast<int>(guarantee->tightened_sets.size()) != scenarios.size())
                throw std::invalid_argument(
                    "OCPInstance: guarantee cluster count must match scenario count");
        }
    }
};

/// Solver output. `objective` already includes the cost correction for P2.
struct Solution {
    milp::SolveStatus status = milp::SolveStatus::infeasible;
    Eigen::VectorXd u;
    double objective = 0.0;
    double milp_objective = 0.0;
    Eigen::VectorXd indicators;
    std::vector<Eigen::VectorXd> trajectories;
    double gap = 0.0;
    long nodes = 0;
};

namespace detail_ocp {

// Per-coordinate interval hull of the input polytope, via one LP pair per
// coordinate. Throws when the set is unbounded: big-M values would not exist.
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> input_box_hull(const Polytope& U_N) {
    const int d = U_N.dim();
    milp::Model lp;
    lp.c = Eigen::VectorXd::Zero(d);
    lp.lower = Eigen::VectorXd::Constant(d, -std::numeric_limits<double>::infinity());
    lp.upper = Eigen::VectorXd::Constant(d, std::numeric_limits<double>::infinity());
    for (int r = 0; r < U_N.rows(); ++r) lp.add_row_dense(U_N.H.row(r), milp::Sense::less_eq, U_N.h[r]);

    Eigen::VectorXd lo(d), hi(d);
    for (int k = 0; k < d; ++k) {
        lp.c.setZero();
        lp.c[k] = 1.0;
        auto rmin = milp::solve_lp(lp);
        lp.c[k] = -1.0;
        auto rmax = milp::solve_lp(lp);
        if (rmin.status != milp::SolveStatus::optimal || rmax.status != milp::SolveStatus::optimal)
            throw std::invalid_argument("build_milp: input constraint set must be bounded and nonempty");
        lo[k] = rmin.objective;
        hi[k] = -rmax.objective;
    }
    return {lo, hi};
}

} // namespace detail_ocp

/// Encodes the instance as an MILP: epigraph variables for the 1-norm
/// objective, one binary per scenario with big-M linking on the state rows,
/// the probability-weighted chance row, hard input rows, and state variables
/// eliminated through the prediction matrices. Variable layout:
/// [u (mN) | t (mN) | s scenario-major (K*nN) | z (K)].
inline milp::Model build_milp(const OCPInstance& inst) {
    inst.validate();
    const int mN = inst.stacked.m * inst.stacked.N;
    const int nN = inst.stacked.n * inst.stacked.N;
    const int K = inst.scenarios.size();

    const auto [u_lo, u_hi] = detail_ocp::input_box_hull(inst.U_N);

    milp::Model model;
    const int nvars = 2 * mN + K * nN + K;
    model.c = Eigen::VectorXd::Zero(nvars);
    model.lower = Eigen::VectorXd::Zero(nvars);
    model.upper = Eigen::VectorXd::Constant(nvars, std::numeric_limits<double>::infinity());

    const int t_off = mN;
    const int s_off = 2 * mN;
    const int z_off = 2 * mN + K * nN;

    model.lower.segment(0, mN) = u_lo;
    model.upper.segment(0, mN) = u_hi;
    double total_p = 0.0;
    for (int j = 0; j < K; ++j) total_p += inst.scenarios[j].probability;
    for (int k = 0; k < mN; ++k) model.c[t_off + k] = total_p;
    for (int j = 0; j < K; ++j) {
        for (int i = 0; i < nN; ++i) model.c[s_off + j * nN + i] = inst.scenarios[j].probability;
        model.lower[z_off + j] = 0.0;
        model.upper[z_off + j] = 1.0;
        model.binaries.push_back(z_off + j);
    }

    // |u_k| <= t_k
    for (int k = 0; k < mN; ++k) {
        model.add_row({k, t_off + k}, {1.0, -1.0}, milp::Sense::less_eq, 0.0);
        model.add_row({k, t_off + k}, {-1.0, -1.0}, milp::Sense::less_eq, 0.0);
    }

    const Eigen::VectorXd Fx0 = inst.stacked.F * inst.x0;
    const Eigen::MatrixXd HG = inst.X_N.H * inst.stacked.G;

    for (int j = 0; j < K; ++j) {
        const Eigen::VectorXd base = Fx0 + inst.stacked.Gamma * inst.scenarios[j].values;

        // |(G u)_i + base_i| <= s_{j,i}
        for (int i = 0; i < nN; ++i) {
            milp::Row pos, neg;
            for (int k = 0; k < mN; ++k) {
                const double g = inst.stacked.G(i, k);
                if (g != 0.0) {
                    pos.idx.push_back(k);
                    pos.val.push_back(g);
                    neg.idx.push_back(k);
                    neg.val.push_back(-g);
                }
            }
            pos.idx.push_back(s_off + j * nN + i);
            pos.val.push_back(-1.0);
            neg.idx.push_back(s_off + j * nN + i);
            neg.val.push_back(-1.0);
            pos.sense = neg.sense = milp::Sense::less_eq;
            pos.rhs = -base[i];
            neg.rhs = base[i];
            model.rows.push_back(std::move(pos));
            model.rows.push_back(std::move(neg));
        }

        // state rows with big-M linking: H x^{(j)} <= h^{(j)} + M (1 - z_j)
        const Eigen::VectorXd& h_j =
            inst.variant == Variant::p2 ? inst.guarantee->tightened_sets[j].h : inst.X_N.h;
        for (int r = 0; r < inst.X_N.rows(); ++r) {
            double sup = inst.X_N.H.row(r).dot(base);
            for (int k = 0; k < mN; ++k) {
                const double c = HG(r, k);
                sup += c > 0.0 ? c * u_hi[k] : c * u_lo[k];
            }
            const double big_m = std::max(0.0, sup - h_j[r]);
            milp::Row row;
            for (int k = 0; k < mN; ++k) {
                if (HG(r, k) != 0.0) {
                    row.idx.push_back(k);
                    row.val.push_back(HG(r, k));
                }
            }
            row.idx.push_back(z_off + j);
            row.val.push_back(big_m);
            row.sense = milp::Sense::less_eq;
            row.rhs = h_j[r] - inst.X_N.H.row(r).dot(base) + big_m;
            model.rows.push_back(std::move(row));
        }
    }

    // chance constraint: sum_j p_j z_j >= 1 - epsilon
    {
        milp::Row chance;
        for (int j = 0; j < K; ++j) {
            chance.idx.push_back(z_off + j);
            chance.val.push_back(inst.scenarios[j].probability);
        }
        chance.sense = milp::Sense::greater_eq;
        chance.rhs = 1.0 - inst.epsilon;
        model.rows.push_back(std::move(chance));
    }

    // hard input rows
    for (int r = 0; r < inst.U_N.rows(); ++r)
        model.add_row_dense(inst.U_N.H.row(r), milp::Sense::less_eq, inst.U_N.h[r]);

    return model;
}

/// Turns a raw MILP result into a Solution; for P2 the reported objective is
/// the MILP optimum plus the cost-correction constant.
inline Solution assemble_solution(const OCPInstance& inst, const milp::MilpResult& res) {
    Solution sol;
    sol.status = res.status;
    sol.gap = res.gap;
    sol.nodes = res.nodes;
    if (res.status != milp::SolveStatus::optimal && res.status != milp::SolveStatus::node_limit)
        return sol;
    if (res.x.size() == 0) return sol;  // limit hit before any incumbent

    const int mN = inst.stacked.m * inst.stacked.N;
    const int K = inst.scenarios.size();
    sol.u = res.x.segment(0, mN);
    sol.indicators = res.x.segment(res.x.size() - K, K);
    sol.milp_objective = res.objective;
    sol.objective = res.objective + (inst.variant == Variant::p2 ? inst.correction : 0.0);
    sol.trajectories.reserve(K);
    for (int j = 0; j < K; ++j)
        sol.trajectories.push_back(inst.stacked.predict(inst.x0, sol.u, inst.scenarios[j].values));
    return sol;
}

inline Solution solve_instance(const OCPInstance& inst, const milp::MilpOptions& opts = {}) {
    milp::Model model = build_milp(inst);
    milp::MilpResult res = milp::solve_milp(model, opts);
    return assemble_solution(inst, res);
}

/// Convenience builder wiring a reduction into a P1/P2 instance.
inline OCPInstance make_reduced_instance(Variant variant, const Eigen::VectorXd& x0,
                                         const StackedDynamics& stacked, const Polytope& X_N,
                                         const Polytope& U_N, const ScenarioSet& original,
                                         const ReducedSet& reduced, double epsilon) {
    OCPInstance inst{x0, stacked, X_N, U_N, reduced.centers, epsilon, variant, std::nullopt, 0.0};
    if (variant == Variant::p2) {
        inst.guarantee = build_guarantee_package(original, reduced, stacked.Gamma, X_N);
        inst.correction = inst.guarantee->correction;
    }
    return inst;
}

} // namespace scenred
