#pragma once

#include <chrono>
#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "scenred/config.hpp"
#include "scenred/detail/text.hpp"
#include "scenred/dynamics.hpp"
#include "scenred/ocp.hpp"
#include "scenred/reduction.hpp"

namespace scenred {

/// Out-of-sample metrics of one solve, evaluated exactly over the full
/// scenario set (no sampling error: the distribution is discrete and known).
struct OOSReport {
    std::string variant;
    std::string method;
    int M_tilde = 0;
    std::uint64_t seed = 0;
    std::string status;
    double objective = 0.0;
    double correction = 0.0;
    double satisfaction_prob = 0.0;
    double expected_cost_oos = 0.0;
    double solver_time_s = 0.0;
    long nodes = 0;
    bool has_solution = false;
};

/// Exact enumeration of chance-constraint satisfaction and expected cost for
/// a fixed input over the full set. Row feasibility tolerance 1e-9.
inline OOSReport oos_evaluate(const Eigen::VectorXd& u, const ScenarioSet& full,
                              const Eigen::VectorXd& x0, const StackedDynamics& stacked,
                              const Polytope& X_N) {
    if (u.size() != static_cast<Eigen::Index>(stacked.m) * stacked.N)
        throw std::invalid_argument("oos_evaluate: input dimension mismatch");
    if (full.trajectory_dim() != stacked.n * stacked.N)
        throw std::invalid_argument("oos_evaluate: scenario dimension mismatch");

    OOSReport rep;
    const double u_cost = u.lpNorm<1>();
    for (const auto& s : full.scenarios()) {
        const Eigen::VectorXd x = stacked.predict(x0, u, s.values);
        if (X_N.contains(x, 1e-9)) rep.satisfaction_prob += s.probability;
        rep.expected_cost_oos += s.probability * (x.lpNorm<1>() + u_cost);
    }
    rep.has_solution = true;
    return rep;
}

/// Rows of the comparison sweep in grid order, EXACT baseline first.
struct ExperimentResult {
    std::vector<OOSReport> rows;
};

inline void write_csv(const ExperimentResult& result, std::ostream& out) {
    out << "variant,method,M_tilde,seed,status,objective,correction,satisfaction_prob,"
           "expected_cost_oos,solver_time_s,nodes\n";
    for (const auto& r : result.rows) {
        out << r.variant << "," << r.method << "," << r.M_tilde << "," << r.seed << "," << r.status
            << ",";
        if (r.has_solution) {
            out << detail::fmt_double(r.objective) << "," << detail::fmt_double(r.correction) << ","
                << detail::fmt_double(r.satisfaction_prob) << ","
                << detail::fmt_double(r.expected_cost_oos) << ",";
        } else {
            out << ",,,,";
        }
        char tbuf[32];
        std::snprintf(tbuf, sizeof(tbuf), "%.6f", r.solver_time_s);
        out << tbuf << "," << r.nodes << "\n";
    }
}

namespace detail_eval {

inline OOSReport run_cell(const OCPInstance& inst, const ScenarioSet& full,
                          const ExperimentConfig& cfg, const std::string& method, int M_tilde,
                          long node_limit) {
    milp::MilpOptions opts;
    opts.node_limit = node_limit;
    opts.abs_gap = cfg.abs_gap;
    opts.lp.max_pivots = cfg.max_pivots;

    milp::Model model = build_milp(inst);
    const auto t0 = std::chrono::steady_clock::now();
    milp::MilpResult res = milp::solve_milp(model, opts);
    const auto t1 = std::chrono::steady_clock::now();
    Solution sol = assemble_solution(inst, res);

    OOSReport row;
    row.variant = variant_name(inst.variant);
    row.method = method;
    row.M_tilde = M_tilde;
    row.seed = cfg.seed;
    row.status = milp::status_name(sol.status);
    row.solver_time_s = std::chrono::duration<double>(t1 - t0).count();
    row.nodes = sol.nodes;
    if (sol.u.size() > 0) {
        OOSReport metrics = oos_evaluate(sol.u, full, inst.x0, inst.stacked, inst.X_N);
        row.satisfaction_prob = metrics.satisfaction_prob;
        row.expected_cost_oos = metrics.expected_cost_oos;
        row.objective = sol.objective;
        row.correction = inst.correction;
        row.has_solution = true;
    }
    return row;
}

} // namespace detail_eval

/// The full comparison sweep: EXACT baseline (full node budget up to
/// exact_max_scenarios scenarios, a fixed reduced node budget above that),
/// then P1 and P2 for every (method, M_tilde) cell. Individual solve failures
/// become status rows; the sweep never aborts. Deterministic for a fixed
/// config, including node counts.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const ScenarioSet full = cfg.load_or_generate_scenarios();
    for (int g : cfg.grid)
        if (g > full.size())
            throw std::invalid_argument("experiment: grid value exceeds scenario count");

    const LinearSystem sys = cfg.system();
    const StackedDynamics stacked = build_stacked(sys, cfg.horizon);
    const Polytope X_N = cfg.state_set();
    const Polytope U_N = cfg.input_set();
    const double eps = cfg.epsilon();

    ExperimentResult result;
    if (cfg.grid.empty() || cfg.methods.empty()) return result;  // nothing to compare

    {
        OCPInstance inst{cfg.x0, stacked, X_N, U_N, full, eps, Variant::exact, std::nullopt, 0.0};
        const long budget =
            full.size() <= cfg.exact_max_scenarios ? cfg.node_limit : cfg.exact_node_limit;
        OOSReport row = detail_eval::run_cell(inst, full, cfg, "-", full.size(), budget);
        result.rows.push_back(std::move(row));
    }

    for (Norm method : cfg.methods) {
        for (int M_tilde : cfg.grid) {
            ReducedSet reduced = reduce(full, M_tilde, method, cfg.seed, cfg.max_iter, cfg.tol);
            for (Variant variant : {Variant::p1, Variant::p2}) {
                OCPInstance inst = make_reduced_instance(variant, cfg.x0, stacked, X_N, U_N, full,
                                                         reduced, eps);
                result.rows.push_back(detail_eval::run_cell(inst, full, cfg, norm_name(method),
                                                            M_tilde, cfg.node_limit));
            }
        }
    }
    return result;
}

} // namespace scenred
