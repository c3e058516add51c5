// Command-line front end: generate / reduce / solve / evaluate / experiment.
// Exit codes: 0 success, 1 validation error, 2 solver infeasible, 3 limits hit.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "scenred/scenred.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitLimit = 3;

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
    return out;
}

int status_exit_code(scenred::milp::SolveStatus s) {
    switch (s) {
        case scenred::milp::SolveStatus::optimal: return kExitOk;
        case scenred::milp::SolveStatus::infeasible: return kExitInfeasible;
        case scenred::milp::SolveStatus::unbounded: return kExitInfeasible;
        case scenred::milp::SolveStatus::iteration_limit: return kExitLimit;
        case scenred::milp::SolveStatus::node_limit: return kExitLimit;
    }
    return kExitValidation;
}

struct CommonArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed_override;
    std::string out_path;
};

scenred::ExperimentConfig load_cfg(const CommonArgs& args) {
    if (args.config_path.empty()) throw std::runtime_error("--config is required for this command");
    scenred::ExperimentConfig cfg = scenred::load_config(args.config_path);
    if (args.seed_override) cfg.seed = *args.seed_override;
    return cfg;
}

nlohmann::json solution_to_json(const scenred::Solution& sol, const std::string& variant,
                                const std::string& method, int M_tilde, double correction) {
    nlohmann::json j;
    j["variant"] = variant;
    j["method"] = method;
    j["M_tilde"] = M_tilde;
    j["status"] = scenred::milp::status_name(sol.status);
    j["objective"] = sol.objective;
    j["milp_objective"] = sol.milp_objective;
    j["correction"] = correction;
    j["nodes"] = sol.nodes;
    j["gap"] = sol.gap;
    j["u"] = std::vector<double>(sol.u.data(), sol.u.data() + sol.u.size());
    j["indicators"] =
        std::vector<double>(sol.indicators.data(), sol.indicators.data() + sol.indicators.size());
    return j;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"scenario reduction with out-of-sample guarantees for chance-constrained "
                 "linear optimal control"};
    app.require_subcommand(1);
    app.fallthrough();

    CommonArgs common;
    app.add_option("--config", common.config_path, "experiment config file (JSON)");
    std::uint64_t seed_raw = 0;
    auto* seed_opt = app.add_option("--seed", seed_raw, "override the config seed");
    app.add_option("--out", common.out_path, "output file path");

    // generate
    auto* gen = app.add_subcommand("generate", "draw a synthetic scenario set");
    std::uint64_t gen_seed = 0;
    int gen_M = 0, gen_n = 0, gen_N = 0;
    std::string gen_dist = "gaussian", gen_format = "csv";
    double gen_std = 0.1, gen_lo = -1.0, gen_hi = 1.0;
    gen->add_option("--seed", gen_seed, "generator seed")->required();
    gen->add_option("--M", gen_M, "number of scenarios")->required();
    gen->add_option("--n", gen_n, "disturbance dimension per step")->required();
    gen->add_option("--N", gen_N, "horizon length")->required();
    gen->add_option("--dist", gen_dist, "gaussian|uniform");
    gen->add_option("--std", gen_std, "gaussian std per coordinate");
    gen->add_option("--lo", gen_lo, "uniform box lower bound");
    gen->add_option("--hi", gen_hi, "uniform box upper bound");
    gen->add_option("--format", gen_format, "csv|json");

    // reduce
    auto* red = app.add_subcommand("reduce", "cluster a scenario set down to M_tilde centers");
    std::string red_in, red_format = "csv";
    int red_Mt = 0, red_norm = 1, red_n = 0, red_N = 0, red_max_iter = 100;
    double red_tol = 1e-10;
    std::uint64_t red_seed = 0;
    red->add_option("--in", red_in, "scenario file (csv or json)");
    red->add_option("--format", red_format, "csv|json");
    red->add_option("--state-dim", red_n, "per-step dimension (csv input)");
    red->add_option("--horizon", red_N, "horizon (csv input)");
    red->add_option("--M-tilde", red_Mt, "reduced cardinality")->required();
    red->add_option("--norm", red_norm, "1 (kMED) or 2 (kMNS)");
    red->add_option("--seed", red_seed, "seeding tie-break seed");
    red->add_option("--max-iter", red_max_iter, "iteration cap");
    red->add_option("--tol", red_tol, "loss-decrease stopping tolerance");

    // solve
    auto* slv = app.add_subcommand("solve", "solve one problem variant from the config");
    std::string slv_variant = "P2", slv_method = "kMED", slv_audit;
    int slv_Mt = 0;
    slv->add_option("--variant", slv_variant, "EXACT|P1|P2")->required();
    slv->add_option("--method", slv_method, "kMED|kMNS (reduction for P1/P2)");
    slv->add_option("--M-tilde", slv_Mt, "reduced cardinality (default: first grid entry)");
    slv->add_option("--audit", slv_audit, "write the P2 guarantee package (boxes, tightened bounds, correction) as JSON");

    // evaluate
    auto* evl = app.add_subcommand("evaluate", "out-of-sample evaluation of a solution file");
    std::string evl_solution;
    evl->add_option("--solution", evl_solution, "solution JSON produced by solve")->required();

    // experiment
    auto* exp = app.add_subcommand("experiment", "run the full comparison sweep to CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }
    if (seed_opt->count() > 0) common.seed_override = seed_raw;

    try {
        if (gen->parsed()) {
            scenred::DistributionSpec spec =
                gen_dist == "uniform"
                    ? scenred::DistributionSpec::uniform(Eigen::VectorXd::Constant(gen_n, gen_lo),
                                                         Eigen::VectorXd::Constant(gen_n, gen_hi))
                    : scenred::DistributionSpec::gaussian(gen_n, gen_std);
            if (gen_dist != "uniform" && gen_dist != "gaussian")
                throw std::runtime_error("unknown distribution '" + gen_dist + "'");
            scenred::ScenarioSet set = scenred::generate_synthetic(gen_seed, gen_M, gen_n, gen_N, spec);
            const std::string path = common.out_path.empty()
                                         ? ("scenarios." + gen_format)
                                         : common.out_path;
            auto out = open_out(path);
            if (gen_format == "json")
                scenred::save_scenarios_json(set, out);
            else
                scenred::save_scenarios_csv(set, out);
            std::cout << "wrote " << set.size() << " scenarios to " << path << "\n";
            return kExitOk;
        }

        if (red->parsed()) {
            std::optional<scenred::ScenarioSet> set;
            if (!red_in.empty()) {
                std::ifstream in(red_in);
                if (!in) throw std::runtime_error("cannot open scenario file '" + red_in + "'");
                if (red_format == "json") {
                    set = scenred::load_scenarios_json(in);
                } else {
                    if (red_n < 1 || red_N < 1)
                        throw std::runtime_error("--state-dim and --horizon are required for csv input");
                    set = scenred::load_scenarios_csv(in, red_n, red_N);
                }
            } else {
                set = load_cfg(common).load_or_generate_scenarios();
            }
            if (red_norm != 1 && red_norm != 2) throw std::runtime_error("--norm must be 1 or 2");
            const scenred::Norm l = red_norm == 1 ? scenred::Norm::l1 : scenred::Norm::l2;
            scenred::ReducedSet reduced =
                scenred::reduce(*set, red_Mt, l, red_seed, red_max_iter, red_tol);
            const std::string path = common.out_path.empty() ? "reduced.json" : common.out_path;
            auto out = open_out(path);
            out << scenred::to_json(reduced).dump(2) << "\n";
            std::cout << "reduced " << set->size() << " -> " << reduced.centers.size()
                      << " scenarios, loss " << reduced.loss << ", iterations "
                      << reduced.iterations << ", wrote " << path << "\n";
            return kExitOk;
        }

        if (slv->parsed()) {
            scenred::ExperimentConfig cfg = load_cfg(common);
            const scenred::Variant variant = scenred::variant_from_string(slv_variant);
            const scenred::ScenarioSet full = cfg.load_or_generate_scenarios();
            const scenred::LinearSystem sys = cfg.system();
            const scenred::StackedDynamics stacked = scenred::build_stacked(sys, cfg.horizon);
            const scenred::Polytope X_N = cfg.state_set();
            const scenred::Polytope U_N = cfg.input_set();

            scenred::milp::MilpOptions opts;
            opts.node_limit = cfg.node_limit;
            opts.abs_gap = cfg.abs_gap;
            opts.lp.max_pivots = cfg.max_pivots;

            scenred::Solution sol;
            std::string method = "-";
            int M_tilde = full.size();
            double correction = 0.0;
            if (variant == scenred::Variant::exact) {
                scenred::OCPInstance inst{cfg.x0, stacked, X_N,  U_N, full, cfg.epsilon(),
                                          variant, std::nullopt, 0.0};
                if (full.size() > cfg.exact_max_scenarios) opts.node_limit = cfg.exact_node_limit;
                sol = scenred::solve_instance(inst, opts);
            } else {
                scenred::Norm l = scenred::Norm::l1;
                if (slv_method == "kMNS")
                    l = scenred::Norm::l2;
                else if (slv_method != "kMED")
                    throw std::runtime_error("unknown method '" + slv_method + "'");
                M_tilde = slv_Mt > 0 ? slv_Mt : (cfg.grid.empty() ? full.size() : cfg.grid.front());
                scenred::ReducedSet reduced =
                    scenred::reduce(full, M_tilde, l, cfg.seed, cfg.max_iter, cfg.tol);
                scenred::OCPInstance inst = scenred::make_reduced_instance(
                    variant, cfg.x0, stacked, X_N, U_N, full, reduced, cfg.epsilon());
                correction = inst.correction;
                if (!slv_audit.empty() && inst.guarantee) {
                    auto audit = open_out(slv_audit);
                    audit << scenred::to_json(*inst.guarantee).dump(2) << "\n";
                }
                sol = scenred::solve_instance(inst, opts);
                method = slv_method;
            }

            std::cout << slv_variant << " status=" << scenred::milp::status_name(sol.status)
                      << " objective=" << sol.objective << " correction=" << correction
                      << " nodes=" << sol.nodes << "\n";
            if (!common.out_path.empty()) {
                auto out = open_out(common.out_path);
                out << solution_to_json(sol, slv_variant, method, M_tilde, correction).dump(2)
                    << "\n";
            }
            return status_exit_code(sol.status);
        }

        if (evl->parsed()) {
            scenred::ExperimentConfig cfg = load_cfg(common);
            std::ifstream in(evl_solution);
            if (!in) throw std::runtime_error("cannot open solution file '" + evl_solution + "'");
            nlohmann::json j;
            in >> j;
            const auto u_vals = j.at("u").get<std::vector<double>>();
            const Eigen::VectorXd u =
                Eigen::Map<const Eigen::VectorXd>(u_vals.data(), static_cast<Eigen::Index>(u_vals.size()));

            const scenred::ScenarioSet full = cfg.load_or_generate_scenarios();
            const scenred::StackedDynamics stacked = scenred::build_stacked(cfg.system(), cfg.horizon);
            scenred::OOSReport rep =
                scenred::oos_evaluate(u, full, cfg.x0, stacked, cfg.state_set());
            std::cout << "satisfaction_prob=" << rep.satisfaction_prob
                      << " expected_cost_oos=" << rep.expected_cost_oos << "\n";
            if (!common.out_path.empty()) {
                nlohmann::json out_j;
                out_j["satisfaction_prob"] = rep.satisfaction_prob;
                out_j["expected_cost_oos"] = rep.expected_cost_oos;
                out_j["min_satisfaction_prob"] = cfg.min_satisfaction_prob;
                auto out = open_out(common.out_path);
                out << out_j.dump(2) << "\n";
            }
            return kExitOk;
        }

        if (exp->parsed()) {
            scenred::ExperimentConfig cfg = load_cfg(common);
            scenred::ExperimentResult result = scenred::run_experiment(cfg);
            const std::string path = common.out_path.empty() ? cfg.output : common.out_path;
            auto out = open_out(path);
            scenred::write_csv(result, out);
            std::cout << "wrote " << result.rows.size() << " rows to " << path << "\n";
            int worst = kExitOk;
            for (const auto& row : result.rows) {
                if (row.status == "infeasible") worst = std::max(worst, kExitInfeasible);
                if (row.status == "node_limit" || row.status == "iteration_limit")
                    worst = std::max(worst, kExitLimit);
            }
            // EXACT above the tractability cutoff may legitimately stop at its
            // node budget; the sweep itself still succeeded
            return worst == kExitLimit ? kExitOk : worst;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitValidation;
}
