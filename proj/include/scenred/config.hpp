#pragma once

#include <cstdint>
#include <fstream>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "scenred/dynamics.hpp"
#include "scenred/reduction.hpp"
#include "scenred/scenario.hpp"

namespace scenred {

/// Everything the pipeline needs, read from one JSON file. See the repository
/// README for the documented schema and a complete example.
struct ExperimentConfig {
    Eigen::MatrixXd A;
    Eigen::MatrixXd B;
    int horizon = 1;
    Eigen::VectorXd x0;

    Eigen::VectorXd state_lo, state_hi;  // +-inf entries allowed
    int first_step = 1;                  // constrained state steps, 1-based
    int last_step = -1;                  // -1: horizon
    Eigen::VectorXd input_lo, input_hi;

    double min_satisfaction_prob = 1.0;

    // scenario source
    enum class Source { generate, file };
    Source source = Source::generate;
    int M = 1;
    DistributionSpec::Kind dist_kind = DistributionSpec::Kind::gaussian;
    Eigen::VectorXd dist_std;  // gaussian
    Eigen::VectorXd dist_lo, dist_hi;  // uniform box
    std::uint64_t seed = 0;
    std::string scenario_path;
    std::string scenario_format = "csv";

    std::vector<int> grid;
    std::vector<Norm> methods;
    int max_iter = 100;
    double tol = 1e-10;

    long node_limit = 1000000;
    double abs_gap = 0.0;
    long max_pivots = 0;
    long exact_node_limit = 3000;
    int exact_max_scenarios = 60;

    std::string output = "results.csv";

    LinearSystem system() const { return LinearSystem(A, B); }
    double epsilon() const { return 1.0 - min_satisfaction_prob; }
    int state_dim() const { return static_cast<int>(A.rows()); }
    int input_dim() const { return static_cast<int>(B.cols()); }

    Polytope state_set() const {
        const int last = last_step < 0 ? horizon : last_step;
        return stack_constraints(box_polytope(state_lo, state_hi), horizon, first_step, last);
    }
    Polytope input_set() const {
        return stack_constraints(box_polytope(input_lo, input_hi), horizon);
    }

    DistributionSpec distribution() const {
        if (dist_kind == DistributionSpec::Kind::gaussian) return DistributionSpec::gaussian(dist_std);
        return DistributionSpec::uniform(dist_lo, dist_hi);
    }

    ScenarioSet load_or_generate_scenarios() const {
        if (source == Source::generate)
            return generate_synthetic(seed, M, state_dim(), horizon, distribution());
        std::ifstream in(scenario_path);
        if (!in) throw std::runtime_error("cannot open scenario file '" + scenario_path + "'");
        if (scenario_format == "json") return load_scenarios_json(in);
        return load_scenarios_csv(in, state_dim(), horizon);
    }

    void validate() const {
        if (A.rows() != A.cols() || B.rows() != A.rows())
            throw std::invalid_argument("config: system matrices have inconsistent dimensions");
        if (horizon < 1) throw std::invalid_argument("config: horizon must be >= 1");
        if (x0.size() != A.rows()) throw std::invalid_argument("config: initial_state dimension mismatch");
        if (!(min_satisfaction_prob > 0.0 && min_satisfaction_prob <= 1.0))
            throw std::invalid_argument("config: min_satisfaction_prob must lie in (0,1]");
        if (state_lo.size() != A.rows() || state_hi.size() != A.rows())
            throw std::invalid_argument("config: state constraint dimension mismatch");
        if (input_lo.size() != B.cols() || input_hi.size() != B.cols())
            throw std::invalid_argument("config: input constraint dimension mismatch");
        const int last = last_step < 0 ? horizon : last_step;
        if (first_step < 1 || last > horizon || first_step > last)
            throw std::invalid_argument("config: invalid constrained step range");
        if (source == Source::generate) {
            if (M < 1) throw std::invalid_argument("config: scenario count must be >= 1");
            for (int g : grid)
                if (g > M) throw std::invalid_argument("config: grid value exceeds scenario count");
        }
        for (int g : grid)
            if (g < 1) throw std::invalid_argument("config: grid values must be >= 1");
        if (max_iter < 1) throw std::invalid_argument("config: max_iter must be >= 1");
    }
};

namespace detail_cfg {

inline Eigen::VectorXd vec_from_json(const nlohmann::json& j, const char* what) {
    if (!j.is_array()) throw std::runtime_error(std::string("config: ") + what + " must be an array");
    Eigen::VectorXd v(j.size());
    Eigen::Index k = 0;
    for (const auto& e : j) {
        if (e.is_string()) {
            const std::string s = e.get<std::string>();
            if (s == "inf")
                v[k] = std::numeric_limits<double>::infinity();
            else if (s == "-inf")
                v[k] = -std::numeric_limits<double>::infinity();
            else
                throw std::runtime_error(std::string("config: bad entry in ") + what);
        } else {
            v[k] = e.get<double>();
        }
        ++k;
    }
    return v;
}

inline Eigen::MatrixXd mat_from_json(const nlohmann::json& j, const char* what) {
    if (!j.is_array() || j.empty())
        throw std::runtime_error(std::string("config: ") + what + " must be a nonempty nested array");
    const Eigen::Index rows = j.size();
    const Eigen::Index cols = j.front().size();
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        if (static_cast<Eigen::Index>(j[r].size()) != cols)
            throw std::runtime_error(std::string("config: ragged rows in ") + what);
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
    }
    return m;
}

inline Eigen::VectorXd bound_or_default(const nlohmann::json& block, const char* key, Eigen::Index dim,
                                        double fallback) {
    if (block.contains(key)) return vec_from_json(block.at(key), key);
    return Eigen::VectorXd::Constant(dim, fallback);
}

} // namespace detail_cfg

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
    using detail_cfg::bound_or_default;
    using detail_cfg::mat_from_json;
    using detail_cfg::vec_from_json;
    const double inf = std::numeric_limits<double>::infinity();

    ExperimentConfig cfg;
    const auto& sys = j.at("system");
    cfg.A = mat_from_json(sys.at("A"), "system.A");
    cfg.B = mat_from_json(sys.at("B"), "system.B");
    cfg.horizon = j.at("horizon").get<int>();
    cfg.x0 = vec_from_json(j.at("initial_state"), "initial_state");

    const auto& sc = j.at("state_constraints");
    cfg.state_lo = bound_or_default(sc, "lower", cfg.A.rows(), -inf);
    cfg.state_hi = bound_or_default(sc, "upper", cfg.A.rows(), inf);
    cfg.first_step = sc.value("first_step", 1);
    cfg.last_step = sc.value("last_step", -1);

    const auto& ic = j.at("input_constraints");
    cfg.input_lo = bound_or_default(ic, "lower", cfg.B.cols(), -inf);
    cfg.input_hi = bound_or_default(ic, "upper", cfg.B.cols(), inf);

    cfg.min_satisfaction_prob = j.at("min_satisfaction_prob").get<double>();

    const auto& sn = j.at("scenarios");
    const std::string source = sn.value("source", "generate");
    if (source == "generate") {
        cfg.source = ExperimentConfig::Source::generate;
        cfg.M = sn.at("M").get<int>();
        cfg.seed = sn.value("seed", 0ULL);
        const std::string dist = sn.value("distribution", "gaussian");
        if (dist == "gaussian") {
            cfg.dist_kind = DistributionSpec::Kind::gaussian;
            if (sn.contains("std") && sn.at("std").is_array())
                cfg.dist_std = vec_from_json(sn.at("std"), "scenarios.std");
            else
                cfg.dist_std = Eigen::VectorXd::Constant(cfg.A.rows(), sn.value("std", 0.1));
        } else if (dist == "uniform") {
            cfg.dist_kind = DistributionSpec::Kind::uniform_box;
            cfg.dist_lo = vec_from_json(sn.at("lower"), "scenarios.lower");
            cfg.dist_hi = vec_from_json(sn.at("upper"), "scenarios.upper");
        } else {
            throw std::runtime_error("config: unknown distribution '" + dist + "'");
        }
    } else if (source == "file") {
        cfg.source = ExperimentConfig::Source::file;
        cfg.scenario_path = sn.at("path").get<std::string>();
        cfg.scenario_format = sn.value("format", "csv");
        cfg.seed = sn.value("seed", 0ULL);
    } else {
        throw std::runtime_error("config: unknown scenario source '" + source + "'");
    }

    if (j.contains("reduction")) {
        const auto& rd = j.at("reduction");
        cfg.grid = rd.value("grid", std::vector<int>{});
        for (const auto& name : rd.value("methods", std::vector<std::string>{"kMED", "kMNS"})) {
            if (name == "kMED")
                cfg.methods.push_back(Norm::l1);
            else if (name == "kMNS")
                cfg.methods.push_back(Norm::l2);
            else
                throw std::runtime_error("config: unknown method '" + name + "' (use kMED or kMNS)");
        }
        cfg.max_iter = rd.value("max_iter", 100);
        cfg.tol = rd.value("tol", 1e-10);
    }

    if (j.contains("solver")) {
        const auto& sv = j.at("solver");
        cfg.node_limit = sv.value("node_limit", 1000000L);
        cfg.abs_gap = sv.value("abs_gap", 0.0);
        cfg.max_pivots = sv.value("max_pivots", 0L);
        cfg.exact_node_limit = sv.value("exact_node_limit", 3000L);
        cfg.exact_max_scenarios = sv.value("exact_max_scenarios", 60);
    }

    cfg.output = j.value("output", std::string("results.csv"));
    cfg.validate();
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error("config parse error: " + std::string(e.what()));
    }
    try {
        return config_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("config error: " + std::string(e.what()));
    }
}

} // namespace scenred
