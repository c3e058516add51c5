#pragma once

#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "scenred/detail/text.hpp"

namespace scenred {

/// One disturbance trajectory over the horizon together with its probability.
/// The trajectory is stored flat in time-major order: all state-dimension
/// coordinates of step t come before those of step t+1.
struct Scenario {
    Eigen::VectorXd values;
    double probability = 0.0;
};

/// A discrete distribution over disturbance trajectories. Immutable after
/// construction; every constructor validates the set invariants.
class ScenarioSet {
public:
    ScenarioSet(std::vector<Scenario> scenarios, int state_dim, int horizon)
        : scenarios_(std::move(scenarios)), state_dim_(state_dim), horizon_(horizon) {
        validate();
    }

    const std::vector<Scenario>& scenarios() const { return scenarios_; }
    const Scenario& operator[](std::size_t j) const { return scenarios_[j]; }
    int size() const { return static_cast<int>(scenarios_.size()); }
    int state_dim() const { return state_dim_; }
    int horizon() const { return horizon_; }
    int trajectory_dim() const { return state_dim_ * horizon_; }

    Eigen::VectorXd probabilities() const {
        Eigen::VectorXd p(size());
        for (int j = 0; j < size(); ++j) p[j] = scenarios_[j].probability;
        return p;
    }

private:
    void validate() const {
        if (scenarios_.empty()) throw std::invalid_argument("ScenarioSet: at least one scenario required");
        if (state_dim_ < 1 || horizon_ < 1)
            throw std::invalid_argument("ScenarioSet: state_dim and horizon must be positive");
        const Eigen::Index len = static_cast<Eigen::Index>(state_dim_) * horizon_;
        double total = 0.0;
        for (const auto& s : scenarios_) {
            if (s.values.size() != len)
                throw std::invalid_argument("ScenarioSet: scenario length does not match state_dim*horizon");
            if (!(s.probability > 0.0) || s.probability > 1.0 + 1e-12)
                throw std::invalid_argument("ScenarioSet: probabilities must lie in (0,1]");
            total += s.probability;
        }
        if (std::abs(total - 1.0) > 1e-9)
            throw std::invalid_argument("ScenarioSet: probability mass not normalized");
    }

    std::vector<Scenario> scenarios_;
    int state_dim_;
    int horizon_;
};

/// Per-step sampling description for the synthetic generator.
struct DistributionSpec {
    enum class Kind { gaussian, uniform_box };
    Kind kind = Kind::gaussian;
    Eigen::VectorXd std_dev;  // gaussian: per-coordinate standard deviation
    Eigen::VectorXd box_lo;   // uniform_box: per-coordinate bounds
    Eigen::VectorXd box_hi;

    static DistributionSpec gaussian(Eigen::VectorXd std_dev) {
        DistributionSpec d;
        d.kind = Kind::gaussian;
        d.std_dev = std::move(std_dev);
        return d;
    }
    static DistributionSpec gaussian(int n, double std_dev) {
        return gaussian(Eigen::VectorXd::Constant(n, std_dev));
    }
    static DistributionSpec uniform(Eigen::VectorXd lo, Eigen::VectorXd hi) {
        DistributionSpec d;
        d.kind = Kind::uniform_box;
        d.box_lo = std::move(lo);
        d.box_hi = std::move(hi);
        return d;
    }
};

namespace detail {

// Samplers are written out explicitly so that generation depends only on the
// mt19937_64 stream, not on library-specific distribution algorithms.
inline double uniform01(std::mt19937_64& rng) {
    // (0,1): never returns 0, so log() below is safe
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1p-53;
}

inline double standard_normal(std::mt19937_64& rng) {
    double u1 = uniform01(rng);
    double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

} // namespace detail

/// Draws M equally likely disturbance trajectories, i.i.d. across steps.
/// Pure function of (seed, M, n, N, spec).
inline ScenarioSet generate_synthetic(std::uint64_t seed, int M, int n, int N,
                                      const DistributionSpec& spec) {
    if (M < 1) throw std::invalid_argument("generate_synthetic: M must be >= 1");
    if (n < 1 || N < 1) throw std::invalid_argument("generate_synthetic: n and N must be >= 1");
    switch (spec.kind) {
        case DistributionSpec::Kind::gaussian:
            if (spec.std_dev.size() != n)
                throw std::invalid_argument("generate_synthetic: std_dev must have length n");
            if ((spec.std_dev.array() < 0.0).any())
                throw std::invalid_argument("generate_synthetic: negative standard deviation");
            break;
        case DistributionSpec::Kind::uniform_box:
            if (spec.box_lo.size() != n || spec.box_hi.size() != n)
                throw std::invalid_argument("generate_synthetic: box bounds must have length n");
            if ((spec.box_hi.array() < spec.box_lo.array()).any())
                throw std::invalid_argument("generate_synthetic: empty box");
            break;
    }

    std::mt19937_64 rng(seed);
    std::vector<Scenario> scenarios(M);
    const double p = 1.0 / static_cast<double>(M);
    double assigned = 0.0;
    for (int j = 0; j < M; ++j) {
        Eigen::VectorXd v(static_cast<Eigen::Index>(n) * N);
        for (int k = 0; k < N; ++k) {
            for (int i = 0; i < n; ++i) {
                double x = 0.0;
                if (spec.kind == DistributionSpec::Kind::gaussian) {
                    x = spec.std_dev[i] * detail::standard_normal(rng);
                } else {
                    x = spec.box_lo[i] + detail::uniform01(rng) * (spec.box_hi[i] - spec.box_lo[i]);
                }
                v[static_cast<Eigen::Index>(k) * n + i] = x;
            }
        }
        scenarios[j].values = std::move(v);
        // last probability absorbs rounding so the mass sums to 1 exactly
        scenarios[j].probability = (j + 1 == M) ? 1.0 - assigned : p;
        assigned += p;
    }
    return ScenarioSet(std::move(scenarios), n, N);
}

/// Writes the set as CSV with header `p,v_0,...,v_{nN-1}`.
inline void save_scenarios_csv(const ScenarioSet& set, std::ostream& out) {
    const int len = set.trajectory_dim();
    out << "p";
    for (int i = 0; i < len; ++i) out << ",v_" << i;
    out << "\n";
    for (const auto& s : set.scenarios()) {
        out << detail::fmt_double(s.probability);
        for (Eigen::Index i = 0; i < s.values.size(); ++i) out << "," << detail::fmt_double(s.values[i]);
        out << "\n";
    }
}

/// Reads the CSV produced by save_scenarios_csv. The file does not carry the
/// (state_dim, horizon) split, so both must be supplied.
inline ScenarioSet load_scenarios_csv(std::istream& in, int state_dim, int horizon) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("scenario CSV: empty input");
    const Eigen::Index len = static_cast<Eigen::Index>(state_dim) * horizon;

    std::vector<Scenario> scenarios;
    double total = 0.0;
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        auto toks = detail::split_csv_line(line);
        if (static_cast<Eigen::Index>(toks.size()) != len + 1)
            throw std::runtime_error("scenario CSV: row " + std::to_string(row) +
                                     " has " + std::to_string(toks.size() - 1) +
                                     " values, expected " + std::to_string(len));
        Scenario s;
        s.probability = detail::parse_double(toks[0], "scenario CSV row " + std::to_string(row));
        s.values.resize(len);
        for (Eigen::Index i = 0; i < len; ++i)
            s.values[i] = detail::parse_double(toks[i + 1], "scenario CSV row " + std::to_string(row));
        total += s.probability;
        scenarios.push_back(std::move(s));
    }
    if (scenarios.empty()) throw std::runtime_error("scenario CSV: no data rows");
    if (std::abs(total - 1.0) > 1e-6) throw std::runtime_error("probability mass not normalized");
    // renormalize small text-precision drift; large drift was rejected above
    for (auto& s : scenarios) s.probability /= total;
    return ScenarioSet(std::move(scenarios), state_dim, horizon);
}

inline nlohmann::json to_json(const ScenarioSet& set) {
    nlohmann::json j;
    j["state_dim"] = set.state_dim();
    j["horizon"] = set.horizon();
    auto& arr = j["scenarios"] = nlohmann::json::array();
    for (const auto& s : set.scenarios()) {
        nlohmann::json e;
        e["p"] = s.probability;
        e["values"] = std::vector<double>(s.values.data(), s.values.data() + s.values.size());
        arr.push_back(std::move(e));
    }
    return j;
}

inline ScenarioSet scenario_set_from_json(const nlohmann::json& j) {
    if (!j.contains("state_dim") || !j.contains("horizon") || !j.contains("scenarios"))
        throw std::runtime_error("scenario JSON: missing state_dim/horizon/scenarios");
    const int n = j.at("state_dim").get<int>();
    const int N = j.at("horizon").get<int>();
    std::vector<Scenario> scenarios;
    double total = 0.0;
    for (const auto& e : j.at("scenarios")) {
        Scenario s;
        s.probability = e.at("p").get<double>();
        const auto vals = e.at("values").get<std::vector<double>>();
        s.values = Eigen::Map<const Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
        total += s.probability;
        scenarios.push_back(std::move(s));
    }
    if (scenarios.empty()) throw std::runtime_error("scenario JSON: no scenarios");
    if (std::abs(total - 1.0) > 1e-6) throw std::runtime_error("probability mass not normalized");
    for (auto& s : scenarios) s.probability /= total;
    return ScenarioSet(std::move(scenarios), n, N);
}

inline void save_scenarios_json(const ScenarioSet& set, std::ostream& out) {
    out << to_json(set).dump(2) << "\n";
}

inline ScenarioSet load_scenarios_json(std::istream& in) {
    nlohmann::json j;
    in >> j;
    return scenario_set_from_json(j);
}

} // namespace scenred
