#pragma once

#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "scenred/dynamics.hpp"
#include "scenred/reduction.hpp"
#include "scenred/scenario.hpp"

namespace scenred {

/// Axis-aligned interval [lower, upper] in trajectory space.
struct HyperBox {
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;

    HyperBox() = default;
    HyperBox(Eigen::VectorXd lo, Eigen::VectorXd hi) : lower(std::move(lo)), upper(std::move(hi)) {
        if (lower.size() != upper.size() || (lower.array() > upper.array()).any())
            throw std::invalid_argument("HyperBox: lower must be <= upper coordinate-wise");
    }

    bool contains(const Eigen::VectorXd& x) const {
        return (x.array() >= lower.array()).all() && (x.array() <= upper.array()).all();
    }

    /// sup over the box of a linear functional with row coefficients a.
    double support(const Eigen::RowVectorXd& a) const {
        double s = 0.0;
        for (Eigen::Index d = 0; d < a.size(); ++d)
            s += a[d] > 0.0 ? a[d] * upper[d] : a[d] * lower[d];
        return s;
    }
};

/// Per-cluster interval hull of the disturbance-image deviations
/// Gamma*(eta_h - center_j), h in cluster j. Every deviation lies inside its
/// box by construction.
inline std::vector<HyperBox> compute_deviation_boxes(const ScenarioSet& original,
                                                     const ReducedSet& reduced,
                                                     const Eigen::MatrixXd& Gamma) {
    const int M = original.size();
    const int K = reduced.centers.size();
    if (static_cast<int>(reduced.assignment.assignment.size()) != M)
        throw std::invalid_argument("compute_deviation_boxes: assignment/set size mismatch");
    if (Gamma.rows() != original.trajectory_dim() || Gamma.cols() != original.trajectory_dim())
        throw std::invalid_argument("compute_deviation_boxes: Gamma dimension mismatch");

    const Eigen::Index dim = Gamma.rows();
    std::vector<HyperBox> boxes(K);
    std::vector<bool> touched(K, false);
    for (int h = 0; h < M; ++h) {
        const int j = reduced.assignment.assignment[h];
        if (j < 0 || j >= K)
            throw std::invalid_argument("compute_deviation_boxes: assignment index out of range");
        const Eigen::VectorXd dev = Gamma * (original[h].values - reduced.centers[j].values);
        if (!touched[j]) {
            boxes[j].lower = dev;
            boxes[j].upper = dev;
            touched[j] = true;
        } else {
            boxes[j].lower = boxes[j].lower.cwiseMin(dev);
            boxes[j].upper = boxes[j].upper.cwiseMax(dev);
        }
    }
    for (int j = 0; j < K; ++j) {
        if (!touched[j]) {
            boxes[j].lower = Eigen::VectorXd::Zero(dim);
            boxes[j].upper = Eigen::VectorXd::Zero(dim);
        }
    }
    return boxes;
}

/// Minkowski difference X ominus box for a halfspace polytope: each bound is
/// lowered by the box support of its row. The result may be empty; that is
/// reported by the downstream solver, not here.
inline Polytope tighten(const Polytope& X, const HyperBox& box) {
    if (X.dim() != box.lower.size()) throw std::invalid_argument("tighten: dimension mismatch");
    Eigen::VectorXd h(X.rows());
    for (int r = 0; r < X.rows(); ++r) h[r] = X.h[r] - box.support(X.H.row(r));
    return Polytope(X.H, std::move(h));
}

/// Tightest admissible cost-correction constant,
/// sum_j sum_{h in C_j} p_h ||Gamma (eta_h - center_j)||_1.
inline double cost_correction(const ScenarioSet& original, const ReducedSet& reduced,
                              const Eigen::MatrixXd& Gamma) {
    const int M = original.size();
    if (static_cast<int>(reduced.assignment.assignment.size()) != M)
        throw std::invalid_argument("cost_correction: assignment/set size mismatch");
    double c = 0.0;
    for (int h = 0; h < M; ++h) {
        const int j = reduced.assignment.assignment[h];
        c += original[h].probability *
             (Gamma * (original[h].values - reduced.centers[j].values)).lpNorm<1>();
    }
    return c;
}

/// Everything the robustified problem needs: per-cluster deviation boxes, the
/// correspondingly tightened state sets, and the cost-correction constant.
struct GuaranteePackage {
    std::vector<HyperBox> deviation_boxes;
    std::vector<Polytope> tightened_sets;
    double correction = 0.0;
};

inline GuaranteePackage build_guarantee_package(const ScenarioSet& original,
                                                const ReducedSet& reduced,
                                                const Eigen::MatrixXd& Gamma, const Polytope& X_N) {
    GuaranteePackage g;
    g.deviation_boxes = compute_deviation_boxes(original, reduced, Gamma);
    g.tightened_sets.reserve(g.deviation_boxes.size());
    for (const auto& box : g.deviation_boxes) g.tightened_sets.push_back(tighten(X_N, box));
    g.correction = cost_correction(original, reduced, Gamma);
    return g;
}

inline nlohmann::json to_json(const GuaranteePackage& g) {
    nlohmann::json j;
    auto& boxes = j["deviation_boxes"] = nlohmann::json::array();
    for (const auto& b : g.deviation_boxes) {
        boxes.push_back({{"lower", std::vector<double>(b.lower.data(), b.lower.data() + b.lower.size())},
                         {"upper", std::vector<double>(b.upper.data(), b.upper.data() + b.upper.size())}});
    }
    auto& tight = j["tightened_h"] = nlohmann::json::array();
    for (const auto& p : g.tightened_sets)
        tight.push_back(std::vector<double>(p.h.data(), p.h.data() + p.h.size()));
    j["correction"] = g.correction;
    return j;
}

} // namespace scenred
