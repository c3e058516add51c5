#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "scenred/scenario.hpp"

namespace scenred {

/// Distance exponent of the clustering loss: ||.||_l^l with l in {1,2}.
enum class Norm { l1 = 1, l2 = 2 };

inline const char* norm_name(Norm l) { return l == Norm::l1 ? "kMED" : "kMNS"; }

namespace detail {

inline double dist_pow(const Eigen::VectorXd& a, const Eigen::VectorXd& b, Norm l) {
    if (l == Norm::l1) return (a - b).lpNorm<1>();
    return (a - b).squaredNorm();
}

// Expected distance of each scenario to its nearest center,
// sum_h p_h min_j ||eta_h - center_j||_l^l.
inline double loss_of(const ScenarioSet& original, const std::vector<Eigen::VectorXd>& centers, Norm l) {
    double loss = 0.0;
    for (const auto& s : original.scenarios()) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& c : centers) best = std::min(best, dist_pow(s.values, c, l));
        loss += s.probability * best;
    }
    return loss;
}

// Minimizer of sum_h w_h |v_h - c| per coordinate: smallest value where the
// cumulative weight reaches half the total (left weighted median).
inline double weighted_median(std::vector<std::pair<double, double>>& value_weight) {
    std::sort(value_weight.begin(), value_weight.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    double total = 0.0;
    for (const auto& [v, w] : value_weight) total += w;
    const double half = 0.5 * total;
    double cum = 0.0;
    for (const auto& [v, w] : value_weight) {
        cum += w;
        if (cum >= half) return v;
    }
    return value_weight.back().first;
}

inline Eigen::VectorXd weighted_center(const std::vector<const Eigen::VectorXd*>& pts,
                                       const std::vector<double>& weights, Norm l) {
    if (pts.empty()) throw std::invalid_argument("update_center: empty member list");
    if (pts.size() == 1) return *pts.front();  // unique minimizer for both norms
    const Eigen::Index dim = pts.front()->size();
    Eigen::VectorXd center(dim);
    if (l == Norm::l2) {
        center.setZero();
        double total = 0.0;
        for (std::size_t h = 0; h < pts.size(); ++h) {
            center += weights[h] * (*pts[h]);
            total += weights[h];
        }
        center /= total;
    } else {
        std::vector<std::pair<double, double>> vw(pts.size());
        for (Eigen::Index i = 0; i < dim; ++i) {
            for (std::size_t h = 0; h < pts.size(); ++h) vw[h] = {(*pts[h])[i], weights[h]};
            center[i] = weighted_median(vw);
        }
    }
    return center;
}

} // namespace detail

/// Map from each original scenario to its cluster index.
struct ClusterAssignment {
    std::vector<int> assignment;
    int num_clusters = 0;
};

/// Weighted expected nearest-center distance (the clustering objective).
inline double evaluate_loss(const ScenarioSet& centers, const ScenarioSet& original, Norm l) {
    if (centers.trajectory_dim() != original.trajectory_dim())
        throw std::invalid_argument("evaluate_loss: dimension mismatch");
    std::vector<Eigen::VectorXd> c;
    c.reserve(centers.size());
    for (const auto& s : centers.scenarios()) c.push_back(s.values);
    return detail::loss_of(original, c, l);
}

/// Nearest-center assignment with ties broken toward the lowest center index.
/// If a cluster ends up empty, its center is reseeded to the scenario farthest
/// (probability-weighted) from its assigned center and that scenario is pinned
/// to the repaired cluster; the updated centers are written back. Repair never
/// increases the loss.
inline ClusterAssignment assign_clusters(const ScenarioSet& original,
                                         std::vector<Eigen::VectorXd>& centers, Norm l) {
    const int M = original.size();
    const int K = static_cast<int>(centers.size());
    if (K < 1) throw std::invalid_argument("assign_clusters: no centers");
    for (const auto& c : centers)
        if (c.size() != original.trajectory_dim())
            throw std::invalid_argument("assign_clusters: dimension mismatch");

    std::vector<int> labels(M, -1);
    std::vector<int> forced(M, -1);  // scenario -> pinned cluster, or -1

    auto run_assignment = [&] {
        for (int h = 0; h < M; ++h) {
            if (forced[h] >= 0) {
                labels[h] = forced[h];
                continue;
            }
            double best = std::numeric_limits<double>::infinity();
            int best_j = 0;
            for (int j = 0; j < K; ++j) {
                const double d = detail::dist_pow(original[h].values, centers[j], l);
                if (d < best) {
                    best = d;
                    best_j = j;
                }
            }
            labels[h] = best_j;
        }
    };

    run_assignment();
    for (int round = 0; round < K; ++round) {
        std::vector<char> seen(K, 0);
        for (int h = 0; h < M; ++h) seen[labels[h]] = 1;
        int empty = -1;
        for (int j = 0; j < K; ++j) {
            if (!seen[j]) {
                empty = j;
                break;
            }
        }
        if (empty < 0) break;

        std::vector<int> cluster_size(K, 0);
        for (int h = 0; h < M; ++h) ++cluster_size[labels[h]];

        double worst = -1.0;
        int pick = -1;
        for (int h = 0; h < M; ++h) {
            if (forced[h] >= 0) continue;
            if (cluster_size[labels[h]] < 2) continue;  // moving it would just empty another cluster
            const double d = original[h].probability *
                             detail::dist_pow(original[h].values, centers[labels[h]], l);
            if (d > worst) {
                worst = d;
                pick = h;
            }
        }
        if (pick < 0) break;  // fewer distinct donors than empty clusters
        centers[empty] = original[pick].values;
        forced[pick] = empty;
        run_assignment();
    }
    return ClusterAssignment{std::move(labels), K};
}

/// Minimizer of sum_h p_h ||eta_h - c||_l^l over c: the probability-weighted
/// mean for l=2, the coordinate-wise left weighted median for l=1.
inline Eigen::VectorXd update_center(const std::vector<Scenario>& members, Norm l) {
    if (members.empty()) throw std::invalid_argument("update_center: empty member list");
    std::vector<const Eigen::VectorXd*> pts(members.size());
    std::vector<double> w(members.size());
    for (std::size_t h = 0; h < members.size(); ++h) {
        pts[h] = &members[h].values;
        w[h] = members[h].probability;
    }
    return detail::weighted_center(pts, w, l);
}

/// Result of the clustering-based reduction: cluster centers with aggregated
/// probabilities, the full-to-reduced assignment, and the final loss.
struct ReducedSet {
    ScenarioSet centers;
    ClusterAssignment assignment;
    double loss = 0.0;
    int iterations = 0;
    std::vector<double> loss_history;
};

namespace detail {

// Probability-weighted greedy farthest-point seeding. The RNG breaks exact
// ties only, so runs are deterministic for a fixed seed.
inline std::vector<Eigen::VectorXd> seed_centers(const ScenarioSet& original, int K, Norm l,
                                                 std::uint64_t seed) {
    const int M = original.size();
    std::mt19937_64 rng(seed);
    auto pick_max = [&](auto&& score) {
        double best = -std::numeric_limits<double>::infinity();
        std::vector<int> ties;
        for (int h = 0; h < M; ++h) {
            const double s = score(h);
            if (s > best) {
                best = s;
                ties.assign(1, h);
            } else if (s == best) {
                ties.push_back(h);
            }
        }
        return ties.size() == 1 ? ties[0] : ties[rng() % ties.size()];
    };

    std::vector<char> chosen(M, 0);
    std::vector<double> nearest(M, std::numeric_limits<double>::infinity());
    std::vector<Eigen::VectorXd> centers;
    centers.reserve(K);

    int first = pick_max([&](int h) { return original[h].probability; });
    chosen[first] = 1;
    centers.push_back(original[first].values);
    for (int h = 0; h < M; ++h) nearest[h] = dist_pow(original[h].values, centers.back(), l);

    while (static_cast<int>(centers.size()) < K) {
        int next = pick_max([&](int h) {
            return chosen[h] ? -std::numeric_limits<double>::infinity()
                             : original[h].probability * nearest[h];
        });
        chosen[next] = 1;
        centers.push_back(original[next].values);
        for (int h = 0; h < M; ++h)
            nearest[h] = std::min(nearest[h], dist_pow(original[h].values, centers.back(), l));
    }
    return centers;
}

} // namespace detail

/// Clustering-based scenario reduction: alternates nearest-center assignment
/// and per-cluster center updates until the loss decrease falls below tol or
/// max_iter is reached. The loss sequence is non-increasing by construction.
inline ReducedSet reduce(const ScenarioSet& original, int M_tilde, Norm l, std::uint64_t seed,
                         int max_iter = 100, double tol = 1e-10) {
    const int M = original.size();
    if (M_tilde < 1) throw std::invalid_argument("reduce: reduced cardinality must be >= 1");
    if (M_tilde > M) throw std::invalid_argument("reduce: reduced cardinality exceeds set size");
    if (max_iter < 1) throw std::invalid_argument("reduce: max_iter must be >= 1");
    if (tol < 0.0) throw std::invalid_argument("reduce: tol must be >= 0");

    std::vector<Eigen::VectorXd> centers = detail::seed_centers(original, M_tilde, l, seed);
    ClusterAssignment assignment = assign_clusters(original, centers, l);
    double loss = detail::loss_of(original, centers, l);
    std::vector<double> history{loss};

    int iterations = 0;
    for (int it = 1; it <= max_iter; ++it) {
        iterations = it;

        std::vector<std::vector<const Eigen::VectorXd*>> pts(M_tilde);
        std::vector<std::vector<double>> weights(M_tilde);
        for (int h = 0; h < M; ++h) {
            pts[assignment.assignment[h]].push_back(&original[h].values);
            weights[assignment.assignment[h]].push_back(original[h].probability);
        }
        for (int j = 0; j < M_tilde; ++j)
            centers[j] = detail::weighted_center(pts[j], weights[j], l);

        assignment = assign_clusters(original, centers, l);
        const double new_loss = detail::loss_of(original, centers, l);
        if (new_loss > loss + 1e-9 * std::max(1.0, loss))
            throw std::logic_error("reduce: loss increased across an iteration");
        history.push_back(new_loss);
        const bool converged = (loss - new_loss) < tol;
        loss = new_loss;
        if (converged) break;
    }

    std::vector<double> mass(M_tilde, 0.0);
    for (int h = 0; h < M; ++h) mass[assignment.assignment[h]] += original[h].probability;
    std::vector<Scenario> reduced(M_tilde);
    for (int j = 0; j < M_tilde; ++j) {
        reduced[j].values = centers[j];
        reduced[j].probability = mass[j];
    }
    ScenarioSet center_set(std::move(reduced), original.state_dim(), original.horizon());
    return ReducedSet{std::move(center_set), std::move(assignment), loss, iterations,
                      std::move(history)};
}

inline nlohmann::json to_json(const ReducedSet& r) {
    nlohmann::json j = to_json(r.centers);
    j["assignment"] = r.assignment.assignment;
    j["loss"] = r.loss;
    return j;
}

} // namespace scenred
