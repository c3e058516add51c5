#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace scenred::milp {

enum class Sense { less_eq, equal, greater_eq };

enum class SolveStatus { optimal, infeasible, unbounded, iteration_limit, node_limit };

inline const char* status_name(SolveStatus s) {
    switch (s) {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::infeasible: return "infeasible";
        case SolveStatus::unbounded: return "unbounded";
        case SolveStatus::iteration_limit: return "iteration_limit";
        case SolveStatus::node_limit: return "node_limit";
    }
    return "?";
}

/// One linear constraint sum_k val[k]*x[idx[k]] (sense) rhs.
struct Row {
    std::vector<int> idx;
    std::vector<double> val;
    Sense sense = Sense::less_eq;
    double rhs = 0.0;
};

/// Mixed-integer linear program: minimize c'x subject to rows, variable
/// bounds (+-inf allowed) and binary restrictions on the listed variables.
struct Model {
    Eigen::VectorXd c;
    std::vector<Row> rows;
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;
    std::vector<int> binaries;

    int num_vars() const { return static_cast<int>(c.size()); }
    int num_rows() const { return static_cast<int>(rows.size()); }

    int add_var(double lo, double hi, double cost) {
        const Eigen::Index n = c.size();
        c.conservativeResize(n + 1);
        lower.conservativeResize(n + 1);
        upper.conservativeResize(n + 1);
        c[n] = cost;
        lower[n] = lo;
        upper[n] = hi;
        return static_cast<int>(n);
    }

    void add_row(std::vector<int> idx, std::vector<double> val, Sense sense, double rhs) {
        rows.push_back(Row{std::move(idx), std::move(val), sense, rhs});
    }

    void add_row_dense(const Eigen::RowVectorXd& a, Sense sense, double rhs) {
        Row r;
        for (Eigen::Index k = 0; k < a.size(); ++k) {
            if (a[k] != 0.0) {
                r.idx.push_back(static_cast<int>(k));
                r.val.push_back(a[k]);
            }
        }
        r.sense = sense;
        r.rhs = rhs;
        rows.push_back(std::move(r));
    }

    void validate() const {
        const int n = num_vars();
        if (lower.size() != n || upper.size() != n)
            throw std::invalid_argument("Model: bound arrays must match variable count");
        for (int j = 0; j < n; ++j) {
            if (!std::isfinite(c[j])) throw std::invalid_argument("Model: objective must be finite");
            if (lower[j] > upper[j]) throw std::invalid_argument("Model: lower bound exceeds upper bound");
        }
        for (const auto& r : rows) {
            if (r.idx.size() != r.val.size()) throw std::invalid_argument("Model: row index/value mismatch");
            for (int j : r.idx)
                if (j < 0 || j >= n) throw std::invalid_argument("Model: row references unknown variable");
            if (!std::isfinite(r.rhs)) throw std::invalid_argument("Model: row rhs must be finite");
        }
        for (int b : binaries) {
            if (b < 0 || b >= n) throw std::invalid_argument("Model: binary index out of range");
            if (lower[b] < -1e-9 || upper[b] > 1.0 + 1e-9)
                throw std::invalid_argument("Model: binary variable bounds must lie within [0,1]");
        }
    }
};

/// Basis snapshot (variable states only); enough to warm-start a re-solve of
/// the same matrix under different bounds.
struct BasisHeader {
    std::vector<std::int8_t> vstat;  // 0 basic, 1 at lower, 2 at upper, 3 free at 0
    bool empty() const { return vstat.empty(); }
};

struct LpOptions {
    long max_pivots = 0;       // 0: 50*(rows+cols)
    long bland_after = 0;      // 0: auto
    double feas_tol = 1e-7;
    double opt_tol = 1e-9;
    const BasisHeader* warm = nullptr;
};

struct LpResult {
    SolveStatus status = SolveStatus::infeasible;
    Eigen::VectorXd x;
    double objective = 0.0;
    Eigen::VectorXd duals;          // one per row
    Eigen::VectorXd reduced_costs;  // one per structural variable
    long iterations = 0;
    BasisHeader basis;
};

struct MilpOptions {
    double abs_gap = 0.0;
    long node_limit = 1000000;
    LpOptions lp;
    double int_tol = 1e-6;
};

struct MilpResult {
    SolveStatus status = SolveStatus::infeasible;
    Eigen::VectorXd x;
    double objective = 0.0;
    double gap = 0.0;
    long nodes = 0;
};

namespace detail {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Bounded-variable primal simplex over the equality form A x + s = b. The
// basis inverse is kept as a product of eta matrices refreshed by periodic
// refactorization; columns are traversed through a sparse column store.
class Simplex {
public:
    explicit Simplex(const Model& model) : n_(model.num_vars()), m_(model.num_rows()) {
        ntot_ = n_ + m_;
        cols_.resize(n_);
        for (int r = 0; r < m_; ++r) {
            const Row& row = model.rows[r];
            for (std::size_t k = 0; k < row.idx.size(); ++k)
                cols_[row.idx[k]].emplace_back(r, row.val[k]);
        }
        b_.resize(m_);
        slack_lo_.resize(m_);
        slack_hi_.resize(m_);
        for (int r = 0; r < m_; ++r) {
            b_[r] = model.rows[r].rhs;
            switch (model.rows[r].sense) {
                case Sense::less_eq:
                    slack_lo_[r] = 0.0;
                    slack_hi_[r] = kInf;
                    break;
                case Sense::equal:
                    slack_lo_[r] = 0.0;
                    slack_hi_[r] = 0.0;
                    break;
                case Sense::greater_eq:
                    slack_lo_[r] = -kInf;
                    slack_hi_[r] = 0.0;
                    break;
            }
        }
        cost_.assign(ntot_, 0.0);
        for (int j = 0; j < n_; ++j) cost_[j] = model.c[j];
    }

    LpResult solve(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                   const LpOptions& opts) {
        lo_.assign(ntot_, 0.0);
        hi_.assign(ntot_, 0.0);
        for (int j = 0; j < n_; ++j) {
            lo_[j] = lower[j];
            hi_[j] = upper[j];
        }
        for (int r = 0; r < m_; ++r) {
            lo_[n_ + r] = slack_lo_[r];
            hi_[n_ + r] = slack_hi_[r];
        }
        feas_tol_ = opts.feas_tol;
        opt_tol_ = opts.opt_tol;
        max_pivots_ = opts.max_pivots > 0 ? opts.max_pivots : 50L * (m_ + ntot_);
        bland_after_ = opts.bland_after > 0 ? opts.bland_after : std::max<long>(2000, 10L * (m_ + n_));

        init_basis(opts.warm);
        if (!factorize()) {
            reset_slack_basis();
            factorize();
        }
        compute_xb();

        LpResult res;
        res.status = iterate(res.iterations);

        res.x.resize(n_);
        for (int j = 0; j < n_; ++j) res.x[j] = value_of(j);
        res.objective = 0.0;
        for (int j = 0; j < n_; ++j) res.objective += cost_[j] * res.x[j];

        res.duals.resize(m_);
        res.reduced_costs.resize(n_);
        {
            std::vector<double> y(m_, 0.0);
            for (int r = 0; r < m_; ++r) y[r] = cost_[basis_[r]];
            btran(y);
            for (int r = 0; r < m_; ++r) res.duals[r] = y[r];
            for (int j = 0; j < n_; ++j) {
                double d = cost_[j];
                for (const auto& [r, a] : cols_[j]) d -= y[r] * a;
                res.reduced_costs[j] = d;
            }
        }
        res.basis.vstat.assign(vstat_.begin(), vstat_.end());
        return res;
    }

private:
    enum : std::int8_t { kBasic = 0, kAtLower = 1, kAtUpper = 2, kFree = 3 };

    struct Eta {
        int r;
        double pivot;
        std::vector<std::pair<int, double>> col;  // nonpivot entries
    };

    int col_nnz(int j) const { return j < n_ ? static_cast<int>(cols_[j].size()) : 1; }

    void scatter_column(int j, std::vector<double>& v) const {
        std::fill(v.begin(), v.end(), 0.0);
        if (j < n_) {
            for (const auto& [r, a] : cols_[j]) v[r] = a;
        } else {
            v[j - n_] = 1.0;
        }
    }

    double value_of(int j) const {
        if (vstat_[j] == kBasic) return xb_[row_of_[j]];
        if (vstat_[j] == kAtLower) return std::isfinite(lo_[j]) ? lo_[j] : 0.0;
        if (vstat_[j] == kAtUpper) return std::isfinite(hi_[j]) ? hi_[j] : 0.0;
        return 0.0;
    }

    void ftran(std::vector<double>& v) const {
        for (const Eta& e : etas_) {
            const double alpha = v[e.r] / e.pivot;
            if (alpha == 0.0) continue;
            for (const auto& [i, w] : e.col) v[i] -= alpha * w;
            v[e.r] = alpha;
        }
    }

    void btran(std::vector<double>& v) const {
        for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
            double dot = 0.0;
            for (const auto& [i, w] : it->col) dot += w * v[i];
            v[it->r] = (v[it->r] - dot) / it->pivot;
        }
    }

    void reset_slack_basis() {
        basis_.resize(m_);
        row_of_.assign(ntot_, -1);
        vstat_.assign(ntot_, kAtLower);
        for (int j = 0; j < n_; ++j) {
            if (std::isfinite(lo_[j]))
                vstat_[j] = kAtLower;
            else if (std::isfinite(hi_[j]))
                vstat_[j] = kAtUpper;
            else
                vstat_[j] = kFree;
        }
        for (int r = 0; r < m_; ++r) {
            basis_[r] = n_ + r;
            row_of_[n_ + r] = r;
            vstat_[n_ + r] = kBasic;
        }
    }

    void init_basis(const BasisHeader* warm) {
        if (warm && static_cast<int>(warm->vstat.size()) == ntot_) {
            int basic_count = 0;
            for (int j = 0; j < ntot_; ++j)
                if (warm->vstat[j] == kBasic) ++basic_count;
            if (basic_count == m_) {
                vstat_.assign(warm->vstat.begin(), warm->vstat.end());
                basis_.clear();
                row_of_.assign(ntot_, -1);
                for (int j = 0; j < ntot_; ++j)
                    if (vstat_[j] == kBasic) basis_.push_back(j);
                // nonbasic states may point at bounds that no longer exist
                for (int j = 0; j < ntot_; ++j) {
                    if (vstat_[j] == kAtLower && !std::isfinite(lo_[j]))
                        vstat_[j] = std::isfinite(hi_[j]) ? kAtUpper : kFree;
                    else if (vstat_[j] == kAtUpper && !std::isfinite(hi_[j]))
                        vstat_[j] = std::isfinite(lo_[j]) ? kAtLower : kFree;
                }
                return;
            }
        }
        reset_slack_basis();
    }

    // Rebuilds the eta file from the current basic set. Returns false when the
    // set is numerically singular.
    bool factorize() {
        etas_.clear();
        updates_since_factor_ = 0;
        std::vector<int> order(basis_.begin(), basis_.end());
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            const int na = col_nnz(a), nb = col_nnz(b);
            return na != nb ? na < nb : a < b;
        });
        std::vector<char> row_done(m_, 0);
        std::vector<int> new_basis(m_, -1);
        std::vector<double> w(m_);
        for (int j : order) {
            scatter_column(j, w);
            ftran(w);
            int pivot_row = -1;
            double best = 1e-11;
            for (int r = 0; r < m_; ++r) {
                if (!row_done[r] && std::abs(w[r]) > best) {
                    best = std::abs(w[r]);
                    pivot_row = r;
                }
            }
            if (pivot_row < 0) return false;
            Eta e;
            e.r = pivot_row;
            e.pivot = w[pivot_row];
            for (int r = 0; r < m_; ++r)
                if (r != pivot_row && w[r] != 0.0) e.col.emplace_back(r, w[r]);
            etas_.push_back(std::move(e));
            row_done[pivot_row] = 1;
            new_basis[pivot_row] = j;
        }
        basis_ = std::move(new_basis);
        row_of_.assign(ntot_, -1);
        for (int r = 0; r < m_; ++r) {
            row_of_[basis_[r]] = r;
            vstat_[basis_[r]] = kBasic;
        }
        return true;
    }

    void compute_xb() {
        std::vector<double> v = b_;
        for (int j = 0; j < ntot_; ++j) {
            if (vstat_[j] == kBasic) continue;
            const double xj = value_of(j);
            if (xj == 0.0) continue;
            if (j < n_) {
                for (const auto& [r, a] : cols_[j]) v[r] -= a * xj;
            } else {
                v[j - n_] -= xj;
            }
        }
        ftran(v);
        xb_ = std::move(v);
    }

    bool basic_infeasible(int r) const {
        const int j = basis_[r];
        return xb_[r] < lo_[j] - feas_tol_ || xb_[r] > hi_[j] + feas_tol_;
    }

    SolveStatus iterate(long& iterations) {
        iterations = 0;
        std::vector<double> y(m_), w(m_);
        bool just_refactored = true;

        while (true) {
            if (iterations >= max_pivots_) return SolveStatus::iteration_limit;
            const bool bland = iterations >= bland_after_;

            bool phase1 = false;
            for (int r = 0; r < m_; ++r) {
                if (basic_infeasible(r)) {
                    phase1 = true;
                    break;
                }
            }

            // pricing
            std::fill(y.begin(), y.end(), 0.0);
            if (phase1) {
                for (int r = 0; r < m_; ++r) {
                    const int j = basis_[r];
                    if (xb_[r] > hi_[j] + feas_tol_)
                        y[r] = 1.0;
                    else if (xb_[r] < lo_[j] - feas_tol_)
                        y[r] = -1.0;
                }
            } else {
                for (int r = 0; r < m_; ++r) y[r] = cost_[basis_[r]];
            }
            btran(y);

            int enter = -1;
            int dir = +1;
            double best_score = opt_tol_;
            for (int j = 0; j < ntot_; ++j) {
                if (vstat_[j] == kBasic) continue;
                if (lo_[j] == hi_[j]) continue;  // fixed
                double d;
                if (j < n_) {
                    d = phase1 ? 0.0 : cost_[j];
                    for (const auto& [r, a] : cols_[j]) d -= y[r] * a;
                } else {
                    d = (phase1 ? 0.0 : cost_[j]) - y[j - n_];
                }
                int cand_dir = 0;
                double score = 0.0;
                if (vstat_[j] == kAtLower) {
                    if (d < -opt_tol_) {
                        cand_dir = +1;
                        score = -d;
                    }
                } else if (vstat_[j] == kAtUpper) {
                    if (d > opt_tol_) {
                        cand_dir = -1;
                        score = d;
                    }
                } else {  // free at 0
                    if (d < -opt_tol_) {
                        cand_dir = +1;
                        score = -d;
                    } else if (d > opt_tol_) {
                        cand_dir = -1;
                        score = d;
                    }
                }
                if (cand_dir == 0) continue;
                if (bland) {
                    enter = j;
                    dir = cand_dir;
                    break;
                }
                if (score > best_score) {
                    best_score = score;
                    enter = j;
                    dir = cand_dir;
                }
            }

            if (enter < 0) {
                // verify the conclusion against a fresh factorization
                if (!just_refactored) {
                    if (!factorize()) {
                        reset_slack_basis();
                        factorize();
                    }
                    compute_xb();
                    just_refactored = true;
                    continue;
                }
                if (phase1) return SolveStatus::infeasible;
                return SolveStatus::optimal;
            }

            scatter_column(enter, w);
            ftran(w);

            // ratio test: entering moves by dir*t, basics by -dir*w per unit t
            const double enter_val = value_of(enter);
            double t_best = kInf;
            int block_row = -1;
            double block_pivot = 0.0;
            bool block_at_lower = true;
            if (vstat_[enter] == kAtLower && std::isfinite(hi_[enter]))
                t_best = hi_[enter] - (std::isfinite(lo_[enter]) ? lo_[enter] : 0.0);
            else if (vstat_[enter] == kAtUpper && std::isfinite(lo_[enter]))
                t_best = (std::isfinite(hi_[enter]) ? hi_[enter] : 0.0) - lo_[enter];

            for (int r = 0; r < m_; ++r) {
                if (std::abs(w[r]) <= 1e-9) continue;
                const double delta = -dir * w[r];
                const int bj = basis_[r];
                const double cur = xb_[r];
                double t_r = kInf;
                bool at_lower = true;
                if (phase1 && cur < lo_[bj] - feas_tol_) {
                    if (delta > 0.0) {
                        t_r = (lo_[bj] - cur) / delta;
                        at_lower = true;
                    }
                } else if (phase1 && cur > hi_[bj] + feas_tol_) {
                    if (delta < 0.0) {
                        t_r = (cur - hi_[bj]) / (-delta);
                        at_lower = false;
                    }
                } else {
                    if (delta < 0.0 && std::isfinite(lo_[bj])) {
                        t_r = (cur - lo_[bj]) / (-delta);
                        at_lower = true;
                    } else if (delta > 0.0 && std::isfinite(hi_[bj])) {
                        t_r = (hi_[bj] - cur) / delta;
                        at_lower = false;
                    }
                }
                if (t_r == kInf) continue;
                t_r = std::max(t_r, 0.0);
                bool take = false;
                if (t_r < t_best - 1e-12) {
                    take = true;
                } else if (t_r <= t_best + 1e-12 && block_row >= 0) {
                    take = bland ? (bj < basis_[block_row])
                                 : (std::abs(w[r]) > std::abs(block_pivot));
                } else if (t_r <= t_best + 1e-12 && block_row < 0 && t_r < t_best) {
                    take = true;
                }
                if (take) {
                    t_best = t_r;
                    block_row = r;
                    block_pivot = w[r];
                    block_at_lower = at_lower;
                }
            }

            if (t_best == kInf) {
                if (!just_refactored) {
                    if (!factorize()) {
                        reset_slack_basis();
                        factorize();
                    }
                    compute_xb();
                    just_refactored = true;
                    continue;
                }
                return phase1 ? SolveStatus::iteration_limit : SolveStatus::unbounded;
            }

            ++iterations;
            just_refactored = false;

            if (block_row < 0) {
                // bound flip: entering jumps to its opposite bound
                for (int r = 0; r < m_; ++r)
                    if (w[r] != 0.0) xb_[r] -= dir * t_best * w[r];
                vstat_[enter] = vstat_[enter] == kAtLower ? kAtUpper : kAtLower;
            } else {
                const int leave = basis_[block_row];
                for (int r = 0; r < m_; ++r)
                    if (r != block_row && w[r] != 0.0) xb_[r] -= dir * t_best * w[r];
                vstat_[leave] = block_at_lower ? kAtLower : kAtUpper;
                if (!std::isfinite(block_at_lower ? lo_[leave] : hi_[leave]))
                    vstat_[leave] = kFree;  // defensive; cannot occur for finite blocks
                row_of_[leave] = -1;
                basis_[block_row] = enter;
                row_of_[enter] = block_row;
                vstat_[enter] = kBasic;
                xb_[block_row] = enter_val + dir * t_best;
                Eta e;
                e.r = block_row;
                e.pivot = w[block_row];
                for (int r = 0; r < m_; ++r)
                    if (r != block_row && w[r] != 0.0) e.col.emplace_back(r, w[r]);
                etas_.push_back(std::move(e));
                ++updates_since_factor_;
                if (updates_since_factor_ >= 120) {
                    if (!factorize()) {
                        reset_slack_basis();
                        factorize();
                    }
                    compute_xb();
                    just_refactored = true;
                }
            }
        }
    }

    int n_, m_, ntot_;
    std::vector<std::vector<std::pair<int, double>>> cols_;
    std::vector<double> b_, slack_lo_, slack_hi_;
    std::vector<double> cost_;
    std::vector<double> lo_, hi_;

    std::vector<int> basis_;
    std::vector<int> row_of_;
    std::vector<std::int8_t> vstat_;
    std::vector<double> xb_;
    std::vector<Eta> etas_;
    int updates_since_factor_ = 0;

    double feas_tol_ = 1e-7, opt_tol_ = 1e-9;
    long max_pivots_ = 0, bland_after_ = 0;
};

} // namespace detail

/// Solves the LP relaxation (binaries treated as their [lower,upper] bounds).
inline LpResult solve_lp(const Model& model, const LpOptions& opts = {}) {
    model.validate();
    detail::Simplex simplex(model);
    return simplex.solve(model.lower, model.upper, opts);
}

/// Best-first branch-and-bound over the binary variables. Deterministic:
/// branching picks the most fractional binary (ties toward the lowest index)
/// and the queue orders nodes by LP bound with FIFO tie-breaks.
inline MilpResult solve_milp(const Model& model, const MilpOptions& opts = {}) {
    model.validate();

    MilpResult out;
    detail::Simplex simplex(model);

    const auto& bins = model.binaries;
    const double int_tol = opts.int_tol;

    auto fractional_pos = [&](const Eigen::VectorXd& x) {
        int pick = -1;
        double most = int_tol;
        for (std::size_t k = 0; k < bins.size(); ++k) {
            const double f = std::abs(x[bins[k]] - std::round(x[bins[k]]));
            if (f > most) {
                most = f;
                pick = static_cast<int>(k);
            }
        }
        return pick;  // -1 when integral
    };

    struct Node {
        double bound;
        long seq;
        std::vector<std::int8_t> fix;  // -1 free, 0, 1 per binary
        BasisHeader basis;
        int branch_pos;
    };
    struct NodeOrder {
        bool operator()(const Node& a, const Node& b) const {
            if (a.bound != b.bound) return a.bound > b.bound;
            return a.seq > b.seq;
        }
    };
    std::priority_queue<Node, std::vector<Node>, NodeOrder> open;

    Eigen::VectorXd lo = model.lower, hi = model.upper;
    auto apply_fix = [&](const std::vector<std::int8_t>& fix) {
        lo = model.lower;
        hi = model.upper;
        for (std::size_t k = 0; k < bins.size(); ++k) {
            if (fix[k] == 0) {
                lo[bins[k]] = 0.0;
                hi[bins[k]] = 0.0;
            } else if (fix[k] == 1) {
                lo[bins[k]] = 1.0;
                hi[bins[k]] = 1.0;
            }
        }
    };

    bool have_incumbent = false;
    Eigen::VectorXd inc_x;
    double inc_obj = detail::kInf;
    double best_open_bound = detail::kInf;
    long seq = 0;

    LpOptions lp_opts = opts.lp;
    lp_opts.warm = nullptr;

    auto solve_node = [&](const std::vector<std::int8_t>& fix, const BasisHeader* warm) {
        apply_fix(fix);
        LpOptions o = lp_opts;
        o.warm = warm;
        ++out.nodes;
        return simplex.solve(lo, hi, o);
    };

    std::vector<std::int8_t> root_fix(bins.size(), -1);
    LpResult root = solve_node(root_fix, nullptr);
    if (root.status != SolveStatus::optimal) {
        out.status = root.status;
        return out;
    }
    int fv = fractional_pos(root.x);
    if (fv < 0) {
        out.status = SolveStatus::optimal;
        out.x = root.x;
        out.objective = root.objective;
        out.gap = 0.0;
        return out;
    }
    open.push(Node{root.objective, seq++, std::move(root_fix), std::move(root.basis), fv});

    SolveStatus final_status = SolveStatus::optimal;
    while (!open.empty()) {
        if (out.nodes >= opts.node_limit) {
            final_status = SolveStatus::node_limit;
            break;
        }
        Node node = open.top();
        open.pop();
        if (have_incumbent && node.bound >= inc_obj - opts.abs_gap - 1e-9) {
            // best-first order: everything left is prunable
            best_open_bound = std::min(best_open_bound, node.bound);
            break;
        }

        for (int v = 0; v <= 1; ++v) {
            std::vector<std::int8_t> fix = node.fix;
            fix[node.branch_pos] = static_cast<std::int8_t>(v);
            LpResult lp = solve_node(fix, &node.basis);
            if (lp.status == SolveStatus::infeasible) continue;
            if (lp.status == SolveStatus::iteration_limit || lp.status == SolveStatus::unbounded) {
                out.status = lp.status;
                if (have_incumbent) {
                    out.x = inc_x;
                    out.objective = inc_obj;
                    out.gap = detail::kInf;
                }
                return out;
            }
            if (have_incumbent && lp.objective >= inc_obj - opts.abs_gap - 1e-9) continue;
            const int frac = fractional_pos(lp.x);
            if (frac < 0) {
                if (!have_incumbent || lp.objective < inc_obj) {
                    have_incumbent = true;
                    inc_x = lp.x;
                    inc_obj = lp.objective;
                }
            } else {
                open.push(Node{lp.objective, seq++, std::move(fix), std::move(lp.basis), frac});
            }
        }
    }

    while (!open.empty()) {
        best_open_bound = std::min(best_open_bound, open.top().bound);
        open.pop();
    }

    if (!have_incumbent) {
        out.status = final_status == SolveStatus::node_limit ? SolveStatus::node_limit
                                                             : SolveStatus::infeasible;
        out.gap = detail::kInf;
        return out;
    }
    out.status = final_status;
    out.x = inc_x;
    out.objective = inc_obj;
    out.gap = best_open_bound == detail::kInf ? 0.0 : std::max(0.0, inc_obj - best_open_bound);
    return out;
}

} // namespace scenred::milp
