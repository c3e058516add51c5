#include <catch2/catch.hpp>

#include <random>
#include <sstream>

#include "scenred/lp_format.hpp"
#include "scenred/milp.hpp"
#include "test_util.hpp"

using namespace scenred::milp;

namespace {

Model simple_model(int n) {
    Model m;
    m.c = Eigen::VectorXd::Zero(n);
    m.lower = Eigen::VectorXd::Constant(n, -std::numeric_limits<double>::infinity());
    m.upper = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
    return m;
}

// random LP with a known feasible point and box bounds (hence bounded)
Model random_lp(std::mt19937_64& rng, int n, int q) {
    Model m = simple_model(n);
    for (int j = 0; j < n; ++j) {
        m.lower[j] = -2.0;
        m.upper[j] = 2.0;
        m.c[j] = testutil::urand(rng, -1.0, 1.0);
    }
    const Eigen::VectorXd xhat = testutil::random_vector(rng, n, -1.0, 1.0);
    for (int r = 0; r < q; ++r) {
        Eigen::RowVectorXd a = testutil::random_matrix(rng, 1, n, -1.0, 1.0);
        const double slack = testutil::urand(rng, 0.05, 1.0);
        m.add_row_dense(a, Sense::less_eq, a.dot(xhat) + slack);
    }
    return m;
}

// verifies optimality through the dual: sign-feasible reduced costs and a
// matching dual objective value
void check_dual_certificate(const Model& m, const LpResult& res) {
    REQUIRE(res.status == SolveStatus::optimal);
    double dual_obj = 0.0;
    for (int r = 0; r < m.num_rows(); ++r) dual_obj += res.duals[r] * m.rows[r].rhs;
    for (int j = 0; j < m.num_vars(); ++j) {
        const double d = res.reduced_costs[j];
        const double x = res.x[j];
        if (std::abs(x - m.lower[j]) < 1e-6) {
            REQUIRE(d >= -1e-6);
            dual_obj += d * m.lower[j];
        } else if (std::abs(x - m.upper[j]) < 1e-6) {
            REQUIRE(d <= 1e-6);
            dual_obj += d * m.upper[j];
        } else {
            REQUIRE(std::abs(d) <= 1e-6);  // basic or interior: zero reduced cost
        }
    }
    REQUIRE(dual_obj == Approx(res.objective).margin(1e-6));
}

} // namespace

TEST_CASE("textbook one-variable LP", "[milp]") {
    Model m = simple_model(1);
    m.c[0] = 1.0;
    m.add_row({0}, {1.0}, Sense::greater_eq, 3.0);
    auto res = solve_lp(m);
    REQUIRE(res.status == SolveStatus::optimal);
    REQUIRE(res.x[0] == Approx(3.0).margin(1e-9));
    REQUIRE(res.objective == Approx(3.0).margin(1e-9));
}

TEST_CASE("textbook facet optimum", "[milp]") {
    Model m = simple_model(2);
    m.c << -1.0, -1.0;
    m.lower.setZero();
    m.add_row({0, 1}, {1.0, 1.0}, Sense::less_eq, 1.0);
    auto res = solve_lp(m);
    REQUIRE(res.status == SolveStatus::optimal);
    REQUIRE(res.objective == Approx(-1.0).margin(1e-9));
}

TEST_CASE("pure bound flips with no rows", "[milp]") {
    Model m = simple_model(1);
    m.c[0] = -1.0;
    m.lower[0] = 0.0;
    m.upper[0] = 5.0;
    auto res = solve_lp(m);
    REQUIRE(res.status == SolveStatus::optimal);
    REQUIRE(res.x[0] == Approx(5.0));
}

TEST_CASE("infeasibility and unboundedness are certified", "[milp]") {
    Model inf = simple_model(1);
    inf.upper[0] = 2.0;
    inf.add_row({0}, {1.0}, Sense::greater_eq, 3.0);
    REQUIRE(solve_lp(inf).status == SolveStatus::infeasible);

    Model unb = simple_model(1);
    unb.c[0] = -1.0;
    unb.lower[0] = 0.0;
    REQUIRE(solve_lp(unb).status == SolveStatus::unbounded);
}

TEST_CASE("equality rows are honored", "[milp]") {
    Model m = simple_model(2);
    m.c << 1.0, 1.0;
    m.lower.setZero();
    m.upper.setConstant(2.0);
    m.add_row({0, 1}, {1.0, 1.0}, Sense::equal, 2.0);
    auto res = solve_lp(m);
    REQUIRE(res.status == SolveStatus::optimal);
    REQUIRE(res.objective == Approx(2.0).margin(1e-9));
    REQUIRE(res.x[0] + res.x[1] == Approx(2.0).margin(1e-9));
}

TEST_CASE("random LPs match the vertex-enumeration oracle", "[milp]") {
    std::mt19937_64 rng(2024);
    int solved = 0;
    while (solved < 20) {
        const int n = 2 + static_cast<int>(rng() % 3);
        const int q = 2 + static_cast<int>(rng() % 5);
        Model m = random_lp(rng, n, q);
        auto res = solve_lp(m);
        REQUIRE(res.status == SolveStatus::optimal);  // feasible and box-bounded by construction
        auto oracle = testutil::enumerate_vertices(m);
        REQUIRE(oracle.found);
        REQUIRE(res.objective == Approx(oracle.objective).margin(1e-7));
        check_dual_certificate(m, res);
        ++solved;
    }
}

TEST_CASE("row residuals stay within the feasibility tolerance", "[milp]") {
    std::mt19937_64 rng(31);
    Model m = random_lp(rng, 4, 6);
    auto res = solve_lp(m);
    REQUIRE(res.status == SolveStatus::optimal);
    for (const auto& row : m.rows) {
        double lhs = 0.0;
        for (std::size_t k = 0; k < row.idx.size(); ++k) lhs += row.val[k] * res.x[row.idx[k]];
        REQUIRE(lhs <= row.rhs + 1e-7);
    }
}

TEST_CASE("iteration limit is reported", "[milp]") {
    std::mt19937_64 rng(8);
    Model m = random_lp(rng, 4, 6);
    LpOptions opts;
    opts.max_pivots = 1;
    auto res = solve_lp(m, opts);
    REQUIRE(res.status == SolveStatus::iteration_limit);
}

TEST_CASE("all-binaries-fixed model solves in a single LP", "[milp]") {
    Model m = simple_model(2);
    m.c << 1.0, -1.0;
    m.lower << 1.0, 1.0;
    m.upper << 1.0, 1.0;
    m.binaries = {0, 1};
    auto res = solve_milp(m);
    REQUIRE(res.status == SolveStatus::optimal);
    REQUIRE(res.nodes == 1);
    REQUIRE(res.objective == Approx(0.0).margin(1e-9));
}

TEST_CASE("knapsack model matches exhaustive enumeration", "[milp]") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 5; ++trial) {
        const int n = 6;
        Eigen::VectorXd value = testutil::random_vector(rng, n, 0.1, 1.0);
        Eigen::VectorXd weight = testutil::random_vector(rng, n, 0.1, 1.0);
        const double cap = 0.4 * weight.sum();

        Model m = simple_model(n);
        m.c = -value;
        m.lower.setZero();
        m.upper.setOnes();
        for (int j = 0; j < n; ++j) m.binaries.push_back(j);
        Eigen::RowVectorXd w = weight.transpose();
        m.add_row_dense(w, Sense::less_eq, cap);

        auto res = solve_milp(m);
        REQUIRE(res.status == SolveStatus::optimal);

        double best = 0.0;
        for (int mask = 0; mask < (1 << n); ++mask) {
            double tw = 0.0, tv = 0.0;
            for (int j = 0; j < n; ++j) {
                if (mask & (1 << j)) {
                    tw += weight[j];
                    tv += value[j];
                }
            }
            if (tw <= cap) best = std::max(best, tv);
        }
        REQUIRE(res.objective == Approx(-best).margin(1e-7));

        // incumbent validity
        double tw = 0.0;
        for (int j = 0; j < n; ++j) {
            REQUIRE(std::abs(res.x[j] - std::round(res.x[j])) <= 1e-6);
            tw += weight[j] * res.x[j];
        }
        REQUIRE(tw <= cap + 1e-7);
    }
}

TEST_CASE("milp optimum never beats its own LP relaxation", "[milp]") {
    std::mt19937_64 rng(404);
    for (int trial = 0; trial < 8; ++trial) {
        Model m = random_lp(rng, 5, 4);
        m.lower.setZero();
        m.upper.setOnes();
        m.binaries = {0, 1, 2};
        auto relax = solve_lp(m);
        auto res = solve_milp(m);
        if (res.status != SolveStatus::optimal) continue;
        REQUIRE(relax.status == SolveStatus::optimal);
        REQUIRE(res.objective >= relax.objective - 1e-9);
    }
}

TEST_CASE("solver runs are deterministic", "[milp]") {
    std::mt19937_64 rng(7);
    Model m = random_lp(rng, 5, 5);
    m.lower.setZero();
    m.upper.setOnes();
    m.binaries = {0, 2, 4};
    auto a = solve_milp(m);
    auto b = solve_milp(m);
    REQUIRE(a.nodes == b.nodes);
    REQUIRE(a.objective == b.objective);
    REQUIRE(a.x == b.x);
}

TEST_CASE("node limit returns the incumbent with a gap", "[milp]") {
    std::mt19937_64 rng(55);
    // a knapsack big enough to need more than two nodes
    const int n = 10;
    Model m = simple_model(n);
    m.c = -testutil::random_vector(rng, n, 0.1, 1.0);
    m.lower.setZero();
    m.upper.setOnes();
    for (int j = 0; j < n; ++j) m.binaries.push_back(j);
    Eigen::RowVectorXd w = testutil::random_vector(rng, n, 0.1, 1.0).transpose();
    m.add_row_dense(w, Sense::less_eq, 0.35 * w.sum());

    MilpOptions opts;
    opts.node_limit = 2;
    auto res = solve_milp(m, opts);
    if (res.status == SolveStatus::node_limit && res.x.size() > 0) {
        REQUIRE(res.gap >= 0.0);
        auto exact = solve_milp(m);
        REQUIRE(res.objective >= exact.objective - 1e-9);
        REQUIRE(res.objective - res.gap <= exact.objective + 1e-9);
    }
}

TEST_CASE("binary bounds are validated", "[milp]") {
    Model m = simple_model(1);
    m.lower[0] = 0.0;
    m.upper[0] = 2.0;
    m.binaries = {0};
    REQUIRE_THROWS_AS(solve_milp(m), std::invalid_argument);
}

TEST_CASE("lp text format round-trips and solves identically", "[milp]") {
    std::mt19937_64 rng(19);
    Model m = random_lp(rng, 4, 5);
    m.lower[1] = -std::numeric_limits<double>::infinity();  // exercise free-ish bounds
    m.upper[2] = std::numeric_limits<double>::infinity();
    m.add_row({0, 3}, {1.0, -2.0}, Sense::greater_eq, -0.5);
    m.add_row({1, 2}, {0.5, 0.5}, Sense::equal, 0.25);
    m.lower[3] = 0.0;
    m.upper[3] = 1.0;
    m.binaries = {3};

    std::stringstream text;
    write_lp(m, text);
    Model back = read_lp(text);

    REQUIRE(back.num_vars() == m.num_vars());
    REQUIRE(back.num_rows() == m.num_rows());
    REQUIRE(back.binaries == m.binaries);
    for (int j = 0; j < m.num_vars(); ++j) {
        REQUIRE(back.c[j] == m.c[j]);
        REQUIRE(back.lower[j] == m.lower[j]);
        REQUIRE(back.upper[j] == m.upper[j]);
    }

    auto orig = solve_milp(m);
    auto rt = solve_milp(back);
    REQUIRE(orig.status == rt.status);
    if (orig.status == SolveStatus::optimal) REQUIRE(rt.objective == Approx(orig.objective).margin(1e-9));
}

TEST_CASE("malformed lp text is rejected", "[milp]") {
    std::stringstream bad("Minimize\n obj: 1 x0\nSubject To\n c0: x0 ?? 3\nEnd\n");
    REQUIRE_THROWS_AS(read_lp(bad), std::runtime_error);
}
