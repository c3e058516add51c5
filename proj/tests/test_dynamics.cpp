#include <catch2/catch.hpp>

#include <random>

#include "scenred/dynamics.hpp"
#include "test_util.hpp"

using namespace scenred;

TEST_CASE("one-step stacking reduces to the raw system matrices", "[dynamics]") {
    Eigen::MatrixXd A(2, 2), B(2, 1);
    A << 0.9, 0.1, 0.0, 0.8;
    B << 0.0, 1.0;
    auto sd = build_stacked(LinearSystem(A, B), 1);
    REQUIRE(sd.F.isApprox(A));
    REQUIRE(sd.G.isApprox(B));
    REQUIRE(sd.Gamma.isApprox(Eigen::MatrixXd::Identity(2, 2)));
}

TEST_CASE("double integrator stacking matches the analytic square", "[dynamics]") {
    Eigen::MatrixXd A(2, 2), B(2, 1);
    A << 1.0, 1.0, 0.0, 0.5;
    B << 0.0, 1.0;
    auto sd = build_stacked(LinearSystem(A, B), 2);
    Eigen::MatrixXd A2(2, 2);
    A2 << 1.0, 1.5, 0.0, 0.25;
    REQUIRE(sd.F.block(2, 0, 2, 2).isApprox(A2, 1e-15));
}

TEST_CASE("simulation basics", "[dynamics]") {
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(2, 2);
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(2, 1);
    Eigen::VectorXd x0(2);
    x0 << 3.0, -1.0;
    auto traj = simulate(LinearSystem(A, B), x0, Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(6));
    for (int k = 0; k < 3; ++k) {
        REQUIRE(traj[2 * k] == 3.0);
        REQUIRE(traj[2 * k + 1] == -1.0);
    }

    Eigen::MatrixXd A2(2, 2), B2(2, 1);
    A2 << 1.0, 1.0, 0.0, 0.5;
    B2 << 0.0, 1.0;
    Eigen::VectorXd u(1);
    u << 1.0;
    auto one = simulate(LinearSystem(A2, B2), Eigen::VectorXd::Zero(2), u, Eigen::VectorXd::Zero(2));
    REQUIRE(one[0] == 0.0);
    REQUIRE(one[1] == 1.0);

    REQUIRE_THROWS_AS(
        simulate(LinearSystem(A2, B2), Eigen::VectorXd::Zero(2), u, Eigen::VectorXd::Zero(3)),
        std::invalid_argument);
}

TEST_CASE("stacked prediction equals step simulation on random systems", "[dynamics]") {
    std::mt19937_64 rng(123);
    for (int trial = 0; trial < 25; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 4);
        const int m = 1 + static_cast<int>(rng() % 4);
        const int N = 1 + static_cast<int>(rng() % 8);
        LinearSystem sys(testutil::random_matrix(rng, n, n, -0.8, 0.8),
                         testutil::random_matrix(rng, n, m, -1.0, 1.0));
        auto sd = build_stacked(sys, N);
        Eigen::VectorXd x0 = testutil::random_vector(rng, n, -2.0, 2.0);
        Eigen::VectorXd u = testutil::random_vector(rng, m * N, -1.0, 1.0);
        Eigen::VectorXd eta = testutil::random_vector(rng, n * N, -0.5, 0.5);
        const Eigen::VectorXd stacked = sd.predict(x0, u, eta);
        const Eigen::VectorXd stepped = simulate(sys, x0, u, eta);
        REQUIRE((stacked - stepped).lpNorm<Eigen::Infinity>() <= 1e-9);
    }
}

TEST_CASE("noise-map structure: identity diagonal, zero above", "[dynamics]") {
    std::mt19937_64 rng(5);
    const int n = 3, N = 4;
    LinearSystem sys(testutil::random_matrix(rng, n, n, -1.0, 1.0),
                     testutil::random_matrix(rng, n, 2, -1.0, 1.0));
    auto sd = build_stacked(sys, N);
    for (int k = 0; k < N; ++k) {
        REQUIRE(sd.Gamma.block(k * n, k * n, n, n) == Eigen::MatrixXd::Identity(n, n));
        for (int i = k + 1; i < N; ++i)
            REQUIRE(sd.Gamma.block(k * n, i * n, n, n) == Eigen::MatrixXd::Zero(n, n));
    }
}

TEST_CASE("box constraint stacking row counts and patterns", "[dynamics]") {
    const double inf = std::numeric_limits<double>::infinity();

    // x >= -1 in 2-D over two steps: 4 rows of -I pattern with h = 1
    Eigen::VectorXd lo = Eigen::VectorXd::Constant(2, -1.0);
    Eigen::VectorXd hi = Eigen::VectorXd::Constant(2, inf);
    auto X2 = stack_box_constraints(lo, hi, 2);
    REQUIRE(X2.rows() == 4);
    REQUIRE(X2.h.isApprox(Eigen::VectorXd::Ones(4)));
    for (int r = 0; r < 4; ++r) REQUIRE(X2.H.row(r).sum() == -1.0);

    // |u| <= 2 scalar input over three steps: 6 rows
    auto U3 = stack_box_constraints(Eigen::VectorXd::Constant(1, -2.0),
                                    Eigen::VectorXd::Constant(1, 2.0), 3);
    REQUIRE(U3.rows() == 6);

    // N = 1 returns the per-step polytope unchanged
    auto step = box_polytope(Eigen::VectorXd::Constant(2, -1.0), Eigen::VectorXd::Constant(2, 1.0));
    auto one = stack_constraints(step, 1);
    REQUIRE(one.H.isApprox(step.H));
    REQUIRE(one.h.isApprox(step.h));
}

TEST_CASE("constrained step ranges restrict rows but keep full width", "[dynamics]") {
    auto step = box_polytope(Eigen::VectorXd::Constant(2, -1.0),
                             Eigen::VectorXd::Constant(2, std::numeric_limits<double>::infinity()));
    auto part = stack_constraints(step, 10, 1, 9);
    REQUIRE(part.rows() == 18);
    REQUIRE(part.dim() == 20);
    // step 10 block is untouched
    REQUIRE(part.H.rightCols(2).isZero());

    REQUIRE_THROWS_AS(stack_constraints(step, 4, 3, 2), std::invalid_argument);
    REQUIRE_THROWS_AS(stack_constraints(step, 4, 0, 4), std::invalid_argument);
}
