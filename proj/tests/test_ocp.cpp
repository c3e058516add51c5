#include <catch2/catch.hpp>

#include <random>
#include <sstream>

#include "scenred/lp_format.hpp"
#include "scenred/ocp.hpp"
#include "test_util.hpp"

using namespace scenred;

namespace {

OCPInstance tiny_instance(int M, double min_satisfaction, double sigma, unsigned seed,
                          double x0_val = 0.0) {
    Eigen::MatrixXd A(1, 1), B(1, 1);
    A << 1.0;
    B << 1.0;
    LinearSystem sys(A, B);
    const int N = 2;
    StackedDynamics stacked = build_stacked(sys, N);
    Polytope X = stack_constraints(
        box_polytope(Eigen::VectorXd::Constant(1, -1.0), Eigen::VectorXd::Constant(1, 1.0)), N);
    Polytope U = stack_constraints(
        box_polytope(Eigen::VectorXd::Constant(1, -2.0), Eigen::VectorXd::Constant(1, 2.0)), N);
    ScenarioSet scen = generate_synthetic(seed, M, 1, N, DistributionSpec::gaussian(1, sigma));
    Eigen::VectorXd x0 = Eigen::VectorXd::Constant(1, x0_val);
    return OCPInstance{x0, stacked, X, U, scen, 1.0 - min_satisfaction, Variant::exact,
                       std::nullopt, 0.0};
}

} // namespace

TEST_CASE("zero disturbance from the origin solves to zero cost", "[ocp]") {
    OCPInstance inst = tiny_instance(1, 0.5, 0.0, 0);
    auto sol = solve_instance(inst);
    REQUIRE(sol.status == milp::SolveStatus::optimal);
    REQUIRE(sol.objective == Approx(0.0).margin(1e-9));
    REQUIRE(sol.u.lpNorm<Eigen::Infinity>() <= 1e-9);
}

TEST_CASE("single scenario with zero risk forces the indicator", "[ocp]") {
    OCPInstance inst = tiny_instance(1, 1.0, 0.1, 3);  // epsilon = 0
    auto sol = solve_instance(inst);
    REQUIRE(sol.status == milp::SolveStatus::optimal);
    REQUIRE(sol.indicators[0] == Approx(1.0).margin(1e-6));
}

TEST_CASE("small instances match the indicator-pattern enumeration oracle", "[ocp]") {
    for (unsigned seed = 0; seed < 6; ++seed) {
        OCPInstance inst = tiny_instance(3, 0.5, 0.3, seed, -0.5);
        auto sol = solve_instance(inst);
        auto oracle = testutil::enumerate_indicator_patterns(inst);
        REQUIRE(oracle.feasible);
        REQUIRE(sol.status == milp::SolveStatus::optimal);
        REQUIRE(sol.objective == Approx(oracle.objective).margin(1e-6));
    }
}

TEST_CASE("solution invariants: chance row, input feasibility, indicators", "[ocp]") {
    testutil::RandomInstanceSpec spec;
    spec.M = 10;
    spec.min_satisfaction = 0.5;
    spec.seed = 12;
    OCPInstance inst = testutil::random_exact_instance(spec);
    auto sol = solve_instance(inst);
    REQUIRE(sol.status == milp::SolveStatus::optimal);

    double mass = 0.0;
    for (int j = 0; j < inst.scenarios.size(); ++j)
        mass += inst.scenarios[j].probability * sol.indicators[j];
    REQUIRE(mass >= 1.0 - inst.epsilon - 1e-9);

    REQUIRE(inst.U_N.contains(sol.u, 1e-7));

    for (int j = 0; j < inst.scenarios.size(); ++j) {
        if (sol.indicators[j] > 0.5) {
            const Eigen::VectorXd x = sol.trajectories[j];
            REQUIRE(((inst.X_N.H * x).array() <= inst.X_N.h.array() + 1e-7).all());
        }
    }
}

TEST_CASE("reported objective is consistent with the trajectories", "[ocp]") {
    testutil::RandomInstanceSpec spec;
    spec.M = 8;
    spec.seed = 77;
    OCPInstance inst = testutil::random_exact_instance(spec);
    auto sol = solve_instance(inst);
    REQUIRE(sol.status == milp::SolveStatus::optimal);
    double recomputed = 0.0;
    for (int j = 0; j < inst.scenarios.size(); ++j)
        recomputed += inst.scenarios[j].probability *
                      (sol.trajectories[j].lpNorm<1>() + sol.u.lpNorm<1>());
    REQUIRE(recomputed == Approx(sol.milp_objective).margin(1e-8));
}

TEST_CASE("impossible tightening is reported as infeasible", "[ocp]") {
    // X shrunk so hard that every tightened bound is unreachable, epsilon = 0
    OCPInstance base = tiny_instance(4, 1.0, 0.5, 9);
    ReducedSet reduced = reduce(base.scenarios, 2, Norm::l1, 0);
    GuaranteePackage g;
    g.deviation_boxes.assign(2, HyperBox(Eigen::VectorXd::Constant(2, -50.0),
                                         Eigen::VectorXd::Constant(2, 50.0)));
    for (const auto& box : g.deviation_boxes) g.tightened_sets.push_back(tighten(base.X_N, box));
    g.correction = cost_correction(base.scenarios, reduced, base.stacked.Gamma);

    OCPInstance inst{base.x0,    base.stacked, base.X_N, base.U_N, reduced.centers,
                     0.0,        Variant::p2,  g,        g.correction};
    auto sol = solve_instance(inst);
    REQUIRE(sol.status == milp::SolveStatus::infeasible);
}

TEST_CASE("P2 needs its guarantee package", "[ocp]") {
    OCPInstance inst = tiny_instance(2, 0.5, 0.1, 1);
    inst.variant = Variant::p2;
    REQUIRE_THROWS_AS(build_milp(inst), std::invalid_argument);
}

TEST_CASE("unbounded input sets are rejected", "[ocp]") {
    OCPInstance inst = tiny_instance(2, 0.5, 0.1, 1);
    inst.U_N = Polytope(Eigen::MatrixXd::Zero(0, 2), Eigen::VectorXd::Zero(0));
    REQUIRE_THROWS_AS(build_milp(inst), std::invalid_argument);
}

TEST_CASE("paired exact and robustified solves respect the cost bound", "[ocp]") {
    std::mt19937_64 rng(1234);
    int checked = 0;
    for (unsigned seed = 0; seed < 10 && checked < 6; ++seed) {
        testutil::RandomInstanceSpec spec;
        spec.M = 8;
        spec.N = 3;
        spec.min_satisfaction = 0.5;
        spec.seed = 100 + seed;
        OCPInstance exact = testutil::random_exact_instance(spec);
        auto exact_sol = solve_instance(exact);
        if (exact_sol.status != milp::SolveStatus::optimal) continue;

        ReducedSet reduced = reduce(exact.scenarios, 3, Norm::l1, seed);
        OCPInstance p2 = make_reduced_instance(Variant::p2, exact.x0, exact.stacked, exact.X_N,
                                               exact.U_N, exact.scenarios, reduced, exact.epsilon);
        auto p2_sol = solve_instance(p2);
        if (p2_sol.status != milp::SolveStatus::optimal) continue;
        REQUIRE(p2_sol.objective >= exact_sol.objective - 1e-6);
        ++checked;
    }
    REQUIRE(checked >= 3);
}

TEST_CASE("ocp models survive the LP interchange format", "[ocp]") {
    OCPInstance inst = tiny_instance(3, 0.5, 0.3, 5, -0.4);
    milp::Model model = build_milp(inst);
    std::stringstream text;
    milp::write_lp(model, text);
    milp::Model back = milp::read_lp(text);
    auto a = milp::solve_milp(model);
    auto b = milp::solve_milp(back);
    REQUIRE(a.status == milp::SolveStatus::optimal);
    REQUIRE(b.objective == Approx(a.objective).margin(1e-9));
}

TEST_CASE("benchmark-scale reduced solve agrees with pattern enumeration", "[ocp]") {
    Eigen::MatrixXd A(2, 2), B(2, 1);
    A << 1.0, 1.0, 0.0, 0.5;
    B << 0.0, 1.0;
    LinearSystem sys(A, B);
    const int N = 10;
    StackedDynamics stacked = build_stacked(sys, N);
    const double inf = std::numeric_limits<double>::infinity();
    Polytope X = stack_constraints(
        box_polytope(Eigen::VectorXd::Constant(2, -1.0), Eigen::VectorXd::Constant(2, inf)), N, 1,
        N - 1);
    Polytope U = stack_constraints(
        box_polytope(Eigen::VectorXd::Constant(1, -2.0), Eigen::VectorXd::Constant(1, 2.0)), N);
    ScenarioSet full = generate_synthetic(1, 200, 2, N, DistributionSpec::gaussian(2, 0.1));
    ReducedSet reduced = reduce(full, 5, Norm::l1, 1);
    Eigen::VectorXd x0(2);
    x0 << -0.6, 0.0;

    for (Variant variant : {Variant::p1, Variant::p2}) {
        OCPInstance inst = make_reduced_instance(variant, x0, stacked, X, U, full, reduced, 0.8);
        auto sol = solve_instance(inst);
        REQUIRE(sol.status == milp::SolveStatus::optimal);
        auto oracle = testutil::enumerate_indicator_patterns(inst);
        REQUIRE(oracle.feasible);
        const double correction = variant == Variant::p2 ? inst.correction : 0.0;
        REQUIRE(sol.objective == Approx(oracle.objective + correction).margin(1e-6));
    }
}

TEST_CASE("epsilon outside [0,1) is rejected", "[ocp]") {
    OCPInstance inst = tiny_instance(2, 0.5, 0.1, 1);
    inst.epsilon = 1.0;
    REQUIRE_THROWS_AS(inst.validate(), std::invalid_argument);
    inst.epsilon = -0.1;
    REQUIRE_THROWS_AS(inst.validate(), std::invalid_argument);
}
