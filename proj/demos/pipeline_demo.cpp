// End-to-end library walkthrough: generate scenarios, reduce them, build the
// guarantee package, solve the robustified problem and evaluate it against
// the full set.

#include <iostream>

#include "scenred/scenred.hpp"

int main() {
    using namespace scenred;

    Eigen::MatrixXd A(2, 2), B(2, 1);
    A << 1.0, 1.0, 0.0, 0.5;
    B << 0.0, 1.0;
    LinearSystem sys(A, B);
    const int N = 6;
    StackedDynamics stacked = build_stacked(sys, N);

    const double inf = std::numeric_limits<double>::infinity();
    Polytope X_N = stack_constraints(
        box_polytope(Eigen::Vector2d(-1.0, -1.0), Eigen::Vector2d(inf, inf)), N);
    Polytope U_N = stack_constraints(
        box_polytope(Eigen::VectorXd::Constant(1, -2.0), Eigen::VectorXd::Constant(1, 2.0)), N);

    ScenarioSet full = generate_synthetic(1, 100, 2, N, DistributionSpec::gaussian(2, 0.1));
    std::cout << "generated " << full.size() << " scenarios\n";

    ReducedSet reduced = reduce(full, 8, Norm::l1, 1);
    std::cout << "reduced to " << reduced.centers.size() << " centers, loss " << reduced.loss
              << " after " << reduced.iterations << " iterations\n";

    const Eigen::Vector2d x0(-0.6, 0.0);
    const double epsilon = 0.8;  // chance level 0.2

    OCPInstance p2 = make_reduced_instance(Variant::p2, x0, stacked, X_N, U_N, full, reduced,
                                           epsilon);
    std::cout << "cost correction " << p2.correction << "\n";

    Solution sol = solve_instance(p2);
    std::cout << "P2 " << milp::status_name(sol.status) << ", objective " << sol.objective
              << " (" << sol.nodes << " nodes)\n";
    if (sol.status != milp::SolveStatus::optimal) return 1;

    OOSReport rep = oos_evaluate(sol.u, full, x0, stacked, X_N);
    std::cout << "out-of-sample satisfaction " << rep.satisfaction_prob << " (needs >= "
              << 1.0 - epsilon << "), expected cost " << rep.expected_cost_oos << "\n";
    return 0;
}
