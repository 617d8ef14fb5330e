#include <cmath>
#include <random>

#include "doctest.h"
#include "misnc/lp.hpp"
#include "support/oracles.hpp"

using namespace misnc;
using misnc::lp::LinearProgram;
using misnc::lp::Relation;
using misnc::lp::Status;

TEST_CASE("minimize x subject to x >= 3") {
  LinearProgram prog;
  int x = prog.add_variable("x", 1.0);
  prog.add_constraint({{x, 1.0}}, Relation::kGe, 3.0);
  auto sol = lp::solve_lp(prog);
  REQUIRE(sol.status == Status::kOptimal);
  CHECK(sol.value(x) == doctest::Approx(3.0));
  CHECK(sol.objective == doctest::Approx(3.0));
  CHECK(sol.basic);
}

TEST_CASE("degenerate objective still lands on a vertex") {
  LinearProgram prog;
  int x = prog.add_variable("x", 1.0);
  int y = prog.add_variable("y", 1.0);
  prog.add_constraint({{x, 1.0}, {y, 1.0}}, Relation::kEq, 1.0);
  auto sol = lp::solve_lp(prog);
  REQUIRE(sol.status == Status::kOptimal);
  CHECK(sol.objective == doctest::Approx(1.0));
  // (1,0) or (0,1), never the interior point
  CHECK(std::max(sol.value(x), sol.value(y)) > 0.99);
  CHECK(std::min(sol.value(x), sol.value(y)) < 1e-9);
}

TEST_CASE("conflicting bounds are infeasible") {
  LinearProgram prog;
  int x = prog.add_variable("x", 1.0);
  prog.add_constraint({{x, 1.0}}, Relation::kLe, 1.0);
  prog.add_constraint({{x, 1.0}}, Relation::kGe, 2.0);
  CHECK(lp::solve_lp(prog).status == Status::kInfeasible);
}

TEST_CASE("free descent direction is reported unbounded") {
  LinearProgram prog;
  int x = prog.add_variable("x", -1.0);
  prog.add_constraint({{x, -1.0}}, Relation::kLe, 0.0);  // no upper bound on x
  CHECK(lp::solve_lp(prog).status == Status::kUnbounded);
}

namespace {

LinearProgram random_bounded_lp(std::mt19937_64& rng) {
  LinearProgram prog;
  int nvars = misnc::testing::uniform_int(rng, 2, 4);
  for (int j = 0; j < nvars; ++j)
    prog.add_variable("x" + std::to_string(j), misnc::testing::uniform_real(rng, -3.0, 3.0));
  // Box rows keep the region bounded; they count toward the constraint budget.
  for (int j = 0; j < nvars; ++j)
    prog.add_constraint({{j, 1.0}}, Relation::kLe, misnc::testing::uniform_real(rng, 1.0, 10.0));
  int extra = misnc::testing::uniform_int(rng, 0, 6 - nvars);
  for (int k = 0; k < extra; ++k) {
    std::vector<std::pair<int, double>> terms;
    for (int j = 0; j < nvars; ++j) {
      double a = misnc::testing::uniform_real(rng, -5.0, 5.0);
      if (std::abs(a) > 0.5) terms.emplace_back(j, a);
    }
    if (terms.empty()) terms.emplace_back(0, 1.0);
    int rel = misnc::testing::uniform_int(rng, 0, 2);
    double rhs = misnc::testing::uniform_real(rng, -2.0, 8.0);
    prog.add_constraint(std::move(terms),
                        rel == 0 ? Relation::kLe : (rel == 1 ? Relation::kGe : Relation::kEq), rhs);
  }
  return prog;
}

}  // namespace

TEST_CASE("random LPs match brute-force vertex enumeration") {
  std::mt19937_64 rng(101);
  int optimal_seen = 0;
  for (int round = 0; round < 300; ++round) {
    LinearProgram prog = random_bounded_lp(rng);
    auto sol = lp::solve_lp(prog);
    auto oracle = misnc::testing::enumerate_vertex_optimum(prog);
    if (sol.status == Status::kOptimal) {
      ++optimal_seen;
      REQUIRE_MESSAGE(oracle.has_value(), "round " << round);
      CHECK_MESSAGE(sol.objective == doctest::Approx(*oracle).epsilon(1e-7).scale(1.0),
                    "round " << round);
    } else {
      CHECK_MESSAGE(!oracle.has_value(), "round " << round);
    }
  }
  CHECK(optimal_seen > 100);  // the generator must exercise the optimal path
}

TEST_CASE("optimal solutions are basic") {
  std::mt19937_64 rng(202);
  for (int round = 0; round < 200; ++round) {
    LinearProgram prog = random_bounded_lp(rng);
    auto sol = lp::solve_lp(prog);
    if (sol.status != Status::kOptimal) continue;
    CHECK(sol.basic);
    int interior = 0;
    for (double v : sol.values)
      if (v > 1e-7) ++interior;
    CHECK(interior <= misnc::testing::active_constraint_rank(prog, sol.values));
  }
}

TEST_CASE("warm restart with a new objective matches a cold solve") {
  std::mt19937_64 rng(303);
  for (int round = 0; round < 50; ++round) {
    LinearProgram prog = random_bounded_lp(rng);
    lp::SimplexSolver solver(prog);
    auto first = solver.solve();
    if (first.status != Status::kOptimal) continue;

    std::vector<double> costs(static_cast<size_t>(prog.variable_count()));
    for (auto& c : costs) c = misnc::testing::uniform_real(rng, -3.0, 3.0);
    auto warm = solver.resolve(costs);
    for (int j = 0; j < prog.variable_count(); ++j) prog.set_cost(j, costs[static_cast<size_t>(j)]);
    auto cold = lp::solve_lp(prog);
    REQUIRE(warm.status == cold.status);
    if (warm.status == Status::kOptimal)
      CHECK(warm.objective == doctest::Approx(cold.objective).epsilon(1e-8).scale(1.0));
  }
}
