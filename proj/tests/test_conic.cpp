#include <sstream>

#include "doctest.h"
#include "starsos/conic.hpp"
#include "starsos/error.hpp"

using namespace starsos::conic;

TEST_CASE("conic: contradictory LP is infeasible with a valid certificate") {
  ConicProblem p;
  const auto x = p.add_scalar();
  p.inequalities.push_back({{{x, 1.0}}, {}, -1.0});   // x <= -1
  p.inequalities.push_back({{{x, -1.0}}, {}, -1.0});  // -x <= -1
  const auto sol = solve(p);
  CHECK(sol.status == Status::Infeasible);
  REQUIRE(sol.farkas.has_value());
  const auto chk = check_farkas(p, *sol.farkas);
  CHECK(chk.valid);
  CHECK(chk.margin > 1.0);
}

TEST_CASE("conic: min t with [[t,1],[1,t]] PSD equals 1") {
  ConicProblem p;
  const auto t = p.add_scalar();
  const auto b = p.add_block(2);
  // X00 = t, X11 = t, X01 = 1
  p.equalities.push_back({{{t, -1.0}}, {{b, 0, 0, 1.0}}, 0.0});
  p.equalities.push_back({{{t, -1.0}}, {{b, 1, 1, 1.0}}, 0.0});
  p.equalities.push_back({{}, {{b, 0, 1, 1.0}}, 1.0});
  p.objective.scalars.push_back({t, 1.0});
  const auto sol = solve(p);
  REQUIRE(sol.status == Status::Optimal);
  CHECK(sol.scalars[t] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(sol.primal_residual <= 1e-8);
  CHECK(sol.min_eigenvalue >= -1e-7);
}

TEST_CASE("conic: identity feasibility") {
  ConicProblem p;
  const auto b = p.add_block(3);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = i; j < 3; ++j) p.equalities.push_back({{}, {{b, i, j, 1.0}}, i == j ? 1.0 : 0.0});
  }
  const auto sol = solve(p);
  CHECK(sol.status == Status::Feasible);
  CHECK(sol.primal_residual <= 1e-8);
  CHECK((sol.blocks[0] - Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-7);
}

TEST_CASE("conic: PSD infeasibility (negative diagonal)") {
  ConicProblem p;
  const auto b = p.add_block(2);
  p.equalities.push_back({{}, {{b, 0, 0, 1.0}}, -1.0});
  const auto sol = solve(p);
  CHECK(sol.status == Status::Infeasible);
  REQUIRE(sol.farkas.has_value());
  CHECK(check_farkas(p, *sol.farkas).valid);
}

TEST_CASE("conic: LP optimum with free variable and mixed rows") {
  // min -x - y s.t. x + 2y <= 4, 3x + y <= 6, x >= 0, y >= 0 -> (8/5, 6/5)
  ConicProblem p;
  const auto x = p.add_scalar();
  const auto y = p.add_scalar();
  p.inequalities.push_back({{{x, 1.0}, {y, 2.0}}, {}, 4.0});
  p.inequalities.push_back({{{x, 3.0}, {y, 1.0}}, {}, 6.0});
  p.inequalities.push_back({{{x, -1.0}}, {}, 0.0});
  p.inequalities.push_back({{{y, -1.0}}, {}, 0.0});
  p.objective.scalars = {{x, -1.0}, {y, -1.0}};
  const auto sol = solve(p);
  REQUIRE(sol.status == Status::Optimal);
  CHECK(sol.scalars[x] == doctest::Approx(1.6).epsilon(1e-7));
  CHECK(sol.scalars[y] == doctest::Approx(1.2).epsilon(1e-7));
  CHECK(sol.objective_value == doctest::Approx(-2.8).epsilon(1e-7));
}

TEST_CASE("conic: max eigenvalue SDP") {
  // min t s.t. tI - A PSD, A = [[2,1],[1,2]] -> 3
  ConicProblem p;
  const auto t = p.add_scalar();
  const auto b = p.add_block(2);
  p.equalities.push_back({{{t, -1.0}}, {{b, 0, 0, 1.0}}, -2.0});
  p.equalities.push_back({{{t, -1.0}}, {{b, 1, 1, 1.0}}, -2.0});
  p.equalities.push_back({{}, {{b, 0, 1, 1.0}}, -1.0});
  p.objective.scalars = {{t, 1.0}};
  const auto sol = solve(p);
  REQUIRE(sol.status == Status::Optimal);
  CHECK(sol.objective_value == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("conic: validation and sdpa dump") {
  ConicProblem p;
  p.add_block(2);
  p.equalities.push_back({{}, {{0, 1, 0, 1.0}}, 0.0});
  CHECK_THROWS_AS(p.validate(), starsos::InputError);
  ConicProblem q;
  const auto x = q.add_scalar();
  q.add_block(1);
  q.equalities.push_back({{{x, 1.0}}, {{0, 0, 0, 1.0}}, 2.0});
  std::ostringstream os;
  write_sdpa(q, os);
  CHECK(os.str().find("-2 1") != std::string::npos);
}
