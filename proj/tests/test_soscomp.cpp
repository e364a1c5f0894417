#include <random>
#include <sstream>

#include "doctest.h"
#include "starsos/error.hpp"
#include "starsos/soscomp.hpp"

using namespace starsos;
using namespace starsos::sos;

TEST_CASE("soscomp: gram basis sizes") {
  CHECK(gram_basis_for(2, 4).size() == 6);
  CHECK(gram_basis_for(2, 2).size() == 3);
  CHECK(gram_basis_for(3, 4).size() == 10);
  CHECK_THROWS_AS(gram_basis_for(2, 3), InputError);
}

TEST_CASE("soscomp: 1 + x^2 compiles to identity-feasible rows") {
  SosProgram prog(1);
  const auto p = Polynomial::from_terms(1, {{{0}, 1.0}, {{2}, 1.0}});
  prog.constrain_sos(p, "t");
  CHECK(prog.problem().equalities.size() == 3);
  const auto sol = prog.solve();
  REQUIRE(sol.status == conic::Status::Feasible);
  auto cert = extract_certificate(prog, sol);
  CHECK(cert.valid);
  CHECK(cert.residual <= 1e-8);
}

TEST_CASE("soscomp: odd polynomial is not SOS") {
  SosProgram prog(1);
  const auto p = Polynomial::from_terms(1, {{{1}, 1.0}});
  prog.constrain_sos(p, "odd");
  CHECK(prog.solve().status == conic::Status::Infeasible);
}

TEST_CASE("soscomp: perfect square has singular Gram") {
  SosProgram prog(1);
  const auto p = Polynomial::from_terms(1, {{{2}, 1.0}, {{1}, -2.0}, {{0}, 1.0}});
  prog.constrain_sos(p, "sq");
  const auto sol = prog.solve();
  REQUIRE(sol.status == conic::Status::Feasible);
  const auto& P = sol.blocks[0];
  CHECK(P(0, 0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(P(0, 1) == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(sol.min_eigenvalue >= -1e-7);
  CHECK(sol.min_eigenvalue <= 1e-4);
}

TEST_CASE("soscomp: degree cap") {
  GramBlock g;
  g.basis = gram_basis_for(1, 2);
  g.block = 0;
  const auto p = Polynomial::from_terms(1, {{{3}, 1.0}});
  CHECK_THROWS_AS(compile_sos_equal(p, g), InputError);
}

TEST_CASE("soscomp: round trip of random Gram matrices") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> nd;
  const auto basis = gram_basis_for(2, 4);
  const auto k = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd L(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j) L(i, j) = nd(rng);
  const Eigen::MatrixXd P = L * L.transpose();
  const Polynomial p = gram_polynomial(basis, P);
  GramBlock g{basis, 0};
  const auto rows = compile_sos_equal(p, g);
  CHECK(rows.size() == monomial_basis(2, 4).size());
  conic::ConicProblem prob;
  prob.add_block(basis.size());
  prob.equalities = rows;
  CHECK(conic::primal_residual(prob, {}, {P}) <= 1e-10);
}

TEST_CASE("soscomp: verify_certificate reacts to perturbations") {
  Certificate cert;
  const auto basis = gram_basis_for(1, 2);
  Eigen::MatrixXd P = Eigen::MatrixXd::Identity(2, 2);
  cert.blocks.push_back({"id", gram_polynomial(basis, P), basis, P});
  auto chk = verify_certificate(cert);
  CHECK(chk.valid);
  CHECK(chk.residual <= 1e-12);
  cert.blocks[0].target.add_term(Monomial({1}), 1e-4);
  chk = verify_certificate(cert);
  CHECK(chk.residual == doctest::Approx(1e-4).epsilon(1e-8));
  cert.blocks[0].target = gram_polynomial(basis, -P);
  cert.blocks[0].gram = -P;
  chk = verify_certificate(cert);
  CHECK(chk.min_eig == doctest::Approx(-1.0));
  CHECK_FALSE(chk.valid);
}

TEST_CASE("soscomp: free coefficients and csv dump") {
  // Find the smallest c with x^4 - 2 x^2 + c SOS: c = 1.
  SosProgram prog(1);
  const auto c = prog.scalar();
  AffinePoly expr = Polynomial::from_terms(1, {{{4}, 1.0}, {{2}, -2.0}});
  expr.add(Monomial({0}), c);
  prog.constrain_sos(expr, "p");
  prog.set_objective(c);
  const auto sol = prog.solve();
  REQUIRE(sol.status == conic::Status::Optimal);
  CHECK(sol.scalars[0] == doctest::Approx(1.0).epsilon(1e-6));
  std::ostringstream os;
  write_equality_csv(prog.problem(), os);
  CHECK(os.str().find("s0:1") != std::string::npos);
}
