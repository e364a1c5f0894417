#include <doctest.h>

#include <cmath>
#include <numbers>

#include "starsos/approx.hpp"
#include "starsos/error.hpp"

using namespace starsos;

namespace {

Polynomial disk_g() { return fixtures::disk().constraint(0); }

void check_trace(const ApproximationResult& r) {
  for (const auto& step : r.trace) {
    if (step.status == conic::Status::Feasible) {
      CHECK(step.s >= r.s_star - 1e-12);
    } else {
      CHECK(step.s < r.s_star);
    }
  }
}

}  // namespace

TEST_CASE("disk oracle at degree 2") {
  ApproximateOptions o;
  o.find.degree = 2;
  const auto r = approximate(fixtures::disk(), o);
  const double lo = std::sqrt(1.0 + o.find.eps);
  CHECK(r.s_star >= lo);
  CHECK(r.s_star <= lo + o.s_tol + 1e-6);
  CHECK(r.certificate.valid);
  CHECK(r.certificate.residual <= 1e-6);
  CHECK(r.certificate.min_eig >= -1e-7);
  check_trace(r);
  const auto sw = sandwich_check(fixtures::disk(), r.f, r.s_star, 1000, 1.2, 3);
  CHECK(sw.inner_checked == 1000);
  CHECK(sw.outer_checked == 1000);
  CHECK(sw.inner_violations == 0);
  CHECK(sw.outer_violations == 0);
}

TEST_CASE("hand-built disk certificate verifies") {
  const double eps = 1e-3;
  const double s = 1.2;
  const Polynomial g = disk_g();
  const Polynomial one = Polynomial::constant(2, 1.0);
  const Polynomial f = g * (1.0 + eps);
  const Polynomial lam = Polynomial::constant(2, 1.0 + eps);
  // The outer identity has zero remainder only for mu = (1+eps)/s^2.
  const Polynomial mu = Polynomial::constant(2, (1.0 + eps) / (s * s));
  const auto basis1 = sos::gram_basis_for(2, 2);
  const auto basis0 = sos::gram_basis_for(2, 0);
  sos::Certificate cert;
  const Polynomial inner = f - Polynomial::constant(2, 1.0 + eps) - lam * (g - one);
  const Polynomial outer = one - substitute_scale(f, s) - mu * (one - g);
  CHECK(max_coefficient_difference(inner, Polynomial(2)) < 1e-15);
  CHECK(max_coefficient_difference(outer, Polynomial::constant(2, 1.0 - (1.0 + eps) / (s * s))) < 1e-15);
  Eigen::MatrixXd lam_gram(1, 1);
  lam_gram << 1.0 + eps;
  Eigen::MatrixXd mu_gram(1, 1);
  mu_gram << (1.0 + eps) / (s * s);
  Eigen::MatrixXd outer_gram = Eigen::MatrixXd::Zero(3, 3);
  outer_gram(0, 0) = 1.0 - (1.0 + eps) / (s * s);
  cert.blocks.push_back({"lambda_1", lam, basis0, lam_gram});
  cert.blocks.push_back({"mu_1", mu, basis0, mu_gram});
  cert.blocks.push_back({"inner_1", inner, basis1, Eigen::MatrixXd::Zero(3, 3)});
  cert.blocks.push_back({"outer", outer, basis1, outer_gram});
  CHECK(sos::verify_certificate(cert).valid);
}

TEST_CASE("find_approx on the disk is feasible at 1.2 and carries a certificate") {
  FindApproxOptions o;
  o.degree = 2;
  const auto r = find_approx(fixtures::disk(), 1.2, o);
  REQUIRE(r.status == conic::Status::Feasible);
  CHECK(r.certificate.valid);
  CHECK(r.lambda.size() == 1);
  CHECK(r.mu.size() == 1);
  // Feasibility persists slightly above.
  CHECK(find_approx(fixtures::disk(), 1.2 * 1.001, o).status == conic::Status::Feasible);
}

TEST_CASE("disk: s = 1 is infeasible, any s > 1 is feasible with a steep f") {
  // f = a g + b needs a + b >= 1 + eps and a / s^2 + b <= 1, i.e. a (1 - 1/s^2) >= eps.
  FindApproxOptions o;
  o.degree = 2;
  CHECK(find_approx(fixtures::disk(), 1.0, o).status == conic::Status::Infeasible);
  const auto r = find_approx(fixtures::disk(), 1.0002, o);
  REQUIRE(r.status == conic::Status::Feasible);
  const double a = r.f.coefficient(Monomial({2, 0}));
  CHECK(a * (1.0 - 1.0 / (1.0002 * 1.0002)) >= o.eps - 1e-6);
}

TEST_CASE("example E r=0.4 degree 4 is infeasible at s=1.4") {
  const auto r = find_approx(fixtures::exampleE(0.9, 0.4), 1.4, {});
  CHECK(r.status == conic::Status::Infeasible);
}

TEST_CASE("find_approx input validation") {
  const auto X = fixtures::disk();
  CHECK_THROWS_AS(find_approx(X, 0.0, {}), InputError);
  FindApproxOptions odd;
  odd.degree = 3;
  CHECK_THROWS_AS(find_approx(X, 1.2, odd), InputError);
  FindApproxOptions bad_eps;
  bad_eps.eps = 0.0;
  CHECK_THROWS_AS(find_approx(X, 1.2, bad_eps), InputError);
  FindApproxOptions bad_mult;
  bad_mult.mult_degree = 1;
  CHECK_THROWS_AS(find_approx(X, 1.2, bad_mult), InputError);
  const std::vector<double> shift{0.0, 1.5};
  CHECK_THROWS_AS(approximate(recenter_set(X, shift)), InputError);
}

TEST_CASE("scale invariance on the disk") {
  ApproximateOptions o;
  o.find.degree = 2;
  const double base = approximate(fixtures::disk(), o).s_star;
  for (double alpha : {0.5, 2.0}) {
    const auto X = scale_set(fixtures::disk(), alpha);
    const auto r = approximate(X, o);
    CHECK(std::abs(r.s_star - base) <= 2 * o.s_tol);
    const auto sw = sandwich_check(X, r.f, r.s_star, 500, 1.2 * alpha, 5);
    CHECK(sw.inner_violations == 0);
    CHECK(sw.outer_violations == 0);
  }
}

TEST_CASE("lower-bound estimator") {
  CHECK(scaling_lower_bound_estimate(fixtures::disk(), 200, 1) == 1.0);
  const double est = scaling_lower_bound_estimate(fixtures::exampleE(0.9, 0.4), 2000, 1);
  const double exact = fixtures::exampleE_scaling_lower_bound(0.9, 0.4);
  CHECK(est <= exact + 1e-6);
  CHECK(est >= exact - 0.05);
}

TEST_CASE("l1 outer approximation of the disk") {
  const std::vector<Interval> box{{-1.0, 1.0}, {-1.0, 1.0}};
  const auto r = find_l1_outer(fixtures::disk(), box, {});
  CHECK(r.certificate.valid);
  CHECK(r.objective >= std::numbers::pi - 1e-6);
  CHECK(r.objective <= 4.0 + 1e-6);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int checked = 0;
  while (checked < 500) {
    std::vector<double> x{u(rng), u(rng)};
    if (!membership(fixtures::disk(), x)) continue;
    ++checked;
    CHECK(eval(r.f, x) >= 1.0 - 1e-6);
  }
}

TEST_CASE("l1 outer at degree 0 is the constant one") {
  const std::vector<Interval> box{{-1.0, 1.0}, {-1.0, 1.0}};
  L1Options o;
  o.degree = 0;
  const auto r = find_l1_outer(fixtures::disk(), box, o);
  CHECK(r.f.degree() == 0);
  CHECK(r.objective == doctest::Approx(4.0).epsilon(1e-6));
}
