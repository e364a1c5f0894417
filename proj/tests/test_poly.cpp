#include <cmath>
#include <random>

#include "doctest.h"
#include "starsos/error.hpp"
#include "starsos/poly.hpp"

using namespace starsos;

namespace {

Polynomial random_poly(std::mt19937_64& rng, std::size_t n, int d) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Polynomial p(n);
  for (const auto& m : monomial_basis(n, d)) p.add_term(m, u(rng));
  return p;
}

}  // namespace

TEST_CASE("poly: eval examples") {
  const auto p = Polynomial::from_terms(2, {{{2, 0}, 1.0}, {{1, 1}, 2.0}});
  const double x[] = {1.0, 1.0};
  CHECK(eval(p, x) == 3.0);
  CHECK(eval(Polynomial(2), x) == 0.0);
  const auto g = Polynomial::from_terms(2, {{{0, 1}, -2.0}});
  const double o[] = {0.0, 0.0};
  CHECK(eval(g, o) == 0.0);
  const double bad[] = {1.0};
  CHECK_THROWS_AS(eval(p, bad), InputError);
}

TEST_CASE("poly: gradient and finite differences") {
  const auto p = Polynomial::from_terms(2, {{{2, 0}, 1.0}, {{0, 2}, 1.0}});
  const auto g = gradient(p);
  CHECK(g[0] == Polynomial::from_terms(2, {{{1, 0}, 2.0}}));
  CHECK(g[1] == Polynomial::from_terms(2, {{{0, 1}, 2.0}}));
  for (const auto& c : gradient(Polynomial::constant(3, 4.0))) CHECK(c.is_zero());

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto q = random_poly(rng, 3, 4);
  const double h = 1e-5;
  for (int k = 0; k < 20; ++k) {
    std::vector<double> x{u(rng), u(rng), u(rng)};
    for (std::size_t j = 0; j < 3; ++j) {
      auto xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      const double fd = (eval(q, xp) - eval(q, xm)) / (2 * h);
      CHECK(std::abs(fd - eval(derivative(q, j), x)) < 1e-8);
    }
  }
}

TEST_CASE("poly: substitute_scale") {
  const auto p = Polynomial::from_terms(2, {{{2, 0}, 1.0}, {{0, 1}, 1.0}});
  CHECK(substitute_scale(p, 2.0) == Polynomial::from_terms(2, {{{2, 0}, 0.25}, {{0, 1}, 0.5}}));
  CHECK(substitute_scale(p, 1.0) == p);
  CHECK_THROWS_AS(substitute_scale(p, 0.0), InputError);
  CHECK_THROWS_AS(substitute_scale(p, -1.0), InputError);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto q = random_poly(rng, 2, 5);
  for (int k = 0; k < 20; ++k) {
    const double s = 0.3 + std::abs(u(rng)) * 3;
    const double x[] = {u(rng), u(rng)};
    const double sx[] = {s * x[0], s * x[1]};
    CHECK(eval(substitute_scale(q, s), sx) == doctest::Approx(eval(q, x)).epsilon(1e-12));
    CHECK(max_coefficient_difference(substitute_scale(substitute_scale(q, s), 1.0 / s), q) < 1e-12);
  }
}

TEST_CASE("poly: translate") {
  const auto p = Polynomial::from_terms(2, {{{2, 0}, 1.0}});
  const double t[] = {1.0, 0.0};
  CHECK(translate(p, t) == Polynomial::from_terms(2, {{{2, 0}, 1.0}, {{1, 0}, -2.0}, {{0, 0}, 1.0}}));
  const double z[] = {0.0, 0.0};
  CHECK(translate(p, z) == p);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto q = random_poly(rng, 2, 4);
  for (int k = 0; k < 20; ++k) {
    const double tt[] = {u(rng), u(rng)};
    const double x[] = {u(rng), u(rng)};
    const double xt[] = {x[0] + tt[0], x[1] + tt[1]};
    CHECK(eval(translate(q, tt), xt) == doctest::Approx(eval(q, x)).epsilon(1e-11));
  }
  const double bad[] = {1.0};
  CHECK_THROWS_AS(translate(p, bad), InputError);
}

TEST_CASE("poly: monomial basis order and size") {
  const auto b = monomial_basis(2, 2);
  REQUIRE(b.size() == 6);
  CHECK(b[0].to_string() == "1");
  CHECK(b[1].to_string() == "x1");
  CHECK(b[2].to_string() == "x2");
  CHECK(b[3].to_string() == "x1^2");
  CHECK(b[4].to_string() == "x1*x2");
  CHECK(b[5].to_string() == "x2^2");
  CHECK(monomial_basis(1, 3).size() == 4);
  CHECK(monomial_basis(3, 2).size() == 10);
}

TEST_CASE("poly: integrate_over_box") {
  const Interval unit[] = {{0, 1}, {0, 1}};
  const Interval sq[] = {{-1, 1}, {-1, 1}};
  CHECK(integrate_over_box(Polynomial::from_terms(2, {{{1, 1}, 1.0}}), unit) == doctest::Approx(0.25));
  CHECK(integrate_over_box(Polynomial::from_terms(2, {{{2, 0}, 1.0}}), sq) == doctest::Approx(4.0 / 3.0));
  CHECK(integrate_over_box(Polynomial::constant(2, 1.0), sq) == doctest::Approx(4.0));
  const Interval degenerate[] = {{0, 0}, {0, 1}};
  CHECK_THROWS_AS(integrate_over_box(Polynomial::constant(2, 1.0), degenerate), InputError);

  // Monte-Carlo agreement within 3 standard errors.
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto q = random_poly(rng, 2, 6);
  const int N = 1000000;
  double sum = 0.0, sum2 = 0.0;
  for (int k = 0; k < N; ++k) {
    const double x[] = {u(rng), u(rng)};
    const double v = 4.0 * eval(q, x);
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / N;
  const double se = std::sqrt((sum2 / N - mean * mean) / N);
  CHECK(std::abs(mean - integrate_over_box(q, sq)) <= 3 * se);
}

TEST_CASE("poly: ring laws at random points") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto p = random_poly(rng, 3, 3);
  const auto q = random_poly(rng, 3, 3);
  for (int k = 0; k < 100; ++k) {
    const double x[] = {u(rng), u(rng), u(rng)};
    const double sum = eval(p, x) + eval(q, x);
    const double prod = eval(p, x) * eval(q, x);
    CHECK(std::abs(eval(p + q, x) - sum) <= 1e-12 * std::max(1.0, std::abs(sum)));
    CHECK(std::abs(eval(p * q, x) - prod) <= 1e-12 * std::max(1.0, std::abs(prod)));
  }
  CHECK((p - p).is_zero());
  CHECK((p * 0.0).is_zero());
  CHECK(Polynomial(2).degree() == 0);
}

TEST_CASE("poly: restrict_to_line") {
  const auto p = Polynomial::from_terms(2, {{{2, 0}, 1.0}, {{0, 2}, 1.0}, {{0, 0}, -1.0}});
  const double o[] = {0.0, 0.0};
  const double d[] = {0.6, 0.8};
  const auto c = restrict_to_line(p, o, d);
  REQUIRE(c.size() == 3);
  CHECK(c[0] == doctest::Approx(-1.0));
  CHECK(c[1] == doctest::Approx(0.0));
  CHECK(c[2] == doctest::Approx(1.0));
  CHECK(eval_univariate(c, 2.0) == doctest::Approx(3.0));
}
