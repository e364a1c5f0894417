#include <doctest.h>

#include <cmath>

#include "starsos/error.hpp"
#include "starsos/io.hpp"

using namespace starsos;
using io::json;

TEST_CASE("io: polynomial JSON round trip") {
  const Polynomial p = Polynomial::from_terms(2, {{{2, 0}, 1.0}, {{1, 1}, -2.5}, {{0, 0}, 3.0}});
  const json j = io::to_json(p);
  CHECK(j.at("n") == 2);
  CHECK(j.at("terms").size() == 3);
  CHECK(io::polynomial_from_json(j) == p);
  CHECK(io::polynomial_from_json(json::parse(R"({"n":2,"terms":[{"exps":[2,0],"coef":1.0}]})")) ==
        Polynomial::from_terms(2, {{{2, 0}, 1.0}}));
  CHECK_THROWS_AS(io::polynomial_from_json(json::parse(R"({"n":2,"terms":[{"exps":[2],"coef":1.0}]})")), InputError);
  CHECK_THROWS_AS(io::polynomial_from_json(json::parse(R"({"n":2})")), InputError);
}

TEST_CASE("io: sets from JSON and fixtures") {
  const auto A = fixtures::exampleA();
  const auto B = io::set_from_json(io::to_json(A));
  REQUIRE(B.size() == A.size());
  for (std::size_t i = 0; i < A.size(); ++i) CHECK(B.constraint(i) == A.constraint(i));
  const auto E = io::set_from_json(json::parse(R"({"fixture":"exampleE","c":0.9,"r":0.4})"), json{{"r", 0.2}});
  const double p[] = {0.9, 0.3};
  CHECK(membership(E, p));  // outside the r = 0.2 hole
  CHECK_THROWS_AS(io::named_fixture("nope"), InputError);
  CHECK_THROWS_AS(io::load_set("/nonexistent/set.json"), InputError);
  const auto D = io::load_set(std::string(STARSOS_FIXTURE_DIR) + "/disk.json");
  CHECK(D.constraint(0) == fixtures::disk().constraint(0));
}

TEST_CASE("io: marching squares traces the unit circle") {
  const auto segs = io::marching_squares([](double x, double y) { return x * x + y * y - 1.0; }, 1.5, 200);
  REQUIRE(segs.size() > 100);
  for (const auto& s : segs) {
    CHECK(std::abs(std::hypot(s.x0, s.y0) - 1.0) < 1e-3);
    CHECK(std::abs(std::hypot(s.x1, s.y1) - 1.0) < 1e-3);
  }
  const std::string svg = io::render_svg({{"black", segs, {}, "none"}}, 1.5);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(io::fmt9(1.0 / 3.0) == "0.333333333");
}
