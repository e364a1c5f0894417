#pragma once

// End-to-end pipelines shared by the CLI, the acceptance binary and the
// Python module: outer-approximation percent errors, the example E table and
// the random-polytope comparison of the scaling and l1 objectives.

#include <cstdint>
#include <vector>

#include "starsos/approx.hpp"
#include "starsos/metrics.hpp"

namespace starsos::study {

// Largest boundary crossing over `n_dirs` directions; every point of X lies
// within this radius up to the ray resolution.
double bounding_radius(const SemialgebraicSet& X, long n_dirs = 720);

std::vector<Interval> square_box(std::size_t n, double half_width);

struct OuterVolumes {
  double vol_set = 0.0;    // vol X
  double vol_inner = 0.0;  // vol {f <= 1}
  double vol_outer = 0.0;  // vol {f(x/s) <= 1} = s^n vol_inner
  double percent_error = 0.0;
};

// Grid volumes over [-R, R]^n with R the set's bounding radius (times s for the
// outer set, which is the inner set dilated by s).
OuterVolumes scaling_volumes(const SemialgebraicSet& X, const Polynomial& f, double s, long resolution = 2000);

// The l1 outer set {x in box : f(x) >= 1} against X, both on the grid.
OuterVolumes l1_volumes(const SemialgebraicSet& X, const Polynomial& f, const std::vector<Interval>& box,
                        long resolution = 2000);

struct Table2Options {
  double c = 0.9;
  std::vector<double> radii{0.1, 0.2, 0.3, 0.4};
  int degree = 4;
  double eps = 1e-3;
  double s_tol = 1e-3;
  bool with_l1 = false;
  long resolution = 2000;
};

// One scaling row per radius (and an l1 row when requested). Failures become
// rows with status "error: ..." and the run continues.
std::vector<TableRow> table2(const Table2Options& opts = {});

struct PolytopeStudyOptions {
  int instances = 20;
  int degree = 4;
  std::uint64_t seed = 1;
  int min_points = 5;
  int max_points = 9;
  long resolution = 1000;
};

struct PolytopeStudyRow {
  int instance = 0;
  std::size_t facets = 0;
  double s_star = 0.0;
  double percent_scaling = 0.0;
  double percent_l1 = 0.0;
  std::string status = "ok";
};

// Random planar polytopes: hull of uniform points in the unit square, moved
// so that its Chebyshev center is the origin.
SemialgebraicSet random_polytope(std::mt19937_64& rng, int n_points);

std::vector<PolytopeStudyRow> polytope_study(const PolytopeStudyOptions& opts = {});

}  // namespace starsos::study
