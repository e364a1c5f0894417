#include "starsos/study.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "starsos/error.hpp"
#include "starsos/kernel.hpp"

namespace starsos::study {

namespace {

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

double bounding_radius(const SemialgebraicSet& X, long n_dirs) {
  double R = 0.0;
  for (const auto& d : sphere_directions(X.dim(), n_dirs)) {
    const auto ts = ray_boundary_crossings(X, d);
    if (!ts.empty()) R = std::max(R, ts.back());
  }
  // Directions between samples can reach a little further.
  return R * (1.0 + 4.0 / static_cast<double>(n_dirs)) + 1e-9;
}

std::vector<Interval> square_box(std::size_t n, double half_width) {
  return std::vector<Interval>(n, Interval{-half_width, half_width});
}

OuterVolumes scaling_volumes(const SemialgebraicSet& X, const Polynomial& f, double s, long resolution) {
  const std::size_t n = X.dim();
  const auto box = square_box(n, bounding_radius(X));
  OuterVolumes v;
  v.vol_set = volume_grid(set_region(X), box, resolution).value;
  v.vol_inner = volume_grid(sublevel_region(f), box, resolution).value;
  v.vol_outer = std::pow(s, static_cast<double>(n)) * v.vol_inner;
  v.percent_error = percent_error(v.vol_outer, v.vol_set);
  return v;
}

OuterVolumes l1_volumes(const SemialgebraicSet& X, const Polynomial& f, const std::vector<Interval>& box,
                        long resolution) {
  OuterVolumes v;
  v.vol_set = volume_grid(set_region(X), box, resolution).value;
  const Region outer = [&f](std::span<const double> x) { return eval(f, x) >= 1.0; };
  v.vol_outer = volume_grid(outer, box, resolution).value;
  v.percent_error = percent_error(v.vol_outer, v.vol_set);
  return v;
}

std::vector<TableRow> table2(const Table2Options& opts) {
  std::vector<TableRow> rows;
  for (double r : opts.radii) {
    const std::string name = "E c=" + short_num(opts.c) + " r=" + short_num(r);
    TableRow row;
    row.example = name;
    row.degree = opts.degree;
    row.objective = "scaling";
    try {
      row.s_lb = fixtures::exampleE_scaling_lower_bound(opts.c, r);
      const auto X = fixtures::exampleE(opts.c, r);
      ApproximateOptions ao;
      ao.find.degree = opts.degree;
      ao.find.eps = opts.eps;
      ao.s_tol = opts.s_tol;
      const auto res = approximate(X, ao);
      row.s_star = res.s_star;
      const auto v = scaling_volumes(X, res.f, res.s_star, opts.resolution);
      row.vol_inner = v.vol_inner;
      row.vol_outer = v.vol_outer;
      row.percent_error = v.percent_error;
    } catch (const std::exception& e) {
      spdlog::warn("table row {} failed: {}", name, e.what());
      row.status = std::string("error: ") + e.what();
    }
    rows.push_back(row);
    if (!opts.with_l1) continue;
    TableRow l1;
    l1.example = name;
    l1.degree = opts.degree;
    l1.objective = "l1";
    l1.s_lb = row.s_lb;
    try {
      const auto X = fixtures::exampleE(opts.c, r);
      const auto box = square_box(2, 1.0);
      L1Options lo;
      lo.degree = opts.degree;
      const auto res = find_l1_outer(X, box, lo);
      const auto v = l1_volumes(X, res.f, box, opts.resolution);
      l1.vol_outer = v.vol_outer;
      l1.percent_error = v.percent_error;
    } catch (const std::exception& e) {
      spdlog::warn("l1 row {} failed: {}", name, e.what());
      l1.status = std::string("error: ") + e.what();
    }
    rows.push_back(l1);
  }
  return rows;
}

SemialgebraicSet random_polytope(std::mt19937_64& rng, int n_points) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::vector<std::vector<double>> pts;
    for (int k = 0; k < n_points; ++k) pts.push_back({u(rng), u(rng)});
    Polytope P = Polytope::from_vertices(2, pts);
    complete_2d(P);
    if (P.halfspaces.size() < 3 || polygon_area(vertices_2d(P)) < 0.2) continue;
    const auto cheb = chebyshev_center(P);
    std::vector<std::vector<double>> normals;
    std::vector<double> offsets;
    for (const auto& h : P.halfspaces) {
      normals.push_back(h.a);
      offsets.push_back(h.b - h.a[0] * cheb.center[0] - h.a[1] * cheb.center[1]);
    }
    return fixtures::polytope(normals, offsets);
  }
  throw InputError("could not draw a non-degenerate polytope");
}

std::vector<PolytopeStudyRow> polytope_study(const PolytopeStudyOptions& opts) {
  if (opts.instances < 1 || opts.min_points < 3 || opts.max_points < opts.min_points) {
    throw InputError("invalid polytope study options");
  }
  std::mt19937_64 rng(opts.seed);
  std::uniform_int_distribution<int> count(opts.min_points, opts.max_points);
  std::vector<PolytopeStudyRow> rows;
  for (int k = 0; k < opts.instances; ++k) {
    PolytopeStudyRow row;
    row.instance = k;
    const auto X = random_polytope(rng, count(rng));
    row.facets = X.size();
    try {
      ApproximateOptions ao;
      ao.find.degree = opts.degree;
      const auto res = approximate(X, ao);
      row.s_star = res.s_star;
      row.percent_scaling = scaling_volumes(X, res.f, res.s_star, opts.resolution).percent_error;
      // The l1 box is the bounding box of X.
      std::vector<Interval> box(2, Interval{INFINITY, -INFINITY});
      for (const auto& d : sphere_directions(2, 720)) {
        const double R = ray_boundary_crossings(X, d).front();
        for (int j = 0; j < 2; ++j) {
          box[j].lo = std::min(box[j].lo, R * d[j]);
          box[j].hi = std::max(box[j].hi, R * d[j]);
        }
      }
      for (auto& iv : box) {
        const double pad = 1e-3 * (iv.hi - iv.lo);
        iv.lo -= pad;
        iv.hi += pad;
      }
      L1Options lo;
      lo.degree = opts.degree;
      const auto l1 = find_l1_outer(X, box, lo);
      row.percent_l1 = l1_volumes(X, l1.f, box, opts.resolution).percent_error;
    } catch (const std::exception& e) {
      spdlog::warn("polytope instance {} failed: {}", k, e.what());
      row.status = std::string("error: ") + e.what();
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace starsos::study
