#include "starsos/semialg.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "starsos/error.hpp"

namespace starsos {

SemialgebraicSet::SemialgebraicSet(std::size_t n, std::vector<Polynomial> constraints)
    : n_(n), g_(std::move(constraints)) {
  if (n_ < 1) throw InputError("set dimension must be at least 1");
  if (g_.empty()) throw InputError("a semialgebraic set needs at least one constraint");
  for (const auto& g : g_) {
    if (g.dim() != n_) throw InputError("constraint dimension differs from set dimension");
  }
}

double SemialgebraicSet::max_value(std::span<const double> x) const {
  double v = -INFINITY;
  for (const auto& g : g_) v = std::max(v, eval(g, x));
  return v;
}

bool membership(const SemialgebraicSet& X, std::span<const double> x, double tol) {
  if (x.size() != X.dim()) throw InputError("point has wrong dimension");
  return X.max_value(x) <= 1.0 + tol;
}

SemialgebraicSet scale_set(const SemialgebraicSet& X, double alpha) {
  if (!(alpha > 0.0)) throw InputError("set scaling must be positive");
  std::vector<Polynomial> g;
  for (const auto& gi : X.constraints()) g.push_back(substitute_scale(gi, alpha));
  return SemialgebraicSet(X.dim(), std::move(g));
}

SemialgebraicSet recenter_set(const SemialgebraicSet& X, std::span<const double> shift) {
  std::vector<double> neg(shift.begin(), shift.end());
  for (auto& v : neg) v = -v;
  std::vector<Polynomial> g;
  for (const auto& gi : X.constraints()) g.push_back(translate(gi, neg));
  return SemialgebraicSet(X.dim(), std::move(g));
}

namespace {

// Univariate restrictions t -> g_i(t * dir) - 1.
struct RayProfile {
  std::vector<std::vector<double>> coeffs;

  RayProfile(const SemialgebraicSet& X, std::span<const double> dir) {
    std::vector<double> origin(X.dim(), 0.0);
    for (const auto& g : X.constraints()) {
      auto c = restrict_to_line(g, origin, dir);
      c[0] -= 1.0;
      coeffs.push_back(std::move(c));
    }
  }

  double operator()(double t) const {
    double v = -INFINITY;
    for (const auto& c : coeffs) v = std::max(v, eval_univariate(c, t));
    return v;
  }
};

void check_direction(const SemialgebraicSet& X, std::span<const double> dir) {
  if (dir.size() != X.dim()) throw InputError("direction has wrong dimension");
  double nrm = 0.0;
  for (double d : dir) nrm += d * d;
  if (!(nrm > 0.0)) throw InputError("direction must be nonzero");
}

void check_origin_interior(const RayProfile& h) {
  if (!(h(0.0) < 0.0)) throw InputError("origin is not an interior point of the set");
}

double exit_bound(const RayProfile& h, const BoundaryOptions& opts) {
  double t = 1.0;
  while (!(h(t) > 0.0)) {
    t *= 2.0;
    if (t > opts.t_cap) {
      throw InputError("no boundary crossing found along ray (set unbounded in this direction?)");
    }
  }
  return t;
}

}  // namespace

double exit_radius_bound(const SemialgebraicSet& X, std::span<const double> dir,
                         const BoundaryOptions& opts) {
  check_direction(X, dir);
  RayProfile h(X, dir);
  check_origin_interior(h);
  return exit_bound(h, opts);
}

std::vector<double> ray_boundary_crossings(const SemialgebraicSet& X, std::span<const double> dir,
                                           const BoundaryOptions& opts,
                                           std::optional<double> t_max) {
  check_direction(X, dir);
  RayProfile h(X, dir);
  check_origin_interior(h);
  const double tm = t_max ? *t_max : exit_bound(h, opts);
  if (!(h(tm) > 0.0)) throw InputError("t_max * dir must lie outside the set");

  std::vector<double> out;
  const int grid = std::max(opts.scan_grid, 1);
  double prev_t = 0.0;
  bool prev_in = true;
  for (int k = 1; k <= grid; ++k) {
    const double t = tm * static_cast<double>(k) / grid;
    const bool in = h(t) <= 0.0;
    if (in != prev_in) {
      double lo = prev_t;
      double hi = t;
      while (hi - lo > opts.bisect_tol) {
        const double mid = 0.5 * (lo + hi);
        if ((h(mid) <= 0.0) == prev_in) {
          lo = mid;
        } else {
          hi = mid;
        }
        if (mid == lo && mid == hi) break;
      }
      out.push_back(0.5 * (lo + hi));
    }
    prev_t = t;
    prev_in = in;
  }
  if (out.empty()) throw InputError("no boundary crossing found along ray");
  return out;
}

std::optional<BoundaryPoint> make_boundary_point(const SemialgebraicSet& X,
                                                 std::vector<double> point,
                                                 const BoundaryOptions& opts) {
  if (point.size() != X.dim()) throw InputError("point has wrong dimension");
  BoundaryPoint b;
  std::size_t argmax = 0;
  double best = -INFINITY;
  for (std::size_t i = 0; i < X.size(); ++i) {
    const double v = eval(X.constraint(i), point);
    if (std::abs(v - 1.0) <= opts.active_tol) b.active.push_back(i);
    if (v > best) {
      best = v;
      argmax = i;
    }
  }
  if (b.active.empty()) b.active.push_back(argmax);
  for (std::size_t i : b.active) {
    std::vector<double> grad;
    double nrm = 0.0;
    for (const auto& d : gradient(X.constraint(i))) {
      grad.push_back(eval(d, point));
      nrm += grad.back() * grad.back();
    }
    if (std::sqrt(nrm) <= opts.grad_tol) return std::nullopt;
    b.gradients.push_back(std::move(grad));
  }
  b.point = std::move(point);
  return b;
}

std::vector<double> random_unit_vector(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> v(n);
  double nrm = 0.0;
  do {
    nrm = 0.0;
    for (auto& x : v) {
      x = normal(rng);
      nrm += x * x;
    }
  } while (nrm == 0.0);
  nrm = std::sqrt(nrm);
  for (auto& x : v) x /= nrm;
  return v;
}

BoundarySampler::BoundarySampler(const SemialgebraicSet& X, std::uint64_t seed, BoundaryOptions opts)
    : X_(X), opts_(opts), rng_(seed) {}

BoundaryPoint BoundarySampler::sample() {
  for (int attempt = 0; attempt <= opts_.max_retries; ++attempt) {
    const auto dir = random_unit_vector(rng_, X_.dim());
    const auto ts = ray_boundary_crossings(X_, dir, opts_);
    std::uniform_int_distribution<std::size_t> pick(0, ts.size() - 1);
    const double t = ts[pick(rng_)];
    std::vector<double> p(dir.size());
    for (std::size_t j = 0; j < p.size(); ++j) p[j] = t * dir[j];
    if (auto b = make_boundary_point(X_, std::move(p), opts_)) return std::move(*b);
    ++discarded_;
    spdlog::warn("discarding boundary sample with vanishing constraint gradient");
  }
  throw InputError("too many boundary samples with vanishing gradients");
}

BoundaryPoint BoundarySampler::sample_along(std::span<const double> dir, CrossingChoice choice,
                                            std::optional<std::size_t> index) {
  std::vector<double> d(dir.begin(), dir.end());
  double nrm = 0.0;
  for (double v : d) nrm += v * v;
  nrm = std::sqrt(nrm);
  if (!(nrm > 0.0)) throw InputError("direction must be nonzero");
  for (auto& v : d) v /= nrm;
  const auto ts = ray_boundary_crossings(X_, d, opts_);
  std::size_t k = 0;
  if (index) {
    if (*index >= ts.size()) throw InputError("crossing index out of range");
    k = *index;
  } else if (choice == CrossingChoice::Last) {
    k = ts.size() - 1;
  } else if (choice == CrossingChoice::Uniform) {
    std::uniform_int_distribution<std::size_t> pick(0, ts.size() - 1);
    k = pick(rng_);
  }
  std::vector<double> p(d.size());
  for (std::size_t j = 0; j < p.size(); ++j) p[j] = ts[k] * d[j];
  auto b = make_boundary_point(X_, std::move(p), opts_);
  if (!b) throw InputError("boundary point has a vanishing constraint gradient");
  return std::move(*b);
}

namespace fixtures {

namespace {

Polynomial P2(const std::vector<std::pair<std::vector<int>, double>>& terms) {
  return Polynomial::from_terms(2, terms);
}

}  // namespace

SemialgebraicSet disk(double radius) {
  if (!(radius > 0.0)) throw InputError("disk radius must be positive");
  const double k = 1.0 / (radius * radius);
  return SemialgebraicSet(2, {P2({{{2, 0}, k}, {{0, 2}, k}})});
}

SemialgebraicSet box(std::size_t n, double half_width) {
  if (!(half_width > 0.0)) throw InputError("box half width must be positive");
  std::vector<Polynomial> g;
  for (std::size_t j = 0; j < n; ++j) {
    g.push_back(Polynomial::variable(n, j) * (1.0 / half_width));
    g.push_back(Polynomial::variable(n, j) * (-1.0 / half_width));
  }
  return SemialgebraicSet(n, std::move(g));
}

SemialgebraicSet polytope(const std::vector<std::vector<double>>& normals,
                          const std::vector<double>& offsets) {
  if (normals.empty() || normals.size() != offsets.size()) {
    throw InputError("polytope needs matching normals and offsets");
  }
  const std::size_t n = normals.front().size();
  std::vector<Polynomial> g;
  for (std::size_t k = 0; k < normals.size(); ++k) {
    if (normals[k].size() != n) throw InputError("polytope normals differ in dimension");
    if (!(offsets[k] > 0.0)) throw InputError("origin must be interior (offsets > 0)");
    Polynomial p(n);
    for (std::size_t j = 0; j < n; ++j) p.add_term(Monomial::variable(n, j), normals[k][j] / offsets[k]);
    g.push_back(std::move(p));
  }
  return SemialgebraicSet(n, std::move(g));
}

SemialgebraicSet exampleA() {
  // [[1 - 16 x1 x2, x1], [x1, 1 - x1^2 - x2^2]] >= 0 via its principal minors. The
  // 1 - 16 x1 x2 >= 0 minor is implied by the other two on the set, but support
  // certificates need it to rule out the det = 0 branches outside the disk.
  const Polynomial one = Polynomial::constant(2, 1.0);
  const Polynomial a = P2({{{0, 0}, 1.0}, {{1, 1}, -16.0}});
  const Polynomial c = P2({{{0, 0}, 1.0}, {{2, 0}, -1.0}, {{0, 2}, -1.0}});
  const Polynomial b = P2({{{1, 0}, 1.0}});
  const Polynomial det = a * c - b * b;
  return SemialgebraicSet(2, {one - a, one - c, one - det});
}

SemialgebraicSet exampleB() {
  const Polynomial one = Polynomial::constant(2, 1.0);
  const Polynomial h1 = P2({{{0, 0}, 1.0}, {{0, 1}, 2.0}});
  const Polynomial h2 = P2({{{0, 0}, 2.0}, {{1, 0}, -4.0}, {{0, 1}, -3.0}});
  const Polynomial h3 =
      P2({{{0, 0}, 10.0}, {{1, 0}, -28.0}, {{0, 1}, -5.0}, {{1, 1}, -24.0}, {{0, 2}, -18.0}});
  const Polynomial h4 = P2({{{0, 0}, 1.0},
                            {{0, 1}, -1.0},
                            {{2, 0}, -8.0},
                            {{1, 1}, -2.0},
                            {{0, 2}, -1.0},
                            {{2, 1}, -8.0},
                            {{1, 2}, -6.0}});
  return SemialgebraicSet(2, {one - h1, one - h2, one - h3, one - h4});
}

SemialgebraicSet exampleE(double c, double r) {
  if (!(0.0 < r && r < c && c < 1.0)) throw InputError("exampleE needs 0 < r < c < 1");
  const Polynomial one = Polynomial::constant(2, 1.0);
  // (x1 - c)^2 + x2^2 - r^2 >= 0, 1 - x1^2 - x2^2 >= 0, c - x1 >= 0.
  const Polynomial h1 = P2({{{2, 0}, 1.0}, {{1, 0}, -2.0 * c}, {{0, 2}, 1.0}, {{0, 0}, c * c - r * r}});
  const Polynomial h2 = P2({{{0, 0}, 1.0}, {{2, 0}, -1.0}, {{0, 2}, -1.0}});
  const Polynomial h3 = P2({{{0, 0}, c}, {{1, 0}, -1.0}});
  return SemialgebraicSet(2, {one - h1, one - h2, one - h3});
}

double exampleE_scaling_lower_bound(double c, double r) {
  const double phi = std::numbers::pi / 2.0 + 2.0 * std::atan(r / c);
  const double p1x = c + r * std::cos(phi);
  const double p1y = r * std::sin(phi);
  return std::hypot(c, r) / std::hypot(p1x, p1y);
}

}  // namespace fixtures

}  // namespace starsos
