#pragma once

// Semialgebraic sets X = { x : g_i(x) <= 1, i = 1..m } and the boundary
// oracle used to collect kernel cutting planes.

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "starsos/poly.hpp"

namespace starsos {

class SemialgebraicSet {
 public:
  SemialgebraicSet(std::size_t n, std::vector<Polynomial> constraints);

  std::size_t dim() const { return n_; }
  std::size_t size() const { return g_.size(); }
  const std::vector<Polynomial>& constraints() const { return g_; }
  const Polynomial& constraint(std::size_t i) const { return g_.at(i); }

  // max_i g_i(x); x is a member iff this is <= 1.
  double max_value(std::span<const double> x) const;

 private:
  std::size_t n_;
  std::vector<Polynomial> g_;
};

bool membership(const SemialgebraicSet& X, std::span<const double> x, double tol = 0.0);

// Replaces every g_i(x) by g_i(x / alpha): the set dilated by alpha > 0.
SemialgebraicSet scale_set(const SemialgebraicSet& X, double alpha);
// Replaces every g_i(x) by g_i(x + shift): the set moved by -shift, so that
// the point `shift` lands on the origin.
SemialgebraicSet recenter_set(const SemialgebraicSet& X, std::span<const double> shift);

struct BoundaryOptions {
  double active_tol = 1e-7;
  double grad_tol = 1e-8;
  int scan_grid = 512;
  double bisect_tol = 1e-10;
  double t_cap = 1073741824.0;  // 2^30
  int max_retries = 1000;
};

// Smallest power of two t >= 1 with t * dir outside X.
double exit_radius_bound(const SemialgebraicSet& X, std::span<const double> dir,
                         const BoundaryOptions& opts = {});

// Sorted parameters t in (0, t_max] where membership of t * dir flips, each
// refined by bisection. The first entry is the star-boundary radius along dir.
// t_max defaults to exit_radius_bound.
std::vector<double> ray_boundary_crossings(const SemialgebraicSet& X, std::span<const double> dir,
                                           const BoundaryOptions& opts = {},
                                           std::optional<double> t_max = std::nullopt);

struct BoundaryPoint {
  std::vector<double> point;
  std::vector<std::size_t> active;
  std::vector<std::vector<double>> gradients;  // one per active index
};

// Active set and gradients at a (near-)boundary point. Returns nullopt when an
// active gradient has norm <= grad_tol.
std::optional<BoundaryPoint> make_boundary_point(const SemialgebraicSet& X,
                                                 std::vector<double> point,
                                                 const BoundaryOptions& opts = {});

enum class CrossingChoice { Uniform, First, Last };

std::vector<double> random_unit_vector(std::mt19937_64& rng, std::size_t n);

// Seeded Sample(boundary) oracle: uniform ray direction, then a crossing
// along that ray chosen uniformly among all crossings.
class BoundarySampler {
 public:
  BoundarySampler(const SemialgebraicSet& X, std::uint64_t seed, BoundaryOptions opts = {});

  BoundaryPoint sample();
  // Deterministic variant along a given direction; `index` picks a crossing
  // explicitly and overrides `choice`.
  BoundaryPoint sample_along(std::span<const double> dir,
                             CrossingChoice choice = CrossingChoice::First,
                             std::optional<std::size_t> index = std::nullopt);

  std::size_t discarded() const { return discarded_; }

 private:
  SemialgebraicSet X_;
  BoundaryOptions opts_;
  std::mt19937_64 rng_;
  std::size_t discarded_ = 0;
};

namespace fixtures {

// g = (x1^2 + x2^2) / radius^2.
SemialgebraicSet disk(double radius = 1.0);
// { |x_j| <= half_width } as 2n linear constraints.
SemialgebraicSet box(std::size_t n, double half_width = 1.0);
// { a_k^T x <= b_k } with b_k > 0, written as g_k = a_k^T x / b_k.
SemialgebraicSet polytope(const std::vector<std::vector<double>>& normals,
                          const std::vector<double>& offsets);

// Constraints h >= 0 are rewritten as g = 1 - h.
SemialgebraicSet exampleA();  // 2x2 polynomial matrix inequality via principal minors
SemialgebraicSet exampleB();  // discrete-time stabilizability region
SemialgebraicSet exampleE(double c = 0.9, double r = 0.4);  // annulus sector, not star-convex

// Closed-form scaling lower bound for exampleE: |p2| / |p1|.
double exampleE_scaling_lower_bound(double c, double r);

}  // namespace fixtures

}  // namespace starsos
