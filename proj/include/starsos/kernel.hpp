#pragma once

// Polytopic outer and inner approximations of the kernel of a semialgebraic
// set: cutting planes from boundary samples (outer), SOS support points
// (inner), plus Chebyshev centers, 2D vertex enumeration and combinators.

#include <cstdint>
#include <optional>
#include <vector>

#include "starsos/conic.hpp"
#include "starsos/semialg.hpp"
#include "starsos/soscomp.hpp"

namespace starsos {

// a^T x <= b
struct Halfspace {
  std::vector<double> a;
  double b = 0.0;
};

struct Polytope {
  std::size_t n = 0;
  bool has_halfspaces = false;
  std::vector<Halfspace> halfspaces;
  bool has_vertices = false;
  std::vector<std::vector<double>> vertices;
  bool empty = false;
  // Set when emptiness was proven from the halfspaces.
  std::optional<conic::FarkasCertificate> farkas;

  static Polytope whole_space(std::size_t n);
  static Polytope empty_set(std::size_t n);
  static Polytope from_halfspaces(std::size_t n, std::vector<Halfspace> hs);
  static Polytope from_vertices(std::size_t n, std::vector<std::vector<double>> vs);
};

// One cut per active constraint: grad g_i(x_b)^T (x - x_b) <= 0, stored with a
// unit normal. Marks K as having a halfspace representation.
void add_cutting_plane(Polytope& K, const BoundaryPoint& bp);

struct EmptinessCheck {
  bool empty = false;
  std::optional<conic::FarkasCertificate> farkas;  // verified when empty
};

// LP feasibility of the halfspaces. Empty answers carry a Farkas certificate
// that passed check_farkas; an undecided LP throws SolverIndeterminate.
EmptinessCheck check_emptiness(const Polytope& K, const conic::SolverOptions& opts = {});
bool is_empty(Polytope& K, const conic::SolverOptions& opts = {});

// The Farkas combination of K's halfspaces as an LP system.
conic::ConicProblem halfspace_system(const Polytope& K);

struct OuterKernelOptions {
  int n_samples = 2000;
  std::uint64_t seed = 0;
  std::vector<std::vector<double>> forced_points;      // boundary points cut first
  std::vector<std::vector<double>> forced_directions;  // first crossing along each ray
  int check_every = 100;  // emptiness test cadence; the last sample is always checked
  BoundaryOptions boundary;
  conic::SolverOptions solver;
};

// Cutting-plane outer kernel. Returns as soon as the cuts become infeasible.
Polytope outer_kernel(const SemialgebraicSet& X, const OuterKernelOptions& opts = {});

struct SupportResult {
  conic::Status status = conic::Status::Unknown;
  std::vector<double> point;  // x_k
  double value = 0.0;         // c^T x_k
  sos::Certificate certificate;
  std::string message;
};

struct SupportOptions {
  int mult_degree = 6;  // degree of every lambda_j^(i)
  double trace_weight = 1e-6;  // objective weight on Gram traces
  conic::SolverOptions solver;
};

// Maximizes c^T x_k subject to -grad g_i(x)^T (x_k - x) - sum_j lambda_j^(i) (1 - g_j)
// SOS for every i, with lambda_j^(i) SOS for j != i and lambda_i^(i) free.
SupportResult find_support(const SemialgebraicSet& X, const std::vector<double>& c,
                           const SupportOptions& opts = {});

// Uniform angles in 2D, Fibonacci sphere in 3D, seeded Gaussian directions beyond.
std::vector<std::vector<double>> default_directions(std::size_t n, int count, std::uint64_t seed = 0);

struct InnerKernelReport {
  Polytope polytope;
  std::vector<SupportResult> supports;
  std::optional<std::size_t> infeasible_direction;
};

// Support-point inner kernel. Unknown statuses throw SolverIndeterminate naming the directions.
InnerKernelReport inner_kernel(const SemialgebraicSet& X, const std::vector<std::vector<double>>& directions,
                               const SupportOptions& opts = {});

struct ChebyshevBall {
  std::vector<double> center;
  double radius = 0.0;
};

// Largest inscribed ball. Throws InputError for empty or unbounded polytopes.
ChebyshevBall chebyshev_center(const Polytope& K, const conic::SolverOptions& opts = {});

// Halfspace concatenation: inner approximation of ker(A and B) and of ker(A or B).
Polytope kernel_intersection_inner(const Polytope& KA, const Polytope& KB);

// Counterclockwise convex vertices of a bounded 2D polytope; halfspaces win
// over stored vertices. Throws InputError when unbounded or not 2D.
std::vector<std::vector<double>> vertices_2d(const Polytope& K);

// 2D: fills the missing representation (hull edges or vertices).
void complete_2d(Polytope& K);

double polygon_area(const std::vector<std::vector<double>>& ccw);
// Hausdorff distance of two convex polygons given by vertices.
double hausdorff_convex_2d(const std::vector<std::vector<double>>& A, const std::vector<std::vector<double>>& B);
// max over K's vertices of the worst halfspace violation of L (<= 0 means K inside L).
double containment_violation(const std::vector<std::vector<double>>& vertices, const Polytope& L);
bool contains_point(const Polytope& K, const std::vector<double>& x, double tol = 0.0);

}  // namespace starsos
