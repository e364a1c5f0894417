#pragma once

// Inner/outer sublevel-set approximations F = {f <= 1} and sF of a
// semialgebraic set X with F inside X inside sF, found by bisection on s, plus
// the l1 outer baseline and a sampled lower bound on the best scaling.

#include <cstdint>
#include <optional>
#include <vector>

#include "starsos/conic.hpp"
#include "starsos/semialg.hpp"
#include "starsos/soscomp.hpp"

namespace starsos {

struct FindApproxOptions {
  int degree = 4;                        // 2d
  double eps = 1e-3;
  // Multiplier degrees default to `degree` for every constraint.
  std::optional<int> mult_degree;
  std::optional<int> lambda_degree;      // inner multipliers only; wins over mult_degree
  std::optional<int> mu_degree;          // outer multipliers only; wins over mult_degree
  std::vector<int> lambda_degrees;       // per constraint; wins over everything above
  std::vector<int> mu_degrees;
  conic::SolverOptions solver;
};

struct FindApproxResult {
  conic::Status status = conic::Status::Unknown;
  double s = 0.0;
  Polynomial f;
  std::vector<Polynomial> lambda;  // inner multipliers, one per constraint
  std::vector<Polynomial> mu;      // outer multipliers, one per constraint
  sos::Certificate certificate;
  std::string message;
};

// Feasibility of: f - (1+eps) - lambda_i (g_i - 1) SOS for every i,
// 1 - f(x/s) - sum_i mu_i (1 - g_i) SOS, lambda_i and mu_i SOS.
// A Feasible answer carries a verified certificate; a certificate that fails
// verification throws CertificateError.
FindApproxResult find_approx(const SemialgebraicSet& X, double s, const FindApproxOptions& opts = {});

enum class UnknownPolicy { TreatAsInfeasible, Fail };

struct ApproximateOptions {
  FindApproxOptions find;
  double s_tol = 1e-3;
  double s_cap = 1048576.0;  // 2^20
  UnknownPolicy unknown_policy = UnknownPolicy::TreatAsInfeasible;
};

struct BisectionStep {
  double s;
  conic::Status status;
};

struct ApproximationResult {
  Polynomial f;
  double s_star = 0.0;
  double eps = 0.0;
  double s_tol = 0.0;
  int degree = 0;
  std::vector<Polynomial> lambda;
  std::vector<Polynomial> mu;
  sos::Certificate certificate;
  std::vector<BisectionStep> trace;
};

ApproximationResult approximate(const SemialgebraicSet& X, const ApproximateOptions& opts = {});

// Max ratio t_reenter / t_exit over consecutive crossing pairs on seeded
// random rays; 1.0 when every sampled ray crosses the boundary once.
double scaling_lower_bound_estimate(const SemialgebraicSet& X, int n_rays, std::uint64_t seed,
                                    const BoundaryOptions& opts = {});

struct L1Options {
  int degree = 4;
  std::optional<int> mult_degree;
  conic::SolverOptions solver;
};

struct L1Result {
  Polynomial f;
  double objective = 0.0;  // integral of f over the box
  std::vector<Polynomial> lambda;
  sos::Certificate certificate;
};

// Minimizes the integral of f over `box` subject to f - 1 - sum_i lambda_i (1 - g_i)
// SOS, lambda_i SOS and f SOS. {f >= 1} intersected with the box then covers X.
L1Result find_l1_outer(const SemialgebraicSet& X, const std::vector<Interval>& box,
                       const L1Options& opts = {});

struct SandwichReport {
  int inner_checked = 0;   // points with f(x) <= 1 tested for membership in X
  int outer_checked = 0;   // points of X tested against f(x / s) <= 1
  int inner_violations = 0;
  int outer_violations = 0;
  double worst = 0.0;      // largest excess over the tolerance side
};

// Rejection-samples n_points points of {f <= 1} and of X inside the box
// [-half_width, half_width]^n and checks F inside X inside sF up to tol.
SandwichReport sandwich_check(const SemialgebraicSet& X, const Polynomial& f, double s, int n_points,
                              double half_width, std::uint64_t seed, double tol = 1e-6);

}  // namespace starsos
