#include "starsos/approx.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "starsos/error.hpp"

namespace starsos {

namespace {

// f(x / s) for an affine polynomial.
sos::AffinePoly scale_affine(const sos::AffinePoly& f, double s) {
  sos::AffinePoly out(f.dim());
  for (const auto& [m, e] : f.terms()) {
    sos::LinExpr le = e;
    le *= 1.0 / std::pow(s, m.degree());
    out.add(m, le);
  }
  return out;
}

Polynomial gram_value(const sos::SosIdentity& id, const conic::ConicSolution& sol) {
  return sos::gram_polynomial(id.gram.basis, sol.blocks.at(id.gram.block));
}

sos::CertificateBlock block_for(const std::string& label, const Polynomial& target, const sos::SosIdentity& id,
                                const conic::ConicSolution& sol) {
  return {label, target, id.gram.basis, sol.blocks.at(id.gram.block)};
}

int multiplier_degree(const std::optional<int>& override_deg, int degree) {
  const int d = override_deg.value_or(degree);
  if (d < 0 || d % 2 != 0) throw InputError("multiplier degree must be even and non-negative");
  return d;
}

void check_degree(int degree) {
  if (degree < 0 || degree % 2 != 0) throw InputError("approximation degree must be even and non-negative");
}

}  // namespace

FindApproxResult find_approx(const SemialgebraicSet& X, double s, const FindApproxOptions& opts) {
  if (!(s > 0.0)) throw InputError("scaling s must be positive");
  if (!(opts.eps > 0.0)) throw InputError("eps must be positive");
  check_degree(opts.degree);
  if (opts.degree < 2) throw InputError("approximation degree must be at least 2");

  const std::size_t n = X.dim();
  const std::size_t m = X.size();
  const Polynomial one = Polynomial::constant(n, 1.0);
  sos::SosProgram prog(n);
  const sos::AffinePoly f = prog.free_polynomial(opts.degree);

  std::vector<std::size_t> lam_id, mu_id, inner_id;
  for (std::size_t i = 0; i < m; ++i) {
    const Polynomial& g = X.constraint(i);
    const int dl = i < opts.lambda_degrees.size()
                       ? multiplier_degree(opts.lambda_degrees[i], opts.degree)
                       : multiplier_degree(opts.lambda_degree ? opts.lambda_degree : opts.mult_degree, opts.degree);
    const sos::AffinePoly lam = prog.sos_polynomial(dl, "lambda_" + std::to_string(i + 1));
    lam_id.push_back(prog.multipliers().size() - 1);
    sos::AffinePoly expr = f - sos::AffinePoly(Polynomial::constant(n, 1.0 + opts.eps));
    expr -= lam * (g - one);
    prog.constrain_sos(expr, "inner_" + std::to_string(i + 1));
    inner_id.push_back(prog.identities().size() - 1);
  }
  sos::AffinePoly outer = sos::AffinePoly(one) - scale_affine(f, s);
  for (std::size_t i = 0; i < m; ++i) {
    const Polynomial& g = X.constraint(i);
    const int dm = i < opts.mu_degrees.size()
                       ? multiplier_degree(opts.mu_degrees[i], opts.degree)
                       : multiplier_degree(opts.mu_degree ? opts.mu_degree : opts.mult_degree, opts.degree);
    const sos::AffinePoly mu = prog.sos_polynomial(dm, "mu_" + std::to_string(i + 1));
    mu_id.push_back(prog.multipliers().size() - 1);
    outer -= mu * (one - g);
  }
  prog.constrain_sos(outer, "outer");
  const std::size_t outer_id = prog.identities().size() - 1;

  const conic::ConicSolution sol = prog.solve(opts.solver);
  FindApproxResult res;
  res.s = s;
  res.status = sol.status == conic::Status::Optimal ? conic::Status::Feasible : sol.status;
  res.message = sol.message;
  if (res.status != conic::Status::Feasible) return res;

  // Rebuild every identity from the recovered polynomials, independently of
  // the compiled rows.
  res.f = f.value(sol);
  auto& cert = res.certificate;
  cert.polynomials["f"] = res.f;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& lid = prog.multipliers()[lam_id[i]];
    const auto& mid = prog.multipliers()[mu_id[i]];
    res.lambda.push_back(gram_value(lid, sol));
    res.mu.push_back(gram_value(mid, sol));
    cert.polynomials[lid.label] = res.lambda.back();
    cert.polynomials[mid.label] = res.mu.back();
    cert.blocks.push_back(block_for(lid.label, res.lambda.back(), lid, sol));
    cert.blocks.push_back(block_for(mid.label, res.mu.back(), mid, sol));
  }
  for (std::size_t i = 0; i < m; ++i) {
    const Polynomial& g = X.constraint(i);
    const Polynomial target = res.f - Polynomial::constant(n, 1.0 + opts.eps) - res.lambda[i] * (g - one);
    const auto& id = prog.identities()[inner_id[i]];
    cert.blocks.push_back(block_for(id.label, target, id, sol));
  }
  Polynomial target = one - substitute_scale(res.f, s);
  for (std::size_t i = 0; i < m; ++i) target -= res.mu[i] * (one - X.constraint(i));
  const auto& oid = prog.identities()[outer_id];
  cert.blocks.push_back(block_for(oid.label, target, oid, sol));

  const auto chk = sos::verify_certificate(cert);
  if (!chk.valid) {
    throw CertificateError("solver reported feasibility but the certificate fails verification (residual " +
                           std::to_string(chk.residual) + ", min eigenvalue " + std::to_string(chk.min_eig) + ")");
  }
  return res;
}

ApproximationResult approximate(const SemialgebraicSet& X, const ApproximateOptions& opts) {
  if (!(opts.s_tol > 0.0)) throw InputError("s_tol must be positive");
  const std::vector<double> origin(X.dim(), 0.0);
  if (!(X.max_value(origin) < 1.0)) throw InputError("the origin must be an interior point of the set");

  ApproximationResult out;
  out.eps = opts.find.eps;
  out.s_tol = opts.s_tol;
  out.degree = opts.find.degree;
  int unknown = 0;
  auto feasible = [&](double s) {
    const auto r = find_approx(X, s, opts.find);
    out.trace.push_back({s, r.status});
    spdlog::debug("bisection s = {:.9f}: {}", s, conic::to_string(r.status));
    if (r.status == conic::Status::Unknown) {
      ++unknown;
      if (opts.unknown_policy == UnknownPolicy::Fail) {
        throw SolverIndeterminate("solver returned Unknown at s = " + std::to_string(s) + ": " + r.message);
      }
    }
    return r.status == conic::Status::Feasible;
  };

  double s_ub = 1.0 + opts.s_tol;
  double s_lb = 1.0;
  while (!feasible(s_ub)) {
    s_lb = s_ub;
    s_ub *= 2.0;
    if (s_ub > opts.s_cap) {
      if (unknown == static_cast<int>(out.trace.size())) throw SolverIndeterminate("every solve returned Unknown");
      throw InputError("no outer scaling found below s_cap; raise the approximation degree");
    }
  }
  while (s_ub - s_lb > opts.s_tol) {
    const double s_try = 0.5 * (s_ub + s_lb);
    if (feasible(s_try)) {
      s_ub = s_try;
    } else {
      s_lb = s_try;
    }
  }
  const auto final_res = find_approx(X, s_ub, opts.find);
  out.trace.push_back({s_ub, final_res.status});
  if (final_res.status != conic::Status::Feasible) {
    throw SolverIndeterminate("final solve at s = " + std::to_string(s_ub) + " was not feasible: " +
                              final_res.message);
  }
  out.f = final_res.f;
  out.s_star = s_ub;
  out.lambda = final_res.lambda;
  out.mu = final_res.mu;
  out.certificate = final_res.certificate;
  return out;
}

double scaling_lower_bound_estimate(const SemialgebraicSet& X, int n_rays, std::uint64_t seed,
                                    const BoundaryOptions& opts) {
  if (n_rays < 1) throw InputError("need at least one ray");
  std::mt19937_64 rng(seed);
  double best = 1.0;
  for (int k = 0; k < n_rays; ++k) {
    const auto dir = random_unit_vector(rng, X.dim());
    const auto ts = ray_boundary_crossings(X, dir, opts);
    for (std::size_t j = 0; j + 1 < ts.size(); j += 2) best = std::max(best, ts[j + 1] / ts[j]);
  }
  return best;
}

L1Result find_l1_outer(const SemialgebraicSet& X, const std::vector<Interval>& box, const L1Options& opts) {
  check_degree(opts.degree);
  const std::size_t n = X.dim();
  if (box.size() != n) throw InputError("box has wrong dimension");
  for (const auto& iv : box) {
    if (!(iv.lo < iv.hi)) throw InputError("degenerate box");
  }
  const Polynomial one = Polynomial::constant(n, 1.0);
  sos::SosProgram prog(n);
  const sos::AffinePoly f = prog.sos_polynomial(opts.degree, "f");
  sos::AffinePoly expr = f - sos::AffinePoly(one);
  std::vector<std::size_t> lam_id;
  for (std::size_t i = 0; i < X.size(); ++i) {
    const Polynomial& g = X.constraint(i);
    const int dl = multiplier_degree(opts.mult_degree, opts.degree);
    const auto lam = prog.sos_polynomial(dl, "lambda_" + std::to_string(i + 1));
    lam_id.push_back(prog.multipliers().size() - 1);
    expr -= lam * (one - g);
  }
  prog.constrain_sos(expr, "outer");
  sos::LinExpr objective;
  for (const auto& [mono, e] : f.terms()) {
    Polynomial pm(n);
    pm.add_term(mono, 1.0);
    sos::LinExpr le = e;
    le *= integrate_over_box(pm, box);
    objective += le;
  }
  prog.set_objective(objective);
  const auto sol = prog.solve(opts.solver);
  // A feasible but not optimal f still certifies an outer set.
  if (sol.status != conic::Status::Optimal && sol.status != conic::Status::Feasible) {
    throw SolverIndeterminate("l1 outer approximation solve ended with status " + conic::to_string(sol.status) +
                              ": " + sol.message);
  }
  L1Result res;
  const auto& fid = prog.multipliers().front();
  res.f = gram_value(fid, sol);
  res.objective = integrate_over_box(res.f, box);
  auto& cert = res.certificate;
  cert.polynomials["f"] = res.f;
  cert.blocks.push_back(block_for("f", res.f, fid, sol));
  Polynomial target = res.f - one;
  for (std::size_t i = 0; i < X.size(); ++i) {
    const auto& lid = prog.multipliers()[lam_id[i]];
    res.lambda.push_back(gram_value(lid, sol));
    cert.polynomials[lid.label] = res.lambda.back();
    cert.blocks.push_back(block_for(lid.label, res.lambda.back(), lid, sol));
    target -= res.lambda.back() * (one - X.constraint(i));
  }
  const auto& oid = prog.identities().front();
  cert.blocks.push_back(block_for(oid.label, target, oid, sol));
  const auto chk = sos::verify_certificate(cert);
  if (!chk.valid) {
    throw CertificateError("l1 outer certificate fails verification (residual " + std::to_string(chk.residual) +
                           ", min eigenvalue " + std::to_string(chk.min_eig) + ")");
  }
  return res;
}

SandwichReport sandwich_check(const SemialgebraicSet& X, const Polynomial& f, double s, int n_points,
                              double half_width, std::uint64_t seed, double tol) {
  if (!(s > 0.0) || !(half_width > 0.0)) throw InputError("scaling and box must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-half_width, half_width);
  SandwichReport rep;
  std::vector<double> x(X.dim());
  std::vector<double> xs(X.dim());
  const long max_draws = 2000L * n_points;
  long draws = 0;
  while ((rep.inner_checked < n_points || rep.outer_checked < n_points) && draws < max_draws) {
    ++draws;
    for (auto& v : x) v = u(rng);
    if (rep.inner_checked < n_points && eval(f, x) <= 1.0) {
      ++rep.inner_checked;
      const double excess = X.max_value(x) - 1.0;
      rep.worst = std::max(rep.worst, excess);
      if (excess > tol) ++rep.inner_violations;
    }
    if (rep.outer_checked < n_points && X.max_value(x) <= 1.0) {
      ++rep.outer_checked;
      for (std::size_t j = 0; j < x.size(); ++j) xs[j] = x[j] / s;
      const double excess = eval(f, xs) - 1.0;
      rep.worst = std::max(rep.worst, excess);
      if (excess > tol) ++rep.outer_violations;
    }
  }
  return rep;
}

}  // namespace starsos
