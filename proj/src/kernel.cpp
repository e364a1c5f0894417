#include "starsos/kernel.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "starsos/error.hpp"

namespace starsos {

namespace {

using Pt = std::vector<double>;

double dot(const Pt& a, const Pt& b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
  return s;
}

double norm(const Pt& a) { return std::sqrt(dot(a, a)); }

double cross(const Pt& o, const Pt& a, const Pt& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

void check_dim(const Polytope& K, const Pt& x) {
  if (x.size() != K.n) throw InputError("point dimension differs from polytope dimension");
}

// Andrew's monotone chain; collinear points dropped.
std::vector<Pt> convex_hull(std::vector<Pt> pts) {
  std::sort(pts.begin(), pts.end());
  std::vector<Pt> uniq;
  for (auto& p : pts) {
    if (uniq.empty() || std::hypot(p[0] - uniq.back()[0], p[1] - uniq.back()[1]) > 1e-9) uniq.push_back(p);
  }
  if (uniq.size() < 3) return uniq;
  std::vector<Pt> hull(2 * uniq.size());
  std::size_t k = 0;
  for (const auto& p : uniq) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 1e-14) --k;
    hull[k++] = p;
  }
  for (std::size_t i = uniq.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], uniq[i]) <= 1e-14) --k;
    hull[k++] = uniq[i];
  }
  hull.resize(k - 1);
  return hull;
}

double point_segment_distance(const Pt& p, const Pt& a, const Pt& b) {
  const double dx = b[0] - a[0];
  const double dy = b[1] - a[1];
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0.0 ? ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p[0] - a[0] - t * dx, p[1] - a[1] - t * dy);
}

// Distance from p to a convex polygon given counterclockwise.
double point_polygon_distance(const Pt& p, const std::vector<Pt>& poly) {
  if (poly.empty()) throw InputError("distance to an empty polygon");
  if (poly.size() == 1) return std::hypot(p[0] - poly[0][0], p[1] - poly[0][1]);
  bool inside = poly.size() >= 3;
  double best = INFINITY;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Pt& a = poly[i];
    const Pt& b = poly[(i + 1) % poly.size()];
    if (cross(a, b, p) < 0.0) inside = false;
    best = std::min(best, point_segment_distance(p, a, b));
  }
  return inside ? 0.0 : best;
}

conic::ConicProblem chebyshev_lp(const Polytope& K, double radius_cap, double box) {
  conic::ConicProblem lp;
  lp.num_scalars = K.n + 1;
  const std::size_t rho = K.n;
  for (const auto& h : K.halfspaces) {
    conic::LinearRow r;
    for (std::size_t j = 0; j < K.n; ++j) {
      if (h.a[j] != 0.0) r.scalars.emplace_back(j, h.a[j]);
    }
    r.scalars.emplace_back(rho, norm(h.a));
    r.rhs = h.b;
    lp.inequalities.push_back(std::move(r));
  }
  lp.inequalities.push_back({{{rho, 1.0}}, {}, radius_cap});
  for (std::size_t j = 0; j < K.n; ++j) {
    lp.inequalities.push_back({{{j, 1.0}}, {}, box});
    lp.inequalities.push_back({{{j, -1.0}}, {}, box});
  }
  lp.objective.scalars.emplace_back(rho, -1.0);
  return lp;
}

}  // namespace

Polytope Polytope::whole_space(std::size_t n) {
  Polytope K;
  K.n = n;
  K.has_halfspaces = true;
  return K;
}

Polytope Polytope::empty_set(std::size_t n) {
  Polytope K;
  K.n = n;
  K.has_vertices = true;
  K.empty = true;
  return K;
}

Polytope Polytope::from_halfspaces(std::size_t n, std::vector<Halfspace> hs) {
  for (const auto& h : hs) {
    if (h.a.size() != n) throw InputError("halfspace normal has wrong dimension");
  }
  Polytope K = whole_space(n);
  K.halfspaces = std::move(hs);
  return K;
}

Polytope Polytope::from_vertices(std::size_t n, std::vector<Pt> vs) {
  for (const auto& v : vs) {
    if (v.size() != n) throw InputError("vertex has wrong dimension");
  }
  Polytope K;
  K.n = n;
  K.has_vertices = true;
  K.empty = vs.empty();
  K.vertices = std::move(vs);
  return K;
}

void add_cutting_plane(Polytope& K, const BoundaryPoint& bp) {
  check_dim(K, bp.point);
  K.has_halfspaces = true;
  for (const auto& grad : bp.gradients) {
    const double len = norm(grad);
    if (!(len > 0.0)) throw InputError("cutting plane from a zero gradient");
    Halfspace h;
    h.a.resize(K.n);
    for (std::size_t j = 0; j < K.n; ++j) h.a[j] = grad[j] / len;
    h.b = dot(h.a, bp.point);
    K.halfspaces.push_back(std::move(h));
  }
}

conic::ConicProblem halfspace_system(const Polytope& K) {
  conic::ConicProblem lp;
  lp.num_scalars = K.n;
  for (const auto& h : K.halfspaces) {
    conic::LinearRow r;
    for (std::size_t j = 0; j < K.n; ++j) {
      if (h.a[j] != 0.0) r.scalars.emplace_back(j, h.a[j]);
    }
    r.rhs = h.b;
    lp.inequalities.push_back(std::move(r));
  }
  return lp;
}

EmptinessCheck check_emptiness(const Polytope& K, const conic::SolverOptions& opts) {
  if (!K.has_halfspaces) throw InputError("emptiness test needs a halfspace representation");
  EmptinessCheck out;
  if (K.halfspaces.empty()) return out;
  const auto lp = halfspace_system(K);
  const auto sol = conic::solve(lp, opts);
  switch (sol.status) {
    case conic::Status::Feasible:
    case conic::Status::Optimal:
      return out;
    case conic::Status::Infeasible: {
      if (!sol.farkas || !conic::check_farkas(lp, *sol.farkas, opts.infeas_tol).valid) {
        throw CertificateError("halfspace system reported infeasible without a valid Farkas certificate");
      }
      out.empty = true;
      out.farkas = sol.farkas;
      return out;
    }
    case conic::Status::Unknown:
      break;
  }
  throw SolverIndeterminate("emptiness LP undecided: " + sol.message);
}

bool is_empty(Polytope& K, const conic::SolverOptions& opts) {
  if (K.empty) return true;
  if (!K.has_halfspaces) return K.vertices.empty();
  auto chk = check_emptiness(K, opts);
  K.empty = chk.empty;
  K.farkas = std::move(chk.farkas);
  return K.empty;
}

Polytope outer_kernel(const SemialgebraicSet& X, const OuterKernelOptions& opts) {
  if (opts.n_samples < 0) throw InputError("sample count must be non-negative");
  if (opts.check_every < 1) throw InputError("check_every must be positive");
  const std::vector<double> origin(X.dim(), 0.0);
  if (!(X.max_value(origin) < 1.0)) throw InputError("the origin must be an interior point of the set");

  Polytope K = Polytope::whole_space(X.dim());
  BoundarySampler sampler(X, opts.seed, opts.boundary);
  int since_check = 0;
  auto check = [&] {
    since_check = 0;
    return is_empty(K, opts.solver);
  };
  for (const auto& p : opts.forced_points) {
    if (p.size() != X.dim()) throw InputError("forced point has wrong dimension");
    const auto bp = make_boundary_point(X, p, opts.boundary);
    if (!bp || bp->active.empty()) throw InputError("forced point is not a regular boundary point");
    add_cutting_plane(K, *bp);
  }
  for (const auto& d : opts.forced_directions) add_cutting_plane(K, sampler.sample_along(d));
  if (!K.halfspaces.empty() && check()) return K;
  for (int k = 0; k < opts.n_samples; ++k) {
    add_cutting_plane(K, sampler.sample());
    if (++since_check >= opts.check_every && check()) {
      spdlog::debug("outer kernel empty after {} samples", k + 1);
      return K;
    }
  }
  if (since_check > 0) check();
  return K;
}

SupportResult find_support(const SemialgebraicSet& X, const std::vector<double>& c, const SupportOptions& opts) {
  const std::size_t n = X.dim();
  const std::size_t m = X.size();
  if (c.size() != n) throw InputError("direction has wrong dimension");
  if (std::abs(norm(c) - 1.0) > 1e-9) throw InputError("direction must be a unit vector");
  if (opts.mult_degree < 0 || opts.mult_degree % 2 != 0) {
    throw InputError("multiplier degree must be even and non-negative");
  }

  const Polynomial one = Polynomial::constant(n, 1.0);
  sos::SosProgram prog(n);
  std::vector<sos::LinExpr> xk;
  for (std::size_t j = 0; j < n; ++j) xk.push_back(prog.scalar());

  // lam[i][j] is lambda_j^(i); the diagonal entry is a free polynomial.
  std::vector<std::vector<sos::AffinePoly>> lam(m);
  std::vector<std::vector<long>> lam_mult(m, std::vector<long>(m, -1));
  for (std::size_t i = 0; i < m; ++i) {
    const Polynomial& gi = X.constraint(i);
    const auto grad = gradient(gi);
    sos::AffinePoly expr(n);
    for (std::size_t j = 0; j < n; ++j) {
      expr += grad[j] * Polynomial::variable(n, j);
      sos::AffinePoly xj(n);
      xj.add(Monomial::one(n), xk[j]);
      expr -= xj * grad[j];
    }
    for (std::size_t j = 0; j < m; ++j) {
      sos::AffinePoly l(n);
      if (j == i) {
        l = prog.free_polynomial(opts.mult_degree);
      } else {
        l = prog.sos_polynomial(opts.mult_degree, "lambda_" + std::to_string(j + 1) + "^" + std::to_string(i + 1));
        lam_mult[i][j] = static_cast<long>(prog.multipliers().size() - 1);
      }
      expr -= l * (one - X.constraint(j));
      lam[i].push_back(std::move(l));
    }
    prog.constrain_sos(expr, "support_" + std::to_string(i + 1));
  }
  sos::LinExpr obj;
  for (std::size_t j = 0; j < n; ++j) {
    sos::LinExpr t = xk[j];
    t *= -c[j];
    obj += t;
  }
  // A tiny trace penalty keeps the Gram matrices from drifting to huge,
  // badly conditioned optima; the support value moves by O(trace_weight).
  if (opts.trace_weight > 0.0) {
    const auto& sizes = prog.problem().block_sizes;
    for (std::size_t b = 0; b < sizes.size(); ++b) {
      for (std::size_t k = 0; k < sizes[b]; ++k) obj.coefs[{static_cast<long>(b), k, k}] += opts.trace_weight;
    }
  }
  prog.set_objective(obj);

  const auto sol = prog.solve(opts.solver);
  SupportResult res;
  res.message = sol.message;
  // A feasible point with a stalled objective is still a certified kernel
  // point; its value is a weaker lower bound.
  res.status = sol.status == conic::Status::Optimal ? conic::Status::Feasible : sol.status;
  if (res.status != conic::Status::Feasible) return res;

  for (const auto& e : xk) res.point.push_back(e.value(sol));
  res.value = dot(c, res.point);
  auto& cert = res.certificate;
  for (std::size_t i = 0; i < m; ++i) {
    const auto grad = gradient(X.constraint(i));
    Polynomial target(n);
    for (std::size_t j = 0; j < n; ++j) {
      target += grad[j] * (Polynomial::variable(n, j) - Polynomial::constant(n, res.point[j]));
    }
    for (std::size_t j = 0; j < m; ++j) {
      const Polynomial lv = lam[i][j].value(sol);
      target -= lv * (one - X.constraint(j));
      if (lam_mult[i][j] >= 0) {
        const auto& mid = prog.multipliers()[static_cast<std::size_t>(lam_mult[i][j])];
        cert.polynomials[mid.label] = lv;
        cert.blocks.push_back({mid.label, lv, mid.gram.basis, sol.blocks.at(mid.gram.block)});
      } else {
        cert.polynomials["lambda_" + std::to_string(i + 1) + "^" + std::to_string(i + 1)] = lv;
      }
    }
    const auto& id = prog.identities()[i];
    cert.blocks.push_back({id.label, target, id.gram.basis, sol.blocks.at(id.gram.block)});
  }
  const auto chk = sos::verify_certificate(cert);
  if (!chk.valid) {
    throw CertificateError("support certificate fails verification (residual " + std::to_string(chk.residual) +
                           ", min eigenvalue " + std::to_string(chk.min_eig) + ")");
  }
  return res;
}

std::vector<std::vector<double>> default_directions(std::size_t n, int count, std::uint64_t seed) {
  if (count < 1) throw InputError("direction count must be positive");
  if (n < 1) throw InputError("dimension must be positive");
  std::vector<Pt> out;
  if (n == 1) {
    for (int k = 0; k < count; ++k) out.push_back({k % 2 == 0 ? 1.0 : -1.0});
  } else if (n == 2) {
    for (int k = 0; k < count; ++k) {
      const double th = 2.0 * std::numbers::pi * k / count;
      out.push_back({std::cos(th), std::sin(th)});
    }
  } else if (n == 3) {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < count; ++k) {
      const double z = 1.0 - 2.0 * (k + 0.5) / count;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      out.push_back({r * std::cos(golden * k), r * std::sin(golden * k), z});
    }
  } else {
    std::mt19937_64 rng(seed);
    for (int k = 0; k < count; ++k) out.push_back(random_unit_vector(rng, n));
  }
  return out;
}

InnerKernelReport inner_kernel(const SemialgebraicSet& X, const std::vector<std::vector<double>>& directions,
                               const SupportOptions& opts) {
  InnerKernelReport rep;
  std::vector<std::size_t> unknown;
  std::vector<Pt> pts;
  for (std::size_t k = 0; k < directions.size(); ++k) {
    auto r = find_support(X, directions[k], opts);
    if (r.status == conic::Status::Infeasible) {
      rep.infeasible_direction = k;
      rep.supports.push_back(std::move(r));
      rep.polytope = Polytope::empty_set(X.dim());
      return rep;
    }
    if (r.status == conic::Status::Unknown) unknown.push_back(k);
    if (r.status == conic::Status::Feasible) pts.push_back(r.point);
    rep.supports.push_back(std::move(r));
  }
  if (!unknown.empty()) {
    std::ostringstream os;
    os << "support solve undecided for direction(s)";
    for (auto k : unknown) {
      os << " #" << k << " (";
      for (std::size_t j = 0; j < directions[k].size(); ++j) os << (j ? ", " : "") << directions[k][j];
      os << ")";
    }
    throw SolverIndeterminate(os.str());
  }
  rep.polytope = Polytope::from_vertices(X.dim(), std::move(pts));
  if (X.dim() == 2 && !rep.polytope.empty) complete_2d(rep.polytope);
  return rep;
}

ChebyshevBall chebyshev_center(const Polytope& K, const conic::SolverOptions& opts) {
  if (K.empty) throw InputError("Chebyshev center of an empty polytope");
  Polytope H = K;
  if (!H.has_halfspaces) {
    if (K.n != 2) throw InputError("vertex-only polytopes are supported in 2D only");
    complete_2d(H);
    if (!H.has_halfspaces) throw InputError("degenerate vertex polytope has no interior");
  }
  if (H.halfspaces.empty()) throw InputError("Chebyshev center of an unbounded polytope");
  constexpr double cap = 1e6;
  const auto lp = chebyshev_lp(H, cap, cap);
  const auto sol = conic::solve(lp, opts);
  if (sol.status == conic::Status::Infeasible) throw InputError("Chebyshev center of an empty polytope");
  // A feasible (x, rho) is still an inscribed ball, only possibly not the largest.
  if (sol.status == conic::Status::Feasible) spdlog::debug("Chebyshev LP: {}", sol.message);
  if (sol.status == conic::Status::Unknown) throw SolverIndeterminate("Chebyshev LP undecided: " + sol.message);
  ChebyshevBall ball;
  ball.center.assign(sol.scalars.begin(), sol.scalars.begin() + static_cast<long>(K.n));
  ball.radius = sol.scalars[K.n];
  if (ball.radius < 0.0) throw InputError("Chebyshev center of an empty polytope");
  if (ball.radius > 0.5 * cap) throw InputError("Chebyshev center of an unbounded polytope");
  for (double v : ball.center) {
    if (std::abs(v) > 0.5 * cap) throw InputError("Chebyshev center of an unbounded polytope");
  }
  return ball;
}

Polytope kernel_intersection_inner(const Polytope& KA, const Polytope& KB) {
  if (KA.n != KB.n) throw InputError("polytope dimensions differ");
  if (KA.empty || KB.empty) return Polytope::empty_set(KA.n);
  Polytope A = KA;
  Polytope B = KB;
  if (!A.has_halfspaces && A.n == 2) complete_2d(A);
  if (!B.has_halfspaces && B.n == 2) complete_2d(B);
  if (!A.has_halfspaces || !B.has_halfspaces) throw InputError("intersection needs halfspace representations");
  Polytope out = Polytope::whole_space(KA.n);
  out.halfspaces = A.halfspaces;
  out.halfspaces.insert(out.halfspaces.end(), B.halfspaces.begin(), B.halfspaces.end());
  return out;
}

std::vector<std::vector<double>> vertices_2d(const Polytope& K) {
  if (K.n != 2) throw InputError("vertex enumeration is implemented for 2D only");
  if (K.empty) return {};
  if (!K.has_halfspaces) return convex_hull(K.vertices);
  // Clip a huge square by every halfspace; survivors on the square mean unbounded.
  constexpr double L = 1e7;
  std::vector<Pt> poly{{-L, -L}, {L, -L}, {L, L}, {-L, L}};
  for (const auto& h : K.halfspaces) {
    std::vector<Pt> next;
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Pt& p = poly[i];
      const Pt& q = poly[(i + 1) % poly.size()];
      const double fp = dot(h.a, p) - h.b;
      const double fq = dot(h.a, q) - h.b;
      if (fp <= 0.0) next.push_back(p);
      if ((fp < 0.0 && fq > 0.0) || (fp > 0.0 && fq < 0.0)) {
        const double t = fp / (fp - fq);
        next.push_back({p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])});
      }
    }
    poly = std::move(next);
    if (poly.empty()) return {};
  }
  for (const auto& p : poly) {
    if (std::max(std::abs(p[0]), std::abs(p[1])) > 0.5 * L) throw InputError("polytope is unbounded");
  }
  return convex_hull(poly);
}

void complete_2d(Polytope& K) {
  if (K.n != 2 || K.empty) return;
  if (K.has_halfspaces && !K.has_vertices) {
    try {
      K.vertices = vertices_2d(K);
      K.has_vertices = true;
      if (K.vertices.empty()) K.empty = true;
    } catch (const InputError&) {
      // Unbounded: halfspaces stay authoritative.
    }
  } else if (K.has_vertices && !K.has_halfspaces) {
    K.vertices = convex_hull(K.vertices);
    if (K.vertices.size() < 3) return;
    K.has_halfspaces = true;
    for (std::size_t i = 0; i < K.vertices.size(); ++i) {
      const Pt& p = K.vertices[i];
      const Pt& q = K.vertices[(i + 1) % K.vertices.size()];
      // Outward normal of a counterclockwise edge.
      Pt a{q[1] - p[1], p[0] - q[0]};
      const double len = norm(a);
      a[0] /= len;
      a[1] /= len;
      K.halfspaces.push_back({a, dot(a, p)});
    }
  }
}

double polygon_area(const std::vector<std::vector<double>>& ccw) {
  double a = 0.0;
  for (std::size_t i = 0; i < ccw.size(); ++i) {
    const Pt& p = ccw[i];
    const Pt& q = ccw[(i + 1) % ccw.size()];
    a += p[0] * q[1] - q[0] * p[1];
  }
  return 0.5 * std::abs(a);
}

double hausdorff_convex_2d(const std::vector<std::vector<double>>& A, const std::vector<std::vector<double>>& B) {
  const auto ha = convex_hull(A);
  const auto hb = convex_hull(B);
  double d = 0.0;
  // The distance to a convex set is convex, so vertices attain the maximum.
  for (const auto& p : ha) d = std::max(d, point_polygon_distance(p, hb));
  for (const auto& p : hb) d = std::max(d, point_polygon_distance(p, ha));
  return d;
}

double containment_violation(const std::vector<std::vector<double>>& vertices, const Polytope& L) {
  if (!L.has_halfspaces) throw InputError("containment test needs halfspaces");
  double worst = -INFINITY;
  for (const auto& v : vertices) {
    for (const auto& h : L.halfspaces) worst = std::max(worst, dot(h.a, v) - h.b);
  }
  return worst;
}

bool contains_point(const Polytope& K, const std::vector<double>& x, double tol) {
  check_dim(K, x);
  if (K.empty) return false;
  if (K.has_halfspaces) {
    for (const auto& h : K.halfspaces) {
      if (dot(h.a, x) - h.b > tol) return false;
    }
    return true;
  }
  if (K.n != 2) throw InputError("vertex-only containment is implemented for 2D only");
  return point_polygon_distance(x, convex_hull(K.vertices)) <= tol;
}

}  // namespace starsos
