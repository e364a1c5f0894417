// End-to-end acceptance run: one PASS/FAIL line per criterion.
// Usage: acceptance [--only N]... [--allow-red N]...
// The exit status is the number of failed criteria not listed with --allow-red.

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>

#include "starsos/approx.hpp"
#include "starsos/kernel.hpp"
#include "starsos/metrics.hpp"
#include "starsos/study.hpp"

using namespace starsos;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v, int digits = 6) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

// Everything certified during the run, re-checked by criterion 5.
std::vector<std::pair<std::string, sos::Certificate>> g_certs;

void keep(const std::string& tag, const sos::Certificate& c) { g_certs.emplace_back(tag, c); }

bool trace_consistent(const ApproximationResult& r) {
  for (const auto& st : r.trace) {
    const bool feas = st.status == conic::Status::Feasible;
    if (feas && st.s < r.s_star - 1e-12) return false;
    if (!feas && st.s >= r.s_star) return false;
  }
  return true;
}

ApproximationResult run_approx(const std::string& tag, const SemialgebraicSet& X, int degree) {
  ApproximateOptions o;
  o.find.degree = degree;
  auto r = approximate(X, o);
  keep(tag, r.certificate);
  return r;
}

// Kept alive for the trace and sandwich checks.
std::map<std::string, std::pair<SemialgebraicSet, ApproximationResult>> g_approx;

const ApproximationResult& approx_cached(const std::string& tag, const SemialgebraicSet& X, int degree) {
  auto it = g_approx.find(tag);
  if (it == g_approx.end()) it = g_approx.emplace(tag, std::make_pair(X, run_approx(tag, X, degree))).first;
  return it->second.second;
}

const std::vector<std::vector<double>> kReferenceA{{-0.1752, 0.3335}, {0.1268, 0.2213}, {0.1752, -0.3335}, {-0.1268, -0.2213}};

Outcome c1() {
  const double c = 0.9;
  const double radii[] = {0.1, 0.2, 0.3, 0.4};
  const double s_ref[] = {1.096, 1.104, 1.250, 1.492};
  const double tol[] = {0.03, 0.02, 0.02, 0.02};
  const double lb_ref[] = {1.025, 1.104, 1.250, 1.492};
  Outcome o{true, ""};
  for (int k = 0; k < 4; ++k) {
    const auto& r = approx_cached("E r=" + num(radii[k]), fixtures::exampleE(c, radii[k]), 4);
    const double lb = fixtures::exampleE_scaling_lower_bound(c, radii[k]);
    // Reference values carry three decimals.
    const bool lb_ok = std::abs(std::round(lb * 1000.0) / 1000.0 - lb_ref[k]) < 1e-9;
    const bool s_ok = std::abs(r.s_star - s_ref[k]) <= tol[k];
    o.pass = o.pass && lb_ok && s_ok;
    o.detail += "r=" + num(radii[k]) + " s*=" + num(r.s_star, 5) + (s_ok ? "" : "(off)") + " s_lb=" + num(lb, 7) +
                (lb_ok ? "" : "(off)") + "; ";
  }
  return o;
}

Outcome c2() {
  const double exact = fixtures::exampleE_scaling_lower_bound(0.9, 0.4);
  const double est = scaling_lower_bound_estimate(fixtures::exampleE(0.9, 0.4), 10000, 1);
  const double disk = scaling_lower_bound_estimate(fixtures::disk(), 10000, 1);
  const double b = scaling_lower_bound_estimate(fixtures::exampleB(), 10000, 1);
  const bool pass = std::abs(est - exact) <= 0.01 && disk == 1.0 && b == 1.0;
  return {pass, "E estimate " + num(est, 7) + " vs " + num(exact, 7) + ", disk " + num(disk) + ", B " + num(b)};
}

Outcome c3() {
  const auto X = fixtures::exampleA();
  const auto ref_poly = vertices_2d(Polytope::from_vertices(2, kReferenceA));
  OuterKernelOptions oo;
  oo.n_samples = 2000;
  oo.seed = 7;
  Polytope Ko = outer_kernel(X, oo);
  if (Ko.empty) return {false, "outer kernel came out empty"};
  const double h_out = hausdorff_convex_2d(vertices_2d(Ko), ref_poly);
  const auto t0 = std::chrono::steady_clock::now();
  const SupportOptions so;
  const auto rep = inner_kernel(X, default_directions(2, 64), so);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (rep.polytope.empty) return {false, "inner kernel came out empty"};
  for (const auto& s : rep.supports) keep("support A", s.certificate);
  const auto vi = vertices_2d(rep.polytope);
  const double h_in = hausdorff_convex_2d(vi, ref_poly);
  const double viol = containment_violation(vi, Ko);
  const bool pass = h_out <= 1e-2 && h_in <= 1e-2 && viol <= 1e-6 && secs <= 120.0;
  return {pass, "outer H=" + num(h_out, 3) + ", inner H=" + num(h_in, 3) + " (multiplier degree " +
                    std::to_string(so.mult_degree) + ", " + num(secs, 3) + " s), K_i in K_o violation " + num(viol, 3)};
}

Outcome c4() {
  const auto X = fixtures::exampleE(0.9, 0.4);
  OuterKernelOptions forced;
  forced.n_samples = 0;
  forced.forced_points = {{0.9, 0.4}, {0.9, -0.4}};
  const Polytope A = outer_kernel(X, forced);
  OuterKernelOptions rnd;
  rnd.n_samples = 2000;
  rnd.seed = 7;
  const Polytope B = outer_kernel(X, rnd);
  auto verified = [](const Polytope& K) {
    return K.empty && K.farkas && conic::check_farkas(halfspace_system(K), *K.farkas).valid;
  };
  const bool pass = verified(A) && verified(B);
  return {pass, std::string("forced corners: ") + (verified(A) ? "empty, Farkas verified" : "not refuted") +
                    "; seeded 2000 samples: " + (verified(B) ? "empty after " : "not refuted with ") +
                    std::to_string(B.halfspaces.size()) + " cuts"};
}

Outcome c5() {
  // Make sure every producer contributed.
  SupportOptions so;
  so.mult_degree = 2;
  for (const auto& d : default_directions(2, 8)) keep("support disk", find_support(fixtures::disk(), d, so).certificate);
  keep("l1 disk", find_l1_outer(fixtures::disk(), study::square_box(2, 1.0)).certificate);
  keep("l1 E", find_l1_outer(fixtures::exampleE(0.9, 0.3), study::square_box(2, 1.0)).certificate);
  approx_cached("disk", fixtures::disk(), 2);
  approx_cached("A", fixtures::exampleA(), 4);
  approx_cached("B", fixtures::exampleB(), 6);
  int bad = 0;
  double worst_res = 0.0;
  double worst_eig = INFINITY;
  for (auto& [tag, c] : g_certs) {
    const auto chk = sos::verify_certificate(c);
    worst_res = std::max(worst_res, chk.residual);
    worst_eig = std::min(worst_eig, chk.min_eig);
    if (!(chk.valid && chk.residual <= 1e-6 && chk.min_eig >= -1e-7)) ++bad;
  }
  int violations = 0;
  std::size_t fixtures_checked = 0;
  std::uint64_t seed = 100;
  for (const auto& [tag, entry] : g_approx) {
    const auto& [X, r] = entry;
    const double hw = r.s_star * study::bounding_radius(X) * 1.01;
    const auto sw = sandwich_check(X, r.f, r.s_star, 1000, hw, ++seed);
    if (sw.inner_checked < 1000 || sw.outer_checked < 1000) ++violations;
    violations += sw.inner_violations + sw.outer_violations;
    ++fixtures_checked;
  }
  const bool pass = bad == 0 && violations == 0;
  return {pass, std::to_string(g_certs.size()) + " certificates, " + std::to_string(bad) + " failing (worst residual " +
                    num(worst_res, 3) + ", worst min eigenvalue " + num(worst_eig, 3) + "); sandwich on " +
                    std::to_string(fixtures_checked) + " runs x 1000+1000 points: " + std::to_string(violations) +
                    " violations"};
}

Outcome c6() {
  const auto& r = approx_cached("disk", fixtures::disk(), 2);
  const double eps = 1e-3;
  const double lo = std::sqrt(1.0 + eps);
  const bool s_ok = r.s_star >= lo && r.s_star <= lo + 1e-3 + 1e-6;
  const Polynomial f = fixtures::disk().constraint(0) * (1.0 + eps);
  const double mn = max_norm_sublevel(f);
  const double hd = hausdorff_scaled(f, r.s_star);
  const bool m_ok = std::abs(mn - 1.0 / lo) <= 1e-6;
  const bool h_ok = std::abs(hd - (r.s_star - 1.0) / lo) <= 1e-6;
  return {s_ok && m_ok && h_ok, "s*=" + num(r.s_star, 7) + " in [" + num(lo, 7) + ", " + num(lo + 1e-3 + 1e-6, 7) +
                                    "], max_norm " + num(mn, 9) + ", hausdorff " + num(hd, 9)};
}

Outcome c7() {
  std::string d;
  bool pass = true;
  const std::vector<double> origin{0.0, 0.0};
  // Volume scaling law and method agreement on approximation outputs.
  double worst_law = 0.0;
  double worst_agree = 0.0;
  for (const char* tag : {"E r=0.2", "E r=0.4", "disk"}) {
    const auto it = g_approx.find(tag);
    if (it == g_approx.end()) continue;
    const auto& f = it->second.second.f;
    const double base = volume_star(sublevel_region(f), origin).value;
    for (double s : {1.2, 2.0}) {
      const double v = volume_star(sublevel_region(f, s), origin).value;
      worst_law = std::max(worst_law, std::abs(v / base / (s * s) - 1.0));
    }
    const double R = max_norm_sublevel(f) * 1.01;
    const double grid = volume_grid(sublevel_region(f), study::square_box(2, R)).value;
    worst_agree = std::max(worst_agree, std::abs(grid / base - 1.0));
  }
  pass = pass && worst_law <= 0.01 && worst_agree <= 0.01;
  d += "scaling law " + num(100 * worst_law, 3) + "%, polar/grid " + num(100 * worst_agree, 3) + "%; ";
  // Scale invariance.
  double worst_inv = 0.0;
  for (double alpha : {0.5, 2.0}) {
    const auto& base = approx_cached("E r=0.3", fixtures::exampleE(0.9, 0.3), 4);
    const auto r = run_approx("E r=0.3 x" + num(alpha), scale_set(fixtures::exampleE(0.9, 0.3), alpha), 4);
    if (!trace_consistent(r)) pass = false;
    worst_inv = std::max(worst_inv, std::abs(r.s_star - base.s_star));
  }
  pass = pass && worst_inv <= 2e-3;
  d += "scale invariance |ds*| " + num(worst_inv, 3) + "; ";
  // Support monotonicity in multiplier degree.
  SupportOptions lo;
  lo.mult_degree = 2;
  SupportOptions hi;
  hi.mult_degree = 4;
  double worst_mono = INFINITY;
  for (const auto& c : default_directions(2, 8)) {
    const auto a = find_support(fixtures::exampleA(), c, lo);
    const auto b = find_support(fixtures::exampleA(), c, hi);
    keep("support A md2", a.certificate);
    keep("support A md4", b.certificate);
    worst_mono = std::min(worst_mono, b.value - a.value);
  }
  pass = pass && worst_mono >= -1e-6;
  d += "support md4 - md2 >= " + num(worst_mono, 3) + "; ";
  // Bisection traces.
  int bad_traces = 0;
  for (const auto& [tag, entry] : g_approx) bad_traces += trace_consistent(entry.second) ? 0 : 1;
  pass = pass && bad_traces == 0;
  d += std::to_string(g_approx.size()) + " traces, " + std::to_string(bad_traces) + " inconsistent";
  return {pass, d};
}

Outcome c8() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto rows = study::polytope_study({});
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  int wins = 0;
  int errors = 0;
  for (const auto& r : rows) {
    if (r.status != "ok") {
      ++errors;
      continue;
    }
    wins += r.percent_scaling < r.percent_l1 ? 1 : 0;
  }
  return {wins >= 12 && secs <= 900.0, "scaling better in " + std::to_string(wins) + "/20 (" +
                                           std::to_string(errors) + " errors, " + num(secs, 3) + " s)"};
}

Outcome c9() {
  const auto X = fixtures::exampleB();
  const auto& r = approx_cached("B", X, 6);
  const auto v = study::scaling_volumes(X, r.f, r.s_star);
  const bool pass = r.certificate.valid && v.percent_error < 25.0;
  return {pass, "s*=" + num(r.s_star, 5) + ", certificate " + (r.certificate.valid ? "valid" : "invalid") +
                    ", percent error " + num(v.percent_error, 4)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<int> only;
  std::vector<int> allow_red;
  app.add_option("--only", only, "run these criteria");
  app.add_option("--allow-red", allow_red, "criteria whose failure does not affect the exit status");
  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::err);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"example E table: scaling column and analytic s_lb", c1},
      {"scaling lower-bound estimator", c2},
      {"kernel of example A (outer and inner)", c3},
      {"example E star-convexity refutation", c4},
      {"certificate soundness and sandwich checks", c5},
      {"analytic disk oracle", c6},
      {"property suites", c7},
      {"random polytope study, scaling vs l1", c8},
      {"example B degree-6 smoke test", c9},
  };
  const std::set<int> run(only.begin(), only.end());
  const std::set<int> red(allow_red.begin(), allow_red.end());
  int failed = 0;
  int blocking = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!run.empty() && !run.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s C%d %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", id, criteria[k].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) {
      ++failed;
      if (!red.count(id)) ++blocking;
    }
  }
  std::printf("%d criteria failed (%d not in the allowed-red list)\n", failed, blocking);
  return blocking;
}
