// starsos: command-line front end for the approximation, kernel, volume and
// table pipelines. Exit codes: 0 ok, 2 input error, 3 solver indeterminate,
// 4 internal failure.

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <iostream>
#include <numbers>
#include <sstream>

#include "starsos/error.hpp"
#include "starsos/io.hpp"
#include "starsos/study.hpp"

using namespace starsos;
using io::json;

namespace {

struct SetArgs {
  std::string path;
  std::string fixture;
  std::optional<double> c;
  std::optional<double> r;
};

void add_set_flags(CLI::App* cmd, SetArgs& a) {
  auto* p = cmd->add_option("--set", a.path, "set JSON file");
  auto* f = cmd->add_option("--fixture", a.fixture, "named fixture: disk, box, exampleA, exampleB, exampleE");
  p->excludes(f);
  cmd->add_option("--c", a.c, "example E parameter c");
  cmd->add_option("--r", a.r, "example E parameter r");
}

json set_overrides(const SetArgs& a) {
  json o = json::object();
  if (a.c) o["c"] = *a.c;
  if (a.r) o["r"] = *a.r;
  return o;
}

SemialgebraicSet resolve_set(const SetArgs& a) {
  if (!a.path.empty()) return io::load_set(a.path, set_overrides(a));
  if (!a.fixture.empty()) return io::named_fixture(a.fixture, set_overrides(a));
  throw InputError("one of --set or --fixture is required");
}

json set_source(const SetArgs& a) {
  json j = {{"source", a.path.empty() ? "fixture:" + a.fixture : a.path}};
  const json o = set_overrides(a);
  for (const auto& [k, v] : o.items()) j[k] = v;
  return j;
}

void positive(double v, const char* name) {
  if (!(v > 0.0)) throw InputError(std::string(name) + " must be positive");
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    io::write_text_file(path, text);
  }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::vector<double> parse_point(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw InputError("bad number '" + item + "'");
    } catch (const std::logic_error&) {
      throw InputError("bad number '" + item + "'");
    }
  }
  return out;
}

void check_solver_env() {
  const char* v = std::getenv("STARSOS_SOLVER");
  if (v && *v && std::string(v) != "ipm") {
    throw InputError(std::string("unknown solver backend '") + v + "' (available: ipm)");
  }
}

std::string with_seed(std::string svg, std::uint64_t seed) {
  const auto pos = svg.find('\n');
  return svg.insert(pos + 1, "<!-- seed " + std::to_string(seed) + " -->\n");
}

int fail(int code, const std::string& kind, const std::string& msg) {
  std::cerr << json{{"error", {{"kind", kind}, {"message", msg}, {"exit_code", code}}}}.dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inner/outer polynomial approximations and kernel polytopes of semialgebraic sets"};
  app.require_subcommand(1);
  std::string log_level = "warn";
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error, off");

  // approximate
  auto* ap = app.add_subcommand("approximate", "scaling-objective (or l1) approximation");
  SetArgs ap_set;
  add_set_flags(ap, ap_set);
  int degree = 4;
  double eps = 1e-3;
  double s_tol = 1e-3;
  std::uint64_t seed = 0;
  std::string objective = "scaling";
  std::optional<int> mult_degree;
  std::string out_path;
  std::string svg_path;
  bool volumes = false;
  long resolution = 2000;
  int lb_rays = 2000;
  ap->add_option("--degree", degree, "approximation degree 2d");
  ap->add_option("--eps", eps, "inner margin");
  ap->add_option("--s-tol", s_tol, "bisection tolerance");
  ap->add_option("--seed", seed, "seed of the lower-bound estimator");
  ap->add_option("--objective", objective, "scaling or l1")->check(CLI::IsMember({"scaling", "l1"}));
  ap->add_option("--mult-degree", mult_degree, "degree of every multiplier");
  ap->add_option("--lb-rays", lb_rays, "rays for the scaling lower-bound estimate");
  ap->add_flag("--volumes", volumes, "grid volumes and percent error (2D)");
  ap->add_option("--resolution", resolution, "grid cells per axis for --volumes");
  ap->add_option("--out", out_path, "result JSON (default stdout)");
  ap->add_option("--svg", svg_path, "contour plot (2D)");

  // kernel outer|inner
  auto* kp = app.add_subcommand("kernel", "kernel polytopes");
  kp->require_subcommand(1);
  auto* ko = kp->add_subcommand("outer", "cutting-plane outer approximation");
  auto* ki = kp->add_subcommand("inner", "SOS support-point inner approximation");
  SetArgs k_set;
  int samples = 2000;
  int n_dirs = 64;
  int k_mult = SupportOptions{}.mult_degree;
  std::vector<std::string> force_points;
  std::vector<std::string> force_dirs;
  std::string k_out;
  std::string k_svg;
  for (auto* sc : {ko, ki}) {
    add_set_flags(sc, k_set);
    sc->add_option("--seed", seed, "sampling seed");
    sc->add_option("--out", k_out, "polytope JSON (default stdout)");
    sc->add_option("--svg", k_svg, "overlay plot (2D)");
  }
  ko->add_option("--samples", samples, "boundary samples");
  ko->add_option("--force-point", force_points, "boundary point cut first, e.g. 0.9,0.4");
  ko->add_option("--force-direction", force_dirs, "ray whose first crossing is cut first");
  ki->add_option("--directions", n_dirs, "number of support directions");
  ki->add_option("--mult-degree", k_mult, "multiplier degree");

  // volume
  auto* vp = app.add_subcommand("volume", "volume of a set");
  SetArgs v_set;
  add_set_flags(vp, v_set);
  std::string method = "grid";
  std::string center;
  std::optional<long> v_res;
  std::optional<double> half_width;
  std::string v_out;
  vp->add_option("--method", method, "polar or grid")->check(CLI::IsMember({"polar", "grid"}));
  vp->add_option("--center", center, "polar center, e.g. 0,0");
  vp->add_option("--resolution", v_res, "angles (polar) or cells per axis (grid)");
  vp->add_option("--half-width", half_width, "grid box half width (default: bounding radius)");
  vp->add_option("--out", v_out, "volume JSON (default stdout)");

  // table2
  auto* tp = app.add_subcommand("table2", "example E percent-error table");
  bool with_l1 = false;
  std::string t_out;
  study::Table2Options topts;
  tp->add_option("--c", topts.c, "example E parameter c");
  tp->add_option("--degree", topts.degree, "approximation degree");
  tp->add_option("--seed", seed, "recorded in the output");
  tp->add_flag("--l1", with_l1, "add l1 rows");
  tp->add_option("--resolution", topts.resolution, "grid cells per axis");
  tp->add_option("--out", t_out, "CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(2, "input", e.what());
  }

  try {
    spdlog::set_default_logger(spdlog::stderr_color_st("starsos"));
    spdlog::set_level(spdlog::level::from_str(log_level));
    check_solver_env();

    if (*ap) {
      positive(eps, "--eps");
      positive(s_tol, "--s-tol");
      positive(static_cast<double>(degree), "--degree");
      positive(static_cast<double>(resolution), "--resolution");
      positive(static_cast<double>(lb_rays), "--lb-rays");
      const auto X = resolve_set(ap_set);
      json j = {{"command", "approximate"},
                {"seed", seed},
                {"set", set_source(ap_set)},
                {"objective", objective}};
      if (objective == "scaling") {
        ApproximateOptions o;
        o.find.degree = degree;
        o.find.eps = eps;
        o.find.mult_degree = mult_degree;
        o.s_tol = s_tol;
        const auto r = approximate(X, o);
        j["result"] = io::to_json(r);
        j["s_lb_estimate"] = scaling_lower_bound_estimate(X, lb_rays, seed);
        if (volumes) {
          const auto v = study::scaling_volumes(X, r.f, r.s_star, resolution);
          j["volumes"] = {{"set", v.vol_set}, {"inner", v.vol_inner}, {"outer", v.vol_outer},
                          {"percent_error", v.percent_error}};
        }
        if (!svg_path.empty()) {
          const double hw = 1.05 * r.s_star * study::bounding_radius(X);
          io::write_text_file(svg_path, with_seed(io::approximation_svg(X, r.f, r.s_star, hw), seed));
        }
      } else {
        const auto box = study::square_box(X.dim(), study::bounding_radius(X));
        L1Options o;
        o.degree = degree;
        o.mult_degree = mult_degree;
        const auto r = find_l1_outer(X, box, o);
        j["result"] = {{"f", io::to_json(r.f)}, {"objective", r.objective}, {"certificate", io::to_json(r.certificate)}};
        if (volumes) {
          const auto v = study::l1_volumes(X, r.f, box, resolution);
          j["volumes"] = {{"set", v.vol_set}, {"outer", v.vol_outer}, {"percent_error", v.percent_error}};
        }
      }
      emit(out_path, dump(j));
      return 0;
    }

    if (*kp) {
      const auto X = resolve_set(k_set);
      json j = {{"command", *ko ? "kernel outer" : "kernel inner"}, {"seed", seed}, {"set", set_source(k_set)}};
      Polytope K;
      if (*ko) {
        positive(static_cast<double>(samples), "--samples");
        OuterKernelOptions o;
        o.n_samples = samples;
        o.seed = seed;
        for (const auto& s : force_points) o.forced_points.push_back(parse_point(s));
        for (const auto& s : force_dirs) o.forced_directions.push_back(parse_point(s));
        K = outer_kernel(X, o);
      } else {
        positive(static_cast<double>(n_dirs), "--directions");
        SupportOptions o;
        o.mult_degree = k_mult;
        const auto rep = inner_kernel(X, default_directions(X.dim(), n_dirs, seed), o);
        K = rep.polytope;
        json sup = json::array();
        for (const auto& s : rep.supports) {
          sup.push_back({{"point", s.point}, {"value", s.value}, {"status", conic::to_string(s.status)}});
        }
        j["supports"] = sup;
        if (rep.infeasible_direction) j["infeasible_direction"] = *rep.infeasible_direction;
      }
      if (!K.empty && X.dim() == 2) {
        complete_2d(K);
        K.vertices = vertices_2d(K);
        const auto cheb = chebyshev_center(K);
        j["chebyshev"] = {{"center", cheb.center}, {"radius", cheb.radius}};
        j["area"] = polygon_area(K.vertices);
      }
      j["polytope"] = io::to_json(K);
      if (!k_svg.empty()) {
        io::write_text_file(k_svg, with_seed(io::kernel_svg(X, K, 1.05 * study::bounding_radius(X)), seed));
      }
      emit(k_out, dump(j));
      return 0;
    }

    if (*vp) {
      const auto X = resolve_set(v_set);
      VolumeEstimate v;
      if (method == "polar") {
        if (center.empty()) throw InputError("polar volumes need --center");
        const auto c = parse_point(center);
        if (c.size() != X.dim()) throw InputError("--center has the wrong dimension");
        const long res = v_res.value_or(X.dim() == 2 ? 10000 : 100000);
        v = volume_star(set_region(X), c, res);
      } else {
        const long res = v_res.value_or(2000);
        if (res < 1) throw InputError("--resolution must be positive");
        const double hw = half_width.value_or(study::bounding_radius(X));
        positive(hw, "--half-width");
        v = volume_grid(set_region(X), study::square_box(X.dim(), hw), res);
      }
      emit(v_out, dump({{"command", "volume"}, {"seed", seed}, {"set", set_source(v_set)}, {"volume", io::to_json(v)}}));
      return 0;
    }

    if (*tp) {
      topts.with_l1 = with_l1;
      positive(topts.c, "--c");
      positive(static_cast<double>(topts.resolution), "--resolution");
      std::ostringstream os;
      os << "# seed " << seed << "\n";
      write_table_csv(study::table2(topts), os);
      emit(t_out, os.str());
      return 0;
    }
  } catch (const InputError& e) {
    return fail(2, "input", e.what());
  } catch (const SolverIndeterminate& e) {
    return fail(3, "solver_indeterminate", e.what());
  } catch (const std::exception& e) {
    return fail(4, "internal", e.what());
  }
  return 4;
}
