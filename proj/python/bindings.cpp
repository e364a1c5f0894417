// Python module _starsos. Structured results cross the boundary as JSON text
// and are decoded by the pure-Python wrapper in starsos/__init__.py.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "starsos/error.hpp"
#include "starsos/io.hpp"
#include "starsos/study.hpp"

namespace py = pybind11;
using namespace starsos;
using io::json;

namespace {

std::string kernel_json(const SemialgebraicSet& X, Polytope K, const json& extra) {
  json j = extra;
  if (!K.empty && X.dim() == 2) {
    complete_2d(K);
    K.vertices = vertices_2d(K);
    const auto cheb = chebyshev_center(K);
    j["chebyshev"] = {{"center", cheb.center}, {"radius", cheb.radius}};
    j["area"] = polygon_area(K.vertices);
  }
  j["polytope"] = io::to_json(K);
  return j.dump();
}

}  // namespace

PYBIND11_MODULE(_starsos, m) {
  m.doc() = "Polynomial sublevel-set approximations and kernel polytopes of semialgebraic sets";

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<SolverIndeterminate>(m, "SolverIndeterminate", PyExc_RuntimeError);
  py::register_exception<CertificateError>(m, "CertificateError", PyExc_RuntimeError);

  py::class_<Polynomial>(m, "Polynomial")
      .def_static(
          "from_json", [](const std::string& s) { return io::polynomial_from_json(json::parse(s)); }, py::arg("text"))
      .def("to_json", [](const Polynomial& p) { return io::to_json(p).dump(); })
      .def_property_readonly("n", &Polynomial::dim)
      .def_property_readonly("degree", &Polynomial::degree)
      .def("__call__", [](const Polynomial& p, const std::vector<double>& x) { return eval(p, x); }, py::arg("x"));

  py::class_<SemialgebraicSet>(m, "SemialgebraicSet")
      .def_static(
          "fixture",
          [](const std::string& name, const std::string& params) {
            return io::named_fixture(name, json::parse(params));
          },
          py::arg("name"), py::arg("params") = "{}")
      .def_static(
          "from_json", [](const std::string& s) { return io::set_from_json(json::parse(s)); }, py::arg("text"))
      .def_static("load", [](const std::string& path) { return io::load_set(path); }, py::arg("path"))
      .def("to_json", [](const SemialgebraicSet& X) { return io::to_json(X).dump(); })
      .def_property_readonly("n", &SemialgebraicSet::dim)
      .def_property_readonly("m", &SemialgebraicSet::size)
      .def(
          "contains",
          [](const SemialgebraicSet& X, const std::vector<double>& x, double tol) { return membership(X, x, tol); },
          py::arg("x"), py::arg("tol") = 0.0)
      .def("max_value", [](const SemialgebraicSet& X, const std::vector<double>& x) { return X.max_value(x); });

  m.def(
      "approximate",
      [](const SemialgebraicSet& X, int degree, double eps, double s_tol, std::optional<int> mult_degree) {
        ApproximateOptions o;
        o.find.degree = degree;
        o.find.eps = eps;
        o.find.mult_degree = mult_degree;
        o.s_tol = s_tol;
        py::gil_scoped_release release;
        return io::to_json(approximate(X, o)).dump();
      },
      py::arg("X"), py::arg("degree") = 4, py::arg("eps") = 1e-3, py::arg("s_tol") = 1e-3,
      py::arg("mult_degree") = std::nullopt);

  m.def(
      "find_approx",
      [](const SemialgebraicSet& X, double s, int degree, double eps) {
        FindApproxOptions o;
        o.degree = degree;
        o.eps = eps;
        py::gil_scoped_release release;
        const auto r = find_approx(X, s, o);
        json j = {{"status", conic::to_string(r.status)}, {"s", r.s}, {"message", r.message}};
        if (r.status == conic::Status::Feasible) {
          j["f"] = io::to_json(r.f);
          j["certificate"] = io::to_json(r.certificate);
        }
        return j.dump();
      },
      py::arg("X"), py::arg("s"), py::arg("degree") = 4, py::arg("eps") = 1e-3);

  m.def(
      "find_l1_outer",
      [](const SemialgebraicSet& X, double half_width, int degree) {
        L1Options o;
        o.degree = degree;
        py::gil_scoped_release release;
        const auto r = find_l1_outer(X, study::square_box(X.dim(), half_width), o);
        return json{{"f", io::to_json(r.f)}, {"objective", r.objective}, {"certificate", io::to_json(r.certificate)}}
            .dump();
      },
      py::arg("X"), py::arg("half_width"), py::arg("degree") = 4);

  m.def(
      "outer_kernel",
      [](const SemialgebraicSet& X, int n_samples, std::uint64_t seed,
         const std::vector<std::vector<double>>& forced_points) {
        OuterKernelOptions o;
        o.n_samples = n_samples;
        o.seed = seed;
        o.forced_points = forced_points;
        py::gil_scoped_release release;
        return kernel_json(X, outer_kernel(X, o), {{"seed", seed}});
      },
      py::arg("X"), py::arg("n_samples") = 2000, py::arg("seed") = 0,
      py::arg("forced_points") = std::vector<std::vector<double>>{});

  m.def(
      "inner_kernel",
      [](const SemialgebraicSet& X, int n_directions, int mult_degree) {
        SupportOptions o;
        o.mult_degree = mult_degree;
        py::gil_scoped_release release;
        const auto rep = inner_kernel(X, default_directions(X.dim(), n_directions), o);
        json sup = json::array();
        for (const auto& s : rep.supports) sup.push_back({{"point", s.point}, {"value", s.value}});
        return kernel_json(X, rep.polytope, {{"supports", sup}});
      },
      py::arg("X"), py::arg("n_directions") = 64, py::arg("mult_degree") = SupportOptions{}.mult_degree);

  m.def(
      "find_support",
      [](const SemialgebraicSet& X, const std::vector<double>& c, int mult_degree) {
        SupportOptions o;
        o.mult_degree = mult_degree;
        py::gil_scoped_release release;
        const auto r = find_support(X, c, o);
        return json{{"status", conic::to_string(r.status)}, {"point", r.point}, {"value", r.value},
                    {"certificate", io::to_json(r.certificate)}}
            .dump();
      },
      py::arg("X"), py::arg("c"), py::arg("mult_degree") = SupportOptions{}.mult_degree);

  m.def(
      "scaling_lower_bound_estimate",
      [](const SemialgebraicSet& X, int n_rays, std::uint64_t seed) {
        return scaling_lower_bound_estimate(X, n_rays, seed);
      },
      py::arg("X"), py::arg("n_rays") = 2000, py::arg("seed") = 0);

  m.def(
      "volume_polar",
      [](const SemialgebraicSet& X, const std::vector<double>& center, long resolution) {
        return volume_star(set_region(X), center, resolution).value;
      },
      py::arg("X"), py::arg("center"), py::arg("resolution") = 10000);
  m.def(
      "volume_grid",
      [](const SemialgebraicSet& X, double half_width, long resolution) {
        return volume_grid(set_region(X), study::square_box(X.dim(), half_width), resolution).value;
      },
      py::arg("X"), py::arg("half_width"), py::arg("resolution") = 2000);
  m.def(
      "sublevel_volume_polar",
      [](const Polynomial& f, double s, long resolution) {
        return volume_star(sublevel_region(f, s), std::vector<double>(f.dim(), 0.0), resolution).value;
      },
      py::arg("f"), py::arg("s") = 1.0, py::arg("resolution") = 10000);
  m.def("max_norm_sublevel", &max_norm_sublevel, py::arg("f"), py::arg("resolution") = 3600);
  m.def("hausdorff_scaled", &hausdorff_scaled, py::arg("f"), py::arg("s"), py::arg("resolution") = 3600);
  m.def("exampleE_scaling_lower_bound", &fixtures::exampleE_scaling_lower_bound, py::arg("c"), py::arg("r"));
}
