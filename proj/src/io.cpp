#include "starsos/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "starsos/error.hpp"

namespace starsos::io {

json to_json(const Polynomial& p) {
  json terms = json::array();
  for (const auto& [m, c] : p.terms()) {
    std::vector<int> e(p.dim());
    for (std::size_t j = 0; j < p.dim(); ++j) e[j] = m[j];
    terms.push_back({{"exps", e}, {"coef", c}});
  }
  return {{"n", p.dim()}, {"terms", terms}};
}

Polynomial polynomial_from_json(const json& j) {
  try {
    const auto n = j.at("n").get<std::size_t>();
    if (n < 1) throw InputError("polynomial dimension must be positive");
    std::vector<std::pair<std::vector<int>, double>> terms;
    for (const auto& t : j.at("terms")) {
      auto e = t.at("exps").get<std::vector<int>>();
      if (e.size() != n) throw InputError("exponent list length differs from n");
      for (int v : e) {
        if (v < 0) throw InputError("negative exponent");
      }
      terms.emplace_back(std::move(e), t.at("coef").get<double>());
    }
    return Polynomial::from_terms(n, terms);
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed polynomial JSON: ") + e.what());
  }
}

json to_json(const SemialgebraicSet& X) {
  json cs = json::array();
  for (const auto& g : X.constraints()) cs.push_back(to_json(g));
  return {{"n", X.dim()}, {"constraints", cs}};
}

namespace {

double param(const json& params, const json& overrides, const char* key, double fallback) {
  if (overrides.contains(key)) return overrides.at(key).get<double>();
  if (params.contains(key)) return params.at(key).get<double>();
  return fallback;
}

}  // namespace

SemialgebraicSet named_fixture(const std::string& name, const json& params) {
  const json none = json::object();
  if (name == "disk") return fixtures::disk(param(params, none, "radius", 1.0));
  if (name == "box") {
    return fixtures::box(static_cast<std::size_t>(param(params, none, "n", 2.0)),
                         param(params, none, "half_width", 1.0));
  }
  if (name == "exampleA") return fixtures::exampleA();
  if (name == "exampleB") return fixtures::exampleB();
  if (name == "exampleE") return fixtures::exampleE(param(params, none, "c", 0.9), param(params, none, "r", 0.4));
  throw InputError("unknown fixture '" + name + "'");
}

SemialgebraicSet set_from_json(const json& j, const json& overrides) {
  try {
    if (j.contains("fixture")) {
      json params = j;
      for (const auto& [k, v] : overrides.items()) params[k] = v;
      return named_fixture(j.at("fixture").get<std::string>(), params);
    }
    const auto n = j.at("n").get<std::size_t>();
    std::vector<Polynomial> cs;
    for (const auto& c : j.at("constraints")) {
      cs.push_back(polynomial_from_json(c));
      if (cs.back().dim() != n) throw InputError("constraint dimension differs from the set dimension");
    }
    return SemialgebraicSet(n, std::move(cs));
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed set JSON: ") + e.what());
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InputError("'" + path + "' is not valid JSON: " + e.what());
  }
}

SemialgebraicSet load_set(const std::string& path, const json& overrides) {
  return set_from_json(read_json_file(path), overrides);
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
}

json to_json(const sos::Certificate& c, bool with_blocks) {
  json j = {{"valid", c.valid}, {"residual", c.residual}, {"min_eig", c.min_eig}};
  json polys = json::object();
  for (const auto& [k, p] : c.polynomials) polys[k] = to_json(p);
  j["polynomials"] = polys;
  if (with_blocks) {
    json blocks = json::array();
    for (const auto& b : c.blocks) {
      json gram = json::array();
      for (Eigen::Index r = 0; r < b.gram.rows(); ++r) {
        std::vector<double> row;
        for (Eigen::Index s = 0; s < b.gram.cols(); ++s) row.push_back(b.gram(r, s));
        gram.push_back(row);
      }
      json basis = json::array();
      for (const auto& m : b.basis) {
        std::vector<int> e(m.dim());
        for (std::size_t k = 0; k < m.dim(); ++k) e[k] = m[k];
        basis.push_back(e);
      }
      blocks.push_back({{"label", b.label}, {"target", to_json(b.target)}, {"basis", basis}, {"gram", gram}});
    }
    j["blocks"] = blocks;
  }
  return j;
}

json to_json(const ApproximationResult& r) {
  json trace = json::array();
  for (const auto& st : r.trace) trace.push_back({{"s", st.s}, {"status", conic::to_string(st.status)}});
  json lam = json::array();
  for (const auto& p : r.lambda) lam.push_back(to_json(p));
  json mu = json::array();
  for (const auto& p : r.mu) mu.push_back(to_json(p));
  return {{"f", to_json(r.f)},         {"s_star", r.s_star}, {"eps", r.eps},
          {"s_tol", r.s_tol},          {"degree", r.degree}, {"lambda", lam},
          {"mu", mu},                  {"trace", trace},     {"certificate", to_json(r.certificate)}};
}

json to_json(const conic::FarkasCertificate& f) {
  return {{"equality_multipliers", f.equality_multipliers}, {"inequality_multipliers", f.inequality_multipliers}};
}

json to_json(const Polytope& K) {
  json j = {{"n", K.n}, {"empty", K.empty}};
  if (K.has_halfspaces) {
    json hs = json::array();
    for (const auto& h : K.halfspaces) hs.push_back({{"a", h.a}, {"b", h.b}});
    j["halfspaces"] = hs;
  }
  if (K.has_vertices) j["vertices"] = K.vertices;
  if (K.farkas) j["farkas"] = to_json(*K.farkas);
  return j;
}

json to_json(const VolumeEstimate& v) {
  return {{"value", v.value}, {"method", to_string(v.method)}, {"resolution", v.resolution},
          {"error_bound", v.error_bound}};
}

std::string fmt9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::vector<Segment> marching_squares(const std::function<double(double, double)>& field, double half_width,
                                      int resolution) {
  if (resolution < 2) throw InputError("contour resolution must be at least 2");
  if (!(half_width > 0.0)) throw InputError("plot half width must be positive");
  const int N = resolution;
  const double h = 2.0 * half_width / (N - 1);
  auto coord = [&](int k) { return -half_width + h * k; };
  std::vector<double> v(static_cast<std::size_t>(N) * N);
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) v[static_cast<std::size_t>(i) * N + j] = field(coord(j), coord(i));
  }
  auto at = [&](int i, int j) { return v[static_cast<std::size_t>(i) * N + j]; };
  std::vector<Segment> out;
  for (int i = 0; i + 1 < N; ++i) {
    for (int j = 0; j + 1 < N; ++j) {
      // Corners counterclockwise from the lower left.
      const double c[4] = {at(i, j), at(i, j + 1), at(i + 1, j + 1), at(i + 1, j)};
      const double px[4] = {coord(j), coord(j + 1), coord(j + 1), coord(j)};
      const double py[4] = {coord(i), coord(i), coord(i + 1), coord(i + 1)};
      std::vector<std::pair<double, double>> cross;
      for (int e = 0; e < 4; ++e) {
        const int f = (e + 1) % 4;
        if ((c[e] < 0.0) != (c[f] < 0.0)) {
          const double t = c[e] / (c[e] - c[f]);
          cross.emplace_back(px[e] + t * (px[f] - px[e]), py[e] + t * (py[f] - py[e]));
        }
      }
      if (cross.size() == 2) {
        out.push_back({cross[0].first, cross[0].second, cross[1].first, cross[1].second});
      } else if (cross.size() == 4) {
        // Saddle: the center value decides which corners connect.
        const double mid = 0.25 * (c[0] + c[1] + c[2] + c[3]);
        if ((mid < 0.0) == (c[0] < 0.0)) {
          out.push_back({cross[0].first, cross[0].second, cross[1].first, cross[1].second});
          out.push_back({cross[2].first, cross[2].second, cross[3].first, cross[3].second});
        } else {
          out.push_back({cross[3].first, cross[3].second, cross[0].first, cross[0].second});
          out.push_back({cross[1].first, cross[1].second, cross[2].first, cross[2].second});
        }
      }
    }
  }
  return out;
}

std::string render_svg(const std::vector<SvgLayer>& layers, double half_width, int pixels) {
  const double scale = pixels / (2.0 * half_width);
  auto X = [&](double x) { return fmt9((x + half_width) * scale); };
  auto Y = [&](double y) { return fmt9((half_width - y) * scale); };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << pixels << "\" height=\"" << pixels
     << "\" viewBox=\"0 0 " << pixels << ' ' << pixels << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (const auto& L : layers) {
    if (!L.segments.empty()) {
      os << "<path fill=\"none\" stroke=\"" << L.stroke << "\" stroke-width=\"1\" d=\"";
      for (const auto& s : L.segments) os << 'M' << X(s.x0) << ' ' << Y(s.y0) << 'L' << X(s.x1) << ' ' << Y(s.y1);
      os << "\"/>\n";
    }
    if (!L.polygon.empty()) {
      os << "<polygon fill=\"" << L.fill << "\" stroke=\"" << L.stroke << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t k = 0; k < L.polygon.size(); ++k) {
        os << (k ? " " : "") << X(L.polygon[k][0]) << ',' << Y(L.polygon[k][1]);
      }
      os << "\"/>\n";
    }
  }
  os << "</svg>\n";
  return os.str();
}

namespace {

std::vector<Segment> set_boundary(const SemialgebraicSet& X, double hw, int res) {
  return marching_squares(
      [&](double x, double y) {
        const double p[2] = {x, y};
        return X.max_value(p) - 1.0;
      },
      hw, res);
}

}  // namespace

std::string approximation_svg(const SemialgebraicSet& X, const Polynomial& f, double s, double half_width,
                              int resolution) {
  if (X.dim() != 2) throw InputError("plots need a 2D set");
  const Polynomial fs = substitute_scale(f, s);
  auto level = [](const Polynomial& p) {
    return [&p](double x, double y) {
      const double q[2] = {x, y};
      return eval(p, q) - 1.0;
    };
  };
  std::vector<SvgLayer> layers;
  layers.push_back({"black", set_boundary(X, half_width, resolution), {}, "none"});
  layers.push_back({"blue", marching_squares(level(f), half_width, resolution), {}, "none"});
  layers.push_back({"red", marching_squares(level(fs), half_width, resolution), {}, "none"});
  return render_svg(layers, half_width);
}

std::string kernel_svg(const SemialgebraicSet& X, const Polytope& K, double half_width, int resolution) {
  if (X.dim() != 2) throw InputError("plots need a 2D set");
  std::vector<SvgLayer> layers;
  layers.push_back({"black", set_boundary(X, half_width, resolution), {}, "none"});
  if (!K.empty) layers.push_back({"green", {}, vertices_2d(K), "rgba(0,128,0,0.2)"});
  return render_svg(layers, half_width);
}

}  // namespace starsos::io
