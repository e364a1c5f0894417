#pragma once

// JSON encodings of the library types. Also 2D SVG plots built from
// marching-squares contours.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "starsos/approx.hpp"
#include "starsos/kernel.hpp"
#include "starsos/metrics.hpp"

namespace starsos::io {

using json = nlohmann::ordered_json;

// {"n":2,"terms":[{"exps":[2,0],"coef":1.0},...]}
json to_json(const Polynomial& p);
Polynomial polynomial_from_json(const json& j);

// {"n":2,"constraints":[<Polynomial>...]}
json to_json(const SemialgebraicSet& X);

// Either explicit constraints or a named fixture such as
// {"fixture":"exampleE","c":0.9,"r":0.4}. `overrides` replaces fixture
// parameters (c, r, radius, half_width).
SemialgebraicSet set_from_json(const json& j, const json& overrides = json::object());
SemialgebraicSet named_fixture(const std::string& name, const json& params = json::object());
SemialgebraicSet load_set(const std::string& path, const json& overrides = json::object());

json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

json to_json(const sos::Certificate& c, bool with_blocks = false);
json to_json(const ApproximationResult& r);
json to_json(const Polytope& K);
json to_json(const VolumeEstimate& v);
json to_json(const conic::FarkasCertificate& f);

// 9 significant digits, shortest form.
std::string fmt9(double v);

struct Segment {
  double x0, y0, x1, y1;
};

// Zero level of `field` on a resolution x resolution grid over the square
// [-half_width, half_width]^2, one segment per crossed cell.
std::vector<Segment> marching_squares(const std::function<double(double, double)>& field, double half_width,
                                      int resolution = 512);

struct SvgLayer {
  std::string stroke;
  std::vector<Segment> segments;
  std::vector<std::vector<double>> polygon;  // closed, drawn after segments
  std::string fill = "none";
};

std::string render_svg(const std::vector<SvgLayer>& layers, double half_width, int pixels = 512);

// Contours of X's boundary, {f = 1} and {f(x/s) = 1}.
std::string approximation_svg(const SemialgebraicSet& X, const Polynomial& f, double s, double half_width,
                              int resolution = 512);
// X's boundary plus a polytope outline.
std::string kernel_svg(const SemialgebraicSet& X, const Polytope& K, double half_width, int resolution = 512);

}  // namespace starsos::io
