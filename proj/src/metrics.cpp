#include "starsos/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "starsos/error.hpp"

namespace starsos {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double sphere_area(std::size_t n) {
  const double h = 0.5 * static_cast<double>(n);
  return 2.0 * std::pow(std::numbers::pi, h) / std::tgamma(h);
}

std::vector<double> unit(double th) { return {std::cos(th), std::sin(th)}; }

// Golden-section refinement of a unimodal peak of g on [a, b].
double refine_peak(const std::function<double(double)>& g, double a, double b) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - r * (b - a);
  double d = a + r * (b - a);
  double gc = g(c);
  double gd = g(d);
  for (int k = 0; k < 80 && b - a > 1e-13; ++k) {
    if (gc > gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - r * (b - a);
      gc = g(c);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + r * (b - a);
      gd = g(d);
    }
  }
  return std::max(gc, gd);
}

// Max of g over the directions; in 2D the best angle is polished locally.
double sweep_max(std::size_t n, long resolution, const std::function<double(const std::vector<double>&)>& g) {
  if (resolution < 1) throw InputError("resolution must be positive");
  const auto dirs = sphere_directions(n, resolution);
  double best = -INFINITY;
  std::size_t arg = 0;
  for (std::size_t k = 0; k < dirs.size(); ++k) {
    const double v = g(dirs[k]);
    if (v > best) {
      best = v;
      arg = k;
    }
  }
  if (n == 2) {
    const double step = kTwoPi / static_cast<double>(resolution);
    const double th = kTwoPi * static_cast<double>(arg) / static_cast<double>(resolution);
    best = std::max(best, refine_peak([&](double t) { return g(unit(t)); }, th - step, th + step));
  }
  return best;
}

}  // namespace

Region set_region(const SemialgebraicSet& X, double tol) {
  return [X, tol](std::span<const double> x) { return X.max_value(x) <= 1.0 + tol; };
}

Region sublevel_region(const Polynomial& f, double scale) {
  if (!(scale > 0.0)) throw InputError("scale must be positive");
  const Polynomial g = scale == 1.0 ? f : substitute_scale(f, scale);
  return [g](std::span<const double> x) { return eval(g, x) <= 1.0; };
}

std::string to_string(VolumeMethod m) { return m == VolumeMethod::Polar ? "polar" : "grid"; }

std::vector<std::vector<double>> sphere_directions(std::size_t n, long count) {
  if (count < 1) throw InputError("direction count must be positive");
  std::vector<std::vector<double>> out;
  out.reserve(static_cast<std::size_t>(count));
  if (n == 1) {
    out.push_back({1.0});
    if (count > 1) out.push_back({-1.0});
  } else if (n == 2) {
    for (long k = 0; k < count; ++k) out.push_back(unit(kTwoPi * static_cast<double>(k) / static_cast<double>(count)));
  } else if (n == 3) {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (long k = 0; k < count; ++k) {
      const double z = 1.0 - 2.0 * (static_cast<double>(k) + 0.5) / static_cast<double>(count);
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      out.push_back({r * std::cos(golden * static_cast<double>(k)), r * std::sin(golden * static_cast<double>(k)), z});
    }
  } else {
    std::mt19937_64 rng(0x5eed);
    for (long k = 0; k < count; ++k) out.push_back(random_unit_vector(rng, n));
  }
  return out;
}

double ray_exit_radius(const Region& region, std::span<const double> center, std::span<const double> dir,
                       double t_cap, double rel_tol) {
  const std::size_t n = center.size();
  std::vector<double> x(n);
  auto inside = [&](double t) {
    for (std::size_t j = 0; j < n; ++j) x[j] = center[j] + t * dir[j];
    return region(x);
  };
  if (!inside(0.0)) throw InputError("ray origin lies outside the region");
  double lo = 0.0;
  double hi = 1.0;
  while (inside(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > t_cap) throw InputError("ray never leaves the region; it looks unbounded");
  }
  while (hi - lo > rel_tol * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (inside(mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

VolumeEstimate volume_star(const Region& region, std::span<const double> center, long resolution) {
  if (resolution < 3) throw InputError("polar resolution must be at least 3");
  const std::size_t n = center.size();
  if (n < 1) throw InputError("center must have positive dimension");
  VolumeEstimate est;
  est.method = VolumeMethod::Polar;
  est.resolution = resolution;
  if (n == 2) {
    // Periodic trapezoid rule: the plain mean of R^2 / 2 times 2 pi.
    std::vector<double> r2(static_cast<std::size_t>(resolution));
    for (long k = 0; k < resolution; ++k) {
      const auto d = unit(kTwoPi * static_cast<double>(k) / static_cast<double>(resolution));
      const double R = ray_exit_radius(region, center, d);
      r2[static_cast<std::size_t>(k)] = 0.5 * R * R;
    }
    double sum = 0.0;
    double curv = 0.0;
    for (std::size_t k = 0; k < r2.size(); ++k) {
      sum += r2[k];
      const double prev = r2[(k + r2.size() - 1) % r2.size()];
      const double next = r2[(k + 1) % r2.size()];
      curv += std::abs(prev - 2.0 * r2[k] + next);
    }
    const double h = kTwoPi / static_cast<double>(resolution);
    est.value = sum * h;
    est.error_bound = curv * h / 12.0;
    return est;
  }
  const auto dirs = sphere_directions(n, resolution);
  double sum = 0.0;
  double sum2 = 0.0;
  for (const auto& d : dirs) {
    const double v = std::pow(ray_exit_radius(region, center, d), static_cast<double>(n)) / static_cast<double>(n);
    sum += v;
    sum2 += v * v;
  }
  const double N = static_cast<double>(dirs.size());
  const double mean = sum / N;
  const double var = std::max(0.0, sum2 / N - mean * mean);
  est.value = mean * sphere_area(n);
  est.error_bound = std::sqrt(var / N) * sphere_area(n);
  return est;
}

VolumeEstimate volume_grid(const Region& region, const std::vector<Interval>& box, long resolution) {
  if (resolution < 1) throw InputError("grid resolution must be positive");
  if (box.empty()) throw InputError("grid box must have positive dimension");
  for (const auto& iv : box) {
    if (!(iv.lo < iv.hi) || !std::isfinite(iv.lo) || !std::isfinite(iv.hi)) throw InputError("grid box must be bounded");
  }
  const std::size_t n = box.size();
  std::vector<double> h(n);
  double cell = 1.0;
  for (std::size_t j = 0; j < n; ++j) {
    h[j] = (box[j].hi - box[j].lo) / static_cast<double>(resolution);
    cell *= h[j];
  }
  std::vector<long> idx(n, 0);
  std::vector<double> x(n);
  long count = 0;
  long transitions = 0;
  bool prev = false;
  // The last axis varies fastest; a transition is counted along it.
  while (true) {
    for (std::size_t j = 0; j < n; ++j) x[j] = box[j].lo + (static_cast<double>(idx[j]) + 0.5) * h[j];
    const bool in = region(x);
    count += in ? 1 : 0;
    if (idx[n - 1] > 0 && in != prev) ++transitions;
    prev = in;
    std::size_t j = n;
    while (j > 0) {
      --j;
      if (++idx[j] < resolution) break;
      idx[j] = 0;
      if (j == 0) {
        VolumeEstimate est;
        est.method = VolumeMethod::Grid;
        est.resolution = resolution;
        est.value = static_cast<double>(count) * cell;
        est.error_bound = static_cast<double>(transitions) * cell;
        return est;
      }
    }
  }
}

double percent_error(double vol_approx, double vol_true) {
  if (!(vol_true > 0.0)) throw InputError("true volume must be positive");
  return 100.0 * (vol_approx - vol_true) / vol_true;
}

double max_norm_sublevel(const Polynomial& f, long resolution) {
  const std::vector<double> origin(f.dim(), 0.0);
  const Region region = sublevel_region(f);
  return sweep_max(f.dim(), resolution, [&](const std::vector<double>& d) {
    return ray_exit_radius(region, origin, d);
  });
}

double hausdorff_scaled(const Polynomial& f, double s, long resolution) {
  if (!(s >= 1.0)) throw InputError("scaling must be at least 1");
  if (s == 1.0) return 0.0;
  return (s - 1.0) * max_norm_sublevel(f, resolution);
}

double support_function(const Region& region, std::span<const double> c, long resolution) {
  const std::size_t n = c.size();
  double len = 0.0;
  for (double v : c) len += v * v;
  if (std::abs(std::sqrt(len) - 1.0) > 1e-9) throw InputError("direction must be a unit vector");
  const std::vector<double> origin(n, 0.0);
  return sweep_max(n, resolution, [&](const std::vector<double>& d) {
    double cd = 0.0;
    for (std::size_t j = 0; j < n; ++j) cd += c[j] * d[j];
    return ray_exit_radius(region, origin, d) * cd;
  });
}

void write_table_csv(const std::vector<TableRow>& rows, std::ostream& os) {
  os << "example,degree,objective,s_star,s_lb,vol_inner,vol_outer,percent_error,status\n";
  std::ostringstream line;
  for (const auto& r : rows) {
    line.str("");
    line.precision(9);
    line << r.example << ',' << r.degree << ',' << r.objective << ',' << r.s_star << ',' << r.s_lb << ','
         << r.vol_inner << ',' << r.vol_outer << ',' << r.percent_error << ',' << r.status << '\n';
    os << line.str();
  }
}

}  // namespace starsos
