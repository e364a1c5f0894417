#pragma once

// Volumes (polar integration for star-shaped regions, grid indicator sums),
// percent error, sublevel-set radii, Hausdorff distance of a scaled convex
// set, sampled support functions and the per-run CSV table.

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "starsos/poly.hpp"
#include "starsos/semialg.hpp"

namespace starsos {

using Region = std::function<bool(std::span<const double>)>;

Region set_region(const SemialgebraicSet& X, double tol = 0.0);
// {x : f(x / scale) <= 1}
Region sublevel_region(const Polynomial& f, double scale = 1.0);

enum class VolumeMethod { Polar, Grid };

struct VolumeEstimate {
  double value = 0.0;
  VolumeMethod method = VolumeMethod::Grid;
  long resolution = 0;
  double error_bound = 0.0;  // heuristic, never used for pass/fail
};

std::string to_string(VolumeMethod m);

// Radius where the ray center + t dir leaves the region, assuming one crossing.
// Throws InputError when the ray is still inside at t_cap.
double ray_exit_radius(const Region& region, std::span<const double> center, std::span<const double> dir,
                       double t_cap = 1073741824.0, double rel_tol = 1e-13);

// Polar integration about `center`. 2D uses a uniform angle grid with
// `resolution` nodes; higher dimensions average R^n / n over `resolution`
// quasi-uniform directions times the sphere area.
VolumeEstimate volume_star(const Region& region, std::span<const double> center, long resolution = 10000);

// Cell-center indicator sum over a box with `resolution` cells per axis.
VolumeEstimate volume_grid(const Region& region, const std::vector<Interval>& box, long resolution = 2000);

double percent_error(double vol_approx, double vol_true);

// max ||x|| over {f <= 1}, by ray bisection from the origin.
double max_norm_sublevel(const Polynomial& f, long resolution = 3600);
// (s - 1) * max_norm_sublevel(f)
double hausdorff_scaled(const Polynomial& f, double s, long resolution = 3600);

// max c^T x over the boundary of a region star-shaped about the origin.
double support_function(const Region& region, std::span<const double> c, long resolution = 3600);

// Quasi-uniform unit directions: angles in 2D, Fibonacci sphere in 3D, seeded
// Gaussian draws beyond.
std::vector<std::vector<double>> sphere_directions(std::size_t n, long count);

struct TableRow {
  std::string example;
  int degree = 0;
  std::string objective;
  double s_star = 0.0;
  double s_lb = 0.0;
  double vol_inner = 0.0;
  double vol_outer = 0.0;
  double percent_error = 0.0;
  std::string status = "ok";
};

void write_table_csv(const std::vector<TableRow>& rows, std::ostream& os);

}  // namespace starsos
