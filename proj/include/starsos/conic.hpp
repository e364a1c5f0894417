#pragma once

// Conic programs over free scalars and symmetric PSD blocks with linear
// constraints. Solved by an embedded primal-dual interior-point method
// (HKM direction, Mehrotra predictor-corrector).
//
// Every solve starts with a feasibility phase that minimizes the l1 norm of
// the constraint violation. A zero optimum yields a feasible point; a positive
// optimum yields a Farkas certificate. Problems with an objective are then
// solved from a cold start.

#include <Eigen/Dense>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace starsos::conic {

enum class Status { Optimal, Feasible, Infeasible, Unknown };

std::string to_string(Status s);

// coef * X_block(i, j) with i <= j. An off-diagonal term therefore stands for
// the symmetric pair: the row reads coef * X(i, j), not 2 * coef * X(i, j).
struct EntryTerm {
  std::size_t block;
  std::size_t i;
  std::size_t j;
  double coef;
};

struct LinearRow {
  std::vector<std::pair<std::size_t, double>> scalars;
  std::vector<EntryTerm> entries;
  double rhs = 0.0;

  bool empty() const { return scalars.empty() && entries.empty(); }
};

struct ConicProblem {
  std::size_t num_scalars = 0;
  std::vector<std::size_t> block_sizes;
  std::vector<LinearRow> equalities;    // row . v == rhs
  std::vector<LinearRow> inequalities;  // row . v <= rhs
  LinearRow objective;                  // minimized; empty means feasibility

  std::size_t add_scalar() { return num_scalars++; }
  std::size_t add_block(std::size_t size) {
    block_sizes.push_back(size);
    return block_sizes.size() - 1;
  }
  // Throws InputError on out-of-range references or empty blocks.
  void validate() const;
};

// Multipliers proving { equalities, inequalities, PSD } has no solution:
// the combination sum y_k row_k + sum w_l row_l (w >= 0) has no scalar part
// and a PSD matrix part, while y . b + w . h < 0.
struct FarkasCertificate {
  std::vector<double> equality_multipliers;
  std::vector<double> inequality_multipliers;
};

struct FarkasCheck {
  double margin = 0.0;            // -(y . b + w . h)
  double scalar_violation = 0.0;  // max |scalar coefficient of the combination|
  double psd_violation = 0.0;     // max(0, -min eigenvalue of matrix parts)
  double sign_violation = 0.0;    // max(0, -w)
  bool valid = false;
};

struct ConicSolution {
  Status status = Status::Unknown;
  std::vector<double> scalars;
  std::vector<Eigen::MatrixXd> blocks;
  double primal_residual = INFINITY;
  double min_eigenvalue = 0.0;
  double objective_value = 0.0;
  // Lagrange multipliers of the final phase (objective = dual objective).
  std::vector<double> equality_duals;
  std::vector<double> inequality_duals;  // >= 0
  std::optional<FarkasCertificate> farkas;
  int iterations = 0;
  std::string message;
};

struct SolverOptions {
  double feas_tol = 1e-8;     // absolute constraint residual for Feasible/Optimal
  double infeas_tol = 1e-9;   // minimal Farkas contradiction margin
  double gap_tol = 1e-9;      // relative duality gap for Optimal
  double trace_bound = 1e8;   // sum of block traces is capped at this value
  int max_iterations = 200;
  bool verbose = false;
};

ConicSolution solve(const ConicProblem& problem, const SolverOptions& opts = {});

// Independent re-checks.
double primal_residual(const ConicProblem& problem, const std::vector<double>& scalars,
                       const std::vector<Eigen::MatrixXd>& blocks);
double min_block_eigenvalue(const std::vector<Eigen::MatrixXd>& blocks);
double objective_value(const ConicProblem& problem, const std::vector<double>& scalars,
                       const std::vector<Eigen::MatrixXd>& blocks);
FarkasCheck check_farkas(const ConicProblem& problem, const FarkasCertificate& cert,
                         double infeas_tol = 1e-9, double violation_tol = 1e-9);

// Writes the problem in SDPA sparse format (see README for the mapping).
void write_sdpa(const ConicProblem& problem, std::ostream& os);

}  // namespace starsos::conic
