#pragma once

// Sum-of-squares constraints compiled to conic form. A polynomial p is SOS iff
// p = z(x)^T P z(x) for some PSD Gram matrix P over a monomial vector z(x).

#include <Eigen/Dense>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "starsos/conic.hpp"
#include "starsos/poly.hpp"

namespace starsos::sos {

// A decision variable: scalar `i` when block < 0, otherwise Gram entry
// (i, j), i <= j, of PSD block `block`.
struct VarKey {
  long block = -1;
  std::size_t i = 0;
  std::size_t j = 0;

  friend auto operator<=>(const VarKey&, const VarKey&) = default;
};

struct LinExpr {
  double constant = 0.0;
  std::map<VarKey, double> coefs;

  bool is_zero() const;
  LinExpr& operator+=(const LinExpr& o);
  LinExpr& operator*=(double c);
  double value(const conic::ConicSolution& sol) const;
};

// Polynomial whose coefficients are affine in the decision variables.
class AffinePoly {
 public:
  using TermMap = std::map<Monomial, LinExpr, GradedLex>;

  explicit AffinePoly(std::size_t n = 0) : n_(n) {}
  AffinePoly(const Polynomial& p);  // NOLINT: constants embed implicitly

  std::size_t dim() const { return n_; }
  // Largest degree carrying a nonzero constant or variable coefficient.
  int degree() const;
  const TermMap& terms() const { return terms_; }
  void add(const Monomial& m, const LinExpr& e);

  AffinePoly& operator+=(const AffinePoly& o);
  AffinePoly& operator-=(const AffinePoly& o);
  AffinePoly& operator*=(double c);
  friend AffinePoly operator+(AffinePoly a, const AffinePoly& b) { return a += b; }
  friend AffinePoly operator-(AffinePoly a, const AffinePoly& b) { return a -= b; }
  friend AffinePoly operator*(AffinePoly a, double c) { return a *= c; }
  friend AffinePoly operator*(const AffinePoly& a, const Polynomial& p);
  friend AffinePoly operator*(const Polynomial& p, const AffinePoly& a) { return a * p; }

  Polynomial value(const conic::ConicSolution& sol) const;

 private:
  std::size_t n_;
  TermMap terms_;
};

struct GramBlock {
  std::vector<Monomial> basis;
  std::size_t block = 0;

  // z^T P z with P the block's matrix variable.
  AffinePoly polynomial() const;
};

// monomial_basis(n, even_degree / 2); odd degrees throw InputError.
std::vector<Monomial> gram_basis_for(std::size_t n, int even_degree);

// One equality per monomial present in expr or in z z^T.
std::vector<conic::LinearRow> compile_sos_equal(const AffinePoly& expr, const GramBlock& gram);

struct SosIdentity {
  std::string label;
  AffinePoly expr;
  GramBlock gram;
};

// Builder for SOS programs in n variables.
class SosProgram {
 public:
  explicit SosProgram(std::size_t n) : n_(n) {}

  std::size_t dim() const { return n_; }
  conic::ConicProblem& problem() { return problem_; }
  const conic::ConicProblem& problem() const { return problem_; }
  const std::vector<SosIdentity>& identities() const { return identities_; }
  const std::vector<SosIdentity>& multipliers() const { return multipliers_; }

  LinExpr scalar();
  // Free coefficients on every monomial of degree <= degree.
  AffinePoly free_polynomial(int degree);
  // SOS polynomial of the given even degree, parameterized by a fresh Gram block.
  AffinePoly sos_polynomial(int even_degree, const std::string& label);
  // expr in SOS: adds a Gram block sized for expr's degree rounded up to even.
  void constrain_sos(const AffinePoly& expr, const std::string& label);
  void constrain_zero(const AffinePoly& expr);
  void add_inequality(const LinExpr& lhs, double rhs);  // lhs <= rhs
  void set_objective(const LinExpr& obj);

  conic::ConicSolution solve(const conic::SolverOptions& opts = {}) const;

 private:
  GramBlock new_gram(std::vector<Monomial> basis);

  std::size_t n_;
  conic::ConicProblem problem_;
  std::vector<SosIdentity> identities_;
  std::vector<SosIdentity> multipliers_;
};

struct CertificateBlock {
  std::string label;
  Polynomial target;  // the polynomial that must equal z^T P z
  std::vector<Monomial> basis;
  Eigen::MatrixXd gram;
};

struct Certificate {
  std::map<std::string, Polynomial> polynomials;
  std::vector<CertificateBlock> blocks;
  double residual = 0.0;
  double min_eig = 0.0;
  bool valid = false;
};

struct SosCheck {
  double residual = 0.0;
  double min_eig = 0.0;
  bool valid = false;
};

inline constexpr double kCertTol = 1e-6;
inline constexpr double kPsdTol = 1e-7;

// z^T P z expanded.
Polynomial gram_polynomial(const std::vector<Monomial>& basis, const Eigen::MatrixXd& P);

// Recomputes every identity target - z^T P z and every Gram spectrum, and
// stores the results in cert.
SosCheck verify_certificate(Certificate& cert, double cert_tol = kCertTol, double psd_tol = kPsdTol);

// Gram blocks of all identities and multipliers with targets evaluated at sol.
Certificate extract_certificate(const SosProgram& prog, const conic::ConicSolution& sol);

// Debug dump of the equality system: one CSV line per row with its rhs and
// "var:coef" cells, where var is s<k> or b<block>_<i>_<j>.
void write_equality_csv(const conic::ConicProblem& problem, std::ostream& os);

}  // namespace starsos::sos
