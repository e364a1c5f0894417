#pragma once

// Sparse multivariate polynomials with real coefficients.
//
// Terms are kept in graded-lexicographic order (degree first, then the
// exponent of x1 descending, then x2, ...). Only exact zero coefficients are
// pruned, so arithmetic never drops small terms silently.

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace starsos {

class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(std::vector<int> exponents);

  static Monomial one(std::size_t n) { return Monomial(std::vector<int>(n, 0)); }
  static Monomial variable(std::size_t n, std::size_t j);

  std::size_t dim() const { return exps_.size(); }
  int degree() const { return degree_; }
  int operator[](std::size_t j) const { return exps_[j]; }
  const std::vector<int>& exponents() const { return exps_; }

  Monomial operator*(const Monomial& other) const;
  double eval(std::span<const double> x) const;
  std::string to_string() const;

  friend bool operator==(const Monomial& a, const Monomial& b) { return a.exps_ == b.exps_; }

 private:
  std::vector<int> exps_;
  int degree_ = 0;
};

// Strict weak order: total degree ascending, then exponents lexicographically
// descending, so x1 precedes x2 and x1^2 precedes x1*x2.
struct GradedLex {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

class Polynomial {
 public:
  using TermMap = std::map<Monomial, double, GradedLex>;

  explicit Polynomial(std::size_t n = 0) : n_(n) {}

  static Polynomial constant(std::size_t n, double c);
  static Polynomial variable(std::size_t n, std::size_t j);
  // Convenience for literals: {{{2, 0}, 1.0}, {{1, 1}, 2.0}} is x1^2 + 2 x1 x2.
  static Polynomial from_terms(std::size_t n,
                               const std::vector<std::pair<std::vector<int>, double>>& terms);

  std::size_t dim() const { return n_; }
  int degree() const;
  bool is_zero() const { return terms_.empty(); }
  const TermMap& terms() const { return terms_; }
  double coefficient(const Monomial& m) const;

  // Adds c to the coefficient of m; an exact zero result removes the term.
  void add_term(const Monomial& m, double c);

  double operator()(std::span<const double> x) const;

  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial& operator*=(double c);

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, double c) { return a *= c; }
  friend Polynomial operator*(double c, Polynomial a) { return a *= c; }
  friend Polynomial operator-(Polynomial a) { return a *= -1.0; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.n_ == b.n_ && a.terms_ == b.terms_;
  }

  std::string to_string() const;

 private:
  void check_same_dim(const Polynomial& other) const;

  std::size_t n_;
  TermMap terms_;
};

// Throws InputError when x.size() != p.dim().
double eval(const Polynomial& p, std::span<const double> x);

Polynomial derivative(const Polynomial& p, std::size_t j);
std::vector<Polynomial> gradient(const Polynomial& p);

// q(x) = p(x / s): every coefficient is divided by s^degree. Requires s > 0.
Polynomial substitute_scale(const Polynomial& p, double s);

// q(x) = p(x - t), expanded to canonical form.
Polynomial translate(const Polynomial& p, std::span<const double> t);

// All monomials in n variables of degree <= d, graded-lex ordered;
// there are C(n + d, d) of them.
std::vector<Monomial> monomial_basis(std::size_t n, int d);

// Exact integral of p over the axis-aligned box.
double integrate_over_box(const Polynomial& p, std::span<const Interval> box);

// Coefficients a_k (ascending powers) of t -> p(origin + t * dir).
std::vector<double> restrict_to_line(const Polynomial& p, std::span<const double> origin,
                                     std::span<const double> dir);

// Horner evaluation of a univariate coefficient vector.
double eval_univariate(std::span<const double> coeffs, double t);

// max_m |coef_a(m) - coef_b(m)| over the union of supports.
double max_coefficient_difference(const Polynomial& a, const Polynomial& b);

}  // namespace starsos
