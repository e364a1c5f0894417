#include "starsos/poly.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "starsos/error.hpp"

namespace starsos {

Monomial::Monomial(std::vector<int> exponents) : exps_(std::move(exponents)) {
  for (int e : exps_) {
    if (e < 0) throw InputError("monomial exponents must be non-negative");
  }
  degree_ = std::accumulate(exps_.begin(), exps_.end(), 0);
}

Monomial Monomial::variable(std::size_t n, std::size_t j) {
  std::vector<int> e(n, 0);
  e.at(j) = 1;
  return Monomial(std::move(e));
}

Monomial Monomial::operator*(const Monomial& other) const {
  if (dim() != other.dim()) throw InputError("monomial dimension mismatch");
  std::vector<int> e(exps_);
  for (std::size_t j = 0; j < e.size(); ++j) e[j] += other.exps_[j];
  return Monomial(std::move(e));
}

double Monomial::eval(std::span<const double> x) const {
  double v = 1.0;
  for (std::size_t j = 0; j < exps_.size(); ++j) {
    for (int k = 0; k < exps_[j]; ++k) v *= x[j];
  }
  return v;
}

std::string Monomial::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (std::size_t j = 0; j < exps_.size(); ++j) {
    if (exps_[j] == 0) continue;
    if (!first) os << '*';
    os << 'x' << (j + 1);
    if (exps_[j] > 1) os << '^' << exps_[j];
    first = false;
  }
  if (first) os << '1';
  return os.str();
}

bool GradedLex::operator()(const Monomial& a, const Monomial& b) const {
  if (a.degree() != b.degree()) return a.degree() < b.degree();
  const auto& ea = a.exponents();
  const auto& eb = b.exponents();
  return std::lexicographical_compare(ea.begin(), ea.end(), eb.begin(), eb.end(),
                                      std::greater<int>());
}

Polynomial Polynomial::constant(std::size_t n, double c) {
  Polynomial p(n);
  p.add_term(Monomial::one(n), c);
  return p;
}

Polynomial Polynomial::variable(std::size_t n, std::size_t j) {
  Polynomial p(n);
  p.add_term(Monomial::variable(n, j), 1.0);
  return p;
}

Polynomial Polynomial::from_terms(std::size_t n,
                                  const std::vector<std::pair<std::vector<int>, double>>& terms) {
  Polynomial p(n);
  for (const auto& [exps, c] : terms) {
    if (exps.size() != n) throw InputError("term exponent list length differs from dimension");
    p.add_term(Monomial(exps), c);
  }
  return p;
}

int Polynomial::degree() const {
  // Terms are graded, so the last one has maximal degree.
  return terms_.empty() ? 0 : terms_.rbegin()->first.degree();
}

double Polynomial::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? 0.0 : it->second;
}

void Polynomial::add_term(const Monomial& m, double c) {
  if (m.dim() != n_) throw InputError("monomial dimension differs from polynomial dimension");
  if (c == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

double Polynomial::operator()(std::span<const double> x) const { return eval(*this, x); }

void Polynomial::check_same_dim(const Polynomial& other) const {
  if (n_ != other.n_) throw InputError("polynomial dimension mismatch");
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  check_same_dim(other);
  for (const auto& [m, c] : other.terms_) add_term(m, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  check_same_dim(other);
  for (const auto& [m, c] : other.terms_) add_term(m, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(double c) {
  if (c == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto it = terms_.begin(); it != terms_.end();) {
    it->second *= c;
    // Underflow to zero is the only way a nonzero product vanishes.
    if (it->second == 0.0) {
      it = terms_.erase(it);
    } else {
      ++it;
    }
  }
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  a.check_same_dim(b);
  Polynomial out(a.n_);
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) out.add_term(ma * mb, ca * cb);
  }
  return out;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  os.precision(12);
  bool first = true;
  for (const auto& [m, c] : terms_) {
    if (!first) os << (c < 0 ? " - " : " + ");
    else if (c < 0) os << '-';
    os << std::abs(c);
    if (m.degree() > 0) os << '*' << m.to_string();
    first = false;
  }
  return os.str();
}

double eval(const Polynomial& p, std::span<const double> x) {
  if (x.size() != p.dim()) throw InputError("evaluation point has wrong dimension");
  double v = 0.0;
  for (const auto& [m, c] : p.terms()) v += c * m.eval(x);
  return v;
}

Polynomial derivative(const Polynomial& p, std::size_t j) {
  if (j >= p.dim()) throw InputError("derivative index out of range");
  Polynomial d(p.dim());
  for (const auto& [m, c] : p.terms()) {
    if (m[j] == 0) continue;
    std::vector<int> e = m.exponents();
    const int k = e[j]--;
    d.add_term(Monomial(std::move(e)), c * k);
  }
  return d;
}

std::vector<Polynomial> gradient(const Polynomial& p) {
  std::vector<Polynomial> g;
  g.reserve(p.dim());
  for (std::size_t j = 0; j < p.dim(); ++j) g.push_back(derivative(p, j));
  return g;
}

Polynomial substitute_scale(const Polynomial& p, double s) {
  if (!(s > 0.0)) throw InputError("scale factor must be positive");
  Polynomial q(p.dim());
  for (const auto& [m, c] : p.terms()) q.add_term(m, c / std::pow(s, m.degree()));
  return q;
}

namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

Polynomial translate(const Polynomial& p, std::span<const double> t) {
  const std::size_t n = p.dim();
  if (t.size() != n) throw InputError("translation vector has wrong dimension");
  Polynomial out(n);
  for (const auto& [m, c] : p.terms()) {
    // prod_j (x_j - t_j)^{e_j}, expanded one variable at a time.
    Polynomial term = Polynomial::constant(n, c);
    for (std::size_t j = 0; j < n; ++j) {
      const int e = m[j];
      if (e == 0) continue;
      Polynomial factor(n);
      for (int k = 0; k <= e; ++k) {
        std::vector<int> ex(n, 0);
        ex[j] = k;
        factor.add_term(Monomial(std::move(ex)), binomial(e, k) * std::pow(-t[j], e - k));
      }
      term = term * factor;
    }
    out += term;
  }
  return out;
}

namespace {

// Exponent vectors of total degree exactly d over variables [j, n), with the
// leading exponent descending.
void homogeneous(std::size_t n, std::size_t j, int d, std::vector<int>& cur,
                 std::vector<Monomial>& out) {
  if (j + 1 == n) {
    cur[j] = d;
    out.emplace_back(cur);
    cur[j] = 0;
    return;
  }
  for (int k = d; k >= 0; --k) {
    cur[j] = k;
    homogeneous(n, j + 1, d - k, cur, out);
  }
  cur[j] = 0;
}

}  // namespace

std::vector<Monomial> monomial_basis(std::size_t n, int d) {
  if (n < 1) throw InputError("monomial basis needs at least one variable");
  if (d < 0) throw InputError("monomial basis degree must be non-negative");
  std::vector<Monomial> out;
  std::vector<int> cur(n, 0);
  for (int k = 0; k <= d; ++k) homogeneous(n, 0, k, cur, out);
  return out;
}

double integrate_over_box(const Polynomial& p, std::span<const Interval> box) {
  if (box.size() != p.dim()) throw InputError("box has wrong dimension");
  for (const auto& iv : box) {
    if (!(iv.lo < iv.hi)) throw InputError("degenerate integration box");
  }
  double total = 0.0;
  for (const auto& [m, c] : p.terms()) {
    double v = c;
    for (std::size_t j = 0; j < box.size(); ++j) {
      const int e = m[j] + 1;
      v *= (std::pow(box[j].hi, e) - std::pow(box[j].lo, e)) / e;
    }
    total += v;
  }
  return total;
}

std::vector<double> restrict_to_line(const Polynomial& p, std::span<const double> origin,
                                     std::span<const double> dir) {
  const std::size_t n = p.dim();
  if (origin.size() != n || dir.size() != n) throw InputError("line has wrong dimension");
  std::vector<double> out(static_cast<std::size_t>(p.degree()) + 1, 0.0);
  for (const auto& [m, c] : p.terms()) {
    // prod_j (o_j + t d_j)^{e_j} as a univariate polynomial in t.
    std::vector<double> acc{c};
    for (std::size_t j = 0; j < n; ++j) {
      for (int k = 0; k < m[j]; ++k) {
        std::vector<double> next(acc.size() + 1, 0.0);
        for (std::size_t a = 0; a < acc.size(); ++a) {
          next[a] += acc[a] * origin[j];
          next[a + 1] += acc[a] * dir[j];
        }
        acc = std::move(next);
      }
    }
    for (std::size_t a = 0; a < acc.size(); ++a) out[a] += acc[a];
  }
  return out;
}

double eval_univariate(std::span<const double> coeffs, double t) {
  double v = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) v = v * t + *it;
  return v;
}

double max_coefficient_difference(const Polynomial& a, const Polynomial& b) {
  const Polynomial d = a - b;
  double worst = 0.0;
  for (const auto& [m, c] : d.terms()) worst = std::max(worst, std::abs(c));
  return worst;
}

}  // namespace starsos
