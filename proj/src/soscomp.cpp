#include "starsos/soscomp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "starsos/error.hpp"

namespace starsos::sos {

bool LinExpr::is_zero() const {
  if (constant != 0.0) return false;
  return std::all_of(coefs.begin(), coefs.end(), [](const auto& kv) { return kv.second == 0.0; });
}

LinExpr& LinExpr::operator+=(const LinExpr& o) {
  constant += o.constant;
  for (const auto& [k, c] : o.coefs) {
    auto [it, inserted] = coefs.try_emplace(k, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0.0) coefs.erase(it);
    }
  }
  return *this;
}

LinExpr& LinExpr::operator*=(double c) {
  constant *= c;
  if (c == 0.0) {
    coefs.clear();
    return *this;
  }
  for (auto& kv : coefs) kv.second *= c;
  return *this;
}

double LinExpr::value(const conic::ConicSolution& sol) const {
  double v = constant;
  for (const auto& [k, c] : coefs) {
    if (k.block < 0) {
      v += c * sol.scalars.at(k.i);
    } else {
      v += c * sol.blocks.at(static_cast<std::size_t>(k.block))(static_cast<Eigen::Index>(k.i),
                                                               static_cast<Eigen::Index>(k.j));
    }
  }
  return v;
}

AffinePoly::AffinePoly(const Polynomial& p) : n_(p.dim()) {
  for (const auto& [m, c] : p.terms()) terms_[m].constant = c;
}

int AffinePoly::degree() const {
  int d = 0;
  for (const auto& [m, e] : terms_) {
    if (!e.is_zero()) d = std::max(d, m.degree());
  }
  return d;
}

void AffinePoly::add(const Monomial& m, const LinExpr& e) {
  if (m.dim() != n_) throw InputError("monomial dimension differs from polynomial dimension");
  terms_[m] += e;
}

AffinePoly& AffinePoly::operator+=(const AffinePoly& o) {
  if (o.n_ != n_) throw InputError("polynomial dimension mismatch");
  for (const auto& [m, e] : o.terms_) terms_[m] += e;
  return *this;
}

AffinePoly& AffinePoly::operator-=(const AffinePoly& o) {
  if (o.n_ != n_) throw InputError("polynomial dimension mismatch");
  for (const auto& [m, e] : o.terms_) {
    LinExpr neg = e;
    neg *= -1.0;
    terms_[m] += neg;
  }
  return *this;
}

AffinePoly& AffinePoly::operator*=(double c) {
  for (auto& kv : terms_) kv.second *= c;
  return *this;
}

AffinePoly operator*(const AffinePoly& a, const Polynomial& p) {
  if (a.n_ != p.dim()) throw InputError("polynomial dimension mismatch");
  AffinePoly out(a.n_);
  for (const auto& [ma, ea] : a.terms_) {
    for (const auto& [mp, cp] : p.terms()) {
      LinExpr e = ea;
      e *= cp;
      out.terms_[ma * mp] += e;
    }
  }
  return out;
}

Polynomial AffinePoly::value(const conic::ConicSolution& sol) const {
  Polynomial p(n_);
  for (const auto& [m, e] : terms_) p.add_term(m, e.value(sol));
  return p;
}

AffinePoly GramBlock::polynomial() const {
  const std::size_t n = basis.empty() ? 0 : basis.front().dim();
  AffinePoly out(n);
  for (std::size_t a = 0; a < basis.size(); ++a) {
    for (std::size_t b = a; b < basis.size(); ++b) {
      LinExpr e;
      e.coefs[{static_cast<long>(block), a, b}] = a == b ? 1.0 : 2.0;
      out.add(basis[a] * basis[b], e);
    }
  }
  return out;
}

std::vector<Monomial> gram_basis_for(std::size_t n, int even_degree) {
  if (even_degree < 0 || even_degree % 2 != 0) throw InputError("Gram basis needs an even, non-negative degree");
  return monomial_basis(n, even_degree / 2);
}

namespace {

conic::LinearRow row_from(const LinExpr& e, double rhs) {
  conic::LinearRow r;
  for (const auto& [k, c] : e.coefs) {
    if (c == 0.0) continue;
    if (k.block < 0) {
      r.scalars.emplace_back(k.i, c);
    } else {
      r.entries.push_back({static_cast<std::size_t>(k.block), k.i, k.j, c});
    }
  }
  r.rhs = rhs;
  return r;
}

}  // namespace

std::vector<conic::LinearRow> compile_sos_equal(const AffinePoly& expr, const GramBlock& gram) {
  const int cap = gram.basis.empty() ? 0 : 2 * gram.basis.back().degree();
  if (expr.degree() > cap) throw InputError("SOS target degree exceeds Gram basis capacity");
  // target - z^T P z == 0, coefficientwise.
  AffinePoly diff = expr;
  diff -= gram.polynomial();
  std::vector<conic::LinearRow> rows;
  for (const auto& [m, e] : diff.terms()) {
    if (e.coefs.empty() && e.constant == 0.0) continue;
    LinExpr lhs = e;
    const double rhs = -lhs.constant;
    lhs.constant = 0.0;
    rows.push_back(row_from(lhs, rhs));
  }
  return rows;
}

LinExpr SosProgram::scalar() {
  LinExpr e;
  e.coefs[{-1, problem_.add_scalar(), 0}] = 1.0;
  return e;
}

AffinePoly SosProgram::free_polynomial(int degree) {
  if (degree < 0) throw InputError("polynomial degree must be non-negative");
  AffinePoly p(n_);
  for (const auto& m : monomial_basis(n_, degree)) p.add(m, scalar());
  return p;
}

GramBlock SosProgram::new_gram(std::vector<Monomial> basis) {
  GramBlock g;
  g.block = problem_.add_block(basis.size());
  g.basis = std::move(basis);
  return g;
}

AffinePoly SosProgram::sos_polynomial(int even_degree, const std::string& label) {
  GramBlock g = new_gram(gram_basis_for(n_, even_degree));
  AffinePoly p = g.polynomial();
  multipliers_.push_back({label, p, g});
  return p;
}

void SosProgram::constrain_sos(const AffinePoly& expr, const std::string& label) {
  if (expr.dim() != n_) throw InputError("polynomial dimension mismatch");
  const int d = expr.degree();
  GramBlock g = new_gram(gram_basis_for(n_, d + (d % 2)));
  for (auto& row : compile_sos_equal(expr, g)) problem_.equalities.push_back(std::move(row));
  identities_.push_back({label, expr, g});
}

void SosProgram::constrain_zero(const AffinePoly& expr) {
  for (const auto& [m, e] : expr.terms()) {
    if (e.coefs.empty()) {
      if (e.constant != 0.0) throw InputError("constant identity cannot hold");
      continue;
    }
    LinExpr lhs = e;
    const double rhs = -lhs.constant;
    lhs.constant = 0.0;
    problem_.equalities.push_back(row_from(lhs, rhs));
  }
}

void SosProgram::add_inequality(const LinExpr& lhs, double rhs) {
  problem_.inequalities.push_back(row_from(lhs, rhs - lhs.constant));
}

void SosProgram::set_objective(const LinExpr& obj) { problem_.objective = row_from(obj, 0.0); }

conic::ConicSolution SosProgram::solve(const conic::SolverOptions& opts) const {
  return conic::solve(problem_, opts);
}

Polynomial gram_polynomial(const std::vector<Monomial>& basis, const Eigen::MatrixXd& P) {
  const std::size_t n = basis.empty() ? 0 : basis.front().dim();
  Polynomial out(n);
  for (std::size_t a = 0; a < basis.size(); ++a) {
    for (std::size_t b = 0; b < basis.size(); ++b) {
      out.add_term(basis[a] * basis[b], P(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)));
    }
  }
  return out;
}

SosCheck verify_certificate(Certificate& cert, double cert_tol, double psd_tol) {
  double residual = 0.0;
  double min_eig = std::numeric_limits<double>::infinity();
  bool finite = true;
  for (const auto& blk : cert.blocks) {
    finite = finite && blk.gram.allFinite();
    for (const auto& [m, c] : blk.target.terms()) finite = finite && std::isfinite(c);
    if (!finite) break;
    residual = std::max(residual, max_coefficient_difference(blk.target, gram_polynomial(blk.basis, blk.gram)));
    if (blk.gram.size() > 0) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (blk.gram + blk.gram.transpose()),
                                                        Eigen::EigenvaluesOnly);
      min_eig = std::min(min_eig, es.eigenvalues()(0));
    }
  }
  if (!std::isfinite(min_eig)) min_eig = 0.0;
  if (!finite) {
    residual = std::numeric_limits<double>::infinity();
    min_eig = -std::numeric_limits<double>::infinity();
  }
  cert.residual = residual;
  cert.min_eig = min_eig;
  cert.valid = finite && residual <= cert_tol && min_eig >= -psd_tol;
  return {cert.residual, cert.min_eig, cert.valid};
}

Certificate extract_certificate(const SosProgram& prog, const conic::ConicSolution& sol) {
  Certificate cert;
  auto add = [&](const SosIdentity& id) {
    cert.blocks.push_back({id.label, id.expr.value(sol), id.gram.basis, sol.blocks.at(id.gram.block)});
  };
  for (const auto& id : prog.multipliers()) add(id);
  for (const auto& id : prog.identities()) add(id);
  verify_certificate(cert);
  return cert;
}

void write_equality_csv(const conic::ConicProblem& problem, std::ostream& os) {
  os << "row,rhs,terms\n";
  os.precision(17);
  for (std::size_t k = 0; k < problem.equalities.size(); ++k) {
    const auto& r = problem.equalities[k];
    os << k << ',' << r.rhs << ',';
    bool first = true;
    for (const auto& [i, c] : r.scalars) {
      os << (first ? "" : " ") << 's' << i << ':' << c;
      first = false;
    }
    for (const auto& e : r.entries) {
      os << (first ? "" : " ") << 'b' << e.block << '_' << e.i << '_' << e.j << ':' << e.coef;
      first = false;
    }
    os << '\n';
  }
}

}  // namespace starsos::sos
