#include "starsos/conic.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <ostream>

#include "starsos/error.hpp"

namespace starsos::conic {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "Optimal";
    case Status::Feasible: return "Feasible";
    case Status::Infeasible: return "Infeasible";
    case Status::Unknown: return "Unknown";
  }
  return "Unknown";
}

void ConicProblem::validate() const {
  for (std::size_t s : block_sizes) {
    if (s == 0) throw InputError("PSD block sizes must be at least 1");
  }
  auto check_row = [&](const LinearRow& r) {
    for (const auto& [k, c] : r.scalars) {
      if (k >= num_scalars) throw InputError("row references unknown scalar variable");
      if (!std::isfinite(c)) throw InputError("non-finite coefficient");
    }
    for (const auto& e : r.entries) {
      if (e.block >= block_sizes.size()) throw InputError("row references unknown PSD block");
      if (e.i > e.j || e.j >= block_sizes[e.block]) throw InputError("bad PSD entry index");
      if (!std::isfinite(e.coef)) throw InputError("non-finite coefficient");
    }
    if (!std::isfinite(r.rhs)) throw InputError("non-finite right-hand side");
  };
  for (const auto& r : equalities) check_row(r);
  for (const auto& r : inequalities) check_row(r);
  check_row(objective);
}

namespace {

void add_entry(MatrixXd& A, std::size_t i, std::size_t j, double coef) {
  if (i == j) {
    A(i, i) += coef;
  } else {
    A(i, j) += 0.5 * coef;
    A(j, i) += 0.5 * coef;
  }
}

double row_value(const LinearRow& r, const std::vector<double>& scalars,
                 const std::vector<MatrixXd>& blocks) {
  double v = 0.0;
  for (const auto& [k, c] : r.scalars) v += c * scalars[k];
  for (const auto& e : r.entries) v += e.coef * blocks[e.block](e.i, e.j);
  return v;
}

MatrixXd sym(const MatrixXd& A) { return 0.5 * (A + A.transpose()); }

// ---------------------------------------------------------------------------
// Internal standard form:
//   min c_u.u + c_l.x + sum <C_j, X_j>
//   s.t. A_u u + A_l x + sum A_j(X_j) = b,   x >= 0,  X_j PSD,
// where every LP variable appears in exactly one row with coefficient +-1.

struct LpVar {
  std::size_t row;
  double sign;
  double cost;
};

struct BlockData {
  std::size_t size = 0;
  MatrixXd C;
  std::vector<std::size_t> rows;
  std::vector<MatrixXd> A;
};

struct StandardForm {
  std::size_t nf = 0;
  VectorXd c_free;
  MatrixXd A_free;
  VectorXd b;
  std::vector<BlockData> blocks;
  std::vector<LpVar> lp;
  std::vector<std::vector<std::size_t>> row_lp;
  std::size_t num_eq = 0;
  std::size_t num_ineq = 0;
  bool has_trace_row = false;

  std::size_t m() const { return static_cast<std::size_t>(b.size()); }
};

enum class Phase { Feasibility, Optimization };

StandardForm build_standard_form(const ConicProblem& p, Phase phase, double trace_bound) {
  StandardForm sf;
  sf.nf = p.num_scalars;
  sf.num_eq = p.equalities.size();
  sf.num_ineq = p.inequalities.size();
  sf.has_trace_row = trace_bound > 0.0 && !p.block_sizes.empty();
  const std::size_t m = sf.num_eq + sf.num_ineq + (sf.has_trace_row ? 1 : 0);
  sf.b = VectorXd::Zero(static_cast<Eigen::Index>(m));
  sf.A_free = MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(sf.nf));
  sf.c_free = VectorXd::Zero(static_cast<Eigen::Index>(sf.nf));
  sf.row_lp.assign(m, {});
  sf.blocks.resize(p.block_sizes.size());
  std::vector<std::map<std::size_t, std::size_t>> local(p.block_sizes.size());
  for (std::size_t j = 0; j < p.block_sizes.size(); ++j) {
    const auto s = static_cast<Eigen::Index>(p.block_sizes[j]);
    sf.blocks[j].size = p.block_sizes[j];
    sf.blocks[j].C = MatrixXd::Zero(s, s);
  }
  auto block_matrix = [&](std::size_t j, std::size_t row) -> MatrixXd& {
    auto [it, inserted] = local[j].try_emplace(row, sf.blocks[j].rows.size());
    if (inserted) {
      const auto s = static_cast<Eigen::Index>(sf.blocks[j].size);
      sf.blocks[j].rows.push_back(row);
      sf.blocks[j].A.push_back(MatrixXd::Zero(s, s));
    }
    return sf.blocks[j].A[it->second];
  };
  auto add_lp = [&](std::size_t row, double sign, double cost) {
    sf.row_lp[row].push_back(sf.lp.size());
    sf.lp.push_back({row, sign, cost});
  };
  auto load_row = [&](const LinearRow& r, std::size_t row) {
    for (const auto& [k, c] : r.scalars) sf.A_free(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(k)) += c;
    for (const auto& e : r.entries) add_entry(block_matrix(e.block, row), e.i, e.j, e.coef);
    sf.b(static_cast<Eigen::Index>(row)) = r.rhs;
  };

  for (std::size_t k = 0; k < sf.num_eq; ++k) {
    load_row(p.equalities[k], k);
    if (phase == Phase::Feasibility) {
      add_lp(k, +1.0, 1.0);
      add_lp(k, -1.0, 1.0);
    }
  }
  for (std::size_t k = 0; k < sf.num_ineq; ++k) {
    const std::size_t row = sf.num_eq + k;
    load_row(p.inequalities[k], row);
    add_lp(row, +1.0, 0.0);
    if (phase == Phase::Feasibility) add_lp(row, -1.0, 1.0);
  }
  if (sf.has_trace_row) {
    const std::size_t row = m - 1;
    for (std::size_t j = 0; j < sf.blocks.size(); ++j) {
      block_matrix(j, row) = MatrixXd::Identity(static_cast<Eigen::Index>(sf.blocks[j].size),
                                                static_cast<Eigen::Index>(sf.blocks[j].size));
    }
    sf.b(static_cast<Eigen::Index>(row)) = trace_bound;
    add_lp(row, +1.0, 0.0);
  }
  if (phase == Phase::Optimization) {
    for (const auto& [k, c] : p.objective.scalars) sf.c_free(static_cast<Eigen::Index>(k)) += c;
    for (const auto& e : p.objective.entries) add_entry(sf.blocks[e.block].C, e.i, e.j, e.coef);
  }
  return sf;
}

struct Iterate {
  VectorXd u, x, z, y;
  std::vector<MatrixXd> X, Z;
};

struct IpmReport {
  bool converged = false;
  int iterations = 0;
  double pobj = 0.0;
  double dobj = 0.0;
  std::string message;
};

// Returns true to stop the iteration early.
using EarlyExit = std::function<bool(const Iterate&, double pobj, double dobj, double reld)>;

double max_step_lp(const VectorXd& v, const VectorXd& dv) {
  double a = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (dv(i) < 0.0) a = std::min(a, -v(i) / dv(i));
  }
  return a;
}

double max_step_psd(const MatrixXd& X, const MatrixXd& dX) {
  Eigen::LLT<MatrixXd> llt(X);
  if (llt.info() != Eigen::Success) return 0.0;
  const MatrixXd L = llt.matrixL();
  MatrixXd W = L.triangularView<Eigen::Lower>().solve(dX);
  W = L.triangularView<Eigen::Lower>().solve(W.transpose()).transpose();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(sym(W), Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues()(0);
  return lmin >= 0.0 ? std::numeric_limits<double>::infinity() : -1.0 / lmin;
}

MatrixXd spd_inverse(const MatrixXd& Z) {
  const auto n = Z.rows();
  Eigen::LLT<MatrixXd> llt(Z);
  if (llt.info() == Eigen::Success) return sym(llt.solve(MatrixXd::Identity(n, n)));
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(sym(Z));
  VectorXd ev = es.eigenvalues().cwiseMax(1e-300);
  return es.eigenvectors() * ev.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
}

struct Direction {
  VectorXd du, dx, dz, dy;
  std::vector<MatrixXd> dX, dZ;
};

class InteriorPoint {
 public:
  InteriorPoint(const StandardForm& sf, const SolverOptions& opts) : sf_(sf), opts_(opts) {
    const std::size_t m = sf_.m();
    pos_.assign(m, -1);
    for (std::size_t k = 0; k < m; ++k) {
      bool dense = sf_.row_lp[k].empty();
      if (!dense) {
        for (const auto& blk : sf_.blocks) {
          if (std::find(blk.rows.begin(), blk.rows.end(), k) != blk.rows.end()) {
            dense = true;
            break;
          }
        }
      }
      if (dense) {
        pos_[k] = static_cast<long>(dense_rows_.size());
        dense_rows_.push_back(k);
      } else {
        diag_rows_.push_back(k);
      }
    }
    N_ = static_cast<double>(sf_.lp.size());
    for (const auto& blk : sf_.blocks) N_ += static_cast<double>(blk.size);
  }

  IpmReport run(Iterate& it, const EarlyExit& early_exit) {
    initialize(it);
    IpmReport rep;
    const double bnorm = sf_.b.head(static_cast<Eigen::Index>(sf_.m()) - (sf_.has_trace_row ? 1 : 0)).norm();
    double cnorm = sf_.c_free.squaredNorm();
    for (const auto& l : sf_.lp) cnorm += l.cost * l.cost;
    for (const auto& blk : sf_.blocks) cnorm += blk.C.squaredNorm();
    cnorm = std::sqrt(cnorm);

    int stall = 0;
    // Best iterate by the worst of the three relative residuals; restored on
    // any exit other than convergence or an accepted early exit.
    Iterate best;
    double best_merit = INFINITY;
    double best_pobj = 0.0;
    double best_dobj = 0.0;
    int since_best = 0;
    auto give_up = [&](IpmReport& r, const char* msg) {
      r.message = msg;
      if (std::isfinite(best_merit)) {
        it = best;
        r.pobj = best_pobj;
        r.dobj = best_dobj;
      }
      return r;
    };
    for (int iter = 0; iter < opts_.max_iterations; ++iter) {
      rep.iterations = iter;
      residuals(it);
      const double mu = complementarity(it);
      const double pobj = primal_objective(it);
      const double dobj = sf_.b.dot(it.y);
      const double relp =
          rp_.head(rp_.size() - (sf_.has_trace_row ? 1 : 0)).norm() / (1.0 + bnorm);
      const double reld = dual_residual_norm() / (1.0 + cnorm);
      const double relgap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
      rep.pobj = pobj;
      rep.dobj = dobj;
      if (opts_.verbose) {
        spdlog::info("ipm {:3d} pobj {: .10e} dobj {: .10e} relp {:.2e} reld {:.2e} mu {:.2e}", iter,
                     pobj, dobj, relp, reld, mu);
      }
      if (early_exit && early_exit(it, pobj, dobj, reld)) {
        rep.message = "early exit";
        return rep;
      }
      if (relp < 1e-11 && reld < 1e-11 && relgap < opts_.gap_tol * 1e-2) {
        rep.converged = true;
        rep.message = "converged";
        return rep;
      }
      const double merit = std::max({relp, reld, relgap});
      if (std::isfinite(merit) && merit < 0.5 * best_merit) {
        best = it;
        best_merit = merit;
        best_pobj = pobj;
        best_dobj = dobj;
        since_best = 0;
      } else if (++since_best >= 30) {
        return give_up(rep, "no progress");
      }
      if (!std::isfinite(mu) || mu < 1e-30) return give_up(rep, "complementarity underflow");
      if (!factor(it)) return give_up(rep, "Schur complement factorization failed");

      // Predictor.
      std::vector<MatrixXd> rcz(sf_.blocks.size());
      VectorXd rc(sf_.lp.size());
      for (std::size_t j = 0; j < sf_.blocks.size(); ++j) rcz[j] = -it.X[j];
      for (std::size_t l = 0; l < sf_.lp.size(); ++l) rc(static_cast<Eigen::Index>(l)) = -it.x(static_cast<Eigen::Index>(l)) * it.z(static_cast<Eigen::Index>(l));
      Direction aff = direction(it, rcz, rc);
      const double ap_aff = std::min(1.0, primal_step(it, aff));
      const double ad_aff = std::min(1.0, dual_step(it, aff));
      double mu_aff = 0.0;
      for (Eigen::Index l = 0; l < it.x.size(); ++l) {
        mu_aff += (it.x(l) + ap_aff * aff.dx(l)) * (it.z(l) + ad_aff * aff.dz(l));
      }
      for (std::size_t j = 0; j < sf_.blocks.size(); ++j) {
        mu_aff += ((it.X[j] + ap_aff * aff.dX[j]).cwiseProduct(it.Z[j] + ad_aff * aff.dZ[j])).sum();
      }
      mu_aff /= N_;
      const double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, 3.0), 0.0, 1.0);

      // Corrector.
      for (std::size_t j = 0; j < sf_.blocks.size(); ++j) {
        rcz[j] = sigma * mu * Zinv_[j] - it.X[j] - aff.dX[j] * aff.dZ[j] * Zinv_[j];
      }
      for (Eigen::Index l = 0; l < rc.size(); ++l) {
        rc(l) = sigma * mu - it.x(l) * it.z(l) - aff.dx(l) * aff.dz(l);
      }
      Direction d = direction(it, rcz, rc);
      const double gamma = 0.9 + 0.09 * std::min(ap_aff, ad_aff);
      const double ap = std::min(1.0, gamma * primal_step(it, d));
      const double ad = std::min(1.0, gamma * dual_step(it, d));

      it.u += ap * d.du;
      it.x += ap * d.dx;
      it.y += ad * d.dy;
      it.z += ad * d.dz;
      for (std::size_t j = 0; j < sf_.blocks.size(); ++j) {
        it.X[j] = sym(it.X[j] + ap * d.dX[j]);
        it.Z[j] = sym(it.Z[j] + ad * d.dZ[j]);
      }
      stall = (ap < 1e-8 && ad < 1e-8) ? stall + 1 : 0;
      if (stall >= 5) return give_up(rep, "step length stalled");
    }
    rep.iterations = opts_.max_iterations;
    return give_up(rep, "iteration limit");
  }

 private:
  void initialize(Iterate& it) const {
    const auto m = static_cast<Eigen::Index>(sf_.m());
    double xi = 1.0;
    double eta = 1.0;
    const Eigen::Index m_scale = sf_.has_trace_row ? m - 1 : m;
    for (Eigen::Index k = 0; k < m_scale; ++k) {
      double an = sf_.A_free.row(k).squaredNorm();
      for (const auto& blk : sf_.blocks) {
        for (std::size_t r = 0; r < blk.rows.size(); ++r) {
          if (static_cast<Eigen::Index>(blk.rows[r]) == k) an += blk.A[r].squaredNorm();
        }
      }
      an = std::sqrt(an + static_cast<double>(sf_.row_lp[static_cast<std::size_t>(k)].size()));
      xi = std::max(xi, (1.0 + std::abs(sf_.b(k))) / (1.0 + an));
      eta = std::max(eta, an);
    }
    double cn = sf_.c_free.lpNorm<Eigen::Infinity>();
    for (const auto& blk : sf_.blocks) cn = std::max(cn, blk.C.norm());
    for (const auto& l : sf_.lp) cn = std::max(cn, std::abs(l.cost));
    eta = std::max(eta, 1.0 + cn);
    xi = std::min(xi * 10.0, 1e6);
    eta = std::min(eta * 10.0, 1e6);
    if (sf_.has_trace_row) {
      double total = 0.0;
      for (const auto& blk : sf_.blocks) total += static_cast<double>(blk.size);
      xi = std::min(xi, 0.5 * sf_.b(m - 1) / total);
    }
    it.u = VectorXd::Zero(static_cast<Eigen::Index>(sf_.nf));
    it.y = VectorXd::Zero(m);
    it.x = VectorXd::Constant(static_cast<Eigen::Index>(sf_.lp.size()), xi);
    it.z = VectorXd::Constant(static_cast<Eigen::Index>(sf_.lp.size()), eta);
    if (sf_.has_trace_row) {
      // Start the trace slack at its natural value so the row begins feasible.
      double total = 0.0;
      for (const auto& blk : sf_.blocks) total += xi * static_cast<double>(blk.size);
      const auto& lps = sf_.row_lp[static_cast<std::size_t>(m - 1)];
      it.x(static_cast<Eigen::Index>(lps.front())) = sf_.b(m - 1) - total;
    }
    it.X.clear();
    it.Z.clear();
    for (const auto& blk : sf_.blocks) {
      const auto s = static_cast<Eigen::Index>(blk.size);
      it.X.push_back(xi * MatrixXd::Identity(s, s));
      it.Z.push_back(eta * MatrixXd::Identity(s, s));
    }
  }

  double complementarity(const Iterate& it) const {
    double v = it.x.dot(it.z);
    for (std::size_t j = 0; j < sf_.blocks.size(); ++j) v += it.X[j].cwiseProduct(it.Z[j]).sum();
    return v / N_;
  }

  double primal_objective(const Iterate& it) const {
    double v = sf_.c_free.dot(it.u);
    for (std::size_t l = 0; l < sf_.lp.size(); ++l) v += sf_.lp[l].cost * it.x(static_cast<Eigen::Index>(l));
    for (std::size_t j = 0; j < sf_.blocks.size(); ++j) v += sf_.blocks[j].C.cwiseProduct(it.X[j]).sum();
    return v;
  }

  MatrixXd adjoint(std::size_t j, const VectorXd& y) const {
    const auto& blk = sf_.blocks[j];
    MatrixXd S = MatrixXd::Zero(static_cast<Eigen::Index>(blk.size), static_cast<Eigen::Index>(blk.size));
    for (std::size_t r = 0; r < blk.rows.size(); ++r) S += y(static_cast<Eigen::Index>(blk.rows[r])) * blk.A[r];
    return S;
  }

  void residuals(const Iterate& it) {
    rp_ = sf_.b - sf_.A_free * it.u;
    for (std::size_t l = 0; l < sf_.lp.size(); ++l) {
      rp_(static_cast<Eigen::Index>(sf_.lp[l].row)) -= sf_.lp[l].sign * it.x(static_cast<Eigen::Index>(l));
    }
    for (std::size_t j = 0; j < sf_.blocks.size(); ++j) {
      const auto& blk = sf_.blocks[j];
      for (std::size_t r = 0; r < blk.rows.size(); ++r) {
        rp_(static_cast<Eigen::Index>(blk.rows[r])) -= blk.A[r].cwiseProduct(it.X[j]).sum();
      }
    }
    rdu_ = sf_.c_free - sf_.A_free.transpose() * it.y;
    rdl_.resize(static_cast<Eigen::Index>(sf_.lp.size()));
    for (std::size_t l = 0; l < sf_.lp.size(); ++l) {
      const auto li = static_cast<Eigen::Index>(l);
      rdl_(li) = sf_.lp[l].cost - sf_.lp[l].sign * it.y(static_cast<Eigen::Index>(sf_.lp[l].row)) - it.z(li);
    }
    Rd_.resize(sf_.blocks.size());
    for (std::size_t j = 0; j < sf_.blocks.size(); ++j) {
      Rd_[j] = sf_.blocks[j].C - adjoint(j, it.y) - it.Z[j];
    }
  }

  double dual_residual_norm() const {
    double v = rdu_.squaredNorm() + rdl_.squaredNorm();
    for (const auto& R : Rd_) v += R.squaredNorm();
    return std::sqrt(v);
  }

  bool factor(const Iterate& it) {
    const auto ne = static_cast<Eigen::Index>(dense_rows_.size());
    const auto nf = static_cast<Eigen::Index>(sf_.nf);
    MatrixXd M = MatrixXd::Zero(ne, ne);
    Zinv_.resize(sf_.blocks.size());
    for (std::size_t j = 0; j < sf_.blocks.size(); ++j) {
      Zinv_[j] = spd_inverse(it.Z[j]);
      const auto& blk = sf_.blocks[j];
      for (std::size_t p = 0; p < blk.rows.size(); ++p) {
        const MatrixXd T = it.X[j] * blk.A[p] * Zinv_[j];
        const auto ip = pos_[blk.rows[p]];
        for (std::size_t q = p; q < blk.rows.size(); ++q) {
          const double v = blk.A[q].cwiseProduct(T).sum();
          const auto iq = pos_[blk.rows[q]];
          M(ip, iq) += v;
          if (q != p) M(iq, ip) += v;
        }
      }
    }
    D_ = VectorXd::Zero(static_cast<Eigen::Index>(sf_.m()));
    for (std::size_t l = 0; l < sf_.lp.size(); ++l) {
      const auto li = static_cast<Eigen::Index>(l);
      D_(static_cast<Eigen::Index>(sf_.lp[l].row)) += it.x(li) / it.z(li);
    }
    for (std::size_t k = 0; k < dense_rows_.size(); ++k) {
      M(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) += D_(static_cast<Eigen::Index>(dense_rows_[k]));
    }
    MatrixXd S = MatrixXd::Zero(nf, nf);
    for (std::size_t k : diag_rows_) {
      const auto row = sf_.A_free.row(static_cast<Eigen::Index>(k));
      S.noalias() += row.transpose() * row / D_(static_cast<Eigen::Index>(k));
    }
    MatrixXd K(ne + nf, ne + nf);
    K.topLeftCorner(ne, ne) = M;
    for (std::size_t k = 0; k < dense_rows_.size(); ++k) {
      K.block(static_cast<Eigen::Index>(k), ne, 1, nf) = sf_.A_free.row(static_cast<Eigen::Index>(dense_rows_[k]));
    }
    K.bottomLeftCorner(nf, ne) = K.topRightCorner(ne, nf).transpose();
    K.bottomRightCorner(nf, nf) = -S;
    // Tiny regularization keeps K nonsingular when free columns are nearly dependent.
    for (Eigen::Index k = 0; k < nf; ++k) K(ne + k, ne + k) -= 1e-14 * (1.0 + S(k, k));
    K_ = std::move(K);
    lu_.compute(K_);
    return std::isfinite(K_.sum());
  }

  // Newton direction with iterative refinement on the primal rows, where
  // rounding in the Schur complement solve otherwise accumulates.
  Direction direction(const Iterate& it, const std::vector<MatrixXd>& rcz, const VectorXd& rc) const {
    Direction d = raw_direction(it, rcz, rc, rp_, rdu_, rdl_, Rd_);
    const VectorXd zero_lp = VectorXd::Zero(static_cast<Eigen::Index>(sf_.lp.size()));
    std::vector<MatrixXd> zero_rd;
    std::vector<MatrixXd> zero_rcz;
    for (const auto& blk : sf_.blocks) {
      const auto s = static_cast<Eigen::Index>(blk.size);
      zero_rd.push_back(MatrixXd::Zero(s, s));
      zero_rcz.push_back(MatrixXd::Zero(s, s));
    }
    for (int pass = 0; pass < 2; ++pass) {
      VectorXd ep = rp_ - sf_.A_free * d.du;
      for (std::size_t l = 0; l < sf_.lp.size(); ++l) {
        ep(static_cast<Eigen::Index>(sf_.lp[l].row)) -= sf_.lp[l].sign * d.dx(static_cast<Eigen::Index>(l));
      }
      for (std::size_t j = 0; j < sf_.blocks.size(); ++j) {
        const auto& blk = sf_.blocks[j];
        for (std::size_t r = 0; r < blk.rows.size(); ++r) {
          ep(static_cast<Eigen::Index>(blk.rows[r])) -= blk.A[r].cwiseProduct(d.dX[j]).sum();
        }
      }
      const VectorXd edu = rdu_ - sf_.A_free.transpose() * d.dy;
      if (ep.norm() <= 1e-14 * (1.0 + rp_.norm()) && edu.norm() <= 1e-14 * (1.0 + rdu_.norm())) break;
      const Direction c = raw_direction(it, zero_rcz, zero_lp, ep, edu, zero_lp, zero_rd);
      d.du += c.du;
      d.dx += c.dx;
      d.dz += c.dz;
      d.dy += c.dy;
      for (std::size_t j = 0; j < sf_.blocks.size(); ++j) {
        d.dX[j] += c.dX[j];
        d.dZ[j] += c.dZ[j];
      }
    }
    return d;
  }

  Direction raw_direction(const Iterate& it, const std::vector<MatrixXd>& rcz, const VectorXd& rc,
                          const VectorXd& rp, const VectorXd& rdu, const VectorXd& rdl,
                          const std::vector<MatrixXd>& Rd) const {
    const auto m = static_cast<Eigen::Index>(sf_.m());
    const auto ne = static_cast<Eigen::Index>(dense_rows_.size());
    const auto nf = static_cast<Eigen::Index>(sf_.nf);
    VectorXd h = rp;
    for (std::size_t l = 0; l < sf_.lp.size(); ++l) {
      const auto li = static_cast<Eigen::Index>(l);
      h(static_cast<Eigen::Index>(sf_.lp[l].row)) -=
          sf_.lp[l].sign * (rc(li) - it.x(li) * rdl(li)) / it.z(li);
    }
    std::vector<MatrixXd> G(sf_.blocks.size());
    for (std::size_t j = 0; j < sf_.blocks.size(); ++j) {
      G[j] = rcz[j] - it.X[j] * Rd[j] * Zinv_[j];
      const auto& blk = sf_.blocks[j];
      for (std::size_t r = 0; r < blk.rows.size(); ++r) {
        h(static_cast<Eigen::Index>(blk.rows[r])) -= blk.A[r].cwiseProduct(G[j]).sum();
      }
    }
    VectorXd rhs(ne + nf);
    for (std::size_t k = 0; k < dense_rows_.size(); ++k) {
      rhs(static_cast<Eigen::Index>(k)) = h(static_cast<Eigen::Index>(dense_rows_[k]));
    }
    VectorXd bottom = rdu;
    for (std::size_t k : diag_rows_) {
      const auto ki = static_cast<Eigen::Index>(k);
      bottom -= sf_.A_free.row(ki).transpose() * (h(ki) / D_(ki));
    }
    rhs.tail(nf) = bottom;
    VectorXd sol = lu_.solve(rhs);
    sol += lu_.solve(rhs - K_ * sol);

    Direction d;
    d.du = sol.tail(nf);
    d.dy = VectorXd::Zero(m);
    for (std::size_t k = 0; k < dense_rows_.size(); ++k) d.dy(static_cast<Eigen::Index>(dense_rows_[k])) = sol(static_cast<Eigen::Index>(k));
    for (std::size_t k : diag_rows_) {
      const auto ki = static_cast<Eigen::Index>(k);
      d.dy(ki) = (h(ki) - sf_.A_free.row(ki).dot(d.du)) / D_(ki);
    }
    d.dz.resize(static_cast<Eigen::Index>(sf_.lp.size()));
    d.dx.resize(static_cast<Eigen::Index>(sf_.lp.size()));
    for (std::size_t l = 0; l < sf_.lp.size(); ++l) {
      const auto li = static_cast<Eigen::Index>(l);
      d.dz(li) = rdl(li) - sf_.lp[l].sign * d.dy(static_cast<Eigen::Index>(sf_.lp[l].row));
      d.dx(li) = (rc(li) - it.x(li) * d.dz(li)) / it.z(li);
    }
    d.dX.resize(sf_.blocks.size());
    d.dZ.resize(sf_.blocks.size());
    for (std::size_t j = 0; j < sf_.blocks.size(); ++j) {
      d.dZ[j] = sym(Rd[j] - adjoint(j, d.dy));
      d.dX[j] = sym(rcz[j] - it.X[j] * d.dZ[j] * Zinv_[j]);
    }
    return d;
  }

  double primal_step(const Iterate& it, const Direction& d) const {
    double a = max_step_lp(it.x, d.dx);
    for (std::size_t j = 0; j < sf_.blocks.size(); ++j) a = std::min(a, max_step_psd(it.X[j], d.dX[j]));
    return a;
  }

  double dual_step(const Iterate& it, const Direction& d) const {
    double a = max_step_lp(it.z, d.dz);
    for (std::size_t j = 0; j < sf_.blocks.size(); ++j) a = std::min(a, max_step_psd(it.Z[j], d.dZ[j]));
    return a;
  }

  const StandardForm& sf_;
  const SolverOptions& opts_;
  std::vector<long> pos_;
  std::vector<std::size_t> dense_rows_;
  std::vector<std::size_t> diag_rows_;
  double N_ = 0.0;

  VectorXd rp_, rdu_, rdl_, D_;
  std::vector<MatrixXd> Rd_, Zinv_;
  MatrixXd K_;
  Eigen::PartialPivLU<MatrixXd> lu_;
};

std::vector<double> to_std(const VectorXd& v) { return {v.data(), v.data() + v.size()}; }

FarkasCertificate certificate_from_phase1(const StandardForm& sf, const VectorXd& y) {
  FarkasCertificate cert;
  for (std::size_t k = 0; k < sf.num_eq; ++k) cert.equality_multipliers.push_back(-y(static_cast<Eigen::Index>(k)));
  for (std::size_t k = 0; k < sf.num_ineq; ++k) {
    cert.inequality_multipliers.push_back(std::max(0.0, -y(static_cast<Eigen::Index>(sf.num_eq + k))));
  }
  return cert;
}

struct Point {
  std::vector<double> scalars;
  std::vector<MatrixXd> blocks;
};

double row_value_at(const LinearRow& r, const Point& pt) { return row_value(r, pt.scalars, pt.blocks); }

}  // namespace

double primal_residual(const ConicProblem& problem, const std::vector<double>& scalars,
                       const std::vector<MatrixXd>& blocks) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  double worst = 0.0;
  // NaN must never compare as small.
  for (const auto& r : problem.equalities) {
    const double v = std::abs(row_value(r, scalars, blocks) - r.rhs);
    worst = std::isfinite(v) ? std::max(worst, v) : inf;
  }
  for (const auto& r : problem.inequalities) {
    const double v = row_value(r, scalars, blocks) - r.rhs;
    worst = std::isfinite(v) ? std::max(worst, v) : inf;
  }
  return worst;
}

double min_block_eigenvalue(const std::vector<MatrixXd>& blocks) {
  double lmin = std::numeric_limits<double>::infinity();
  for (const auto& B : blocks) {
    if (B.size() == 0) continue;
    if (!B.allFinite()) return -std::numeric_limits<double>::infinity();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(sym(B), Eigen::EigenvaluesOnly);
    lmin = std::min(lmin, es.eigenvalues()(0));
  }
  return std::isfinite(lmin) ? lmin : 0.0;
}

double objective_value(const ConicProblem& problem, const std::vector<double>& scalars,
                       const std::vector<MatrixXd>& blocks) {
  return row_value(problem.objective, scalars, blocks);
}

FarkasCheck check_farkas(const ConicProblem& problem, const FarkasCertificate& cert, double infeas_tol,
                         double violation_tol) {
  FarkasCheck chk;
  if (cert.equality_multipliers.size() != problem.equalities.size() ||
      cert.inequality_multipliers.size() != problem.inequalities.size()) {
    return chk;
  }
  std::vector<double> scalar(problem.num_scalars, 0.0);
  std::vector<MatrixXd> mats;
  for (std::size_t s : problem.block_sizes) {
    mats.push_back(MatrixXd::Zero(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s)));
  }
  double rhs = 0.0;
  auto accumulate = [&](const LinearRow& r, double w) {
    if (w == 0.0) return;
    for (const auto& [k, c] : r.scalars) scalar[k] += w * c;
    for (const auto& e : r.entries) add_entry(mats[e.block], e.i, e.j, w * e.coef);
    rhs += w * r.rhs;
  };
  for (std::size_t k = 0; k < problem.equalities.size(); ++k) accumulate(problem.equalities[k], cert.equality_multipliers[k]);
  for (std::size_t k = 0; k < problem.inequalities.size(); ++k) {
    const double w = cert.inequality_multipliers[k];
    chk.sign_violation = std::max(chk.sign_violation, -w);
    accumulate(problem.inequalities[k], w);
  }
  for (double v : scalar) chk.scalar_violation = std::max(chk.scalar_violation, std::abs(v));
  chk.psd_violation = std::max(0.0, -min_block_eigenvalue(mats));
  chk.margin = -rhs;
  chk.valid = chk.margin >= infeas_tol && chk.scalar_violation <= violation_tol &&
              chk.psd_violation <= violation_tol && chk.sign_violation <= violation_tol;
  return chk;
}

namespace {

// Minimum-norm correction of an interior-point iterate onto the equality rows
// (and the violated inequality rows). Interior iterates sit strictly inside
// the cone, so a correction far smaller than the smallest eigenvalue keeps
// every block PSD while removing the residual left by rounding.
bool polish(const ConicProblem& problem, Point& pt, double feas_tol) {
  std::vector<std::size_t> offset;
  std::size_t nvar = problem.num_scalars;
  for (std::size_t s : problem.block_sizes) {
    offset.push_back(nvar);
    nvar += s * (s + 1) / 2;
  }
  auto var_index = [&](const EntryTerm& e) {
    const std::size_t s = problem.block_sizes[e.block];
    // Row-major upper triangle.
    return offset[e.block] + e.i * s - e.i * (e.i - 1) / 2 + (e.j - e.i);
  };
  std::vector<const LinearRow*> rows;
  for (const auto& r : problem.equalities) rows.push_back(&r);
  for (const auto& r : problem.inequalities) {
    if (row_value_at(r, pt) > r.rhs - 1e-12) rows.push_back(&r);
  }
  if (rows.empty()) return false;
  MatrixXd A = MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(nvar));
  VectorXd r(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto ki = static_cast<Eigen::Index>(k);
    for (const auto& [v, c] : rows[k]->scalars) A(ki, static_cast<Eigen::Index>(v)) += c;
    for (const auto& e : rows[k]->entries) A(ki, static_cast<Eigen::Index>(var_index(e))) += e.coef;
    r(ki) = rows[k]->rhs - row_value_at(*rows[k], pt);
  }
  Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(A);
  const VectorXd delta = cod.solve(r);
  if (!delta.allFinite()) return false;
  Point cand = pt;
  for (std::size_t v = 0; v < problem.num_scalars; ++v) cand.scalars[v] += delta(static_cast<Eigen::Index>(v));
  for (std::size_t b = 0; b < problem.block_sizes.size(); ++b) {
    const std::size_t s = problem.block_sizes[b];
    for (std::size_t i = 0; i < s; ++i) {
      for (std::size_t j = i; j < s; ++j) {
        const double d = delta(static_cast<Eigen::Index>(var_index({b, i, j, 0.0})));
        cand.blocks[b](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += d;
        if (i != j) cand.blocks[b](static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) += d;
      }
    }
  }
  const double res = primal_residual(problem, cand.scalars, cand.blocks);
  const double lmin = min_block_eigenvalue(cand.blocks);
  if (res > feas_tol || lmin < -feas_tol) {
    spdlog::debug("polish rejected: residual {:.2e} min eigenvalue {:.2e}", res, lmin);
    return false;
  }
  pt = std::move(cand);
  return true;
}

}  // namespace

ConicSolution solve(const ConicProblem& problem, const SolverOptions& opts) {
  problem.validate();
  ConicSolution sol;

  if (problem.equalities.empty() && problem.inequalities.empty()) {
    sol.scalars.assign(problem.num_scalars, 0.0);
    for (std::size_t s : problem.block_sizes) {
      sol.blocks.push_back(MatrixXd::Zero(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s)));
    }
    sol.primal_residual = 0.0;
    if (problem.objective.empty()) {
      sol.status = Status::Feasible;
    } else {
      sol.status = Status::Unknown;
      sol.message = "unconstrained problem with a nonzero objective";
    }
    return sol;
  }

  // Phase 1: minimize the l1 constraint violation.
  const StandardForm sf1 = build_standard_form(problem, Phase::Feasibility, opts.trace_bound);
  Iterate it1;
  Status verdict = Status::Unknown;
  std::optional<FarkasCertificate> farkas;
  Point feasible_point;
  const double bscale = 1.0 + sf1.b.head(static_cast<Eigen::Index>(sf1.num_eq + sf1.num_ineq)).lpNorm<Eigen::Infinity>();
  auto try_feasible = [&](const Iterate& it) {
    Point pt{to_std(it.u), it.X};
    if (primal_residual(problem, pt.scalars, pt.blocks) <= opts.feas_tol || polish(problem, pt, opts.feas_tol)) {
      feasible_point = std::move(pt);
      return true;
    }
    return false;
  };
  auto try_infeasible = [&](const Iterate& it) {
    auto cert = certificate_from_phase1(sf1, it.y);
    if (check_farkas(problem, cert, opts.infeas_tol, 1e-9).valid) {
      farkas = std::move(cert);
      return true;
    }
    return false;
  };
  const EarlyExit phase1_exit = [&](const Iterate& it, double pobj, double dobj, double reld) {
    if (pobj <= 1e-5 * bscale && try_feasible(it)) {
      verdict = Status::Feasible;
      return true;
    }
    if (dobj >= opts.infeas_tol && reld < 1e-6 && try_infeasible(it)) {
      verdict = Status::Infeasible;
      return true;
    }
    return false;
  };
  InteriorPoint ipm1(sf1, opts);
  const IpmReport rep1 = ipm1.run(it1, phase1_exit);
  sol.iterations = rep1.iterations;
  if (verdict == Status::Unknown) {
    if (try_feasible(it1)) {
      verdict = Status::Feasible;
    } else if (try_infeasible(it1)) {
      verdict = Status::Infeasible;
    }
  }
  auto finish = [&](Point pt) {
    sol.scalars = std::move(pt.scalars);
    sol.blocks = std::move(pt.blocks);
    sol.primal_residual = primal_residual(problem, sol.scalars, sol.blocks);
    sol.min_eigenvalue = min_block_eigenvalue(sol.blocks);
    sol.objective_value = objective_value(problem, sol.scalars, sol.blocks);
  };

  if (verdict == Status::Infeasible) {
    finish({to_std(it1.u), it1.X});
    sol.status = Status::Infeasible;
    sol.farkas = std::move(farkas);
    sol.message = "Farkas certificate found";
    return sol;
  }
  if (verdict == Status::Unknown) {
    finish({to_std(it1.u), it1.X});
    sol.status = Status::Unknown;
    sol.message = "feasibility phase undecided: " + rep1.message;
    return sol;
  }
  if (problem.objective.empty()) {
    finish(std::move(feasible_point));
    sol.status = Status::Feasible;
    sol.objective_value = 0.0;
    return sol;
  }

  // Phase 2: optimize the objective from a cold start.
  const StandardForm sf2 = build_standard_form(problem, Phase::Optimization, opts.trace_bound);
  Iterate it2;
  InteriorPoint ipm2(sf2, opts);
  // Primal feasibility can degrade late in the run, so the near-optimal
  // iterate with the smallest residual is kept and polished as a fallback.
  std::optional<Point> cand;
  double cand_res = INFINITY;
  const EarlyExit phase2_watch = [&](const Iterate& it, double pobj, double dobj, double) {
    if (std::abs(pobj - dobj) > 1e-4 * (1.0 + std::abs(pobj) + std::abs(dobj))) return false;
    Point p{to_std(it.u), it.X};
    const double res = primal_residual(problem, p.scalars, p.blocks);
    if (res < cand_res) {
      cand_res = res;
      cand = std::move(p);
    }
    return false;
  };
  const IpmReport rep2 = ipm2.run(it2, phase2_watch);
  sol.iterations += rep2.iterations;
  auto usable = [&](Point& p) {
    if (primal_residual(problem, p.scalars, p.blocks) > opts.feas_tol) polish(problem, p, opts.feas_tol);
    return primal_residual(problem, p.scalars, p.blocks) <= opts.feas_tol &&
           min_block_eigenvalue(p.blocks) >= -opts.feas_tol;
  };
  Point pt{to_std(it2.u), it2.X};
  const bool final_ok = usable(pt);
  if (cand && usable(*cand)) {
    if (!final_ok || objective_value(problem, cand->scalars, cand->blocks) <
                         objective_value(problem, pt.scalars, pt.blocks) - 1e-12) {
      pt = std::move(*cand);
    }
  }
  finish(std::move(pt));
  for (std::size_t k = 0; k < sf2.num_eq; ++k) sol.equality_duals.push_back(it2.y(static_cast<Eigen::Index>(k)));
  for (std::size_t k = 0; k < sf2.num_ineq; ++k) {
    sol.inequality_duals.push_back(std::max(0.0, -it2.y(static_cast<Eigen::Index>(sf2.num_eq + k))));
  }
  const double relgap = std::abs(sol.objective_value - rep2.dobj) / (1.0 + std::abs(sol.objective_value) + std::abs(rep2.dobj));
  const bool feasible = sol.primal_residual <= opts.feas_tol && sol.min_eigenvalue >= -opts.feas_tol;
  if (feasible && relgap <= opts.gap_tol) {
    sol.status = Status::Optimal;
  } else if (feasible) {
    // Usable point whose objective is not certified optimal.
    sol.status = Status::Feasible;
    sol.message = "optimization phase stopped (" + rep2.message + ") at relative gap " + fmt::format("{:.2e}", relgap);
  } else {
    sol.status = Status::Unknown;
    sol.message = "optimization phase did not converge: " + rep2.message;
  }
  return sol;
}

void write_sdpa(const ConicProblem& problem, std::ostream& os) {
  // SDPA dual form: max <F0, Y> s.t. <Fk, Y> = ck, Y PSD. Block 1 is diagonal
  // and holds free scalars split as u = u+ - u-, then inequality slacks; the
  // PSD blocks follow in order.
  const std::size_t nfree = problem.num_scalars;
  const std::size_t nineq = problem.inequalities.size();
  const std::size_t lp_size = 2 * nfree + nineq;
  const std::size_t m = problem.equalities.size() + problem.inequalities.size();
  std::vector<long> sizes;
  if (lp_size > 0) sizes.push_back(-static_cast<long>(lp_size));
  for (std::size_t s : problem.block_sizes) sizes.push_back(static_cast<long>(s));
  const std::size_t off = lp_size > 0 ? 1 : 0;

  os << "\"starsos conic problem: " << problem.equalities.size() << " equalities, " << nineq
     << " inequalities\"\n";
  os << m << "\n" << sizes.size() << "\n";
  for (std::size_t i = 0; i < sizes.size(); ++i) os << (i ? " " : "") << sizes[i];
  os << "\n";
  os.precision(17);
  std::vector<const LinearRow*> rows;
  for (const auto& r : problem.equalities) rows.push_back(&r);
  for (const auto& r : problem.inequalities) rows.push_back(&r);
  for (std::size_t k = 0; k < rows.size(); ++k) os << (k ? " " : "") << rows[k]->rhs;
  os << "\n";
  auto emit = [&](std::size_t mat, const LinearRow& r, double sign, std::optional<std::size_t> slack) {
    for (const auto& [k, c] : r.scalars) {
      os << mat << " 1 " << (2 * k + 1) << " " << (2 * k + 1) << " " << sign * c << "\n";
      os << mat << " 1 " << (2 * k + 2) << " " << (2 * k + 2) << " " << -sign * c << "\n";
    }
    if (slack) os << mat << " 1 " << (2 * nfree + *slack + 1) << " " << (2 * nfree + *slack + 1) << " 1\n";
    for (const auto& e : r.entries) {
      const double v = e.i == e.j ? e.coef : 0.5 * e.coef;
      os << mat << " " << (e.block + off + 1) << " " << (e.i + 1) << " " << (e.j + 1) << " " << sign * v << "\n";
    }
  };
  emit(0, problem.objective, -1.0, std::nullopt);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    std::optional<std::size_t> slack;
    if (k >= problem.equalities.size()) slack = k - problem.equalities.size();
    emit(k + 1, *rows[k], 1.0, slack);
  }
}

}  // namespace starsos::conic
