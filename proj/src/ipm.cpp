// Homogeneous self-dual interior-point method for
//   min c^T x  s.t.  A x = b,  G x + s = h,  s in K = R+^l x S^{d_1} x ... x S^{d_q}
// using the HKM search direction with Mehrotra predictor-corrector steps.
// All linear algebra is dense; problem sizes here are a few hundred at most.

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "sparsecut/conic.hpp"

namespace sparsecut {
namespace {

using Clock = std::chrono::steady_clock;
using Eigen::MatrixXd;
using Eigen::VectorXd;

double inf_norm(const VectorXd& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

Eigen::Map<const MatrixXd> as_matrix(const VectorXd& v, int d) { return {v.data(), d, d}; }

/// An element of the cone's ambient space.
struct ConeVec {
  VectorXd lin;
  std::vector<VectorXd> mats;  // column-major vec of a d x d symmetric matrix

  ConeVec& operator+=(const ConeVec& o) {
    lin += o.lin;
    for (std::size_t b = 0; b < mats.size(); ++b) mats[b] += o.mats[b];
    return *this;
  }
};

ConeVec axpy(double a, const ConeVec& x, const ConeVec& y) {
  ConeVec out = y;
  out.lin += a * x.lin;
  for (std::size_t b = 0; b < out.mats.size(); ++b) out.mats[b] += a * x.mats[b];
  return out;
}

ConeVec scaled(double a, const ConeVec& x) {
  ConeVec out = x;
  out.lin *= a;
  for (auto& m : out.mats) m *= a;
  return out;
}

double inner(const ConeVec& u, const ConeVec& v) {
  double acc = u.lin.dot(v.lin);
  for (std::size_t b = 0; b < u.mats.size(); ++b) acc += u.mats[b].dot(v.mats[b]);
  return acc;
}

double inf_norm(const ConeVec& v) {
  double n = inf_norm(v.lin);
  for (const auto& m : v.mats) n = std::max(n, inf_norm(m));
  return n;
}

VectorXd sym_vec(const MatrixXd& m) {
  MatrixXd s = 0.5 * (m + m.transpose());
  return Eigen::Map<const VectorXd>(s.data(), s.size());
}

class HsdSolver {
 public:
  HsdSolver(StandardForm sf, const SolveLimits& limits) : sf_(std::move(sf)), limits_(limits) {
    n_ = static_cast<int>(sf_.c.size());
    p_ = static_cast<int>(sf_.A.rows());
    l_ = static_cast<int>(sf_.G_lin.rows());
    nu_ = l_;
    for (int d : sf_.psd_dims) nu_ += d;
    equilibrate();
  }

  SolveResult run();

 private:
  void equilibrate();
  ConeVec G_times(const VectorXd& x) const;
  VectorXd Gt_times(const ConeVec& z) const;
  ConeVec identity_cone() const;
  ConeVec h_cone() const;
  ConeVec apply_H(const ConeVec& ds) const;
  double max_step(const ConeVec& v, const ConeVec& dv) const;
  bool prepare_scaling();
  bool factor_kkt();
  VectorXd solve_kkt(const VectorXd& rhs) const;
  struct Direction {
    VectorXd dx, dy;
    ConeVec ds, dz;
    double dtau = 0.0, dkappa = 0.0;
  };
  Direction direction(double eta, double sigma_mu, const Direction* affine);
  SolveResult finish(SolveStatus status, const std::string& message);

  StandardForm sf_;
  SolveLimits limits_;
  int n_ = 0, p_ = 0, l_ = 0, nu_ = 0;
  double obj_scale_ = 1.0;
  VectorXd eq_scale_, lin_scale_;
  std::vector<double> psd_scale_;

  // Iterate.
  VectorXd x_, y_;
  ConeVec s_, z_;
  double tau_ = 1.0, kappa_ = 1.0;
  // Residuals.
  VectorXd rx_, ry_;
  ConeVec rz_;
  double rt_ = 0.0, mu_ = 0.0;

  // Scaling data for the current iterate.
  VectorXd lin_w_;                    // z / s
  std::vector<MatrixXd> s_inv_, zmat_;
  MatrixXd K_, K_reg_;
  Eigen::PartialPivLU<MatrixXd> lu_;
  VectorXd row_scale_, col_scale_;
  VectorXd Hh_Gt_;  // G^T H h
  double hHh_ = 0.0;
  ConeVec Hh_;

  int iterations_ = 0;
  Clock::time_point start_;
};

void HsdSolver::equilibrate() {
  // Positive row scalings leave every cone invariant.
  eq_scale_ = VectorXd::Ones(p_);
  for (int r = 0; r < p_; ++r) {
    const double nrm = std::max(inf_norm(VectorXd(sf_.A.row(r).transpose())), std::abs(sf_.b[r]));
    if (nrm > 0) eq_scale_[r] = 1.0 / nrm;
  }
  sf_.A = eq_scale_.asDiagonal() * sf_.A;
  sf_.b = eq_scale_.cwiseProduct(sf_.b);

  lin_scale_ = VectorXd::Ones(l_);
  for (int r = 0; r < l_; ++r) {
    const double nrm = inf_norm(VectorXd(sf_.G_lin.row(r).transpose()));
    if (nrm > 0) lin_scale_[r] = 1.0 / nrm;
  }
  sf_.G_lin = lin_scale_.asDiagonal() * sf_.G_lin;
  sf_.h_lin = lin_scale_.cwiseProduct(sf_.h_lin);

  psd_scale_.assign(sf_.psd_dims.size(), 1.0);
  for (std::size_t b = 0; b < sf_.psd_dims.size(); ++b) {
    const double nrm = sf_.G_psd[b].size() ? sf_.G_psd[b].cwiseAbs().maxCoeff() : 0.0;
    if (nrm > 0) psd_scale_[b] = 1.0 / nrm;
    sf_.G_psd[b] *= psd_scale_[b];
    sf_.h_psd[b] *= psd_scale_[b];
  }

  const double cn = inf_norm(sf_.c);
  if (cn > 0) obj_scale_ = 1.0 / cn;
  sf_.c *= obj_scale_;
}

ConeVec HsdSolver::G_times(const VectorXd& x) const {
  ConeVec out;
  out.lin = sf_.G_lin * x;
  for (std::size_t b = 0; b < sf_.psd_dims.size(); ++b) out.mats.push_back(sf_.G_psd[b] * x);
  return out;
}

VectorXd HsdSolver::Gt_times(const ConeVec& z) const {
  VectorXd out = sf_.G_lin.transpose() * z.lin;
  for (std::size_t b = 0; b < sf_.psd_dims.size(); ++b) out += sf_.G_psd[b].transpose() * z.mats[b];
  return out;
}

ConeVec HsdSolver::identity_cone() const {
  ConeVec e;
  e.lin = VectorXd::Ones(l_);
  for (int d : sf_.psd_dims) {
    MatrixXd I = MatrixXd::Identity(d, d);
    e.mats.emplace_back(Eigen::Map<const VectorXd>(I.data(), I.size()));
  }
  return e;
}

ConeVec HsdSolver::h_cone() const {
  ConeVec h;
  h.lin = sf_.h_lin;
  h.mats = sf_.h_psd;
  return h;
}

bool HsdSolver::prepare_scaling() {
  lin_w_ = z_.lin.cwiseQuotient(s_.lin);
  s_inv_.clear();
  zmat_.clear();
  for (std::size_t b = 0; b < sf_.psd_dims.size(); ++b) {
    const int d = sf_.psd_dims[b];
    MatrixXd S = as_matrix(s_.mats[b], d);
    Eigen::LLT<MatrixXd> llt(0.5 * (S + S.transpose()));
    if (llt.info() != Eigen::Success) return false;
    MatrixXd Sinv = llt.solve(MatrixXd::Identity(d, d));
    s_inv_.push_back(0.5 * (Sinv + Sinv.transpose()));
    MatrixXd Z = as_matrix(z_.mats[b], d);
    zmat_.push_back(0.5 * (Z + Z.transpose()));
  }
  return true;
}

// H(D) = z/s * D on the orthant; sym(S^{-1} D Z) on each PSD block.
ConeVec HsdSolver::apply_H(const ConeVec& ds) const {
  ConeVec out;
  out.lin = lin_w_.cwiseProduct(ds.lin);
  for (std::size_t b = 0; b < sf_.psd_dims.size(); ++b) {
    const int d = sf_.psd_dims[b];
    out.mats.push_back(sym_vec(s_inv_[b] * as_matrix(ds.mats[b], d) * zmat_[b]));
  }
  return out;
}

double HsdSolver::max_step(const ConeVec& v, const ConeVec& dv) const {
  double alpha = std::numeric_limits<double>::infinity();
  for (int i = 0; i < l_; ++i)
    if (dv.lin[i] < 0) alpha = std::min(alpha, -v.lin[i] / dv.lin[i]);
  for (std::size_t b = 0; b < sf_.psd_dims.size(); ++b) {
    const int d = sf_.psd_dims[b];
    MatrixXd V = as_matrix(v.mats[b], d);
    Eigen::LLT<MatrixXd> llt(0.5 * (V + V.transpose()));
    if (llt.info() != Eigen::Success) return 0.0;
    MatrixXd D = as_matrix(dv.mats[b], d);
    MatrixXd W = llt.matrixL().solve(MatrixXd(0.5 * (D + D.transpose())));
    W = llt.matrixL().solve(MatrixXd(W.transpose()));
    const double lmin = Eigen::SelfAdjointEigenSolver<MatrixXd>(0.5 * (W + W.transpose()), Eigen::EigenvaluesOnly)
                            .eigenvalues()
                            .minCoeff();
    if (lmin < 0) alpha = std::min(alpha, -1.0 / lmin);
  }
  return alpha;
}

bool HsdSolver::factor_kkt() {
  const int dim = n_ + p_ + 1;
  MatrixXd GHG = sf_.G_lin.transpose() * lin_w_.asDiagonal() * sf_.G_lin;
  for (std::size_t b = 0; b < sf_.psd_dims.size(); ++b) {
    const int d = sf_.psd_dims[b];
    const MatrixXd& Gb = sf_.G_psd[b];
    MatrixXd HG(Gb.rows(), Gb.cols());
    for (int k = 0; k < n_; ++k) {
      if (Gb.col(k).squaredNorm() == 0.0) {
        HG.col(k).setZero();
        continue;
      }
      VectorXd col = Gb.col(k);
      HG.col(k) = sym_vec(s_inv_[b] * as_matrix(col, d) * zmat_[b]);
    }
    GHG.noalias() += Gb.transpose() * HG;
  }
  GHG = 0.5 * (GHG + GHG.transpose());

  Hh_ = apply_H(h_cone());
  Hh_Gt_ = Gt_times(Hh_);
  hHh_ = inner(h_cone(), Hh_);

  K_.setZero(dim, dim);
  K_.topLeftCorner(n_, n_) = GHG;
  K_.block(0, n_, n_, p_) = sf_.A.transpose();
  K_.block(n_, 0, p_, n_) = sf_.A;
  K_.block(0, n_ + p_, n_, 1) = sf_.c - Hh_Gt_;
  K_.block(n_, n_ + p_, p_, 1) = -sf_.b;
  K_.block(n_ + p_, 0, 1, n_) = (sf_.c + Hh_Gt_).transpose();
  K_.block(n_ + p_, n_, 1, p_) = sf_.b.transpose();
  K_(n_ + p_, n_ + p_) = -kappa_ / tau_ - hHh_;

  K_reg_ = K_;
  const double scale = std::max(1.0, GHG.size() ? GHG.diagonal().cwiseAbs().maxCoeff() : 1.0);
  const double delta = 1e-13 * scale;
  for (int i = 0; i < n_; ++i) K_reg_(i, i) += delta;
  for (int i = n_; i < n_ + p_; ++i) K_reg_(i, i) -= 1e-13;
  if (!K_reg_.allFinite()) return false;
  // Ruiz equilibration: z/s spans many orders of magnitude near the optimum.
  row_scale_ = VectorXd::Ones(dim);
  col_scale_ = VectorXd::Ones(dim);
  for (int pass = 0; pass < 8; ++pass) {
    for (int i = 0; i < dim; ++i) {
      const double m = K_reg_.row(i).cwiseAbs().maxCoeff();
      if (m > 0) {
        const double f = 1.0 / std::sqrt(m);
        K_reg_.row(i) *= f;
        row_scale_[i] *= f;
      }
    }
    for (int j = 0; j < dim; ++j) {
      const double m = K_reg_.col(j).cwiseAbs().maxCoeff();
      if (m > 0) {
        const double f = 1.0 / std::sqrt(m);
        K_reg_.col(j) *= f;
        col_scale_[j] *= f;
      }
    }
  }
  lu_.compute(K_reg_);
  return true;
}

VectorXd HsdSolver::solve_kkt(const VectorXd& rhs) const {
  auto scaled_solve = [&](const VectorXd& r) -> VectorXd {
    return col_scale_.cwiseProduct(lu_.solve(row_scale_.cwiseProduct(r)));
  };
  VectorXd sol = scaled_solve(rhs);
  for (int it = 0; it < 3; ++it) {
    VectorXd res = rhs - K_ * sol;
    if (inf_norm(res) <= 1e-15 * (1.0 + inf_norm(rhs))) break;
    sol += scaled_solve(res);
  }
  return sol;
}

HsdSolver::Direction HsdSolver::direction(double eta, double sigma_mu, const Direction* affine) {
  // Rc = sigma*mu*s^{-1} - z - corrector
  ConeVec rc;
  rc.lin = VectorXd(l_);
  for (int i = 0; i < l_; ++i) {
    double corr = affine ? affine->ds.lin[i] * affine->dz.lin[i] : 0.0;
    rc.lin[i] = (sigma_mu - corr) / s_.lin[i] - z_.lin[i];
  }
  for (std::size_t b = 0; b < sf_.psd_dims.size(); ++b) {
    const int d = sf_.psd_dims[b];
    MatrixXd R = sigma_mu * s_inv_[b] - zmat_[b];
    if (affine) {
      MatrixXd c = s_inv_[b] * as_matrix(affine->ds.mats[b], d) * as_matrix(affine->dz.mats[b], d);
      R -= 0.5 * (c + c.transpose());
    }
    rc.mats.emplace_back(Eigen::Map<const VectorXd>(R.data(), R.size()));
  }
  const double rk = sigma_mu - tau_ * kappa_ - (affine ? affine->dtau * affine->dkappa : 0.0);

  const ConeVec Hrz = apply_H(rz_);
  const ConeVec w = axpy(eta, Hrz, rc);  // Rc + eta H rz

  VectorXd rhs(n_ + p_ + 1);
  rhs.head(n_) = -eta * rx_ - Gt_times(w);
  rhs.segment(n_, p_) = -eta * ry_;
  rhs[n_ + p_] = -eta * rt_ - rk / tau_ - inner(h_cone(), w);

  VectorXd sol = solve_kkt(rhs);
  Direction dir;
  auto unpack = [&] {
    dir.dx = sol.head(n_);
    dir.dy = sol.segment(n_, p_);
    dir.dtau = sol[n_ + p_];
    // ds = -eta rz - G dx + h dtau
    dir.ds = axpy(dir.dtau, h_cone(), axpy(-1.0, G_times(dir.dx), scaled(-eta, rz_)));
    // dz = Rc - H ds
    dir.dz = axpy(-1.0, apply_H(dir.ds), rc);
  };
  unpack();
  // Eliminating ds and dz through H loses accuracy once z/s spans many
  // orders of magnitude; refine against the unreduced dual and primal rows.
  for (int pass = 0; pass < 3; ++pass) {
    VectorXd err(n_ + p_ + 1);
    err.head(n_) = -eta * rx_ - (sf_.A.transpose() * dir.dy + Gt_times(dir.dz) + sf_.c * dir.dtau);
    err.segment(n_, p_) = -eta * ry_ - (sf_.A * dir.dx - sf_.b * dir.dtau);
    err[n_ + p_] = rhs[n_ + p_] - K_.row(n_ + p_).dot(sol);
    if (inf_norm(err) <= 1e-14 * (1.0 + inf_norm(rx_) + inf_norm(ry_))) break;
    sol += solve_kkt(err);
    unpack();
  }
  dir.dkappa = (rk - kappa_ * dir.dtau) / tau_;
  return dir;
}

SolveResult HsdSolver::finish(SolveStatus status, const std::string& message) {
  SolveResult res;
  res.status = status;
  res.iterations = iterations_;
  res.message = message;
  res.solve_time = std::chrono::duration<double>(Clock::now() - start_).count();
  const double t = tau_;
  if (status == SolveStatus::Optimal) {
    res.primal = x_ / t;
    res.objective = sf_.c.dot(res.primal) / obj_scale_ + sf_.offset;
  } else if (status == SolveStatus::Unbounded) {
    res.primal = x_;  // improving ray
  }
  if (status == SolveStatus::Optimal || status == SolveStatus::Infeasible) {
    const double div = status == SolveStatus::Optimal ? t : 1.0;
    VectorXd y = y_.cwiseProduct(eq_scale_) / (div * obj_scale_);
    VectorXd zl = z_.lin.cwiseProduct(lin_scale_) / (div * obj_scale_);
    res.dual = VectorXd::Zero(static_cast<Eigen::Index>(sf_.row_map.size()));
    for (std::size_t r = 0; r < sf_.row_map.size(); ++r) {
      const auto [idx, sign] = sf_.row_map[r];
      res.dual[static_cast<Eigen::Index>(r)] = idx < 0 ? sign * y[-idx - 1] : sign * zl[idx];
    }
    for (std::size_t b = 0; b < sf_.psd_dims.size(); ++b) {
      const int d = sf_.psd_dims[b];
      res.psd_duals.push_back(MatrixXd(as_matrix(z_.mats[b], d)) * psd_scale_[b] / (div * obj_scale_));
    }
  }
  return res;
}

SolveResult HsdSolver::run() {
  start_ = Clock::now();
  x_ = VectorXd::Zero(n_);
  y_ = VectorXd::Zero(p_);
  s_ = identity_cone();
  z_ = identity_cone();
  tau_ = kappa_ = 1.0;

  const ConeVec h = h_cone();
  const double bnorm = std::max(inf_norm(sf_.b), inf_norm(h));
  const double cnorm = inf_norm(sf_.c);
  const double feastol = limits_.feasibility_tol;
  const double gaptol = limits_.gap_tol;

  double best_merit = std::numeric_limits<double>::infinity();
  bool best_acceptable = false;
  // Iteration of the last 10% merit improvement; an acceptable run that stops
  // improving is ill-conditioned near the optimal face and will not recover.
  double progress_merit = best_merit;
  int progress_iter = 0;
  // Same relaxation for certificates whose residual ratio sits at roundoff
  // level while tau -> 0.
  bool infeasible_cert = false, unbounded_cert = false;
  VectorXd best_x, best_y;
  ConeVec best_s, best_z;
  double best_tau = 1.0, best_kappa = 1.0;

  auto restore_best = [&] {
    x_ = best_x;
    y_ = best_y;
    s_ = best_s;
    z_ = best_z;
    tau_ = best_tau;
    kappa_ = best_kappa;
  };

  for (iterations_ = 0; iterations_ <= limits_.max_iterations; ++iterations_) {
    rx_ = sf_.A.transpose() * y_ + Gt_times(z_) + sf_.c * tau_;
    ry_ = sf_.A * x_ - sf_.b * tau_;
    rz_ = axpy(-tau_, h, G_times(x_));
    rz_ += s_;
    const double cx = sf_.c.dot(x_);
    const double by_hz = sf_.b.dot(y_) + inner(h, z_);
    rt_ = kappa_ + cx + by_hz;
    const double sz = inner(s_, z_);
    mu_ = (sz + tau_ * kappa_) / (nu_ + 1);

    const double pres = std::max(inf_norm(ry_), inf_norm(rz_)) / tau_ / (1.0 + bnorm);
    const double dres = inf_norm(rx_) / tau_ / (1.0 + cnorm);
    const double pcost = cx / tau_;
    const double dcost = -by_hz / tau_;
    const double gap = sz / (tau_ * tau_);
    const double relgap = std::max(gap, std::abs(pcost - dcost)) / (1.0 + std::min(std::abs(pcost), std::abs(dcost)));

    if (pres <= feastol && dres <= feastol && relgap <= gaptol) return finish(SolveStatus::Optimal, "optimal");

    const double merit = std::max({pres, dres, relgap});
    if (merit < best_merit) {
      best_merit = merit;
      best_acceptable = merit <= 1e-6;
      best_x = x_;
      best_y = y_;
      best_s = s_;
      best_z = z_;
      best_tau = tau_;
      best_kappa = kappa_;
    }
    if (merit < 0.9 * progress_merit) {
      progress_merit = merit;
      progress_iter = iterations_;
    }
    const bool vanishing_tau = tau_ <= 1e-6 * kappa_;
    if (by_hz < 0) {
      const double resd = inf_norm(VectorXd(sf_.A.transpose() * y_ + Gt_times(z_)));
      if (resd / -by_hz <= feastol) return finish(SolveStatus::Infeasible, "primal infeasible");
      infeasible_cert |= vanishing_tau && resd / -by_hz <= 1e-6;
    }
    if (cx < 0) {
      const double resp = std::max(inf_norm(VectorXd(sf_.A * x_)), inf_norm(axpy(1.0, s_, G_times(x_))));
      if (resp / -cx <= feastol) return finish(SolveStatus::Unbounded, "dual infeasible");
      unbounded_cert |= vanishing_tau && resp / -cx <= 1e-6;
    }
    const bool settled = best_acceptable || infeasible_cert || unbounded_cert;
    if (settled && iterations_ - progress_iter >= 25) break;

    const auto elapsed = std::chrono::duration<double>(Clock::now() - start_).count();
    if (elapsed > limits_.time_limit) return finish(SolveStatus::TimeLimit, "time limit reached");
    if (iterations_ == limits_.max_iterations) break;

    if (!prepare_scaling() || !factor_kkt()) break;

    const Direction aff = direction(1.0, 0.0, nullptr);
    double a_aff = std::min({1.0, max_step(s_, aff.ds), max_step(z_, aff.dz)});
    if (aff.dtau < 0) a_aff = std::min(a_aff, -tau_ / aff.dtau);
    if (aff.dkappa < 0) a_aff = std::min(a_aff, -kappa_ / aff.dkappa);
    const double sigma = std::clamp(std::pow(1.0 - a_aff, 3.0), 0.0, 1.0);

    const Direction dir = direction(1.0 - sigma, sigma * mu_, &aff);
    double a_max = std::min(max_step(s_, dir.ds), max_step(z_, dir.dz));
    if (dir.dtau < 0) a_max = std::min(a_max, -tau_ / dir.dtau);
    if (dir.dkappa < 0) a_max = std::min(a_max, -kappa_ / dir.dkappa);
    const double alpha = std::min(1.0, 0.99 * a_max);
    if (!(alpha > 1e-12) || !dir.dx.allFinite()) break;

    x_ += alpha * dir.dx;
    y_ += alpha * dir.dy;
    s_ = axpy(alpha, dir.ds, s_);
    z_ = axpy(alpha, dir.dz, z_);
    tau_ += alpha * dir.dtau;
    kappa_ += alpha * dir.dkappa;
  }

  if (best_acceptable) {
    restore_best();
    auto res = finish(SolveStatus::Optimal, "optimal (reduced accuracy)");
    res.reduced_accuracy = true;
    return res;
  }
  if (infeasible_cert || unbounded_cert) {
    auto res = infeasible_cert ? finish(SolveStatus::Infeasible, "primal infeasible (reduced accuracy)")
                               : finish(SolveStatus::Unbounded, "dual infeasible (reduced accuracy)");
    res.reduced_accuracy = true;
    return res;
  }
  return finish(SolveStatus::NumericalError, "interior-point method stalled");
}

class NativeBackend final : public ConicBackend {
 public:
  std::string name() const override { return "ipm"; }

  static SolveResult solve_reduced(const ConicProblem& problem, const SolveLimits& limits,
                                   const std::vector<int>& keep) {
    std::vector<int> index(static_cast<std::size_t>(problem.num_vars), -1);
    for (std::size_t k = 0; k < keep.size(); ++k) index[keep[k]] = static_cast<int>(k);
    const bool bounded = problem.lower.size() > 0;
    ConicProblem red;
    red.num_vars = static_cast<int>(keep.size());
    red.objective.resize(red.num_vars);
    red.objective_offset = problem.objective_offset;
    if (bounded) {
      red.lower.resize(red.num_vars);
      red.upper.resize(red.num_vars);
    }
    for (std::size_t k = 0; k < keep.size(); ++k) {
      red.objective[k] = problem.objective[keep[k]];
      if (bounded) {
        red.lower[k] = problem.lower[keep[k]];
        red.upper[k] = problem.upper[keep[k]];
      }
    }
    red.rows = problem.rows;
    for (auto& row : red.rows) {
      std::erase_if(row.coeffs, [](const auto& t) { return t.second == 0.0; });
      for (auto& t : row.coeffs) t.first = index[t.first];
    }
    red.psd_blocks = problem.psd_blocks;
    for (auto& block : red.psd_blocks) {
      std::erase_if(block.terms, [](const PsdTerm& t) { return t.var >= 0 && t.coeff == 0.0; });
      for (auto& t : block.terms)
        if (t.var >= 0) t.var = index[t.var];
    }
    for (int j = 0; j < problem.num_vars; ++j)
      if (index[j] < 0 && bounded && problem.lower[j] > problem.upper[j]) {
        SolveResult res;
        res.status = SolveStatus::Infeasible;
        res.message = "empty variable bounds";
        return res;
      }

    SolveResult res = HsdSolver(to_standard_form(red), limits).run();
    if (res.primal.size() == red.num_vars) {
      const bool ray = res.status == SolveStatus::Unbounded;
      VectorXd full = VectorXd::Zero(problem.num_vars);
      for (int j = 0; j < problem.num_vars; ++j) {
        if (index[j] >= 0) full[j] = res.primal[index[j]];
        else if (!ray && bounded) full[j] = std::clamp(0.0, problem.lower[j], problem.upper[j]);
      }
      res.primal = std::move(full);
    }
    return res;
  }

  SolveResult solve(const ConicProblem& problem, const SolveLimits& limits) const override {
    try {
      // Columns with no cost and no row are removed: they carry only their
      // bounds, and such a free direction stalls the dual residual.
      std::vector<int> keep;
      std::vector<char> used(static_cast<std::size_t>(problem.num_vars), 0);
      for (int j = 0; j < problem.num_vars; ++j) used[j] = problem.objective[j] != 0.0;
      for (const auto& row : problem.rows)
        for (const auto& [j, v] : row.coeffs)
          if (v != 0.0) used[j] = 1;
      for (const auto& block : problem.psd_blocks)
        for (const auto& t : block.terms)
          if (t.var >= 0 && t.coeff != 0.0) used[t.var] = 1;
      for (int j = 0; j < problem.num_vars; ++j)
        if (used[j]) keep.push_back(j);
      if (static_cast<int>(keep.size()) == problem.num_vars) return HsdSolver(to_standard_form(problem), limits).run();
      return solve_reduced(problem, limits, keep);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Numerical) throw;
      SolveResult res;
      res.status = SolveStatus::NumericalError;
      res.message = e.what();
      return res;
    }
  }
};

}  // namespace

BackendPtr native_backend() {
  static const BackendPtr backend = std::make_shared<NativeBackend>();
  return backend;
}

}  // namespace sparsecut
