#pragma once

#include "qcg/sdp/problem.hpp"
#include "qcg/sdp/vectorize.hpp"

#include <cstdio>
#include <limits>

namespace qcg::sdp {

// Real conic program over symmetric PSD blocks (svec coordinates, in order) followed by a nonnegative orthant:
// minimize c . x  subject to  A x = b,  x in K.
struct ConeProblem {
  std::vector<Eigen::Index> psd_dims;
  Eigen::Index lp_dim = 0;
  RealMatrix A;
  RealVector b;
  RealVector c;

  Eigen::Index size() const {
    Eigen::Index n = lp_dim;
    for (auto d : psd_dims) n += svec_size(d);
    return n;
  }
};

struct ConeResult {
  SdpStatus status = SdpStatus::kNumericalFailure;
  RealVector x;
  RealVector y;
  RealVector s;
  double tau = 1.0;
  double kappa = 0.0;
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  std::optional<Certificate> certificate;
  std::vector<IterationSummary> history;
  std::string message;
};

namespace detail {

class ConeGeometry {
 public:
  explicit ConeGeometry(const ConeProblem& p) : psd_dims_(p.psd_dims), lp_dim_(p.lp_dim) {
    Eigen::Index off = 0;
    for (auto d : psd_dims_) {
      offsets_.push_back(off);
      off += svec_size(d);
    }
    lp_offset_ = off;
    size_ = off + lp_dim_;
    barrier_ = static_cast<double>(lp_dim_);
    for (auto d : psd_dims_) barrier_ += static_cast<double>(d);
  }

  std::size_t blocks() const { return psd_dims_.size(); }
  Eigen::Index dim(std::size_t k) const { return psd_dims_[k]; }
  Eigen::Index offset(std::size_t k) const { return offsets_[k]; }
  Eigen::Index length(std::size_t k) const { return svec_size(psd_dims_[k]); }
  Eigen::Index lp_offset() const { return lp_offset_; }
  Eigen::Index lp_dim() const { return lp_dim_; }
  Eigen::Index size() const { return size_; }
  double barrier() const { return barrier_; }

  RealVector identity_point() const {
    RealVector v = RealVector::Zero(size_);
    for (std::size_t k = 0; k < blocks(); ++k) {
      Eigen::Index idx = offsets_[k];
      for (Eigen::Index i = 0; i < psd_dims_[k]; ++i) {
        v(idx) = 1.0;
        idx += psd_dims_[k] - i;
      }
    }
    v.tail(lp_dim_).setOnes();
    return v;
  }

  RealMatrix block(const RealVector& v, std::size_t k) const {
    return smat(v.segment(offsets_[k], length(k)), psd_dims_[k]);
  }

  // Largest alpha in (0, cap] with v + alpha dv in the cone interior boundary.
  double max_step(const RealVector& v, const RealVector& dv, double cap) const {
    double alpha = cap;
    for (std::size_t k = 0; k < blocks(); ++k) {
      const RealMatrix m = block(v, k);
      const RealMatrix dm = block(dv, k);
      Eigen::LLT<RealMatrix> llt(m);
      if (llt.info() != Eigen::Success) return 0.0;
      const RealMatrix l_inv = llt.matrixL().solve(RealMatrix::Identity(m.rows(), m.cols()));
      const RealMatrix scaled = l_inv * dm * l_inv.transpose();
      Eigen::SelfAdjointEigenSolver<RealMatrix> es(0.5 * (scaled + scaled.transpose()), Eigen::EigenvaluesOnly);
      const double lo = es.eigenvalues().minCoeff();
      if (lo < 0.0) alpha = std::min(alpha, -1.0 / lo);
    }
    for (Eigen::Index i = 0; i < lp_dim_; ++i) {
      const double d = dv(lp_offset_ + i);
      if (d < 0.0) alpha = std::min(alpha, -v(lp_offset_ + i) / d);
    }
    return alpha;
  }

  double min_eigenvalue(const RealVector& v) const {
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < blocks(); ++k) {
      Eigen::SelfAdjointEigenSolver<RealMatrix> es(block(v, k), Eigen::EigenvaluesOnly);
      lo = std::min(lo, es.eigenvalues().minCoeff());
    }
    if (lp_dim_ > 0) lo = std::min(lo, v.tail(lp_dim_).minCoeff());
    return lo;
  }

 private:
  std::vector<Eigen::Index> psd_dims_;
  Eigen::Index lp_dim_;
  std::vector<Eigen::Index> offsets_;
  Eigen::Index lp_offset_ = 0;
  Eigen::Index size_ = 0;
  double barrier_ = 0.0;
};

inline RealMatrix sym(const RealMatrix& m) { return 0.5 * (m + m.transpose()); }

// Scaling data of the HKM direction at the current iterate: H(W) = sym(X W S^{-1}) on blocks, x w / s on the orthant.
struct HkmScaling {
  std::vector<RealMatrix> x;
  std::vector<RealMatrix> s_inv;
  RealVector lp_ratio;
  RealVector lp_s;

  RealVector apply(const ConeGeometry& g, const RealVector& w) const {
    RealVector out(g.size());
    for (std::size_t k = 0; k < g.blocks(); ++k) {
      const RealMatrix wm = g.block(w, k);
      svec_into(sym(x[k] * wm * s_inv[k]), out.segment(g.offset(k), g.length(k)));
    }
    if (g.lp_dim() > 0) out.tail(g.lp_dim()) = lp_ratio.cwiseProduct(w.tail(g.lp_dim()));
    return out;
  }
};

}  // namespace detail

inline ConeResult solve_cone(const ConeProblem& problem, const SolverOptions& opt = {}) {
  using detail::ConeGeometry;
  const ConeGeometry geo(problem);
  const Eigen::Index n = geo.size();
  const Eigen::Index m = problem.A.rows();
  if (problem.A.cols() != n || problem.b.size() != m || problem.c.size() != n) {
    throw Error(ErrorKind::kDimensionMismatch, "solve_cone: data sizes do not match the cone");
  }

  // Row and objective scaling.
  RealMatrix A = problem.A;
  RealVector b = problem.b;
  RealVector row_scale = RealVector::Ones(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double nrm = A.row(i).norm();
    if (nrm > 0.0) {
      row_scale(i) = 1.0 / nrm;
      A.row(i) *= row_scale(i);
      b(i) *= row_scale(i);
    }
  }
  const double c_scale = 1.0 / std::max(1.0, problem.c.norm());
  const RealVector c = problem.c * c_scale;
  const double b_norm = b.norm();
  const double c_norm = c.norm();

  // Per-block column lists of rows that touch each block, used to skip empty work in the Schur complement.
  std::vector<std::vector<Eigen::Index>> touching(geo.blocks());
  for (std::size_t k = 0; k < geo.blocks(); ++k) {
    for (Eigen::Index i = 0; i < m; ++i) {
      if (A.row(i).segment(geo.offset(k), geo.length(k)).cwiseAbs().maxCoeff() > 0.0) touching[k].push_back(i);
    }
  }
  std::vector<std::vector<RealMatrix>> row_blocks(geo.blocks());
  for (std::size_t k = 0; k < geo.blocks(); ++k) {
    for (auto i : touching[k]) {
      row_blocks[k].push_back(smat(A.row(i).segment(geo.offset(k), geo.length(k)).transpose(), geo.dim(k)));
    }
  }

  RealVector x = geo.identity_point();
  RealVector s = geo.identity_point();
  RealVector y = RealVector::Zero(m);
  double tau = 1.0;
  double kappa = 1.0;
  const double nu = geo.barrier() + 1.0;

  ConeResult res;
  auto finish = [&](SdpStatus status, std::string msg) {
    res.status = status;
    res.message = std::move(msg);
    res.x = x / tau;
    res.s = s / tau * (1.0 / c_scale);
    res.y = (y / tau).cwiseProduct(row_scale) * (1.0 / c_scale);
    res.tau = tau;
    res.kappa = kappa;
    res.primal_objective = problem.c.dot(res.x);
    res.dual_objective = problem.b.dot(res.y);
    return res;
  };

  int stall = 0;
  for (int iter = 0;; ++iter) {
    res.iterations = iter;
    const RealVector rp = b * tau - A * x;
    const RealVector rd = c * tau - A.transpose() * y - s;
    const double rg = kappa + c.dot(x) - b.dot(y);
    const double mu = (x.dot(s) + tau * kappa) / nu;

    const double pobj = c.dot(x) / tau;
    const double dobj = b.dot(y) / tau;
    res.primal_residual = rp.norm() / tau / (1.0 + b_norm);
    res.dual_residual = rd.norm() / tau / (1.0 + c_norm);
    res.gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));

    // Row scaling can hide residual in the original units, so both must pass; the unscaled one with headroom for
    // the rows removed in presolve.
    const double raw_primal = (problem.b - problem.A * (x / tau)).norm() / (1.0 + problem.b.norm());
    if (res.primal_residual <= opt.feas_tol && raw_primal <= 0.5 * opt.feas_tol && res.dual_residual <= opt.feas_tol &&
        res.gap <= opt.gap_tol) {
      return finish(SdpStatus::kOptimal, "converged");
    }

    const double by = b.dot(y);
    const double cx = c.dot(x);
    const RealVector ray_dual = A.transpose() * y + s;
    const RealVector ray_primal = A * x;
    const bool tk_small = tau <= 1e-8 * std::max(1.0, kappa);
    if (by > 0.0 && (ray_dual.norm() <= opt.infeas_tol * by || (tk_small && ray_dual.norm() <= 1e-6 * by))) {
      ConeResult& r = res;
      r.certificate = Certificate{"ray", y.cwiseProduct(row_scale) / by, 1.0, ray_dual.norm() / by,
                                  "dual improving ray: A^T y + s = 0 approximately with s in the cone, b.y = 1"};
      r.status = SdpStatus::kInfeasible;
      r.message = "primal infeasible";
      r.x = x;
      r.y = y;
      r.s = s;
      r.tau = tau;
      r.kappa = kappa;
      return r;
    }
    if (cx < 0.0 && (ray_primal.norm() <= opt.infeas_tol * (-cx) || (tk_small && ray_primal.norm() <= 1e-6 * -cx))) {
      res.status = SdpStatus::kUnbounded;
      res.message = "dual infeasible (primal unbounded)";
      res.x = x;
      res.y = y;
      res.s = s;
      res.tau = tau;
      res.kappa = kappa;
      return res;
    }
    if (iter >= opt.max_iter) return finish(SdpStatus::kMaxIterations, "iteration limit reached");

    // Scaling and Schur complement M = A H A^T.
    detail::HkmScaling hkm;
    bool ok = true;
    for (std::size_t k = 0; k < geo.blocks(); ++k) {
      const RealMatrix sk = geo.block(s, k);
      Eigen::LLT<RealMatrix> llt(sk);
      if (llt.info() != Eigen::Success) {
        ok = false;
        break;
      }
      hkm.x.push_back(geo.block(x, k));
      hkm.s_inv.push_back(llt.solve(RealMatrix::Identity(sk.rows(), sk.cols())));
    }
    if (!ok) return finish(SdpStatus::kNumericalFailure, "dual slack lost positive definiteness");
    if (geo.lp_dim() > 0) {
      hkm.lp_s = s.tail(geo.lp_dim());
      hkm.lp_ratio = x.tail(geo.lp_dim()).cwiseQuotient(hkm.lp_s);
    }

    RealMatrix schur = RealMatrix::Zero(m, m);
    for (std::size_t k = 0; k < geo.blocks(); ++k) {
      const auto& rows = touching[k];
      if (rows.empty()) continue;
      const Eigen::Index len = geo.length(k);
      RealMatrix h(len, static_cast<Eigen::Index>(rows.size()));
      for (std::size_t r = 0; r < rows.size(); ++r) {
        svec_into(detail::sym(hkm.x[k] * row_blocks[k][r] * hkm.s_inv[k]), h.col(static_cast<Eigen::Index>(r)));
      }
      const RealMatrix prod = A.middleCols(geo.offset(k), len) * h;
      for (std::size_t r = 0; r < rows.size(); ++r) schur.col(rows[r]) += prod.col(static_cast<Eigen::Index>(r));
    }
    if (geo.lp_dim() > 0) {
      const auto alp = A.rightCols(geo.lp_dim());
      schur.noalias() += alp * hkm.lp_ratio.asDiagonal() * alp.transpose();
    }
    schur = 0.5 * (schur + schur.transpose());

    Eigen::LLT<RealMatrix> chol(schur);
    Eigen::LDLT<RealMatrix> ldlt;
    bool use_llt = chol.info() == Eigen::Success;
    if (!use_llt) {
      RealMatrix reg = schur;
      reg.diagonal().array() += 1e-14 * std::max(1.0, schur.diagonal().cwiseAbs().maxCoeff());
      ldlt.compute(reg);
    }
    auto schur_solve = [&](const RealVector& rhs) -> RealVector {
      if (m == 0) return RealVector::Zero(0);
      return use_llt ? RealVector(chol.solve(rhs)) : RealVector(ldlt.solve(rhs));
    };

    const RealVector hc = hkm.apply(geo, c);
    const RealVector q = b + A * hc;
    const RealVector v = schur_solve(q);
    const double c_hc = c.dot(hc);
    const RealVector two_b_minus_q = 2.0 * b - q;
    const RealVector h_rd = hkm.apply(geo, rd);

    struct Direction {
      RealVector dx, ds, dy;
      double dtau = 0.0, dkappa = 0.0;
    };

    // Newton step for target sigma * mu with residual weight eta; corr carries second-order terms.
    auto direction = [&](double sigma, double eta, const Direction* corr) {
      RealVector r1(n);
      for (std::size_t k = 0; k < geo.blocks(); ++k) {
        RealMatrix t = sigma * mu * hkm.s_inv[k] - hkm.x[k];
        if (corr != nullptr) t -= geo.block(corr->dx, k) * geo.block(corr->ds, k) * hkm.s_inv[k];
        svec_into(detail::sym(t), r1.segment(geo.offset(k), geo.length(k)));
      }
      if (geo.lp_dim() > 0) {
        RealVector t = sigma * mu * hkm.lp_s.cwiseInverse() - x.tail(geo.lp_dim());
        if (corr != nullptr) {
          t -= corr->dx.tail(geo.lp_dim()).cwiseProduct(corr->ds.tail(geo.lp_dim())).cwiseQuotient(hkm.lp_s);
        }
        r1.tail(geo.lp_dim()) = t;
      }
      r1 -= eta * h_rd;
      const double tk_corr = corr != nullptr ? corr->dtau * corr->dkappa : 0.0;
      const RealVector u = schur_solve(eta * rp - A * r1);
      const double numer = eta * rg + c.dot(r1) + (sigma * mu - tau * kappa - tk_corr) / tau - two_b_minus_q.dot(u);
      const double denom = two_b_minus_q.dot(v) + c_hc + kappa / tau;
      Direction d;
      d.dtau = numer / denom;
      d.dy = u + d.dtau * v;
      d.ds = eta * rd - A.transpose() * d.dy + c * d.dtau;
      d.dx = r1 + hkm.apply(geo, A.transpose() * d.dy - c * d.dtau);
      d.dkappa = (sigma * mu - tau * kappa - tk_corr - kappa * d.dtau) / tau;
      return d;
    };

    auto step_length = [&](const Direction& d) {
      double alpha = geo.max_step(x, d.dx, 1e6);
      alpha = std::min(alpha, geo.max_step(s, d.ds, 1e6));
      if (d.dtau < 0.0) alpha = std::min(alpha, -tau / d.dtau);
      if (d.dkappa < 0.0) alpha = std::min(alpha, -kappa / d.dkappa);
      return alpha;
    };

    const Direction pred = direction(0.0, 1.0, nullptr);
    const double alpha_aff = std::min(1.0, step_length(pred));
    const double mu_aff = ((x + alpha_aff * pred.dx).dot(s + alpha_aff * pred.ds) +
                           (tau + alpha_aff * pred.dtau) * (kappa + alpha_aff * pred.dkappa)) /
                          nu;
    const double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, 3.0), 0.0, 1.0);
    const Direction dir = direction(sigma, 1.0 - sigma, &pred);
    const double alpha = std::min(1.0, 0.95 * step_length(dir));

    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
      return finish(SdpStatus::kNumericalFailure, "no admissible step length");
    }
    x += alpha * dir.dx;
    s += alpha * dir.ds;
    y += alpha * dir.dy;
    tau += alpha * dir.dtau;
    kappa += alpha * dir.dkappa;
    if (!(tau > 0.0) || !(kappa > 0.0) || !x.allFinite() || !s.allFinite() || !y.allFinite()) {
      return finish(SdpStatus::kNumericalFailure, "iterate left the cone");
    }

    res.history.push_back({iter, res.primal_residual, res.dual_residual, res.gap, mu, alpha});
    if (opt.verbose) {
      std::fprintf(stderr, "%3d  pres %.2e  dres %.2e  gap %.2e  mu %.2e  tau %.2e  kappa %.2e  step %.3f\n", iter,
                   res.primal_residual, res.dual_residual, res.gap, mu, tau, kappa, alpha);
    }
    stall = alpha < 1e-8 ? stall + 1 : 0;
    if (stall >= 5) return finish(SdpStatus::kNumericalFailure, "step length stalled");
  }
}

}  // namespace qcg::sdp
