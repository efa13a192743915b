#pragma once

#include "qcg/sdp/cone.hpp"
#include "qcg/sdp/problem.hpp"
#include "qcg/sdp/vectorize.hpp"

namespace qcg::sdp {

// Linear data of a problem over Hermitian coordinates of its blocks followed by its scalars
// (free scalars contribute a positive and a negative part).
struct CompiledProblem {
  RealMatrix A;
  RealVector b;
  RealVector c;
  std::vector<Eigen::Index> block_offset;
  std::vector<Eigen::Index> block_dim;
  std::vector<Eigen::Index> scalar_offset;
  std::vector<bool> scalar_free;
  std::vector<std::size_t> row_constraint;
  Eigen::Index size = 0;

  Eigen::Index scalar_width(std::size_t s) const { return scalar_free[s] ? 2 : 1; }
};

inline CompiledProblem compile(const SdpProblem& p) {
  p.validate();
  CompiledProblem cp;
  Eigen::Index off = 0;
  for (const auto& blk : p.blocks()) {
    cp.block_offset.push_back(off);
    cp.block_dim.push_back(static_cast<Eigen::Index>(blk.dim));
    off += hermitian_coord_count(static_cast<Eigen::Index>(blk.dim));
  }
  for (const auto& sc : p.scalars()) {
    cp.scalar_offset.push_back(off);
    cp.scalar_free.push_back(sc.domain == ScalarDomain::kFree);
    off += sc.domain == ScalarDomain::kFree ? 2 : 1;
  }
  cp.size = off;

  Eigen::Index rows = 0;
  for (const auto& con : p.constraints()) rows += hermitian_coord_count(static_cast<Eigen::Index>(con.dim));
  cp.A = RealMatrix::Zero(rows, cp.size);
  cp.b = RealVector::Zero(rows);
  cp.c = RealVector::Zero(cp.size);

  Eigen::Index row = 0;
  std::size_t con_index = 0;
  for (const auto& con : p.constraints()) {
    const Eigen::Index count = hermitian_coord_count(static_cast<Eigen::Index>(con.dim));
    cp.b.segment(row, count) = hermitian_coords(con.rhs);
    for (const auto& term : con.terms) {
      if (term.var.kind == Variable::Kind::kBlock) {
        const Eigen::Index n = cp.block_dim[term.var.index];
        const Eigen::Index base = cp.block_offset[term.var.index];
        for (Eigen::Index j = 0; j < n * n; ++j) {
          const ComplexMatrix image = term.map(hermitian_basis_element(n, j));
          if (image.rows() != static_cast<Eigen::Index>(con.dim) || image.cols() != image.rows()) {
            throw Error(ErrorKind::kDimensionMismatch, "constraint '" + con.name + "': map output has wrong shape");
          }
          if (!is_hermitian(image, 1e-10 * std::max(1.0, image.cwiseAbs().maxCoeff()))) {
            throw Error(ErrorKind::kNotHermitian, "constraint '" + con.name + "': map is not Hermiticity-preserving");
          }
          cp.A.block(row, base + j, count, 1) += hermitian_coords(image);
        }
      } else {
        const RealVector coef = hermitian_coords(term.coefficient);
        const Eigen::Index base = cp.scalar_offset[term.var.index];
        cp.A.block(row, base, count, 1) += coef;
        if (cp.scalar_free[term.var.index]) cp.A.block(row, base + 1, count, 1) -= coef;
      }
    }
    for (Eigen::Index r = 0; r < count; ++r) cp.row_constraint.push_back(con_index);
    row += count;
    ++con_index;
  }

  for (std::size_t k = 0; k < p.blocks().size(); ++k) {
    cp.c.segment(cp.block_offset[k], hermitian_coord_count(cp.block_dim[k])) = hermitian_coords(p.blocks()[k].objective);
  }
  for (std::size_t s = 0; s < p.scalars().size(); ++s) {
    cp.c(cp.scalar_offset[s]) = p.scalars()[s].objective;
    if (cp.scalar_free[s]) cp.c(cp.scalar_offset[s] + 1) = -p.scalars()[s].objective;
  }
  return cp;
}

namespace detail {

struct RowBasis {
  std::vector<Eigen::Index> rows;
  RealMatrix null_space;  // columns span {x : A x = 0}
};

inline RowBasis independent_rows(const RealMatrix& a, double tol) {
  RowBasis out;
  const Eigen::Index n = a.cols();
  if (a.rows() == 0) {
    out.null_space = RealMatrix::Identity(n, n);
    return out;
  }
  Eigen::ColPivHouseholderQR<RealMatrix> qr(a.transpose());
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  qr.setThreshold(tol / scale);
  const Eigen::Index rank = qr.rank();
  const auto& perm = qr.colsPermutation().indices();
  for (Eigen::Index i = 0; i < rank; ++i) out.rows.push_back(perm(i));
  std::sort(out.rows.begin(), out.rows.end());
  const RealMatrix q = qr.householderQ();
  out.null_space = q.rightCols(n - rank);
  return out;
}

inline RealMatrix take_rows(const RealMatrix& a, const std::vector<Eigen::Index>& rows) {
  RealMatrix out(static_cast<Eigen::Index>(rows.size()), a.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = a.row(rows[i]);
  return out;
}

inline RealVector take(const RealVector& v, const std::vector<Eigen::Index>& idx) {
  RealVector out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out(static_cast<Eigen::Index>(i)) = v(idx[i]);
  return out;
}

}  // namespace detail

class Solver {
 public:
  explicit Solver(SolverOptions opt = {}) : opt_(opt) {}

  SdpSolution solve(const SdpProblem& p) const {
    const CompiledProblem cp = compile(p);
    SdpSolution sol;
    sol.presolve.rows = static_cast<std::size_t>(cp.A.rows());
    sol.presolve.coordinates = static_cast<std::size_t>(cp.size);

    const double b_norm = cp.b.norm();
    const double lin_tol = 1e-9 * (1.0 + b_norm);

    // Linear consistency.
    const RealVector x0 = cp.A.completeOrthogonalDecomposition().solve(cp.b);
    const RealVector lin_res = cp.b - cp.A * x0;
    if (lin_res.norm() > lin_tol) {
      sol.status = SdpStatus::kInfeasible;
      const double by = cp.b.dot(lin_res);
      sol.certificate = Certificate{"linear", lin_res / by, 1.0, (cp.A.transpose() * lin_res).norm() / by,
                                    "equality constraints are inconsistent: A^T y = 0, b.y = 1"};
      sol.primal_residual = lin_res.norm() / (1.0 + b_norm);
      sol.message = "linear equality system has no solution (residual " + std::to_string(lin_res.norm()) + ")";
      annotate_linear_certificate(cp, p, sol);
      return sol;
    }

    detail::RowBasis basis = detail::independent_rows(cp.A, opt_.rank_tol);
    sol.presolve.independent_rows = basis.rows.size();

    // Variables pinned by the equalities.
    std::vector<bool> fixed_col(static_cast<std::size_t>(cp.size), false);
    std::vector<bool> block_fixed(p.blocks().size(), false);
    std::vector<bool> scalar_fixed(p.scalars().size(), false);
    auto pinned = [&](Eigen::Index off, Eigen::Index len) {
      if (basis.null_space.cols() == 0) return true;
      return basis.null_space.middleRows(off, len).cwiseAbs().maxCoeff() <= 1e-9;
    };
    for (std::size_t k = 0; k < p.blocks().size(); ++k) {
      const Eigen::Index len = hermitian_coord_count(cp.block_dim[k]);
      if (!pinned(cp.block_offset[k], len)) continue;
      const ComplexMatrix xk = from_hermitian_coords(x0.segment(cp.block_offset[k], len), cp.block_dim[k]);
      const HermitianEigen e = hermitian_eigen(xk);
      const double tol = opt_.feas_tol * std::max(1.0, e.values.cwiseAbs().maxCoeff());
      if (e.values.minCoeff() < -tol) {
        RealVector target = RealVector::Zero(cp.size);
        target.segment(cp.block_offset[k], len) = -hermitian_coords(projector(e.vectors.col(0)));
        return fixed_infeasible(cp, p, sol, target, "block '" + p.blocks()[k].name +
                                                         "' is pinned by the equalities to a matrix with eigenvalue " +
                                                         std::to_string(e.values.minCoeff()));
      }
      block_fixed[k] = true;
      for (Eigen::Index j = 0; j < len; ++j) fixed_col[static_cast<std::size_t>(cp.block_offset[k] + j)] = true;
      sol.presolve.fixed_variables.push_back(p.blocks()[k].name);
    }
    for (std::size_t s = 0; s < p.scalars().size(); ++s) {
      if (cp.scalar_free[s]) {
        // A free scalar's split pair always spans a null direction; it is never pinned in split form.
        continue;
      }
      const Eigen::Index off = cp.scalar_offset[s];
      if (!pinned(off, 1)) continue;
      if (x0(off) < -opt_.feas_tol) {
        RealVector target = RealVector::Zero(cp.size);
        target(off) = -1.0;
        return fixed_infeasible(cp, p, sol, target, "scalar '" + p.scalars()[s].name +
                                                         "' is pinned to the negative value " + std::to_string(x0(off)));
      }
      scalar_fixed[s] = true;
      fixed_col[static_cast<std::size_t>(off)] = true;
      sol.presolve.fixed_variables.push_back(p.scalars()[s].name);
    }

    // Reduced problem over free columns.
    std::vector<Eigen::Index> free_cols;
    for (Eigen::Index j = 0; j < cp.size; ++j)
      if (!fixed_col[static_cast<std::size_t>(j)]) free_cols.push_back(j);
    RealVector fixed_x = RealVector::Zero(cp.size);
    for (Eigen::Index j = 0; j < cp.size; ++j)
      if (fixed_col[static_cast<std::size_t>(j)]) fixed_x(j) = x0(j);

    RealVector full_x = fixed_x;
    std::optional<ConeResult> cone;
    if (!free_cols.empty()) {
      RealMatrix a_free(cp.A.rows(), static_cast<Eigen::Index>(free_cols.size()));
      for (std::size_t j = 0; j < free_cols.size(); ++j) a_free.col(static_cast<Eigen::Index>(j)) = cp.A.col(free_cols[j]);
      const RealVector b_free = cp.b - cp.A * fixed_x;
      const detail::RowBasis reduced = detail::independent_rows(a_free, opt_.rank_tol);
      const RealMatrix a_red = detail::take_rows(cp.A, reduced.rows);
      const RealVector b_red = detail::take(b_free, reduced.rows);

      ConeProblem cone_problem = embed(cp, p, a_red, b_red, block_fixed, scalar_fixed);
      cone = solve_cone(cone_problem, opt_);
      sol.iterations = cone->iterations;
      sol.history = cone->history;
      sol.dual_residual = cone->dual_residual;
      sol.gap = cone->gap;
      sol.dual_objective = cone->dual_objective;
      sol.status = cone->status;
      sol.message = cone->message;
      if (cone->status == SdpStatus::kInfeasible && cone->certificate) {
        Certificate cert = *cone->certificate;
        RealVector y_full = RealVector::Zero(cp.A.rows());
        for (std::size_t i = 0; i < reduced.rows.size(); ++i) y_full(reduced.rows[i]) = cert.y(static_cast<Eigen::Index>(i));
        cert.b_dot_y = b_free.dot(y_full);
        cert.y = y_full;
        sol.certificate = cert;
      }
      decode(cp, p, cone->x, block_fixed, scalar_fixed, full_x);
    } else {
      sol.status = SdpStatus::kOptimal;
      sol.message = "all variables pinned by the equality constraints";
    }

    assign(cp, p, full_x, sol);
    const RealVector residual = cp.A * full_x - cp.b;
    sol.primal_residual = residual.norm() / (1.0 + b_norm);
    sol.objective_value = cp.c.dot(full_x);
    if (!cone) sol.dual_objective = sol.objective_value;
    if (sol.status == SdpStatus::kOptimal && sol.primal_residual > opt_.feas_tol) {
      sol.status = SdpStatus::kNumericalFailure;
      sol.message = "decoded point violates the equalities beyond feas_tol";
    }
    return sol;
  }

  const SolverOptions& options() const { return opt_; }

 private:
  ConeProblem embed(const CompiledProblem& cp, const SdpProblem& p, const RealMatrix& a_red, const RealVector& b_red,
                    const std::vector<bool>& block_fixed, const std::vector<bool>& scalar_fixed) const {
    ConeProblem cone;
    std::vector<std::size_t> live_blocks;
    for (std::size_t k = 0; k < p.blocks().size(); ++k) {
      if (block_fixed[k]) continue;
      live_blocks.push_back(k);
      cone.psd_dims.push_back(2 * cp.block_dim[k]);
    }
    std::vector<Eigen::Index> lp_cols;
    for (std::size_t s = 0; s < p.scalars().size(); ++s) {
      if (scalar_fixed[s]) continue;
      for (Eigen::Index w = 0; w < cp.scalar_width(s); ++w) lp_cols.push_back(cp.scalar_offset[s] + w);
    }
    cone.lp_dim = static_cast<Eigen::Index>(lp_cols.size());
    const Eigen::Index n = cone.size();
    const Eigen::Index m = a_red.rows();
    cone.A = RealMatrix::Zero(m, n);
    cone.b = b_red;
    cone.c = RealVector::Zero(n);

    auto embed_coords = [&](const RealVector& coords, Eigen::Index dim, Eigen::Ref<RealVector> out) {
      const ComplexMatrix g = from_hermitian_coords(coords, dim);
      svec_into(0.5 * complex_to_real(g), out);
    };

    Eigen::Index off = 0;
    for (auto k : live_blocks) {
      const Eigen::Index dim = cp.block_dim[k];
      const Eigen::Index len = hermitian_coord_count(dim);
      const Eigen::Index out_len = svec_size(2 * dim);
      RealVector buf(out_len);
      for (Eigen::Index i = 0; i < m; ++i) {
        const RealVector coords = a_red.row(i).segment(cp.block_offset[k], len).transpose();
        if (coords.cwiseAbs().maxCoeff() == 0.0) continue;
        embed_coords(coords, dim, buf);
        cone.A.row(i).segment(off, out_len) = buf.transpose();
      }
      embed_coords(cp.c.segment(cp.block_offset[k], len), dim, buf);
      cone.c.segment(off, out_len) = buf;
      off += out_len;
    }
    for (std::size_t j = 0; j < lp_cols.size(); ++j) {
      cone.A.col(off + static_cast<Eigen::Index>(j)) = a_red.col(lp_cols[j]);
      cone.c(off + static_cast<Eigen::Index>(j)) = cp.c(lp_cols[j]);
    }
    return cone;
  }

  void decode(const CompiledProblem& cp, const SdpProblem& p, const RealVector& x, const std::vector<bool>& block_fixed,
              const std::vector<bool>& scalar_fixed, RealVector& full_x) const {
    Eigen::Index off = 0;
    for (std::size_t k = 0; k < p.blocks().size(); ++k) {
      if (block_fixed[k]) continue;
      const Eigen::Index dim = cp.block_dim[k];
      const Eigen::Index len = svec_size(2 * dim);
      const ComplexMatrix h = real_to_complex(smat(x.segment(off, len), 2 * dim));
      full_x.segment(cp.block_offset[k], hermitian_coord_count(dim)) = hermitian_coords(h);
      off += len;
    }
    for (std::size_t s = 0; s < p.scalars().size(); ++s) {
      if (scalar_fixed[s]) continue;
      for (Eigen::Index w = 0; w < cp.scalar_width(s); ++w) full_x(cp.scalar_offset[s] + w) = x(off++);
    }
  }

  static void assign(const CompiledProblem& cp, const SdpProblem& p, const RealVector& full_x, SdpSolution& sol) {
    for (std::size_t k = 0; k < p.blocks().size(); ++k) {
      sol.blocks[p.blocks()[k].name] =
          from_hermitian_coords(full_x.segment(cp.block_offset[k], hermitian_coord_count(cp.block_dim[k])), cp.block_dim[k]);
    }
    for (std::size_t s = 0; s < p.scalars().size(); ++s) {
      double v = full_x(cp.scalar_offset[s]);
      if (cp.scalar_free[s]) v -= full_x(cp.scalar_offset[s] + 1);
      sol.scalars[p.scalars()[s].name] = v;
    }
  }

  // Infeasibility of a pinned variable: find y with A^T y = target (target is minus a cone element).
  SdpSolution& fixed_infeasible(const CompiledProblem& cp, const SdpProblem& p, SdpSolution& sol,
                                const RealVector& target, const std::string& why) const {
    const RealVector y = cp.A.transpose().completeOrthogonalDecomposition().solve(target);
    const double by = cp.b.dot(y);
    sol.status = SdpStatus::kInfeasible;
    sol.certificate = Certificate{"fixed-block", y / by, 1.0, (cp.A.transpose() * y - target).norm() / std::abs(by), why};
    sol.message = why;
    annotate_linear_certificate(cp, p, sol);
    return sol;
  }

  static void annotate_linear_certificate(const CompiledProblem& cp, const SdpProblem& p, SdpSolution& sol) {
    if (!sol.certificate) return;
    std::vector<double> weight(p.constraints().size(), 0.0);
    for (Eigen::Index i = 0; i < sol.certificate->y.size(); ++i) {
      weight[cp.row_constraint[static_cast<std::size_t>(i)]] += std::abs(sol.certificate->y(i));
    }
    std::string names;
    for (std::size_t c = 0; c < weight.size(); ++c) {
      if (weight[c] > 1e-9) names += (names.empty() ? "" : ", ") + p.constraints()[c].name;
    }
    if (!names.empty()) sol.certificate->detail += " [involves: " + names + "]";
  }

  SolverOptions opt_;
};

inline SdpSolution solve(const SdpProblem& p, const SolverOptions& opt = {}) { return Solver(opt).solve(p); }

inline SdpSolution solve(const SdpProblem& p, double feas_tol, double gap_tol, int max_iter) {
  SolverOptions opt;
  opt.feas_tol = feas_tol;
  opt.gap_tol = gap_tol;
  opt.max_iter = max_iter;
  return Solver(opt).solve(p);
}

}  // namespace qcg::sdp
