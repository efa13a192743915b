#pragma once

#include "qcg/core.hpp"

#include <string>
#include <vector>

namespace qcg {

inline constexpr double kCptpTolerance = 1e-9;

class KrausChannel {
 public:
  KrausChannel() = default;

  // Validates trace preservation: sum K^dag K = I within tol.
  static KrausChannel from_operators(std::vector<ComplexMatrix> ops, double tol = kCptpTolerance) {
    KrausChannel ch = build(std::move(ops));
    const double err = ch.trace_preservation_error();
    if (err > tol) {
      throw Error(ErrorKind::kNotCptp, "Kraus family is not trace-preserving (error " + std::to_string(err) + ")");
    }
    ch.trace_preserving_ = true;
    return ch;
  }

  // Accepts trace-nonincreasing families, e.g. recovery maps restricted to a support.
  static KrausChannel trace_nonincreasing(std::vector<ComplexMatrix> ops, double tol = kCptpTolerance) {
    KrausChannel ch = build(std::move(ops));
    ComplexMatrix sum = ch.kraus_sum();
    if (min_eigenvalue(identity(ch.dim_in_) - sum) < -tol) {
      throw Error(ErrorKind::kNotCptp, "Kraus family increases trace");
    }
    ch.trace_preserving_ = ch.trace_preservation_error() <= tol;
    return ch;
  }

  static KrausChannel unitary(const ComplexMatrix& u) {
    detail::require_square(u, "KrausChannel::unitary");
    const double err = (u.adjoint() * u - identity(static_cast<std::size_t>(u.rows()))).cwiseAbs().maxCoeff();
    if (err > kCptpTolerance) throw Error(ErrorKind::kNotCptp, "matrix is not unitary");
    return from_operators({u});
  }

  static KrausChannel identity_channel(std::size_t dim) { return from_operators({identity(dim)}); }

  std::size_t dim_in() const { return dim_in_; }
  std::size_t dim_out() const { return dim_out_; }
  const std::vector<ComplexMatrix>& operators() const { return ops_; }
  std::size_t size() const { return ops_.size(); }
  bool is_trace_preserving() const { return trace_preserving_; }

  ComplexMatrix kraus_sum() const {
    ComplexMatrix sum = ComplexMatrix::Zero(static_cast<Eigen::Index>(dim_in_), static_cast<Eigen::Index>(dim_in_));
    for (const auto& k : ops_) sum.noalias() += k.adjoint() * k;
    return sum;
  }

  double trace_preservation_error() const {
    return (kraus_sum() - identity(dim_in_)).cwiseAbs().maxCoeff();
  }

  ComplexMatrix operator()(const ComplexMatrix& rho) const {
    detail::require_square(rho, dim_in_, "KrausChannel::apply");
    ComplexMatrix out = ComplexMatrix::Zero(static_cast<Eigen::Index>(dim_out_), static_cast<Eigen::Index>(dim_out_));
    for (const auto& k : ops_) out.noalias() += k * rho * k.adjoint();
    return out;
  }

  // Returns next o this.
  KrausChannel then(const KrausChannel& next) const {
    if (next.dim_in_ != dim_out_) {
      throw Error(ErrorKind::kDimensionMismatch, "KrausChannel::then: output/input dimensions differ");
    }
    std::vector<ComplexMatrix> ops;
    ops.reserve(ops_.size() * next.ops_.size());
    for (const auto& outer : next.ops_)
      for (const auto& inner : ops_) ops.push_back(outer * inner);
    KrausChannel ch = build(std::move(ops));
    ch.trace_preserving_ = trace_preserving_ && next.trace_preserving_;
    return ch;
  }

 private:
  static KrausChannel build(std::vector<ComplexMatrix> ops) {
    if (ops.empty()) throw Error(ErrorKind::kInvalidArgument, "Kraus family is empty");
    KrausChannel ch;
    ch.dim_out_ = static_cast<std::size_t>(ops.front().rows());
    ch.dim_in_ = static_cast<std::size_t>(ops.front().cols());
    for (const auto& k : ops) {
      if (static_cast<std::size_t>(k.rows()) != ch.dim_out_ || static_cast<std::size_t>(k.cols()) != ch.dim_in_) {
        throw Error(ErrorKind::kDimensionMismatch, "Kraus operators have inconsistent shapes");
      }
    }
    ch.ops_ = std::move(ops);
    return ch;
  }

  std::size_t dim_in_ = 0;
  std::size_t dim_out_ = 0;
  std::vector<ComplexMatrix> ops_;
  bool trace_preserving_ = false;
};

enum class Form { kChoi, kJamiolkowski };

inline const char* to_string(Form form) { return form == Form::kChoi ? "choi" : "jamiolkowski"; }

// Operator on conditioning (A) (x) conditioned (B). Block (i, j) of the Choi form is E(|i><j|).
struct ConditionalState {
  BipartiteDims dims;
  Form form = Form::kChoi;
  ComplexMatrix matrix;

  ConditionalState() = default;
  ConditionalState(BipartiteDims d, Form f, ComplexMatrix m) : dims(d), form(f), matrix(std::move(m)) {
    detail::require_square(matrix, dims.total(), "ConditionalState");
  }

  ComplexMatrix choi() const {
    return form == Form::kChoi ? matrix : partial_transpose(matrix, dims, Subsystem::kA);
  }

  ComplexMatrix jamiolkowski() const {
    return form == Form::kJamiolkowski ? matrix : partial_transpose(matrix, dims, Subsystem::kA);
  }

  ConditionalState as(Form f) const {
    return {dims, f, f == Form::kChoi ? choi() : jamiolkowski()};
  }
};

inline ConditionalState kraus_to_choi(const KrausChannel& ch) {
  const auto din = static_cast<Eigen::Index>(ch.dim_in());
  const auto dout = static_cast<Eigen::Index>(ch.dim_out());
  ComplexMatrix choi = ComplexMatrix::Zero(din * dout, din * dout);
  ComplexVector v(din * dout);
  for (const auto& k : ch.operators()) {
    for (Eigen::Index i = 0; i < din; ++i)
      for (Eigen::Index b = 0; b < dout; ++b) v(i * dout + b) = k(b, i);
    choi.noalias() += v * v.adjoint();
  }
  return {{ch.dim_in(), ch.dim_out()}, Form::kChoi, choi};
}

// Tr_A[rho_{B|A} (sigma^T (x) I_B)]
inline ComplexMatrix apply_via_choi(const ConditionalState& cs, const ComplexMatrix& sigma) {
  if (cs.form != Form::kChoi) throw Error(ErrorKind::kInvalidArgument, "apply_via_choi: state is not in Choi form");
  detail::require_square(sigma, cs.dims.dim_a, "apply_via_choi");
  const auto da = static_cast<Eigen::Index>(cs.dims.dim_a);
  const auto db = static_cast<Eigen::Index>(cs.dims.dim_b);
  ComplexMatrix out = ComplexMatrix::Zero(db, db);
  for (Eigen::Index i = 0; i < da; ++i)
    for (Eigen::Index j = 0; j < da; ++j) out += sigma(i, j) * cs.matrix.block(i * db, j * db, db, db);
  return out;
}

// Tr_A[varrho_{B|A} (rho_A (x) I_B)]
inline ComplexMatrix apply_via_jam(const ConditionalState& cs, const ComplexMatrix& rho) {
  if (cs.form != Form::kJamiolkowski) {
    throw Error(ErrorKind::kInvalidArgument, "apply_via_jam: state is not in Jamiolkowski form");
  }
  detail::require_square(rho, cs.dims.dim_a, "apply_via_jam");
  const auto da = static_cast<Eigen::Index>(cs.dims.dim_a);
  const auto db = static_cast<Eigen::Index>(cs.dims.dim_b);
  ComplexMatrix out = ComplexMatrix::Zero(db, db);
  for (Eigen::Index i = 0; i < da; ++i)
    for (Eigen::Index j = 0; j < da; ++j) out += rho(j, i) * cs.matrix.block(i * db, j * db, db, db);
  return out;
}

inline ComplexMatrix apply_conditional(const ConditionalState& cs, const ComplexMatrix& rho) {
  return cs.form == Form::kChoi ? apply_via_choi(cs, rho) : apply_via_jam(cs, rho);
}

struct CptpReport {
  bool valid = false;
  double min_eigenvalue = 0.0;
  double marginal_residual = 0.0;

  explicit operator bool() const { return valid; }
};

inline CptpReport is_cptp(const ConditionalState& cs, double tol = kCptpTolerance) {
  const ComplexMatrix choi = cs.choi();
  CptpReport report;
  report.min_eigenvalue = min_eigenvalue(choi);
  report.marginal_residual = (partial_trace(choi, cs.dims, Subsystem::kA) - identity(cs.dims.dim_a)).norm();
  report.valid = hermiticity_error(choi) <= std::max(tol, kHermitianTolerance) && report.min_eigenvalue >= -tol &&
                 report.marginal_residual <= tol;
  return report;
}

namespace detail {

inline std::vector<ComplexMatrix> kraus_operators_from_choi(const ComplexMatrix& choi, BipartiteDims dims) {
  const auto da = static_cast<Eigen::Index>(dims.dim_a);
  const auto db = static_cast<Eigen::Index>(dims.dim_b);
  const HermitianEigen e = hermitian_eigen(choi);
  std::vector<ComplexMatrix> ops;
  for (Eigen::Index l = e.values.size() - 1; l >= 0; --l) {
    if (e.values(l) <= kPsdTolerance) continue;
    const double w = std::sqrt(e.values(l));
    ComplexMatrix k(db, da);
    for (Eigen::Index i = 0; i < da; ++i)
      for (Eigen::Index b = 0; b < db; ++b) k(b, i) = w * e.vectors(i * db + b, l);
    ops.push_back(std::move(k));
  }
  if (ops.empty()) throw Error(ErrorKind::kZeroMatrix, "Choi state has no support");
  return ops;
}

}  // namespace detail

inline KrausChannel choi_to_kraus(const ConditionalState& cs, double tol = kCptpTolerance) {
  const CptpReport report = is_cptp(cs, tol);
  if (!report.valid) {
    throw Error(ErrorKind::kNotCptp, "choi_to_kraus: min eigenvalue " + std::to_string(report.min_eigenvalue) +
                                         ", marginal residual " + std::to_string(report.marginal_residual));
  }
  return KrausChannel::from_operators(detail::kraus_operators_from_choi(cs.choi(), cs.dims),
                                      std::max(tol, 10.0 * kCptpTolerance));
}

// Raw composition of Choi matrices: rho_{C|A} = Tr_B[(I_A (x) rho_{C|B})(rho_{B|A}^{T_B} (x) I_C)].
inline ComplexMatrix compose_choi_matrices(const ComplexMatrix& rho_cb, const ComplexMatrix& rho_ba, std::size_t dim_a,
                                           std::size_t dim_b, std::size_t dim_c) {
  detail::require_square(rho_cb, dim_b * dim_c, "compose_choi_matrices");
  detail::require_square(rho_ba, dim_a * dim_b, "compose_choi_matrices");
  const auto da = static_cast<Eigen::Index>(dim_a);
  const auto db = static_cast<Eigen::Index>(dim_b);
  const auto dc = static_cast<Eigen::Index>(dim_c);
  ComplexMatrix out = ComplexMatrix::Zero(da * dc, da * dc);
  for (Eigen::Index a = 0; a < da; ++a) {
    for (Eigen::Index a2 = 0; a2 < da; ++a2) {
      auto target = out.block(a * dc, a2 * dc, dc, dc);
      for (Eigen::Index b = 0; b < db; ++b) {
        for (Eigen::Index b2 = 0; b2 < db; ++b2) {
          const Complex w = rho_ba(a * db + b, a2 * db + b2);
          if (w == Complex(0.0, 0.0)) continue;
          target += w * rho_cb.block(b * dc, b2 * dc, dc, dc);
        }
      }
    }
  }
  return out;
}

// Returns the Choi state of (C|B) o (B|A).
inline ConditionalState compose_via_choi(const ConditionalState& cs_cb, const ConditionalState& cs_ba) {
  if (cs_cb.dims.dim_a != cs_ba.dims.dim_b) {
    throw Error(ErrorKind::kDimensionMismatch, "compose_via_choi: inner dimensions differ");
  }
  return {{cs_ba.dims.dim_a, cs_cb.dims.dim_b},
          Form::kChoi,
          compose_choi_matrices(cs_cb.choi(), cs_ba.choi(), cs_ba.dims.dim_a, cs_ba.dims.dim_b, cs_cb.dims.dim_b)};
}

// Heisenberg-picture dual X -> sum K^dag X K, mapping operators on the output space to the input space.
class AdjointMap {
 public:
  explicit AdjointMap(const KrausChannel& ch) : dim_in_(ch.dim_out()), dim_out_(ch.dim_in()) {
    ops_.reserve(ch.size());
    for (const auto& k : ch.operators()) ops_.push_back(k.adjoint());
  }

  std::size_t dim_in() const { return dim_in_; }
  std::size_t dim_out() const { return dim_out_; }
  const std::vector<ComplexMatrix>& operators() const { return ops_; }

  ComplexMatrix operator()(const ComplexMatrix& x) const {
    detail::require_square(x, dim_in_, "AdjointMap::apply");
    ComplexMatrix out = ComplexMatrix::Zero(static_cast<Eigen::Index>(dim_out_), static_cast<Eigen::Index>(dim_out_));
    for (const auto& k : ops_) out.noalias() += k * x * k.adjoint();
    return out;
  }

 private:
  std::size_t dim_in_;
  std::size_t dim_out_;
  std::vector<ComplexMatrix> ops_;
};

inline AdjointMap adjoint_channel(const KrausChannel& ch) { return AdjointMap(ch); }

inline KrausChannel depolarizing_channel(std::size_t dim, double p) {
  if (p < 0.0 || p > 1.0) throw Error(ErrorKind::kOutOfRange, "depolarizing_channel: p must lie in [0, 1]");
  const auto d = static_cast<Eigen::Index>(dim);
  std::vector<ComplexMatrix> ops;
  ops.push_back(std::sqrt(1.0 - p) * identity(dim));
  const double w = std::sqrt(p / static_cast<double>(dim));
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      ComplexMatrix k = ComplexMatrix::Zero(d, d);
      k(i, j) = w;
      ops.push_back(std::move(k));
    }
  }
  return KrausChannel::from_operators(std::move(ops));
}

inline double channel_distance_on(const KrausChannel& a, const KrausChannel& b, const ComplexMatrix& rho) {
  return trace_norm(a(rho) - b(rho));
}

}  // namespace qcg
