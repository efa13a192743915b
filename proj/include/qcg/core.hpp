#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace qcg {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr double kPsdTolerance = 1e-10;
inline constexpr double kRankTolerance = 1e-12;
inline constexpr double kHermitianTolerance = 1e-12;

enum class ErrorKind {
  kDimensionMismatch,
  kNotPsd,
  kNotHermitian,
  kZeroMatrix,
  kNotCptp,
  kZeroMarginal,
  kDegenerateGenerator,
  kPovmIncomplete,
  kInvalidPrep,
  kOutOfRange,
  kUnsupportedScenario,
  kBaseIncompatible,
  kInvalidArgument,
  kSolverFailure,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kDimensionMismatch: return "DimensionMismatch";
    case ErrorKind::kNotPsd: return "NotPSD";
    case ErrorKind::kNotHermitian: return "NotHermitian";
    case ErrorKind::kZeroMatrix: return "ZeroMatrix";
    case ErrorKind::kNotCptp: return "NotCPTP";
    case ErrorKind::kZeroMarginal: return "ZeroMarginal";
    case ErrorKind::kDegenerateGenerator: return "DegenerateGenerator";
    case ErrorKind::kPovmIncomplete: return "POVMIncomplete";
    case ErrorKind::kInvalidPrep: return "InvalidPrep";
    case ErrorKind::kOutOfRange: return "OutOfRange";
    case ErrorKind::kUnsupportedScenario: return "UnsupportedScenario";
    case ErrorKind::kBaseIncompatible: return "BaseIncompatible";
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kSolverFailure: return "SolverFailure";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

enum class Subsystem { kA, kB };

struct BipartiteDims {
  std::size_t dim_a = 1;
  std::size_t dim_b = 1;

  std::size_t total() const { return dim_a * dim_b; }
  bool operator==(const BipartiteDims&) const = default;
};

namespace detail {

inline void require_square(const ComplexMatrix& m, std::size_t side, const char* op) {
  if (m.rows() != m.cols() || static_cast<std::size_t>(m.rows()) != side) {
    throw Error(ErrorKind::kDimensionMismatch,
                std::string(op) + ": expected " + std::to_string(side) + "x" + std::to_string(side) +
                    " matrix, got " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

inline void require_square(const ComplexMatrix& m, const char* op) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorKind::kDimensionMismatch, std::string(op) + ": matrix is not square");
  }
}

}  // namespace detail

inline ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

inline ComplexMatrix identity(std::size_t dim) {
  return ComplexMatrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
}

inline ComplexMatrix partial_trace(const ComplexMatrix& m, BipartiteDims dims, Subsystem keep) {
  detail::require_square(m, dims.total(), "partial_trace");
  const auto da = static_cast<Eigen::Index>(dims.dim_a);
  const auto db = static_cast<Eigen::Index>(dims.dim_b);
  if (keep == Subsystem::kA) {
    ComplexMatrix out = ComplexMatrix::Zero(da, da);
    for (Eigen::Index i = 0; i < da; ++i) {
      for (Eigen::Index j = 0; j < da; ++j) {
        out(i, j) = m.block(i * db, j * db, db, db).trace();
      }
    }
    return out;
  }
  ComplexMatrix out = ComplexMatrix::Zero(db, db);
  for (Eigen::Index i = 0; i < da; ++i) out += m.block(i * db, i * db, db, db);
  return out;
}

inline ComplexMatrix partial_transpose(const ComplexMatrix& m, BipartiteDims dims, Subsystem which) {
  detail::require_square(m, dims.total(), "partial_transpose");
  const auto da = static_cast<Eigen::Index>(dims.dim_a);
  const auto db = static_cast<Eigen::Index>(dims.dim_b);
  ComplexMatrix out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < da; ++i) {
    for (Eigen::Index j = 0; j < da; ++j) {
      if (which == Subsystem::kA) {
        out.block(i * db, j * db, db, db) = m.block(j * db, i * db, db, db);
      } else {
        out.block(i * db, j * db, db, db) = m.block(i * db, j * db, db, db).transpose();
      }
    }
  }
  return out;
}

// Reorders an operator on A (x) B into the same operator on B (x) A.
inline ComplexMatrix swap_factors(const ComplexMatrix& m, BipartiteDims dims) {
  detail::require_square(m, dims.total(), "swap_factors");
  const auto da = static_cast<Eigen::Index>(dims.dim_a);
  const auto db = static_cast<Eigen::Index>(dims.dim_b);
  ComplexMatrix out(m.rows(), m.cols());
  for (Eigen::Index a = 0; a < da; ++a)
    for (Eigen::Index b = 0; b < db; ++b)
      for (Eigen::Index a2 = 0; a2 < da; ++a2)
        for (Eigen::Index b2 = 0; b2 < db; ++b2)
          out(b * da + a, b2 * da + a2) = m(a * db + b, a2 * db + b2);
  return out;
}

inline double hermiticity_error(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline bool is_hermitian(const ComplexMatrix& m, double tol = kHermitianTolerance) {
  return hermiticity_error(m) <= tol;
}

inline ComplexMatrix hermitian_part(const ComplexMatrix& m) { return 0.5 * (m + m.adjoint()); }

struct HermitianEigen {
  RealVector values;  // ascending
  ComplexMatrix vectors;
};

inline HermitianEigen hermitian_eigen(const ComplexMatrix& m) {
  detail::require_square(m, "hermitian_eigen");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(m));
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::kInvalidArgument, "hermitian_eigen: eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

inline RealVector hermitian_eigenvalues(const ComplexMatrix& m) {
  detail::require_square(m, "hermitian_eigenvalues");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(m), Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

inline double min_eigenvalue(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  return hermitian_eigenvalues(m).minCoeff();
}

template <typename F>
ComplexMatrix spectral_apply(const HermitianEigen& e, F&& f) {
  RealVector mapped = e.values.unaryExpr(std::forward<F>(f));
  return e.vectors * mapped.cast<Complex>().asDiagonal() * e.vectors.adjoint();
}

inline HermitianEigen require_psd(const ComplexMatrix& m, const char* op, double tol = kPsdTolerance) {
  HermitianEigen e = hermitian_eigen(m);
  if (e.values.size() > 0 && e.values.minCoeff() < -tol) {
    throw Error(ErrorKind::kNotPsd,
                std::string(op) + ": eigenvalue " + std::to_string(e.values.minCoeff()) + " below -" +
                    std::to_string(tol));
  }
  return e;
}

inline ComplexMatrix matrix_sqrt_psd(const ComplexMatrix& m) {
  HermitianEigen e = require_psd(m, "matrix_sqrt_psd");
  return spectral_apply(e, [](double v) { return v > 0.0 ? std::sqrt(v) : 0.0; });
}

namespace detail {

inline ComplexMatrix support_power(const ComplexMatrix& m, double rank_tol, double exponent, const char* op) {
  HermitianEigen e = require_psd(m, op);
  const double top = e.values.size() > 0 ? e.values.maxCoeff() : 0.0;
  if (top <= 0.0) throw Error(ErrorKind::kZeroMatrix, std::string(op) + ": matrix has no support");
  const double cut = rank_tol * top;
  return spectral_apply(e, [&](double v) { return v > cut ? std::pow(v, exponent) : 0.0; });
}

}  // namespace detail

inline ComplexMatrix pinv_psd(const ComplexMatrix& m, double rank_tol = kRankTolerance) {
  return detail::support_power(m, rank_tol, -1.0, "pinv_psd");
}

inline ComplexMatrix pinv_sqrt_psd(const ComplexMatrix& m, double rank_tol = kRankTolerance) {
  return detail::support_power(m, rank_tol, -0.5, "pinv_sqrt_psd");
}

inline std::size_t support_rank(const ComplexMatrix& m, double rank_tol = kRankTolerance) {
  const RealVector v = hermitian_eigenvalues(m);
  if (v.size() == 0) return 0;
  const double top = v.maxCoeff();
  if (top <= 0.0) return 0;
  return static_cast<std::size_t>((v.array() > rank_tol * top).count());
}

inline double trace_norm(const ComplexMatrix& m) {
  detail::require_square(m, "trace_norm");
  if (m.size() == 0) return 0.0;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (hermiticity_error(m) <= 1e-14 * scale) {
    return hermitian_eigenvalues(m).cwiseAbs().sum();
  }
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  return svd.singularValues().sum();
}

inline double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b) { return trace_norm(a - b); }

inline bool is_density(const ComplexMatrix& rho, double tol = kPsdTolerance) {
  if (rho.rows() != rho.cols() || rho.size() == 0) return false;
  if (!is_hermitian(rho, std::max(tol, kHermitianTolerance))) return false;
  if (std::abs(rho.trace() - Complex(1.0, 0.0)) > tol) return false;
  return min_eigenvalue(rho) >= -tol;
}

inline void require_density(const ComplexMatrix& rho, const char* op, double tol = kPsdTolerance) {
  detail::require_square(rho, op);
  if (!is_hermitian(rho, std::max(tol, kHermitianTolerance))) {
    throw Error(ErrorKind::kNotHermitian, std::string(op) + ": state is not Hermitian");
  }
  if (std::abs(rho.trace() - Complex(1.0, 0.0)) > tol) {
    throw Error(ErrorKind::kInvalidArgument, std::string(op) + ": state does not have unit trace");
  }
  if (min_eigenvalue(rho) < -tol) throw Error(ErrorKind::kNotPsd, std::string(op) + ": state is not PSD");
}

inline ComplexMatrix ket_bra(const ComplexVector& ket, const ComplexVector& bra) { return ket * bra.adjoint(); }

inline ComplexMatrix projector(const ComplexVector& v) { return v * v.adjoint(); }

inline ComplexVector basis_ket(std::size_t dim, std::size_t index) {
  ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(dim));
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return v;
}

namespace pauli {

inline ComplexMatrix id() { return ComplexMatrix::Identity(2, 2); }

inline ComplexMatrix x() {
  ComplexMatrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

inline ComplexMatrix y() {
  ComplexMatrix m(2, 2);
  m << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
  return m;
}

inline ComplexMatrix z() {
  ComplexMatrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

// sigma(0) is the identity, sigma(1..3) are X, Y, Z.
inline ComplexMatrix sigma(int i) {
  switch (i) {
    case 0: return id();
    case 1: return x();
    case 2: return y();
    case 3: return z();
    default: throw Error(ErrorKind::kOutOfRange, "pauli::sigma index must be in 0..3");
  }
}

}  // namespace pauli

}  // namespace qcg
