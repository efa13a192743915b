#pragma once

#include "qcg/core.hpp"

namespace qcg::sdp {

inline constexpr double kSqrt2 = 1.4142135623730950488;

// [[Re h, -Im h], [Im h, Re h]]
inline RealMatrix complex_to_real(const ComplexMatrix& h) {
  qcg::detail::require_square(h, "complex_to_real");
  if (!is_hermitian(h, 1e-10 * std::max(1.0, h.cwiseAbs().maxCoeff()))) {
    throw Error(ErrorKind::kNotHermitian, "complex_to_real: matrix is not Hermitian");
  }
  const auto n = h.rows();
  RealMatrix w(2 * n, 2 * n);
  w.topLeftCorner(n, n) = h.real();
  w.topRightCorner(n, n) = -h.imag();
  w.bottomLeftCorner(n, n) = h.imag();
  w.bottomRightCorner(n, n) = h.real();
  return 0.5 * (w + w.transpose());
}

inline ComplexMatrix real_to_complex(const RealMatrix& w) {
  const auto n = w.rows() / 2;
  ComplexMatrix h(n, n);
  h.real() = 0.5 * (w.topLeftCorner(n, n) + w.bottomRightCorner(n, n));
  h.imag() = 0.5 * (w.bottomLeftCorner(n, n) - w.topRightCorner(n, n));
  return hermitian_part(h);
}

inline Eigen::Index svec_size(Eigen::Index n) { return n * (n + 1) / 2; }

// Upper triangle, row by row, off-diagonal entries scaled by sqrt(2) so that <X, Y> = svec(X) . svec(Y).
inline void svec_into(const RealMatrix& m, Eigen::Ref<RealVector> out) {
  const auto n = m.rows();
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    out(k++) = m(i, i);
    for (Eigen::Index j = i + 1; j < n; ++j) out(k++) = kSqrt2 * 0.5 * (m(i, j) + m(j, i));
  }
}

inline RealVector svec(const RealMatrix& m) {
  RealVector out(svec_size(m.rows()));
  svec_into(m, out);
  return out;
}

inline RealMatrix smat(const Eigen::Ref<const RealVector>& v, Eigen::Index n) {
  RealMatrix m(n, n);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    m(i, i) = v(k++);
    for (Eigen::Index j = i + 1; j < n; ++j) m(i, j) = m(j, i) = v(k++) / kSqrt2;
  }
  return m;
}

// Coordinates of a Hermitian matrix in the orthonormal basis {E_ii, (E_ij + E_ji)/sqrt2, i(E_ij - E_ji)/sqrt2}.
inline Eigen::Index hermitian_coord_count(Eigen::Index n) { return n * n; }

inline RealVector hermitian_coords(const ComplexMatrix& h) {
  const auto n = h.rows();
  RealVector v(n * n);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    v(k++) = h(i, i).real();
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const Complex z = 0.5 * (h(i, j) + std::conj(h(j, i)));
      v(k++) = kSqrt2 * z.real();
      v(k++) = kSqrt2 * z.imag();
    }
  }
  return v;
}

inline ComplexMatrix from_hermitian_coords(const Eigen::Ref<const RealVector>& v, Eigen::Index n) {
  ComplexMatrix h(n, n);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    h(i, i) = v(k++);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const Complex z(v(k), v(k + 1));
      k += 2;
      h(i, j) = z / kSqrt2;
      h(j, i) = std::conj(z) / kSqrt2;
    }
  }
  return h;
}

inline ComplexMatrix hermitian_basis_element(Eigen::Index n, Eigen::Index index) {
  RealVector v = RealVector::Zero(n * n);
  v(index) = 1.0;
  return from_hermitian_coords(v, n);
}

}  // namespace qcg::sdp
