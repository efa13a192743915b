#pragma once

#include "qcg/core.hpp"

namespace qcg {

// Two-qubit Bloch triple: rho = (I + r.sigma (x) I + I (x) s.sigma + sum T_ij sigma_i (x) sigma_j) / 4.
struct LabSpace {
  Eigen::Vector3d r = Eigen::Vector3d::Zero();
  Eigen::Vector3d s = Eigen::Vector3d::Zero();
  Eigen::Matrix3d T = Eigen::Matrix3d::Zero();
};

inline ComplexMatrix bloch_to_rho(const LabSpace& lab) {
  ComplexMatrix rho = identity(4);
  for (int i = 0; i < 3; ++i) {
    rho += lab.r(i) * tensor_product(pauli::sigma(i + 1), pauli::id());
    rho += lab.s(i) * tensor_product(pauli::id(), pauli::sigma(i + 1));
    for (int j = 0; j < 3; ++j) {
      rho += lab.T(i, j) * tensor_product(pauli::sigma(i + 1), pauli::sigma(j + 1));
    }
  }
  return rho / 4.0;
}

inline LabSpace rho_to_bloch(const ComplexMatrix& rho) {
  detail::require_square(rho, 4, "rho_to_bloch");
  LabSpace lab;
  auto expect = [&](const ComplexMatrix& op) { return (rho * op).trace().real(); };
  for (int i = 0; i < 3; ++i) {
    lab.r(i) = expect(tensor_product(pauli::sigma(i + 1), pauli::id()));
    lab.s(i) = expect(tensor_product(pauli::id(), pauli::sigma(i + 1)));
    for (int j = 0; j < 3; ++j) {
      lab.T(i, j) = expect(tensor_product(pauli::sigma(i + 1), pauli::sigma(j + 1)));
    }
  }
  return lab;
}

inline ComplexMatrix qubit_from_bloch(const Eigen::Vector3d& v) {
  return 0.5 * (pauli::id() + v(0) * pauli::x() + v(1) * pauli::y() + v(2) * pauli::z());
}

inline Eigen::Vector3d qubit_bloch(const ComplexMatrix& rho) {
  detail::require_square(rho, 2, "qubit_bloch");
  return {(rho * pauli::x()).trace().real(), (rho * pauli::y()).trace().real(),
          (rho * pauli::z()).trace().real()};
}

}  // namespace qcg
