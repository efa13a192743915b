#pragma once

#include "qcg/bayes.hpp"
#include "qcg/bloch.hpp"
#include "qcg/random.hpp"

#include <optional>
#include <string>
#include <utility>

namespace qcg {

inline constexpr double kExistenceTolerance = 1e-9;

// Blurred-and-saturated detector: |00> stays |0>, the three other basis states all read |1>.
inline KrausChannel bns_channel() {
  const double s = 1.0 / std::sqrt(3.0);
  std::vector<ComplexMatrix> ops(4, ComplexMatrix::Zero(2, 4));
  ops[0](0, 0) = 1.0;
  ops[0](1, 1) = s;
  ops[0](1, 2) = s;
  ops[0](1, 3) = s;
  ops[1](1, 1) = s;
  ops[1](1, 3) = -s;
  ops[2](1, 1) = s;
  ops[2](1, 2) = -s;
  ops[3](1, 2) = s;
  ops[3](1, 3) = -s;
  return KrausChannel::from_operators(std::move(ops), 1e-12);
}

// Tr_E over the second qubit.
inline KrausChannel ptrace_channel() {
  std::vector<ComplexMatrix> ops(2, ComplexMatrix::Zero(2, 4));
  for (int e = 0; e < 2; ++e)
    for (int a = 0; a < 2; ++a) ops[static_cast<std::size_t>(e)](a, 2 * a + e) = 1.0;
  return KrausChannel::from_operators(std::move(ops), 1e-12);
}

inline ComplexMatrix swap_matrix() {
  ComplexMatrix u = ComplexMatrix::Zero(4, 4);
  u(0, 0) = 1.0;
  u(1, 2) = 1.0;
  u(2, 1) = 1.0;
  u(3, 3) = 1.0;
  return u;
}

inline KrausChannel swap_channel() { return KrausChannel::unitary(swap_matrix()); }

inline ComplexMatrix z_unitary(double t, double coupling = 1.0) {
  const Complex plus = std::exp(Complex(0.0, t * coupling));
  const Complex minus = std::exp(Complex(0.0, -t * coupling));
  ComplexMatrix u = ComplexMatrix::Zero(4, 4);
  u(0, 0) = plus;
  u(1, 1) = minus;
  u(2, 2) = minus;
  u(3, 3) = plus;
  return u;
}

inline KrausChannel z_channel(double t, double coupling = 1.0) { return KrausChannel::unitary(z_unitary(t, coupling)); }

inline ComplexMatrix maximally_entangled_state() {
  ComplexVector phi = ComplexVector::Zero(4);
  phi(0) = phi(3) = 1.0 / std::sqrt(2.0);
  return projector(phi);
}

inline ComplexMatrix maximally_mixed_state(std::size_t dim = 4) {
  return identity(dim) / static_cast<double>(dim);
}

// lambda |Psi-><Psi-| + (1 - lambda) I / 4
inline ComplexMatrix werner_state(double lambda) {
  if (!(lambda >= -1.0 / 3.0 - 1e-15 && lambda <= 1.0)) {
    throw Error(ErrorKind::kOutOfRange, "werner_state: lambda must lie in [-1/3, 1]");
  }
  ComplexVector psi = ComplexVector::Zero(4);
  psi(1) = 1.0 / std::sqrt(2.0);
  psi(2) = -1.0 / std::sqrt(2.0);
  return lambda * projector(psi) + (1.0 - lambda) / 4.0 * identity(4);
}

class Scenario {
 public:
  static Scenario make(int id, double coupling = 1.0) {
    switch (id) {
      case 1: return Scenario(id, bns_channel(), false, coupling);
      case 2: return Scenario(id, bns_channel(), true, coupling);
      case 3: return Scenario(id, ptrace_channel(), false, coupling);
      case 4: return Scenario(id, ptrace_channel(), true, coupling);
      default: throw Error(ErrorKind::kUnsupportedScenario, "scenario id must be 1, 2, 3 or 4");
    }
  }

  int id() const { return id_; }
  double coupling() const { return coupling_; }
  const KrausChannel& cg() const { return cg_; }
  bool time_dependent() const { return z_interaction_; }

  KrausChannel unitary(double t) const { return z_interaction_ ? z_channel(t, coupling_) : swap_channel(); }

  ComplexMatrix unitary_matrix(double t) const { return z_interaction_ ? z_unitary(t, coupling_) : swap_matrix(); }

  std::string name() const {
    switch (id_) {
      case 1: return "B&S + SWAP";
      case 2: return "B&S + z-interaction";
      case 3: return "partial trace + SWAP";
      default: return "partial trace + z-interaction";
    }
  }

 private:
  Scenario(int id, KrausChannel cg, bool z_interaction, double coupling)
      : id_(id), cg_(std::move(cg)), z_interaction_(z_interaction), coupling_(coupling) {}

  int id_;
  KrausChannel cg_;
  bool z_interaction_;
  double coupling_;
};

inline Eigen::Vector3d cg_bloch_bns(const LabSpace& lab) {
  const auto& r = lab.r;
  const auto& s = lab.s;
  const auto& t = lab.T;
  const double k = 1.0 / (2.0 * std::sqrt(3.0));
  return {k * (r(0) + s(0) + t(2, 0) + t(0, 2) + t(0, 0) - t(1, 1)),
          k * (r(1) + s(1) + t(2, 1) + t(1, 2) + t(0, 1) + t(1, 0)), 0.5 * (r(2) + s(2) + t(2, 2) - 1.0)};
}

// R = R_a + R_b, where R_b collects the components that break rotation covariance about z.
inline std::pair<Eigen::Vector3d, Eigen::Vector3d> decompose_ra_rb(const LabSpace& lab) {
  const double k = 1.0 / (2.0 * std::sqrt(3.0));
  const Eigen::Vector3d rb(k * (lab.T(0, 0) - lab.T(1, 1)), k * (lab.T(0, 1) + lab.T(1, 0)), 0.0);
  return {cg_bloch_bns(lab) - rb, rb};
}

inline Eigen::Matrix3d z_rotation(double angle) {
  Eigen::Matrix3d m;
  m << std::cos(angle), std::sin(angle), 0.0, -std::sin(angle), std::cos(angle), 0.0, 0.0, 0.0, 1.0;
  return m;
}

// Bloch vector of cg(U_t(rho)) computed from the lab-space triple of rho.
inline Eigen::Vector3d scenario_lab_map(const Scenario& sc, const LabSpace& lab, double t) {
  const double phase = 2.0 * t * sc.coupling();
  switch (sc.id()) {
    case 1: return cg_bloch_bns(lab);
    case 2: {
      const auto [ra, rb] = decompose_ra_rb(lab);
      return z_rotation(phase) * ra + rb;
    }
    case 3: return lab.s;
    case 4: {
      const Eigen::Vector3d tau(lab.T(1, 2), -lab.T(0, 2), 0.0);
      const Eigen::Vector3d damped(std::cos(phase) * lab.r(0), std::cos(phase) * lab.r(1), lab.r(2));
      return damped + std::sin(phase) * tau;
    }
    default: throw Error(ErrorKind::kUnsupportedScenario, "scenario_lab_map: unknown scenario");
  }
}

inline double condition_residual(const Scenario& sc, const LabSpace& lab) {
  switch (sc.id()) {
    case 1: return 0.0;
    case 2: return decompose_ra_rb(lab).second.norm();
    case 3: return (lab.r - lab.s).norm();
    case 4: return std::hypot(lab.T(0, 2), lab.T(1, 2));
    default: throw Error(ErrorKind::kUnsupportedScenario, "condition_residual: unknown scenario");
  }
}

inline KrausChannel phase_flip_channel(double t, double coupling = 1.0) {
  const double a = t * coupling;
  return KrausChannel::from_operators({std::cos(a) * pauli::id(), std::sin(a) * pauli::z()});
}

// Explicit emergent channel of each scenario, independent of whether the state meets its condition.
inline KrausChannel explicit_emergent(const Scenario& sc, double t) {
  switch (sc.id()) {
    case 1:
    case 3: return KrausChannel::identity_channel(2);
    case 2: {
      ComplexMatrix u = ComplexMatrix::Zero(2, 2);
      u(0, 0) = std::exp(Complex(0.0, t * sc.coupling()));
      u(1, 1) = std::exp(Complex(0.0, -t * sc.coupling()));
      return KrausChannel::unitary(u);
    }
    case 4: return phase_flip_channel(t, sc.coupling());
    default: throw Error(ErrorKind::kUnsupportedScenario, "explicit_emergent: unknown scenario");
  }
}

struct AnalyticVerdict {
  bool exists = false;
  std::optional<KrausChannel> emergent;
  double condition_residual = 0.0;
};

inline AnalyticVerdict analytic_emergent(const Scenario& sc, const LabSpace& lab, double t,
                                         double tol = kExistenceTolerance) {
  AnalyticVerdict verdict;
  verdict.condition_residual = condition_residual(sc, lab);
  verdict.exists = verdict.condition_residual <= tol;
  if (verdict.exists) verdict.emergent = explicit_emergent(sc, t);
  return verdict;
}

// || gamma(cg(rho)) - cg(U(rho)) ||_1
inline double commutation_residual(const KrausChannel& gamma, const KrausChannel& cg, const KrausChannel& u,
                                   const ComplexMatrix& rho) {
  return trace_norm(gamma(cg(rho)) - cg(u(rho)));
}

inline double commutation_residual(const KrausChannel& gamma, const Scenario& sc, double t, const ComplexMatrix& rho) {
  return commutation_residual(gamma, sc.cg(), sc.unitary(t), rho);
}

}  // namespace qcg
