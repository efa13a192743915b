#include "test_support.hpp"

#include <numbers>

namespace qcg {
namespace {

using testing::matrices_near;

ComplexMatrix twirl_z(const ComplexMatrix& rho) {
  ComplexMatrix out = ComplexMatrix::Zero(4, 4);
  for (int k = 0; k < 4; ++k) {
    ComplexMatrix v = ComplexMatrix::Identity(2, 2);
    v(1, 1) = std::exp(Complex(0.0, std::numbers::pi * k / 2.0));
    const ComplexMatrix vv = tensor_product(v, v);
    out += vv * rho * vv.adjoint() / 4.0;
  }
  return out;
}

ComplexMatrix symmetrize(const ComplexMatrix& rho) {
  return 0.5 * (rho + swap_matrix() * rho * swap_matrix());
}

ComplexMatrix dephase_a(const ComplexMatrix& rho) {
  const ComplexMatrix z = tensor_product(pauli::z(), pauli::id());
  return 0.5 * (rho + z * rho * z);
}

ComplexMatrix condition_state(int id, const ComplexMatrix& rho) {
  switch (id) {
    case 2: return twirl_z(rho);
    case 3: return symmetrize(rho);
    case 4: return dephase_a(rho);
    default: return rho;
  }
}

TEST(BnsChannel, ComputationalBasisOutcomes) {
  const KrausChannel bns = bns_channel();
  EXPECT_TRUE(bns.is_trace_preserving());
  EXPECT_TRUE(matrices_near(bns(projector(basis_ket(4, 0))), projector(basis_ket(2, 0)), 1e-14));
  for (std::size_t i = 1; i < 4; ++i) {
    EXPECT_TRUE(matrices_near(bns(projector(basis_ket(4, i))), projector(basis_ket(2, 1)), 1e-14));
  }
}

TEST(BnsChannel, SingleExcitationCoherenceLandsOnSameOutcome) {
  ComplexVector plus = ComplexVector::Zero(4);
  plus(1) = plus(2) = 1.0 / std::sqrt(2.0);
  EXPECT_TRUE(matrices_near(bns_channel()(projector(plus)), projector(basis_ket(2, 1)), 1e-14));
}

TEST(BnsChannel, BlochFormulaMatchesMatrixPipeline) {
  for (std::uint64_t i = 0; i < 50; ++i) {
    Rng rng = rng_for(60, 0, i);
    const ComplexMatrix rho = random_density(4, rng);
    EXPECT_LE((cg_bloch_bns(rho_to_bloch(rho)) - qubit_bloch(bns_channel()(rho))).norm(), 1e-12);
  }
}

TEST(BnsChannel, InvariantUnderSwap) {
  for (std::uint64_t i = 0; i < 20; ++i) {
    Rng rng = rng_for(61, 0, i);
    const ComplexMatrix rho = random_density(4, rng);
    EXPECT_TRUE(matrices_near(bns_channel()(swap_channel()(rho)), bns_channel()(rho), 1e-13));
  }
}

TEST(PtraceChannel, MatchesPartialTrace) {
  for (std::uint64_t i = 0; i < 20; ++i) {
    Rng rng = rng_for(62, 0, i);
    const ComplexMatrix rho = random_density(4, rng);
    EXPECT_TRUE(matrices_near(ptrace_channel()(rho), partial_trace(rho, {2, 2}, Subsystem::kA), 1e-14));
  }
}

TEST(Interactions, SwapExchangesProductFactors) {
  Rng rng = testing::test_rng(63);
  const ComplexMatrix a = random_density(2, rng);
  const ComplexMatrix b = random_density(2, rng);
  EXPECT_TRUE(matrices_near(swap_channel()(tensor_product(a, b)), tensor_product(b, a), 1e-14));
  EXPECT_TRUE(matrices_near(swap_matrix() * swap_matrix(), identity(4), 0.0));
}

TEST(Interactions, ZUnitaryIsExponentialOfZZ) {
  const ComplexMatrix zz = tensor_product(pauli::z(), pauli::z());
  for (double t : {0.0, 0.3, 1.0, std::numbers::pi / 4.0}) {
    const ComplexMatrix expected = std::cos(t) * identity(4) + Complex(0.0, std::sin(t)) * zz;
    EXPECT_TRUE(matrices_near(z_unitary(t), expected, 1e-14));
  }
  EXPECT_TRUE(matrices_near(z_unitary(0.5, 2.0), z_unitary(1.0), 1e-15));
  EXPECT_TRUE(matrices_near(z_unitary(0.0), identity(4), 0.0));
}

TEST(Scenario, Construction) {
  for (int id = 1; id <= 4; ++id) {
    const Scenario sc = Scenario::make(id);
    EXPECT_EQ(sc.id(), id);
    EXPECT_EQ(sc.time_dependent(), id % 2 == 0);
    EXPECT_EQ(sc.cg().dim_in(), 4u);
    EXPECT_EQ(sc.cg().dim_out(), 2u);
    EXPECT_FALSE(sc.name().empty());
  }
  EXPECT_TRUE(matrices_near(Scenario::make(3).unitary_matrix(0.7), swap_matrix(), 0.0));
  testing::expect_error(ErrorKind::kUnsupportedScenario, [] { Scenario::make(5); });
  testing::expect_error(ErrorKind::kUnsupportedScenario, [] { Scenario::make(0); });
}

TEST(ScenarioLabMap, MatchesMatrixPipeline) {
  for (int id = 1; id <= 4; ++id) {
    const Scenario sc = Scenario::make(id);
    for (std::uint64_t i = 0; i < 25; ++i) {
      Rng rng = rng_for(64, static_cast<std::uint64_t>(id), i);
      const ComplexMatrix rho = random_density(4, rng);
      for (double t : {0.0, 0.4, 1.0, 2.5}) {
        const Eigen::Vector3d lab = scenario_lab_map(sc, rho_to_bloch(rho), t);
        const Eigen::Vector3d direct = qubit_bloch(sc.cg()(sc.unitary(t)(rho)));
        EXPECT_LE((lab - direct).norm(), 1e-12) << "scenario " << id << " t " << t;
      }
    }
  }
}

TEST(DecomposeRaRb, SumsToCoarseGrainedVector) {
  Rng rng = testing::test_rng(65);
  const LabSpace lab = rho_to_bloch(random_density(4, rng));
  const auto [ra, rb] = decompose_ra_rb(lab);
  EXPECT_LE((ra + rb - cg_bloch_bns(lab)).norm(), 1e-15);
  EXPECT_EQ(rb(2), 0.0);
  EXPECT_GT(rb.norm(), 1e-6);
  EXPECT_LE(decompose_ra_rb(rho_to_bloch(twirl_z(random_density(4, rng)))).second.norm(), 1e-14);
}

TEST(ZRotation, IsOrthogonalAndComposes) {
  const Eigen::Matrix3d r = z_rotation(0.3);
  EXPECT_LE((r * r.transpose() - Eigen::Matrix3d::Identity()).norm(), 1e-15);
  EXPECT_LE((z_rotation(0.3) * z_rotation(0.5) - z_rotation(0.8)).norm(), 1e-15);
}

TEST(WernerState, Family) {
  EXPECT_TRUE(matrices_near(werner_state(0.0), maximally_mixed_state(), 0.0));
  ComplexVector psi = ComplexVector::Zero(4);
  psi(1) = 1.0 / std::sqrt(2.0);
  psi(2) = -1.0 / std::sqrt(2.0);
  EXPECT_TRUE(matrices_near(werner_state(1.0), projector(psi), 1e-15));
  for (double l : {-1.0 / 3.0, 0.2, 1.0 / 3.0, 0.9}) {
    EXPECT_TRUE(is_density(werner_state(l)));
    EXPECT_LE(min_eigenvalue(werner_state(l)), (1.0 - l) / 4.0 + 1e-15);
  }
  EXPECT_NEAR(min_eigenvalue(werner_state(-1.0 / 3.0)), 0.0, 1e-15);
  testing::expect_error(ErrorKind::kOutOfRange, [] { werner_state(1.1); });
  testing::expect_error(ErrorKind::kOutOfRange, [] { werner_state(-0.5); });
}

TEST(ReferenceStates, Basics) {
  EXPECT_TRUE(is_density(maximally_entangled_state()));
  EXPECT_EQ(support_rank(maximally_entangled_state()), 1u);
  EXPECT_TRUE(matrices_near(maximally_mixed_state(2), identity(2) / 2.0, 0.0));
}

TEST(PhaseFlip, IsTracePreservingDephasing) {
  for (double t : {0.0, 0.3, 1.0}) {
    const KrausChannel ch = phase_flip_channel(t);
    EXPECT_TRUE(ch.is_trace_preserving());
    Rng rng = testing::test_rng(66);
    const ComplexMatrix rho = random_density(2, rng);
    ComplexMatrix expected = rho;
    expected(0, 1) *= std::cos(2.0 * t);
    expected(1, 0) *= std::cos(2.0 * t);
    EXPECT_TRUE(matrices_near(ch(rho), expected, 1e-14));
  }
}

TEST(ConditionResidual, ZeroOnlyOnConditionStates) {
  EXPECT_EQ(condition_residual(Scenario::make(1), rho_to_bloch(maximally_entangled_state())), 0.0);
  for (int id = 2; id <= 4; ++id) {
    const Scenario sc = Scenario::make(id);
    for (std::uint64_t i = 0; i < 20; ++i) {
      Rng rng = rng_for(67, static_cast<std::uint64_t>(id), i);
      const ComplexMatrix rho = random_density(4, rng);
      EXPECT_GT(condition_residual(sc, rho_to_bloch(rho)), 1e-6);
      EXPECT_LE(condition_residual(sc, rho_to_bloch(condition_state(id, rho))), 1e-14);
    }
  }
}

TEST(AnalyticEmergent, VerdictAndChannel) {
  for (int id = 1; id <= 4; ++id) {
    const Scenario sc = Scenario::make(id);
    for (std::uint64_t i = 0; i < 20; ++i) {
      Rng rng = rng_for(68, static_cast<std::uint64_t>(id), i);
      const ComplexMatrix rho = condition_state(id, random_density(4, rng));
      for (double t : {0.2, 1.0}) {
        const AnalyticVerdict v = analytic_emergent(sc, rho_to_bloch(rho), t);
        ASSERT_TRUE(v.exists);
        ASSERT_TRUE(v.emergent.has_value());
        EXPECT_LE(commutation_residual(*v.emergent, sc, t, rho), 1e-12) << "scenario " << id;
      }
    }
  }
  Rng rng = testing::test_rng(69);
  const AnalyticVerdict none = analytic_emergent(Scenario::make(3), rho_to_bloch(random_density(4, rng)), 1.0);
  EXPECT_FALSE(none.exists);
  EXPECT_FALSE(none.emergent.has_value());
}

TEST(ExplicitEmergent, FailsOffCondition) {
  for (int id = 2; id <= 4; ++id) {
    const Scenario sc = Scenario::make(id);
    Rng rng = rng_for(70, static_cast<std::uint64_t>(id));
    const ComplexMatrix rho = random_density(4, rng);
    EXPECT_GT(commutation_residual(explicit_emergent(sc, 1.0), sc, 1.0, rho), 1e-6) << "scenario " << id;
  }
}

TEST(ExplicitEmergent, ScenarioTwoIsHalfAngleRotation) {
  const Scenario sc = Scenario::make(2);
  const KrausChannel ch = explicit_emergent(sc, 0.4);
  const Eigen::Vector3d v(0.6, 0.0, 0.0);
  EXPECT_LE((qubit_bloch(ch(qubit_from_bloch(v))) - z_rotation(0.8) * v).norm(), 1e-14);
}

TEST(AnalyticEmergent, AgreesWithPetzOnConditionStates) {
  for (int id = 1; id <= 4; ++id) {
    const Scenario sc = Scenario::make(id);
    for (std::uint64_t i = 0; i < 10; ++i) {
      Rng rng = rng_for(71, static_cast<std::uint64_t>(id), i);
      const ComplexMatrix rho = condition_state(id, random_density(4, rng));
      const KrausChannel petz = petz_emergent(sc.unitary(1.0), sc.cg(), Generator::make(rho, "cond"));
      const KrausChannel exact = explicit_emergent(sc, 1.0);
      EXPECT_LE(trace_distance(petz(sc.cg()(rho)), exact(sc.cg()(rho))), 1e-8) << "scenario " << id;
    }
  }
}

}  // namespace
}  // namespace qcg
