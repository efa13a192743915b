#include "test_support.hpp"

namespace qcg::sdp {
namespace {

KrausChannel depolarizing_qubit(double p) { return depolarizing_channel(2, p); }

TEST(DiamondDistance, KnownValues) {
  const KrausChannel id = KrausChannel::identity_channel(2);
  EXPECT_NEAR(diamond_distance(id, id), 0.0, 1e-7);
  for (double p : {0.1, 0.4, 1.0}) EXPECT_NEAR(diamond_distance(id, depolarizing_qubit(p)), 1.5 * p, 1e-6);
  const KrausChannel flip = KrausChannel::unitary(pauli::x());
  EXPECT_NEAR(diamond_distance(id, flip), 2.0, 1e-6);
  const KrausChannel dephase = phase_flip_channel(std::acos(std::sqrt(0.7)));  // Z applied with probability 0.3
  EXPECT_NEAR(diamond_distance(id, dephase), 0.6, 1e-6);
}

TEST(DiamondDistance, SymmetricAndBoundedByTwo) {
  for (std::uint64_t i = 0; i < 5; ++i) {
    Rng rng = rng_for(90, 0, i);
    const KrausChannel a = random_channel(2, 2, 2, rng);
    const KrausChannel b = random_channel(2, 2, 2, rng);
    const double ab = diamond_distance(a, b);
    EXPECT_NEAR(ab, diamond_distance(b, a), 1e-6);
    EXPECT_LE(ab, 2.0 + 1e-7);
    const ComplexMatrix rho = random_density(2, rng);
    EXPECT_GE(ab + 1e-7, trace_distance(a(rho), b(rho)));
  }
}

TEST(DiamondDistance, DimensionMismatch) {
  qcg::testing::expect_error(ErrorKind::kDimensionMismatch, [] {
    diamond_distance(KrausChannel::identity_channel(2), KrausChannel::identity_channel(3));
  });
}

TEST(Feasibility, OnlyScenarioOneAdmitsAChannel) {
  const EmergentResult one = feasibility_emergent(Scenario::make(1), 1.0);
  ASSERT_TRUE(one.feasible());
  EXPECT_TRUE(qcg::testing::matrices_near(one.emergent->choi(),
                                          kraus_to_choi(KrausChannel::identity_channel(2)).matrix, 1e-6));
  for (int id = 2; id <= 4; ++id) {
    EXPECT_EQ(feasibility_emergent(Scenario::make(id), 1.0).status, SdpStatus::kInfeasible) << "scenario " << id;
  }
}

TEST(Feasibility, TrivialTimesAreFeasible) {
  for (int id : {2, 4}) {
    const EmergentResult r = feasibility_emergent(Scenario::make(id), 0.0);
    ASSERT_TRUE(r.feasible()) << "scenario " << id;
    EXPECT_TRUE(is_cptp(*r.emergent, 1e-6).valid);
  }
}

TEST(Feasibility, ChannelCommutesOnRandomStates) {
  const Scenario sc = Scenario::make(1);
  const EmergentResult r = feasibility_emergent(sc, 1.0);
  ASSERT_TRUE(r.feasible());
  const KrausChannel gamma = choi_to_kraus(*r.emergent, 1e-6);
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 200; ++i) {
    Rng rng = rng_for(91, 0, i);
    worst = std::max(worst, commutation_residual(gamma, sc, 1.0, random_density(4, rng)));
  }
  EXPECT_LE(worst, 1e-6);
}

struct TableRow {
  const char* label;
  ComplexMatrix rho;
  double value;
};

TEST(ClosestStateIndependent, ReferenceEpsilons) {
  const Scenario sc = Scenario::make(1);
  const std::vector<TableRow> rows = {{"ME", maximally_entangled_state(), 1.66},
                                      {"MM", maximally_mixed_state(), 0.42},
                                      {"W", werner_state(1.0 / 3.0), 0.55}};
  for (const auto& row : rows) {
    const Generator gen = Generator::make(row.rho, row.label);
    const KrausChannel petz = petz_emergent(sc.unitary(1.0), sc.cg(), gen);
    const EmergentResult r = closest_state_independent(petz, sc, 1.0);
    ASSERT_TRUE(r.feasible()) << row.label << ": " << r.solution.message;
    EXPECT_NEAR(r.epsilon, row.value, 0.02) << row.label;
    const ConditionalState delta(r.emergent->dims, Form::kChoi, kraus_to_choi(petz).matrix - r.emergent->choi());
    EXPECT_NEAR(diamond_norm(delta), r.epsilon, 1e-5) << row.label;
  }
}

TEST(ClosestStateIndependent, InfeasibleWithoutAnEmergentChannel) {
  for (int id = 2; id <= 4; ++id) {
    const Scenario sc = Scenario::make(id);
    const KrausChannel petz = petz_emergent(sc.unitary(1.0), sc.cg(), Generator::make(maximally_mixed_state(), "MM"));
    EXPECT_EQ(closest_state_independent(petz, sc, 1.0).status, SdpStatus::kInfeasible) << "scenario " << id;
  }
}

TEST(Compatibilize, ReferenceThresholds) {
  const std::vector<std::pair<int, double>> expected = {{2, 0.557}, {3, 0.249}, {4, 0.524}};
  for (const auto& [id, value] : expected) {
    const GammaThreshold g = gamma_threshold(Scenario::make(id), 1.0);
    EXPECT_NEAR(g.gamma, value, 0.01) << "scenario " << id;
    EXPECT_EQ(g.probes, static_cast<int>(g.trace.size()));
    EXPECT_NEAR(max_compatible_gamma(Scenario::make(id), 1.0), g.gamma, 2e-3) << "scenario " << id;
  }
}

TEST(Compatibilize, GammaZeroGivesValidChannels) {
  for (int id = 2; id <= 4; ++id) {
    const CompatibilizeResult r = compatibilize(Scenario::make(id), 1.0, 0.0);
    ASSERT_TRUE(r.feasible()) << "scenario " << id;
    EXPECT_TRUE(is_cptp(*r.psi, 1e-7).valid);
    EXPECT_TRUE(is_cptp(*r.theta, 1e-7).valid);
  }
}

TEST(Compatibilize, FeasibilityIsMonotoneInGamma) {
  const Scenario sc = Scenario::make(4);
  bool seen_infeasible = false;
  for (double g = 0.0; g <= 1.0 + 1e-12; g += 0.125) {
    const bool feasible = compatibilize(sc, 1.0, g).feasible();
    if (seen_infeasible) EXPECT_FALSE(feasible) << "gamma " << g;
    seen_infeasible = seen_infeasible || !feasible;
  }
  EXPECT_TRUE(seen_infeasible);
}

TEST(Compatibilize, RejectsGammaOutsideUnitInterval) {
  qcg::testing::expect_error(ErrorKind::kOutOfRange, [] { compatibilize(Scenario::make(2), 1.0, 1.5); });
  qcg::testing::expect_error(ErrorKind::kOutOfRange, [] { compatibilize(Scenario::make(2), 1.0, -0.1); });
}

TEST(Robustness, ScenarioOneRobustnessLiesInUnitInterval) {
  const Scenario sc = Scenario::make(1);
  Rng rng = qcg::testing::test_rng(92);
  for (const KrausChannel& noise : {z_channel(1.0), KrausChannel::unitary(random_unitary(4, rng))}) {
    const RobustnessResult r = cg_robustness(sc, noise, 1.0);
    EXPECT_GE(r.robustness, -1e-6);
    EXPECT_LE(r.robustness, 1.0 + 1e-6);
    ASSERT_TRUE(r.emergent.has_value());
  }
  EXPECT_NEAR(cg_robustness(sc, z_channel(1.0), 1.0).robustness, 0.0, 1e-6);
}

TEST(Robustness, SwapNoiseIsFullyTolerated) {
  const RobustnessResult r = cg_robustness(Scenario::make(1), swap_channel(), 1.0);
  EXPECT_NEAR(r.gamma, 0.0, 1e-6);
  EXPECT_NEAR(r.robustness, 1.0, 1e-6);
}

TEST(Robustness, IncompatibleBaseIsReported) {
  qcg::testing::expect_error(ErrorKind::kBaseIncompatible,
                             [] { cg_robustness(Scenario::make(2), z_channel(1.0), 1.0); });
}

}  // namespace
}  // namespace qcg::sdp
