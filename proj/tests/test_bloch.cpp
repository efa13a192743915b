#include "test_support.hpp"

namespace qcg {
namespace {

using testing::matrices_near;

TEST(BlochToRho, MaximallyMixed) {
  EXPECT_TRUE(matrices_near(bloch_to_rho(LabSpace{}), identity(4) / 4.0, 0.0));
}

TEST(BlochToRho, MaximallyEntangled) {
  LabSpace lab;
  lab.T = Eigen::Vector3d(1, -1, 1).asDiagonal();
  EXPECT_TRUE(matrices_near(bloch_to_rho(lab), maximally_entangled_state(), 1e-15));
}

TEST(BlochToRho, ProductGroundState) {
  LabSpace lab;
  lab.r = {0, 0, 1};
  lab.s = {0, 0, 1};
  lab.T(2, 2) = 1;
  EXPECT_TRUE(matrices_near(bloch_to_rho(lab), projector(basis_ket(4, 0)), 1e-15));
}

TEST(BlochToRho, HermitianUnitTraceButNotAlwaysPositive) {
  LabSpace lab;
  lab.r = {1, 1, 1};
  const ComplexMatrix rho = bloch_to_rho(lab);
  EXPECT_TRUE(is_hermitian(rho));
  EXPECT_NEAR(rho.trace().real(), 1.0, 1e-15);
  EXPECT_LT(min_eigenvalue(rho), 0.0);
}

TEST(RhoToBloch, KnownStates) {
  const LabSpace mm = rho_to_bloch(identity(4) / 4.0);
  EXPECT_LE(mm.r.norm() + mm.s.norm() + mm.T.norm(), 1e-15);
  const LabSpace me = rho_to_bloch(maximally_entangled_state());
  EXPECT_LE(me.r.norm() + me.s.norm(), 1e-15);
  EXPECT_LE((me.T - Eigen::Matrix3d(Eigen::Vector3d(1, -1, 1).asDiagonal())).norm(), 1e-15);
}

TEST(RhoToBloch, TraceFormulaOracle) {
  Rng rng = testing::test_rng(20);
  const ComplexMatrix rho = random_density(4, rng);
  const LabSpace lab = rho_to_bloch(rho);
  const ComplexMatrix sx = pauli::x();
  const ComplexMatrix sy = pauli::y();
  EXPECT_NEAR(lab.T(0, 1), (rho * tensor_product(sx, sy)).trace().real(), 1e-15);
  EXPECT_NEAR(lab.s(1), (rho * tensor_product(identity(2), sy)).trace().real(), 1e-15);
}

TEST(RhoToBloch, RoundTripOnUnitTraceHermitian) {
  Rng rng = testing::test_rng(21);
  for (int i = 0; i < 50; ++i) {
    const ComplexMatrix rho = random_density(4, rng);
    EXPECT_TRUE(matrices_near(bloch_to_rho(rho_to_bloch(rho)), rho, 1e-12));
    ComplexMatrix h = random_hermitian(4, rng);
    h += (1.0 - h.trace().real()) / 4.0 * identity(4);
    EXPECT_TRUE(matrices_near(bloch_to_rho(rho_to_bloch(h)), h, 1e-12));
  }
}

TEST(RhoToBloch, RejectsWrongDimension) {
  testing::expect_error(ErrorKind::kDimensionMismatch, [] { rho_to_bloch(identity(2)); });
}

TEST(QubitBloch, RoundTrip) {
  const Eigen::Vector3d v(0.1, -0.4, 0.3);
  EXPECT_LE((qubit_bloch(qubit_from_bloch(v)) - v).norm(), 1e-15);
}

}  // namespace
}  // namespace qcg
