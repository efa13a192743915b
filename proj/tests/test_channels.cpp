#include "test_support.hpp"

namespace qcg {
namespace {

using testing::matrices_near;

ComplexMatrix kraus_apply(const std::vector<ComplexMatrix>& ops, const ComplexMatrix& rho) {
  ComplexMatrix out = ComplexMatrix::Zero(ops.front().rows(), ops.front().rows());
  for (const auto& k : ops) out += k * rho * k.adjoint();
  return out;
}

TEST(KrausChannel, RejectsNonTracePreserving) {
  testing::expect_error(ErrorKind::kNotCptp, [] { KrausChannel::from_operators({1.1 * identity(2)}); });
  testing::expect_error(ErrorKind::kInvalidArgument, [] { KrausChannel::from_operators({}); });
}

TEST(KrausToChoi, IdentityHasCornerOnes) {
  const ComplexMatrix j = kraus_to_choi(KrausChannel::identity_channel(2)).matrix;
  ComplexMatrix expected = ComplexMatrix::Zero(4, 4);
  expected(0, 0) = expected(0, 3) = expected(3, 0) = expected(3, 3) = 1.0;
  EXPECT_TRUE(matrices_near(j, expected, 0.0));
}

TEST(KrausToChoi, CompletelyDepolarizing) {
  EXPECT_TRUE(matrices_near(kraus_to_choi(depolarizing_channel(2, 1.0)).matrix, identity(4) / 2.0, 1e-15));
}

TEST(KrausToChoi, SigmaXBlocksAreBasisImages) {
  const ComplexMatrix j = kraus_to_choi(KrausChannel::unitary(pauli::x())).matrix;
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k) {
      const ComplexMatrix image = pauli::x() * ket_bra(basis_ket(2, i), basis_ket(2, k)) * pauli::x();
      EXPECT_TRUE(matrices_near(j.block(2 * i, 2 * k, 2, 2), image, 0.0));
    }
}

TEST(ApplyViaChoi, IdentityReturnsInput) {
  Rng rng = testing::test_rng(30);
  const ComplexMatrix sigma = random_density(2, rng);
  EXPECT_TRUE(matrices_near(apply_via_choi(kraus_to_choi(KrausChannel::identity_channel(2)), sigma), sigma, 1e-15));
}

TEST(ApplyViaChoi, BnsOnGroundState) {
  const ComplexMatrix out = apply_via_choi(kraus_to_choi(bns_channel()), projector(basis_ket(4, 0)));
  EXPECT_TRUE(matrices_near(out, kraus_apply(bns_channel().operators(), projector(basis_ket(4, 0))), 1e-15));
  EXPECT_TRUE(matrices_near(out, projector(basis_ket(2, 0)), 1e-15));
}

TEST(ApplyViaChoi, MatchesKrausSumOnRandomChannels) {
  for (std::uint64_t i = 0; i < 50; ++i) {
    Rng rng = rng_for(31, 0, i);
    const KrausChannel ch = random_channel(3, 2, 3, rng);
    const ComplexMatrix rho = random_density(3, rng);
    EXPECT_TRUE(matrices_near(apply_via_choi(kraus_to_choi(ch), rho), kraus_apply(ch.operators(), rho), 1e-11));
  }
}

TEST(ApplyViaJam, AgreesWithChoiApplication) {
  EXPECT_TRUE(matrices_near(
      apply_via_jam(kraus_to_choi(KrausChannel::identity_channel(2)).as(Form::kJamiolkowski), pauli::x()), pauli::x(),
      1e-15));
  for (std::uint64_t i = 0; i < 20; ++i) {
    Rng rng = rng_for(32, 0, i);
    const ConditionalState cs = kraus_to_choi(random_channel(2, 3, 2, rng));
    const ComplexMatrix rho = random_density(2, rng);
    EXPECT_TRUE(matrices_near(apply_via_jam(cs.as(Form::kJamiolkowski), rho), apply_via_choi(cs, rho), 1e-11));
  }
}

TEST(ApplyViaJam, ClassicalDiagonalIsMatrixVectorProduct) {
  Eigen::Matrix2d p;
  p << 0.9, 0.2, 0.1, 0.8;  // P(y|x), column x
  ComplexMatrix cs = ComplexMatrix::Zero(4, 4);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) cs(2 * x + y, 2 * x + y) = p(y, x);
  const Eigen::Vector2d px(0.3, 0.7);
  const ComplexMatrix out = apply_via_jam({{2, 2}, Form::kJamiolkowski, cs}, testing::diag({px(0), px(1)}));
  const Eigen::Vector2d py = p * px;
  EXPECT_TRUE(matrices_near(out, testing::diag({py(0), py(1)}), 1e-15));
}

TEST(ApplyViaJam, RequiresJamiolkowskiForm) {
  testing::expect_error(ErrorKind::kInvalidArgument, [] {
    apply_via_jam(kraus_to_choi(KrausChannel::identity_channel(2)), identity(2) / 2.0);
  });
}

TEST(ChoiToKraus, IdentityAndUnitaryRecoverSingleOperator) {
  const KrausChannel id = choi_to_kraus(kraus_to_choi(KrausChannel::identity_channel(2)));
  ASSERT_EQ(id.size(), 1u);
  const Complex phase = id.operators()[0](0, 0);
  EXPECT_NEAR(std::abs(phase), 1.0, 1e-12);
  EXPECT_TRUE(matrices_near(id.operators()[0] / phase, identity(2), 1e-12));

  Rng rng = testing::test_rng(33);
  const ComplexMatrix u = random_unitary(3, rng);
  const KrausChannel uk = choi_to_kraus(kraus_to_choi(KrausChannel::unitary(u)));
  ASSERT_EQ(uk.size(), 1u);
  const Complex c = (u.adjoint() * uk.operators()[0]).trace() / 3.0;
  EXPECT_NEAR(std::abs(c), 1.0, 1e-10);
  EXPECT_TRUE(matrices_near(uk.operators()[0], c * u, 1e-10));
}

TEST(ChoiToKraus, BnsRoundTrip) {
  const ConditionalState j = kraus_to_choi(bns_channel());
  const KrausChannel back = choi_to_kraus(j);
  EXPECT_EQ(back.size(), 3u);  // the four published operators span a rank-3 Choi matrix
  EXPECT_TRUE(matrices_near(kraus_to_choi(back).matrix, j.matrix, 1e-10));
}

TEST(ChoiToKraus, IdempotentOnRandomChannels) {
  for (std::uint64_t i = 0; i < 20; ++i) {
    Rng rng = rng_for(34, 0, i);
    const ConditionalState j = kraus_to_choi(random_channel(2, 2, 3, rng));
    EXPECT_TRUE(matrices_near(kraus_to_choi(choi_to_kraus(j)).matrix, j.matrix, 1e-9));
  }
}

TEST(ChoiToKraus, RejectsInvalidChoi) {
  testing::expect_error(ErrorKind::kNotCptp, [] { choi_to_kraus({{2, 2}, Form::kChoi, identity(4)}); });
}

TEST(IsCptp, KrausBuiltChannelsAreValid) {
  for (std::uint64_t i = 0; i < 30; ++i) {
    Rng rng = rng_for(35, 0, i);
    EXPECT_TRUE(is_cptp(kraus_to_choi(random_channel(2, 3, 2, rng)), 1e-9).valid);
  }
}

TEST(IsCptp, DetectsNegativityAndReportsIt) {
  const ComplexMatrix j = kraus_to_choi(KrausChannel::identity_channel(2)).matrix;
  const ComplexMatrix broken = j - 0.1 * projector(basis_ket(4, 1));
  const CptpReport r = is_cptp({{2, 2}, Form::kChoi, broken});
  EXPECT_FALSE(r.valid);
  EXPECT_NEAR(r.min_eigenvalue, -0.1, 1e-12);
}

TEST(IsCptp, DetectsMarginalFailure) {
  const CptpReport r = is_cptp({{2, 2}, Form::kChoi, identity(4)});
  EXPECT_FALSE(r.valid);
  EXPECT_NEAR(r.marginal_residual, std::sqrt(2.0), 1e-12);
}

TEST(IsCptp, JamiolkowskiInputIsConvertedFirst) {
  const ConditionalState jam = kraus_to_choi(KrausChannel::identity_channel(2)).as(Form::kJamiolkowski);
  EXPECT_LT(min_eigenvalue(jam.matrix), -0.5);
  EXPECT_TRUE(is_cptp(jam).valid);
}

TEST(ComposeViaChoi, IdentityWithIdentity) {
  const ConditionalState id = kraus_to_choi(KrausChannel::identity_channel(2));
  EXPECT_TRUE(matrices_near(compose_via_choi(id, id).matrix, id.matrix, 1e-15));
}

TEST(ComposeViaChoi, BnsAfterSwap) {
  const KrausChannel bns = bns_channel();
  std::vector<ComplexMatrix> ops;
  for (const auto& k : bns.operators()) ops.push_back(k * swap_matrix());
  const ConditionalState oracle = kraus_to_choi(KrausChannel::from_operators(ops));
  const ConditionalState composed = compose_via_choi(kraus_to_choi(bns_channel()), kraus_to_choi(swap_channel()));
  EXPECT_TRUE(matrices_near(composed.matrix, oracle.matrix, 1e-14));
}

TEST(ComposeViaChoi, MatchesKrausCompositionOnRandomPairs) {
  for (std::uint64_t i = 0; i < 20; ++i) {
    Rng rng = rng_for(36, 0, i);
    const KrausChannel a = random_channel(2, 3, 2, rng);
    const KrausChannel b = random_channel(3, 2, 2, rng);
    EXPECT_TRUE(matrices_near(compose_via_choi(kraus_to_choi(b), kraus_to_choi(a)).matrix,
                              kraus_to_choi(a.then(b)).matrix, 1e-10));
  }
}

TEST(ComposeViaChoi, RejectsMismatchedInnerDimension) {
  testing::expect_error(ErrorKind::kDimensionMismatch, [] {
    compose_via_choi(kraus_to_choi(KrausChannel::identity_channel(2)), kraus_to_choi(bns_channel().then(swap_channel())));
  });
}

TEST(AdjointChannel, UnitaryAdjointIsInverseConjugation) {
  Rng rng = testing::test_rng(37);
  const ComplexMatrix u = random_unitary(2, rng);
  const ComplexMatrix x = random_hermitian(2, rng);
  EXPECT_TRUE(matrices_near(adjoint_channel(KrausChannel::unitary(u))(x), u.adjoint() * x * u, 1e-14));
}

TEST(AdjointChannel, UnitalForTracePreserving) {
  EXPECT_TRUE(matrices_near(adjoint_channel(bns_channel())(identity(2)), identity(4), 1e-10));
}

TEST(AdjointChannel, DualityPairing) {
  for (std::uint64_t i = 0; i < 20; ++i) {
    Rng rng = rng_for(38, 0, i);
    const KrausChannel ch = random_channel(3, 2, 2, rng);
    const ComplexMatrix x = random_hermitian(3, rng);
    const ComplexMatrix y = random_hermitian(2, rng);
    EXPECT_NEAR(std::abs((adjoint_channel(ch)(y) * x).trace() - (y * ch(x)).trace()), 0.0, 1e-10);
  }
}

}  // namespace
}  // namespace qcg
