#include "test_support.hpp"

namespace qcg::sdp {
namespace {

using qcg::testing::matrices_near;

ComplexMatrix same(const ComplexMatrix& m) { return m; }

RealVector sorted(RealVector v) {
  std::sort(v.data(), v.data() + v.size());
  return v;
}

TEST(ComplexToReal, Example) {
  ComplexMatrix h(2, 2);
  h << 1.0, Complex(0.0, 1.0), Complex(0.0, -1.0), 1.0;
  RealMatrix expected(4, 4);
  expected << 1, 0, 0, -1, 0, 1, 1, 0, 0, 1, 1, 0, -1, 0, 0, 1;
  EXPECT_LE((complex_to_real(h) - expected).cwiseAbs().maxCoeff(), 0.0);
}

TEST(ComplexToReal, SpectrumIsDoubled) {
  Rng rng = qcg::testing::test_rng(80);
  for (int i = 0; i < 10; ++i) {
    const ComplexMatrix h = random_hermitian(3, rng);
    const RealVector ev = hermitian_eigenvalues(h);
    RealVector doubled(6);
    doubled << ev, ev;
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(complex_to_real(h));
    EXPECT_LE((es.eigenvalues() - sorted(doubled)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_TRUE(matrices_near(real_to_complex(complex_to_real(h)), h, 1e-15));
  }
}

TEST(ComplexToReal, PsdEquivalence) {
  Rng rng = qcg::testing::test_rng(81);
  const ComplexMatrix psd = random_density(3, rng);
  const ComplexMatrix indefinite = random_hermitian(3, rng);
  Eigen::SelfAdjointEigenSolver<RealMatrix> a(complex_to_real(psd));
  Eigen::SelfAdjointEigenSolver<RealMatrix> b(complex_to_real(indefinite));
  EXPECT_GE(a.eigenvalues().minCoeff(), -1e-14);
  EXPECT_EQ(b.eigenvalues().minCoeff() < 0.0, min_eigenvalue(indefinite) < 0.0);
}

TEST(ComplexToReal, RejectsNonHermitian) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 1) = 1.0;
  qcg::testing::expect_error(ErrorKind::kNotHermitian, [&] { complex_to_real(m); });
}

TEST(Svec, RoundTripAndInnerProduct) {
  Rng rng = qcg::testing::test_rng(82);
  const RealMatrix a = complex_to_real(random_hermitian(2, rng));
  const RealMatrix b = complex_to_real(random_hermitian(2, rng));
  EXPECT_LE((smat(svec(a), 4) - a).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_NEAR(svec(a).dot(svec(b)), (a * b).trace(), 1e-13);
  EXPECT_EQ(svec_size(4), 10);
}

TEST(HermitianCoords, RoundTrip) {
  Rng rng = qcg::testing::test_rng(83);
  const ComplexMatrix h = random_hermitian(3, rng);
  EXPECT_EQ(hermitian_coords(h).size(), 9);
  EXPECT_TRUE(matrices_near(from_hermitian_coords(hermitian_coords(h), 3), h, 1e-15));
}

// min t  s.t.  t I - H = S >= 0
SdpProblem max_eigenvalue_problem(const ComplexMatrix& h) {
  SdpProblem p;
  const Variable s = p.add_block("S", static_cast<std::size_t>(h.rows()));
  const Variable t = p.add_scalar("t", ScalarDomain::kFree);
  p.add_constraint("shift", ComplexMatrix(-h)).add(s, same).add(t, ComplexMatrix(-identity(static_cast<std::size_t>(h.rows()))));
  p.set_objective(t, 1.0);
  return p;
}

TEST(Solver, MaxEigenvalueLp) {
  const SdpSolution sol = solve(max_eigenvalue_problem(qcg::testing::diag({2, 1, -1})));
  ASSERT_EQ(sol.status, SdpStatus::kOptimal) << sol.message;
  EXPECT_NEAR(sol.objective_value, 2.0, 1e-7);
  EXPECT_NEAR(sol.scalar("t"), 2.0, 1e-7);
  EXPECT_NEAR(sol.dual_objective, sol.objective_value, 1e-6);
  EXPECT_FALSE(sol.history.empty());
}

TEST(Solver, MaxEigenvalueOfRandomHermitian) {
  for (std::uint64_t i = 0; i < 5; ++i) {
    Rng rng = rng_for(84, 0, i);
    const ComplexMatrix h = random_hermitian(4, rng);
    const SdpSolution sol = solve(max_eigenvalue_problem(h));
    ASSERT_EQ(sol.status, SdpStatus::kOptimal);
    EXPECT_NEAR(sol.objective_value, hermitian_eigenvalues(h).maxCoeff(), 1e-6);
    EXPECT_GE(min_eigenvalue(sol.block("S")), -1e-7);
  }
}

TEST(Solver, TraceConstrainedPrimal) {
  Rng rng = qcg::testing::test_rng(85);
  const ComplexMatrix h = random_hermitian(3, rng);
  SdpProblem p;
  const Variable x = p.add_block("X", 3);
  p.add_scalar_constraint("trace", 1.0).add(x, [](const ComplexMatrix& m) { return ComplexMatrix::Constant(1, 1, m.trace()); });
  p.set_objective(x, ComplexMatrix(-h));
  const SdpSolution sol = solve(p);
  ASSERT_EQ(sol.status, SdpStatus::kOptimal);
  EXPECT_NEAR(-sol.objective_value, hermitian_eigenvalues(h).maxCoeff(), 1e-6);
  EXPECT_NEAR(sol.block("X").trace().real(), 1.0, 1e-8);
}

TEST(Solver, PinnedIndefiniteBlockIsInfeasible) {
  SdpProblem p;
  const Variable x = p.add_block("X", 2);
  p.add_constraint("pin", qcg::testing::diag({1, -1})).add(x, same);
  const SdpSolution sol = solve(p);
  EXPECT_EQ(sol.status, SdpStatus::kInfeasible);
  ASSERT_TRUE(sol.certificate.has_value());
  EXPECT_EQ(sol.certificate->kind, "fixed-block");
  EXPECT_NEAR(sol.certificate->b_dot_y, 1.0, 1e-12);
  EXPECT_LE(sol.certificate->violation, 1e-8);
}

TEST(Solver, NegativeTraceIsInfeasibleWithRay) {
  SdpProblem p;
  const Variable x = p.add_block("X", 2);
  p.add_scalar_constraint("trace", -1.0).add(x, [](const ComplexMatrix& m) { return ComplexMatrix::Constant(1, 1, m.trace()); });
  const SdpSolution sol = solve(p);
  EXPECT_EQ(sol.status, SdpStatus::kInfeasible) << sol.message;
  ASSERT_TRUE(sol.certificate.has_value());
  EXPECT_GT(sol.certificate->b_dot_y, 0.0);
  EXPECT_LE(sol.certificate->violation, 1e-6);
  ASSERT_EQ(sol.certificate->y.size(), 1);
  EXPECT_LT(sol.certificate->y(0), 0.0);
}

TEST(Solver, InconsistentEqualitiesGiveLinearCertificate) {
  SdpProblem p;
  const Variable x = p.add_block("X", 1);
  p.add_scalar_constraint("one", 1.0).add(x, same);
  p.add_scalar_constraint("two", 2.0).add(x, same);
  const SdpSolution sol = solve(p);
  EXPECT_EQ(sol.status, SdpStatus::kInfeasible);
  ASSERT_TRUE(sol.certificate.has_value());
  EXPECT_EQ(sol.certificate->kind, "linear");
  EXPECT_NEAR(sol.certificate->y(0) + sol.certificate->y(1), 0.0, 1e-12);
}

TEST(Solver, FullyPinnedProblemSkipsIterations) {
  SdpProblem p;
  const Variable x = p.add_block("X", 2);
  p.add_constraint("pin", qcg::testing::diag({1, 2})).add(x, same);
  p.set_objective(x, identity(2));
  const SdpSolution sol = solve(p);
  ASSERT_EQ(sol.status, SdpStatus::kOptimal);
  EXPECT_EQ(sol.iterations, 0);
  EXPECT_NEAR(sol.objective_value, 3.0, 1e-12);
  ASSERT_EQ(sol.presolve.fixed_variables.size(), 1u);
  EXPECT_EQ(sol.presolve.fixed_variables[0], "X");
}

TEST(Solver, UnboundedObjective) {
  SdpProblem p;
  const Variable x = p.add_block("X", 1);
  const Variable t = p.add_scalar("t", ScalarDomain::kFree);
  p.add_scalar_constraint("tie", 0.0).add(x, same).add(t, -1.0);
  p.set_objective(t, -1.0);
  EXPECT_EQ(solve(p).status, SdpStatus::kUnbounded);
}

TEST(Solver, IterationLimit) {
  SolverOptions opt;
  opt.max_iter = 1;
  Rng rng = qcg::testing::test_rng(86);
  const SdpSolution sol = solve(max_eigenvalue_problem(random_hermitian(4, rng)), opt);
  EXPECT_EQ(sol.status, SdpStatus::kMaxIterations);
}

TEST(Problem, Validation) {
  SdpProblem p;
  const Variable x = p.add_block("X", 2);
  const Variable s = p.add_scalar("s");
  EXPECT_THROW(p.add_block("X", 2), Error);
  EXPECT_THROW(p.add_scalar("s"), Error);
  ComplexMatrix skew = ComplexMatrix::Zero(2, 2);
  skew(0, 1) = 1.0;
  qcg::testing::expect_error(ErrorKind::kNotHermitian, [&] { p.add_constraint("bad", skew); });
  auto& c = p.add_constraint("ok", identity(2));
  EXPECT_THROW(c.add(s, same), Error);
  EXPECT_THROW(c.add(x, identity(2)), Error);
  EXPECT_THROW(p.set_objective(x, 1.0), Error);
  EXPECT_THROW(p.set_objective(s, identity(2)), Error);
}

TEST(Diamond, SolutionSatisfiesItsOwnConstraints) {
  Rng rng = qcg::testing::test_rng(87);
  const KrausChannel a = random_channel(2, 2, 2, rng);
  const KrausChannel b = random_channel(2, 2, 3, rng);
  const ComplexMatrix j = kraus_to_choi(a).matrix - kraus_to_choi(b).matrix;
  const DiamondNormResult r = solve_diamond_norm(j, {2, 2});
  ASSERT_EQ(r.solution.status, SdpStatus::kOptimal);
  const ComplexMatrix& z = r.solution.block("Z");
  const ComplexMatrix& x = r.solution.block("X");
  const double eps = r.solution.scalar("epsilon");
  EXPECT_LE(qcg::testing::max_abs(z - x - j), 1e-7);
  EXPECT_GE(min_eigenvalue(z), -1e-7);
  EXPECT_GE(min_eigenvalue(x), -1e-7);
  EXPECT_GE(min_eigenvalue(eps * identity(2) - partial_trace(z + x, {2, 2}, Subsystem::kA)), -1e-7);
  EXPECT_NEAR(eps, r.value, 1e-9);
}

// 2 max <J, W>  s.t.  0 <= W <= rho (x) I,  Tr rho = 1
double dual_diamond(const ComplexMatrix& j, BipartiteDims dims) {
  SdpProblem p;
  const Variable w = p.add_block("W", dims.total());
  const Variable rho = p.add_block("rho", dims.dim_a);
  const Variable slack = p.add_block("slack", dims.total());
  p.add_constraint("dominance", ComplexMatrix::Zero(static_cast<Eigen::Index>(dims.total()), static_cast<Eigen::Index>(dims.total())))
      .add(rho, [dims](const ComplexMatrix& m) { return tensor_product(m, identity(dims.dim_b)); })
      .add(w, [](const ComplexMatrix& m) { return ComplexMatrix(-m); })
      .add(slack, [](const ComplexMatrix& m) { return ComplexMatrix(-m); });
  p.add_scalar_constraint("normalization", 1.0).add(rho, [](const ComplexMatrix& m) {
    return ComplexMatrix::Constant(1, 1, m.trace());
  });
  p.set_objective(w, ComplexMatrix(-j));
  const SdpSolution sol = solve(p);
  if (sol.status != SdpStatus::kOptimal) throw Error(ErrorKind::kSolverFailure, sol.message);
  return -2.0 * sol.objective_value;
}

TEST(Diamond, AgreesWithDualFormulation) {
  for (std::uint64_t i = 0; i < 6; ++i) {
    Rng rng = rng_for(88, 0, i);
    const std::size_t din = 2 + i % 2;
    const KrausChannel a = random_channel(din, 2, 2 + i % 2, rng);
    const KrausChannel b = random_channel(din, 2, 2, rng);
    const ComplexMatrix j = kraus_to_choi(a).matrix - kraus_to_choi(b).matrix;
    EXPECT_NEAR(diamond_distance(a, b), dual_diamond(j, {din, 2}), 1e-6);
  }
}

}  // namespace
}  // namespace qcg::sdp
