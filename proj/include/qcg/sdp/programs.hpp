#pragma once

#include "qcg/scenarios.hpp"
#include "qcg/sdp/solver.hpp"

#include <optional>

namespace qcg::sdp {

struct DiamondNormResult {
  double value = 0.0;
  SdpSolution solution;
};

inline SdpStatus require_status(const SdpSolution& sol, const char* op) {
  if (sol.status != SdpStatus::kOptimal) {
    throw Error(ErrorKind::kSolverFailure, std::string(op) + ": solver returned " + to_string(sol.status) + " (" +
                                               sol.message + ")");
  }
  return sol.status;
}

// Adds Z, X >= 0 and a scalar eps with Z - X = target - offset(vars), eps I_A - Tr_B(Z + X) >= 0.
// Returns the eps variable.
inline Variable add_diamond_bound(SdpProblem& p, BipartiteDims dims, const ComplexMatrix& target,
                                  std::optional<Variable> subtracted = std::nullopt) {
  const Variable z = p.add_block("Z", dims.total());
  const Variable x = p.add_block("X", dims.total());
  const Variable slack = p.add_block("bound_slack", dims.dim_a);
  const Variable eps = p.add_scalar("epsilon");
  auto& diff = p.add_constraint("diamond_difference", target)
                   .add(z, [](const ComplexMatrix& m) { return m; })
                   .add(x, [](const ComplexMatrix& m) { return ComplexMatrix(-m); });
  if (subtracted) diff.add(*subtracted, [](const ComplexMatrix& m) { return m; });
  p.add_constraint("diamond_bound", ComplexMatrix::Zero(static_cast<Eigen::Index>(dims.dim_a), static_cast<Eigen::Index>(dims.dim_a)))
      .add(eps, identity(dims.dim_a))
      .add(z, [dims](const ComplexMatrix& m) { return ComplexMatrix(-partial_trace(m, dims, Subsystem::kA)); })
      .add(x, [dims](const ComplexMatrix& m) { return ComplexMatrix(-partial_trace(m, dims, Subsystem::kA)); })
      .add(slack, [](const ComplexMatrix& m) { return ComplexMatrix(-m); });
  p.set_objective(eps, 1.0);
  return eps;
}

// min eps  s.t.  J = Z - X,  Z, X >= 0,  eps I_A >= Tr_B(Z + X).
inline DiamondNormResult solve_diamond_norm(const ComplexMatrix& delta_choi, BipartiteDims dims,
                                            const SolverOptions& opt = {}) {
  qcg::detail::require_square(delta_choi, dims.total(), "diamond_norm");
  SdpProblem p;
  add_diamond_bound(p, dims, hermitian_part(delta_choi));
  DiamondNormResult r;
  r.solution = solve(p, opt);
  r.value = r.solution.objective_value;
  return r;
}

inline double diamond_norm(const ComplexMatrix& delta_choi, BipartiteDims dims, const SolverOptions& opt = {}) {
  DiamondNormResult r = solve_diamond_norm(delta_choi, dims, opt);
  require_status(r.solution, "diamond_norm");
  return r.value;
}

inline double diamond_norm(const ConditionalState& delta, const SolverOptions& opt = {}) {
  return diamond_norm(delta.choi(), delta.dims, opt);
}

inline double diamond_distance(const KrausChannel& a, const KrausChannel& b, const SolverOptions& opt = {}) {
  if (a.dim_in() != b.dim_in() || a.dim_out() != b.dim_out()) {
    throw Error(ErrorKind::kDimensionMismatch, "diamond_distance: channel dimensions differ");
  }
  return diamond_norm(kraus_to_choi(a).matrix - kraus_to_choi(b).matrix, {a.dim_in(), a.dim_out()}, opt);
}

// Choi matrices of the four arms of the coarse-graining square for a scenario at time t.
struct ScenarioChoi {
  ComplexMatrix rho_ba;  // U, A -> B
  ComplexMatrix rho_ca;  // cg, A -> C
  ComplexMatrix rho_db;  // cg, B -> D
  std::size_t dim_a = 4, dim_b = 4, dim_c = 2, dim_d = 2;

  static ScenarioChoi of(const Scenario& sc, double t) {
    ScenarioChoi s;
    s.rho_ba = kraus_to_choi(sc.unitary(t)).matrix;
    s.rho_ca = kraus_to_choi(sc.cg()).matrix;
    s.rho_db = s.rho_ca;
    s.dim_c = s.dim_d = sc.cg().dim_out();
    return s;
  }

  ComplexMatrix emergent_side(const ComplexMatrix& rho_dc) const {
    return compose_choi_matrices(rho_dc, rho_ca, dim_a, dim_c, dim_d);
  }

  ComplexMatrix micro_side(const ComplexMatrix& rho_ba_any) const {
    return compose_choi_matrices(rho_db, rho_ba_any, dim_a, dim_b, dim_d);
  }

  BipartiteDims emergent_dims() const { return {dim_c, dim_d}; }
};

inline void add_channel_constraint(SdpProblem& p, const std::string& name, Variable v, BipartiteDims dims) {
  p.add_constraint(name, identity(dims.dim_a)).add(v, [dims](const ComplexMatrix& m) {
    return partial_trace(m, dims, Subsystem::kA);
  });
}

struct EmergentResult {
  SdpStatus status = SdpStatus::kNumericalFailure;
  double epsilon = 0.0;
  std::optional<ConditionalState> emergent;
  SdpSolution solution;

  bool feasible() const { return status == SdpStatus::kOptimal; }
};

// min eps s.t. rho_{D|C} * rho_{C|A} = rho_{D|B} * rho_{B|A}, rho_{D|C} CPTP, ||Gamma_Petz - Gamma||_diamond <= eps.
inline EmergentResult closest_state_independent(const KrausChannel& petz, const Scenario& sc, double t,
                                                const SolverOptions& opt = {}) {
  const ScenarioChoi arms = ScenarioChoi::of(sc, t);
  const BipartiteDims dims = arms.emergent_dims();
  if (petz.dim_in() != dims.dim_a || petz.dim_out() != dims.dim_b) {
    throw Error(ErrorKind::kDimensionMismatch, "closest_state_independent: Petz channel has the wrong dimensions");
  }
  SdpProblem p;
  const Variable rho = p.add_block("rho_DC", dims.total());
  p.add_constraint("commutativity", arms.micro_side(arms.rho_ba)).add(rho, [arms](const ComplexMatrix& m) {
    return arms.emergent_side(m);
  });
  add_channel_constraint(p, "trace_preservation", rho, dims);
  add_diamond_bound(p, dims, kraus_to_choi(petz).matrix, rho);

  EmergentResult r;
  r.solution = solve(p, opt);
  r.status = r.solution.status;
  if (r.feasible()) {
    r.epsilon = r.solution.scalar("epsilon");
    r.emergent = ConditionalState(dims, Form::kChoi, r.solution.block("rho_DC"));
  }
  return r;
}

// Find rho_{D|C} >= 0 with Tr_D rho_{D|C} = I_C satisfying the commutativity equality.
inline EmergentResult feasibility_emergent(const Scenario& sc, double t, const SolverOptions& opt = {}) {
  const ScenarioChoi arms = ScenarioChoi::of(sc, t);
  const BipartiteDims dims = arms.emergent_dims();
  SdpProblem p;
  const Variable rho = p.add_block("rho_DC", dims.total());
  p.add_constraint("commutativity", arms.micro_side(arms.rho_ba)).add(rho, [arms](const ComplexMatrix& m) {
    return arms.emergent_side(m);
  });
  add_channel_constraint(p, "trace_preservation", rho, dims);

  EmergentResult r;
  r.solution = solve(p, opt);
  r.status = r.solution.status;
  if (r.feasible()) r.emergent = ConditionalState(dims, Form::kChoi, r.solution.block("rho_DC"));
  return r;
}

struct RobustnessResult {
  double robustness = 0.0;
  double gamma = 1.0;
  std::optional<ConditionalState> emergent;
  SdpSolution solution;
};

// r_c = 1 - min gamma over sigma = gamma rho_{B|A} + (1 - gamma) phi_{B|A} admitting a compatible omega_{D|C}.
inline RobustnessResult cg_robustness(const Scenario& sc, const KrausChannel& noise, double t,
                                      const SolverOptions& opt = {}) {
  const ScenarioChoi arms = ScenarioChoi::of(sc, t);
  if (noise.dim_in() != arms.dim_a || noise.dim_out() != arms.dim_b) {
    throw Error(ErrorKind::kDimensionMismatch, "cg_robustness: noise channel has the wrong dimensions");
  }
  if (!feasibility_emergent(sc, t, opt).feasible()) {
    throw Error(ErrorKind::kBaseIncompatible, "cg_robustness: the base dynamics admits no emergent channel");
  }
  const BipartiteDims dims = arms.emergent_dims();
  const ComplexMatrix phi = kraus_to_choi(noise).matrix;
  const ComplexMatrix micro_phi = arms.micro_side(phi);
  const ComplexMatrix micro_rho = arms.micro_side(arms.rho_ba);

  SdpProblem p;
  const Variable omega = p.add_block("omega_DC", dims.total());
  const Variable gamma = p.add_scalar("gamma");
  const Variable gamma_slack = p.add_scalar("gamma_slack");
  p.add_constraint("commutativity", micro_phi)
      .add(omega, [arms](const ComplexMatrix& m) { return arms.emergent_side(m); })
      .add(gamma, ComplexMatrix(micro_phi - micro_rho));
  add_channel_constraint(p, "trace_preservation", omega, dims);
  p.add_scalar_constraint("gamma_bound", 1.0).add(gamma, 1.0).add(gamma_slack, 1.0);
  p.set_objective(gamma, 1.0);

  RobustnessResult r;
  r.solution = solve(p, opt);
  require_status(r.solution, "cg_robustness");
  r.gamma = std::clamp(r.solution.scalar("gamma"), 0.0, 1.0);
  r.robustness = 1.0 - r.gamma;
  r.emergent = ConditionalState(dims, Form::kChoi, r.solution.block("omega_DC"));
  return r;
}

struct CompatibilizeResult {
  SdpStatus status = SdpStatus::kNumericalFailure;
  std::optional<ConditionalState> psi;
  std::optional<ConditionalState> theta;
  SdpSolution solution;

  bool feasible() const { return status == SdpStatus::kOptimal; }
};

// Find CPTP psi_{B|A}, theta_{D|C} with theta * rho_{C|A} = rho_{D|B} * (gamma rho_{B|A} + (1 - gamma) psi_{B|A}).
inline CompatibilizeResult compatibilize(const Scenario& sc, double t, double gamma, const SolverOptions& opt = {}) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw Error(ErrorKind::kOutOfRange, "compatibilize: gamma must lie in [0, 1]");
  const ScenarioChoi arms = ScenarioChoi::of(sc, t);
  const BipartiteDims micro{arms.dim_a, arms.dim_b};
  const BipartiteDims coarse = arms.emergent_dims();

  SdpProblem p;
  const Variable psi = p.add_block("psi_BA", micro.total());
  const Variable theta = p.add_block("theta_DC", coarse.total());
  const double w = 1.0 - gamma;
  p.add_constraint("commutativity", gamma * arms.micro_side(arms.rho_ba))
      .add(theta, [arms](const ComplexMatrix& m) { return arms.emergent_side(m); })
      .add(psi, [arms, w](const ComplexMatrix& m) { return ComplexMatrix(-w * arms.micro_side(m)); });
  add_channel_constraint(p, "psi_trace_preservation", psi, micro);
  add_channel_constraint(p, "theta_trace_preservation", theta, coarse);

  CompatibilizeResult r;
  r.solution = solve(p, opt);
  r.status = r.solution.status;
  if (r.feasible()) {
    r.psi = ConditionalState(micro, Form::kChoi, r.solution.block("psi_BA"));
    r.theta = ConditionalState(coarse, Form::kChoi, r.solution.block("theta_DC"));
  }
  return r;
}

struct GammaThreshold {
  double gamma = 0.0;
  int probes = 0;
  std::vector<std::pair<double, SdpStatus>> trace;
};

// Largest gamma (within tol, from below) for which compatibilize is feasible, by bisection.
inline GammaThreshold gamma_threshold(const Scenario& sc, double t, double tol = 1e-3, const SolverOptions& opt = {}) {
  GammaThreshold out;
  auto feasible = [&](double g) {
    const CompatibilizeResult r = compatibilize(sc, t, g, opt);
    out.trace.emplace_back(g, r.status);
    ++out.probes;
    if (r.status != SdpStatus::kOptimal && r.status != SdpStatus::kInfeasible) {
      throw Error(ErrorKind::kSolverFailure, "gamma_threshold: solver returned " + std::string(to_string(r.status)) +
                                                 " at gamma = " + std::to_string(g));
    }
    return r.feasible();
  };
  if (!feasible(0.0)) throw Error(ErrorKind::kSolverFailure, "gamma_threshold: infeasible at gamma = 0");
  if (feasible(1.0)) {
    out.gamma = 1.0;
    return out;
  }
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? lo : hi) = mid;
  }
  out.gamma = lo;
  return out;
}

// Single-program threshold: max gamma over psi' = (1 - gamma) psi with Tr_B psi' = (1 - gamma) I_A.
inline double max_compatible_gamma(const Scenario& sc, double t, const SolverOptions& opt = {}) {
  const ScenarioChoi arms = ScenarioChoi::of(sc, t);
  const BipartiteDims micro{arms.dim_a, arms.dim_b};
  const BipartiteDims coarse = arms.emergent_dims();
  SdpProblem p;
  const Variable psi = p.add_block("psi_scaled", micro.total());
  const Variable theta = p.add_block("theta_DC", coarse.total());
  const Variable gamma = p.add_scalar("gamma");
  p.add_constraint("commutativity", ComplexMatrix::Zero(static_cast<Eigen::Index>(arms.dim_a * arms.dim_d),
                                                        static_cast<Eigen::Index>(arms.dim_a * arms.dim_d)))
      .add(theta, [arms](const ComplexMatrix& m) { return arms.emergent_side(m); })
      .add(psi, [arms](const ComplexMatrix& m) { return ComplexMatrix(-arms.micro_side(m)); })
      .add(gamma, ComplexMatrix(-arms.micro_side(arms.rho_ba)));
  p.add_constraint("psi_trace", identity(micro.dim_a))
      .add(psi, [micro](const ComplexMatrix& m) { return partial_trace(m, micro, Subsystem::kA); })
      .add(gamma, identity(micro.dim_a));
  add_channel_constraint(p, "theta_trace_preservation", theta, coarse);
  p.set_objective(gamma, -1.0);
  const SdpSolution sol = solve(p, opt);
  require_status(sol, "max_compatible_gamma");
  return sol.scalar("gamma");
}

}  // namespace qcg::sdp
