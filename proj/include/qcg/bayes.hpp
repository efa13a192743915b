#pragma once

#include "qcg/channels.hpp"

#include <string>
#include <vector>

namespace qcg {

struct Generator {
  ComplexMatrix rho;
  std::string label;

  static Generator make(ComplexMatrix rho, std::string label) {
    require_density(rho, "Generator");
    return {hermitian_part(rho), std::move(label)};
  }
};

// (n_A^{1/2} (x) I_B) m_AB (n_A^{1/2} (x) I_B)
inline ComplexMatrix star_product(const ComplexMatrix& m_ab, const ComplexMatrix& n_a, BipartiteDims dims) {
  detail::require_square(m_ab, dims.total(), "star_product");
  detail::require_square(n_a, dims.dim_a, "star_product");
  const ComplexMatrix w = tensor_product(matrix_sqrt_psd(n_a), identity(dims.dim_b));
  return w * m_ab * w;
}

// sigma_{A|B} = sigma_{B|A} * (rho_A (x) pinv(rho_B)), returned with B as the conditioning factor and the
// input's form tag. Not CPTP-valid in general.
inline ConditionalState bayes_invert(const ConditionalState& cs_ba, const ComplexMatrix& rho_a,
                                     double rank_tol = kRankTolerance) {
  detail::require_square(rho_a, cs_ba.dims.dim_a, "bayes_invert");
  const ComplexMatrix rho_b = hermitian_part(apply_conditional(cs_ba, rho_a));
  if (support_rank(rho_b, rank_tol) == 0) {
    throw Error(ErrorKind::kZeroMarginal, "bayes_invert: propagated marginal has no support");
  }
  const ComplexMatrix w = tensor_product(matrix_sqrt_psd(rho_a), pinv_sqrt_psd(rho_b, rank_tol));
  const ComplexMatrix weighted = w * cs_ba.matrix * w;
  return {{cs_ba.dims.dim_b, cs_ba.dims.dim_a}, cs_ba.form, swap_factors(weighted, cs_ba.dims)};
}

// Joint operator sigma_{B|A} * rho_A on A (x) B.
inline ComplexMatrix joint_state(const ConditionalState& cs_ba, const ComplexMatrix& rho_a) {
  return star_product(cs_ba.jamiolkowski(), rho_a, cs_ba.dims);
}

struct PetzMap {
  KrausChannel channel;
  std::size_t support_dim = 0;
  std::size_t output_dim = 0;

  bool full_support() const { return support_dim == output_dim; }
};

// R(X) = rho_A^{1/2} cg^dag(rho_C^{-1/2} X rho_C^{-1/2}) rho_A^{1/2}, inverses on the support of rho_C.
inline PetzMap petz_map(const KrausChannel& cg, const ComplexMatrix& rho_a, double rank_tol = kRankTolerance) {
  require_density(rho_a, "petz_map");
  detail::require_square(rho_a, cg.dim_in(), "petz_map");
  const ComplexMatrix rho_c = hermitian_part(cg(rho_a));
  const std::size_t rank = support_rank(rho_c, rank_tol);
  if (rank == 0) throw Error(ErrorKind::kDegenerateGenerator, "petz_map: coarse-grained generator has rank 0");
  const ComplexMatrix sqrt_a = matrix_sqrt_psd(rho_a);
  const ComplexMatrix inv_sqrt_c = pinv_sqrt_psd(rho_c, rank_tol);
  std::vector<ComplexMatrix> ops;
  ops.reserve(cg.size());
  for (const auto& k : cg.operators()) ops.push_back(sqrt_a * k.adjoint() * inv_sqrt_c);
  return {KrausChannel::trace_nonincreasing(std::move(ops)), rank, cg.dim_out()};
}

// Gamma = cg o u o R_{A|C}
inline KrausChannel petz_emergent(const KrausChannel& u, const KrausChannel& cg, const Generator& gen,
                                  double rank_tol = kRankTolerance) {
  if (u.dim_in() != cg.dim_in() || u.dim_out() != cg.dim_in()) {
    throw Error(ErrorKind::kDimensionMismatch, "petz_emergent: unitary and coarse-graining dimensions differ");
  }
  return petz_map(cg, gen.rho, rank_tol).channel.then(u).then(cg);
}

using StochasticMatrix = Eigen::MatrixXd;  // entry (out, in) = P(out | in)

namespace detail {

inline void require_stochastic(const StochasticMatrix& p, const char* what) {
  if (p.size() == 0 || p.minCoeff() < -1e-12) {
    throw Error(ErrorKind::kInvalidArgument, std::string(what) + ": entries must be nonnegative");
  }
  for (Eigen::Index j = 0; j < p.cols(); ++j) {
    if (std::abs(p.col(j).sum() - 1.0) > 1e-10) {
      throw Error(ErrorKind::kInvalidArgument, std::string(what) + ": columns must sum to 1");
    }
  }
}

inline void require_distribution(const RealVector& p, const char* what) {
  if (p.size() == 0 || p.minCoeff() < -1e-12 || std::abs(p.sum() - 1.0) > 1e-10) {
    throw Error(ErrorKind::kInvalidArgument, std::string(what) + ": not a probability vector");
  }
}

// Column-stochastic Bayes inversion P(in | out) of p_out_in under prior_in.
inline StochasticMatrix classical_bayes(const StochasticMatrix& p_out_in, const RealVector& prior_in) {
  const RealVector p_out = p_out_in * prior_in;
  StochasticMatrix post(p_out_in.cols(), p_out_in.rows());
  for (Eigen::Index o = 0; o < p_out_in.rows(); ++o) {
    if (p_out(o) <= 0.0) {
      throw Error(ErrorKind::kZeroMarginal, "classical Bayes inversion: outcome " + std::to_string(o) +
                                                " has zero marginal probability");
    }
    for (Eigen::Index i = 0; i < p_out_in.cols(); ++i) post(i, o) = p_out_in(o, i) * prior_in(i) / p_out(o);
  }
  return post;
}

inline KrausChannel kraus_from_choi(const ComplexMatrix& choi, BipartiteDims dims) {
  return KrausChannel::trace_nonincreasing(kraus_operators_from_choi(choi, dims), 1e-8);
}

}  // namespace detail

// P(Y|X) = sum_{r,s} P(Y|s) P(s|r) P(r|X), with P(R|X) from Bayes' rule on prior_R.
inline StochasticMatrix classical_emergent(const StochasticMatrix& p_s_given_r, const StochasticMatrix& p_x_given_r,
                                           const StochasticMatrix& p_y_given_s, const RealVector& prior_r) {
  detail::require_stochastic(p_s_given_r, "classical_emergent P(S|R)");
  detail::require_stochastic(p_x_given_r, "classical_emergent P(X|R)");
  detail::require_stochastic(p_y_given_s, "classical_emergent P(Y|S)");
  detail::require_distribution(prior_r, "classical_emergent prior");
  if (p_s_given_r.cols() != prior_r.size() || p_x_given_r.cols() != prior_r.size() ||
      p_y_given_s.cols() != p_s_given_r.rows()) {
    throw Error(ErrorKind::kDimensionMismatch, "classical_emergent: inconsistent alphabet sizes");
  }
  return p_y_given_s * p_s_given_r * detail::classical_bayes(p_x_given_r, prior_r);
}

struct MeasurePrepare {
  std::vector<ComplexMatrix> povm;
  std::vector<ComplexMatrix> preps;
};

namespace detail {

inline void require_povm(const std::vector<ComplexMatrix>& povm, const char* op) {
  if (povm.empty()) throw Error(ErrorKind::kPovmIncomplete, std::string(op) + ": empty POVM");
  const auto d = povm.front().rows();
  ComplexMatrix sum = ComplexMatrix::Zero(d, d);
  for (const auto& e : povm) {
    detail::require_square(e, static_cast<std::size_t>(d), op);
    if (!is_hermitian(e, 1e-10) || min_eigenvalue(e) < -kPsdTolerance) {
      throw Error(ErrorKind::kPovmIncomplete, std::string(op) + ": POVM element is not PSD");
    }
    sum += e;
  }
  if ((sum - identity(static_cast<std::size_t>(d))).cwiseAbs().maxCoeff() > 1e-10) {
    throw Error(ErrorKind::kPovmIncomplete, std::string(op) + ": POVM elements do not sum to the identity");
  }
}

inline void require_preps(const std::vector<ComplexMatrix>& preps, const char* op) {
  if (preps.empty()) throw Error(ErrorKind::kInvalidPrep, std::string(op) + ": no preparations");
  for (const auto& p : preps) {
    if (p.rows() != preps.front().rows() || !is_density(p, 1e-10)) {
      throw Error(ErrorKind::kInvalidPrep, std::string(op) + ": preparation is not a density matrix");
    }
  }
}

}  // namespace detail

// varrho_{C|A} = sum_x E_x (x) rho_x, in Jamiolkowski form with A first.
inline ConditionalState measure_prepare_state(const std::vector<ComplexMatrix>& povm,
                                              const std::vector<ComplexMatrix>& preps) {
  detail::require_povm(povm, "measure_prepare_state");
  detail::require_preps(preps, "measure_prepare_state");
  if (povm.size() != preps.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "measure_prepare_state: POVM and preparation counts differ");
  }
  const BipartiteDims dims{static_cast<std::size_t>(povm.front().rows()), static_cast<std::size_t>(preps.front().rows())};
  ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(dims.total()), static_cast<Eigen::Index>(dims.total()));
  for (std::size_t x = 0; x < povm.size(); ++x) m += tensor_product(povm[x], preps[x]);
  return {dims, Form::kJamiolkowski, m};
}

// Gamma = E_{D|B} o U_{B|A} o E_{A|C}, where E_{A|C} is the Bayes inversion of E_{C|A} with prior gen.
inline KrausChannel mp_emergent(const MeasurePrepare& mp_ca, const MeasurePrepare& mp_db, const KrausChannel& u,
                                const Generator& gen, double rank_tol = kRankTolerance) {
  const ConditionalState cg_in = measure_prepare_state(mp_ca.povm, mp_ca.preps);
  const ConditionalState cg_out = measure_prepare_state(mp_db.povm, mp_db.preps);
  if (u.dim_in() != cg_in.dims.dim_a || u.dim_out() != cg_out.dims.dim_a) {
    throw Error(ErrorKind::kDimensionMismatch, "mp_emergent: unitary does not connect the two arms");
  }
  const ConditionalState inverted = bayes_invert(cg_in, gen.rho, rank_tol);
  const ConditionalState evolved = compose_via_choi(kraus_to_choi(u), inverted.as(Form::kChoi));
  const ConditionalState full = compose_via_choi(cg_out.as(Form::kChoi), evolved);
  return detail::kraus_from_choi(full.matrix, full.dims);
}

enum class Direction { kLeftToRight, kRightToLeft };

// Classical emergent channel between two measured regions. Left-to-right inverts m_xa with prior gen on A and
// u : A -> B; right-to-left inverts m_yb with prior gen on B and u : B -> A. Entry (out, in).
inline StochasticMatrix hybrid_measurement_emergent(const std::vector<ComplexMatrix>& m_xa,
                                                    const std::vector<ComplexMatrix>& m_yb, const KrausChannel& u,
                                                    const Generator& gen, Direction direction) {
  detail::require_povm(m_xa, "hybrid_measurement_emergent");
  detail::require_povm(m_yb, "hybrid_measurement_emergent");
  const auto& inverted = direction == Direction::kLeftToRight ? m_xa : m_yb;
  const auto& measured = direction == Direction::kLeftToRight ? m_yb : m_xa;
  detail::require_square(gen.rho, static_cast<std::size_t>(inverted.front().rows()), "hybrid_measurement_emergent");
  if (u.dim_in() != static_cast<std::size_t>(inverted.front().rows()) ||
      u.dim_out() != static_cast<std::size_t>(measured.front().rows())) {
    throw Error(ErrorKind::kDimensionMismatch, "hybrid_measurement_emergent: unitary dimensions do not match");
  }
  const ComplexMatrix sqrt_prior = matrix_sqrt_psd(gen.rho);
  StochasticMatrix p(static_cast<Eigen::Index>(measured.size()), static_cast<Eigen::Index>(inverted.size()));
  for (std::size_t x = 0; x < inverted.size(); ++x) {
    const double px = (inverted[x] * gen.rho).trace().real();
    if (px <= kPsdTolerance) {
      throw Error(ErrorKind::kZeroMarginal,
                  "hybrid_measurement_emergent: outcome " + std::to_string(x) + " is unreachable under the prior");
    }
    const ComplexMatrix retro = u(sqrt_prior * inverted[x] * sqrt_prior / px);
    for (std::size_t y = 0; y < measured.size(); ++y) {
      p(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(x)) = (measured[y] * retro).trace().real();
    }
  }
  return p;
}

namespace detail {

// Choi of x -> measure with the pretty-good measurement of (preps, prior), move by u, prepare out_preps.
inline ConditionalState pgm_channel_choi(const std::vector<ComplexMatrix>& preps, const RealVector& prior,
                                         const StochasticMatrix& u, const std::vector<ComplexMatrix>& out_preps) {
  const auto d = preps.front().rows();
  ComplexMatrix average = ComplexMatrix::Zero(d, d);
  for (std::size_t x = 0; x < preps.size(); ++x) average += prior(static_cast<Eigen::Index>(x)) * preps[x];
  if (support_rank(average) < static_cast<std::size_t>(d)) {
    throw Error(ErrorKind::kZeroMarginal, "preparation ensemble average is singular");
  }
  const ComplexMatrix inv_sqrt = pinv_sqrt_psd(average);
  const BipartiteDims dims{static_cast<std::size_t>(d), static_cast<std::size_t>(out_preps.front().rows())};
  ComplexMatrix choi = ComplexMatrix::Zero(static_cast<Eigen::Index>(dims.total()), static_cast<Eigen::Index>(dims.total()));
  for (std::size_t x = 0; x < preps.size(); ++x) {
    const ComplexMatrix m = prior(static_cast<Eigen::Index>(x)) * inv_sqrt * preps[x] * inv_sqrt;
    for (std::size_t y = 0; y < out_preps.size(); ++y) {
      const double w = u(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(x));
      if (w != 0.0) choi += w * tensor_product(m.transpose(), out_preps[y]);
    }
  }
  return {dims, Form::kChoi, hermitian_part(choi)};
}

}  // namespace detail

// Quantum emergent channel between two prepared regions over a classical stochastic core u_YX.
// Left-to-right acts A -> B; right-to-left acts B -> A using the Bayes inverse of u_YX.
inline KrausChannel hybrid_preparation_emergent(const std::vector<ComplexMatrix>& prep_ax,
                                                const std::vector<ComplexMatrix>& prep_by, const StochasticMatrix& u_yx,
                                                const RealVector& prior_x, Direction direction) {
  detail::require_preps(prep_ax, "hybrid_preparation_emergent");
  detail::require_preps(prep_by, "hybrid_preparation_emergent");
  detail::require_stochastic(u_yx, "hybrid_preparation_emergent");
  detail::require_distribution(prior_x, "hybrid_preparation_emergent");
  if (u_yx.cols() != static_cast<Eigen::Index>(prep_ax.size()) ||
      u_yx.rows() != static_cast<Eigen::Index>(prep_by.size()) || prior_x.size() != u_yx.cols()) {
    throw Error(ErrorKind::kDimensionMismatch, "hybrid_preparation_emergent: alphabet sizes do not match");
  }
  ConditionalState choi;
  if (direction == Direction::kLeftToRight) {
    choi = detail::pgm_channel_choi(prep_ax, prior_x, u_yx, prep_by);
  } else {
    const RealVector prior_y = u_yx * prior_x;
    const StochasticMatrix u_xy = detail::classical_bayes(u_yx, prior_x);
    choi = detail::pgm_channel_choi(prep_by, prior_y, u_xy, prep_ax);
  }
  return choi_to_kraus(choi, 1e-8);
}

}  // namespace qcg
