#pragma once

#include "qcg/channels.hpp"

#include <cstdint>
#include <random>

namespace qcg {

using Rng = std::mt19937_64;

// Independent, reproducible stream for item `index` of stream family `stream` under a user seed.
inline Rng rng_for(std::uint64_t seed, std::uint64_t stream = 0, std::uint64_t index = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

inline ComplexMatrix ginibre(std::size_t rows, std::size_t cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix g(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < g.rows(); ++i)
    for (Eigen::Index j = 0; j < g.cols(); ++j) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = Complex(re, im);
    }
  return g;
}

// Hilbert-Schmidt measure: rho = G G^dag / Tr(G G^dag) with square Ginibre G.
inline ComplexMatrix random_density(std::size_t dim, Rng& rng) {
  const ComplexMatrix g = ginibre(dim, dim, rng);
  ComplexMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return hermitian_part(rho);
}

inline ComplexMatrix random_pure_state(std::size_t dim, Rng& rng) {
  ComplexVector v = ginibre(dim, 1, rng).col(0);
  v.normalize();
  return projector(v);
}

// Haar measure via QR of a Ginibre matrix with the phase of R's diagonal fixed.
inline ComplexMatrix random_unitary(std::size_t dim, Rng& rng) {
  const ComplexMatrix g = ginibre(dim, dim, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    const Complex d = r(j, j);
    const double mag = std::abs(d);
    if (mag > 0.0) q.col(j) *= d / mag;
  }
  return q;
}

inline ComplexMatrix random_hermitian(std::size_t dim, Rng& rng) {
  const ComplexMatrix g = ginibre(dim, dim, rng);
  return 0.5 * (g + g.adjoint());
}

// Random channel from a Haar isometry dim_in -> dim_out * kraus_count.
inline KrausChannel random_channel(std::size_t dim_in, std::size_t dim_out, std::size_t kraus_count, Rng& rng) {
  const std::size_t big = dim_out * kraus_count;
  if (big < dim_in) throw Error(ErrorKind::kInvalidArgument, "random_channel: too few Kraus operators");
  const ComplexMatrix u = random_unitary(big, rng);
  const ComplexMatrix v = u.topLeftCorner(static_cast<Eigen::Index>(big), static_cast<Eigen::Index>(dim_in));
  std::vector<ComplexMatrix> ops;
  for (std::size_t k = 0; k < kraus_count; ++k) {
    ops.push_back(v.middleRows(static_cast<Eigen::Index>(k * dim_out), static_cast<Eigen::Index>(dim_out)));
  }
  return KrausChannel::from_operators(std::move(ops));
}

}  // namespace qcg
