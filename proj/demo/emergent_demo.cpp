// Builds the Petz emergent channel for each scenario, checks it against the
// analytic channel on a condition-satisfying state, and asks the SDP layer
// whether an exact state-independent emergent channel exists.
#include "qcg/qcg.hpp"

#include <iomanip>
#include <iostream>

int main() {
  using namespace qcg;
  const double t = 1.0;
  const Generator gen = Generator::make(maximally_mixed_state(), "MM");
  Rng rng = rng_for(2024);

  for (int id = 1; id <= 4; ++id) {
    const Scenario sc = Scenario::make(id);
    const KrausChannel gamma = petz_emergent(sc.unitary(t), sc.cg(), gen);
    const ComplexMatrix rho = random_density(4, rng);
    const LabSpace lab = rho_to_bloch(rho);
    const auto feasible = sdp::feasibility_emergent(sc, t);

    std::cout << std::setprecision(4) << "scenario " << id << " (" << sc.name() << ")\n"
              << "  Petz residual on a random state   " << commutation_residual(gamma, sc, t, rho) << '\n'
              << "  analytic condition residual       " << condition_residual(sc, lab) << '\n'
              << "  state-independent emergent SDP    " << sdp::to_string(feasible.status) << '\n';
  }

  const double d = sdp::diamond_distance(KrausChannel::identity_channel(2), depolarizing_channel(2, 0.4));
  std::cout << "diamond distance id vs depolarizing(0.4): " << d << '\n';
}
