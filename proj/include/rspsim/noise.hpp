#pragma once

#include "rspsim/qcore.hpp"

namespace rsp {

// Imperfection budget of a protocol run. Times are in microseconds.
struct NoiseParams {
  // Overlap of the atom-photon pair with the intended maximally entangled
  // state; 0.25 is the maximally mixed floor.
  double entanglement_fidelity = 0.87;
  // Combined interferometer / Bell-state analyzer contrast applied to the
  // spatial-mode coherences before the Bell measurement.
  double bsa_visibility = 0.96;
  // Gaussian coherence decay constant of the stored atomic qubit.
  double dephasing_tau = 10.0;
  // Depolarization applied at readout; absorbs state-detection errors.
  double readout_depolarization = 0.0;
  // Delay between preparation and readout, fed through the dephasing channel.
  double readout_delay = 0.0;

  void validate() const;
};

// Isotropic mixture p |bell><bell| + (1-p) I/4 with p chosen so the overlap
// with |bell> equals target_fidelity. The input must be maximally entangled
// (both reduced states I/2).
DensityOperator werner_mix(const StateVector& bell, double target_fidelity);

// Scales the spatial-mode coherences by V, leaving populations unchanged.
DensityOperator apply_visibility(const StateVector& spatial, double V);
DensityOperator apply_visibility(const DensityOperator& spatial, double V);

// Multiplies the z-basis coherences by exp(-(t/tau)^2).
DensityOperator dephase_atom(const DensityOperator& rho, double t, double tau);

// (1-d) rho + d I/2.
DensityOperator depolarize(const DensityOperator& rho, double d);

}  // namespace rsp
