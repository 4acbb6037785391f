#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "rspsim/qcore.hpp"

namespace rsp {

// Interferometer preparation angles in degrees, normalized into [0, 360).
// alpha sets the amplitude split between the spatial modes, phi the relative
// phase; together they select the state the protocol prepares on the atom.
class PhaseSetting {
 public:
  PhaseSetting(double alpha_deg, double phi_deg);

  double alpha_deg() const { return alpha_deg_; }
  double phi_deg() const { return phi_deg_; }
  double alpha_rad() const;
  double phi_rad() const;

 private:
  double alpha_deg_;
  double phi_deg_;
};

enum class BellOutcome { PsiPlus, PsiMinus, PhiPlus, PhiMinus };

inline constexpr std::array<BellOutcome, 4> kBellOutcomes = {
    BellOutcome::PsiPlus, BellOutcome::PsiMinus, BellOutcome::PhiPlus,
    BellOutcome::PhiMinus};

// Avalanche photodiode label attached to each Bell outcome: APD1 and APD2
// sit in the +-45 degree analysis port (Psi+ and Psi-), APD3 and APD4 in the
// other port (Phi+ and Phi-). The assignment is a fixed wiring convention
// recorded in all output metadata.
int detector_id(BellOutcome outcome);
std::string_view outcome_name(BellOutcome outcome);
BellOutcome outcome_from_name(std::string_view name);

// Fixes the circular polarization decomposition sigma_pm =
// (|H> pm i s |V>)/sqrt(2). Flipping the sign permutes which Bell outcome
// heralds which prepared state; the outcome map below is derived from the
// active convention rather than assumed.
struct BasisConvention {
  int circular_sign = +1;

  void validate() const;
  std::string description() const;
};

// One Bell-measurement branch: its probability and, when the probability is
// above kProbFloor, the normalized post-measurement atomic state. Branches
// with vanishing probability carry no state rather than a renormalized
// artifact of roundoff.
struct ConditionalState {
  BellOutcome outcome;
  double probability = 0.0;
  std::optional<DensityOperator> atom_state;
};

// Maximally entangled atom-photon state (atom z basis x photon H/V basis,
// dim 4): (|down>|sigma+> + |up>|sigma->)/sqrt(2) expanded under the active
// circular convention.
StateVector entangled_atom_photon(const BasisConvention& conv = {});

// Photonic spatial-mode qubit e^{i phi} cos(alpha/2)|a> + sin(alpha/2)|b>.
StateVector spatial_encoding(const PhaseSetting& setting);

// Combined atom x polarization x spatial state, dim 8.
DensityOperator joint_state(const DensityOperator& atom_pol, const StateVector& spatial);
DensityOperator joint_state(const DensityOperator& atom_pol, const DensityOperator& spatial);

// The four Bell states of the polarization x spatial photon space, indexed
// like kBellOutcomes: Psi_pm = (|V a> pm |H b>)/sqrt(2), Phi_pm =
// (|H a> pm |V b>)/sqrt(2).
StateVector bell_state(BellOutcome outcome);

// Rank-1 projectors onto the four Bell states, same index order; they are
// pairwise orthogonal and sum to the identity (complete analysis).
std::array<Operator, 4> bell_projectors();

// Projects the photon part of an 8-dimensional joint state onto each Bell
// state: probability p_k = Tr[(I x Pi_k) rho] and the normalized conditional
// atomic state for every branch with p_k above kProbFloor.
std::array<ConditionalState, 4> measure_bell(const DensityOperator& joint);

// The state the protocol aims to leave on the atom for a given setting. Its
// Bloch vector is (cos a, sin a cos phi, -sin a sin phi); equivalently the
// x-basis amplitudes are (e^{i(phi+90deg)} cos(a/2), sin(a/2)).
StateVector target_state(const PhaseSetting& setting);

// The four ideal conditional atomic states, indexed k = 1..4; k = 1 is
// target_state, and k = 2, 3, 4 are its images under sigma_x, sigma_y,
// sigma_z (up to global phase).
StateVector target_family(const PhaseSetting& setting, int k);

// Which family index each Bell outcome heralds, derived by brute force once
// per convention: the ideal conditional state is matched against the family
// across a grid of generic settings. An ambiguous or missing match signals a
// convention bug and throws.
std::array<int, 4> outcome_map(const BasisConvention& conv = {});

// The unitary (I, sigma_x, sigma_y, or sigma_z) that maps the conditional
// state heralded by this outcome onto target_state, up to global phase.
Operator pauli_correction(BellOutcome outcome, const BasisConvention& conv = {});

}  // namespace rsp
