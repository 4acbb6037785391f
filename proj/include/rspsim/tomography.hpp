#pragma once

#include <array>
#include <cstdint>
#include <random>

#include "rspsim/qcore.hpp"

namespace rsp {

// Measurement basis of the atomic qubit. The "up" projector of each basis is
// onto |up_z>, |up_x> = (|up_z> + |down_z>)/sqrt(2), or |up_y> =
// (|up_z> + i |down_z>)/sqrt(2) respectively.
enum class MeasBasis { X, Y, Z };

inline constexpr std::array<MeasBasis, 3> kMeasBases = {MeasBasis::X, MeasBasis::Y,
                                                        MeasBasis::Z};

StateVector basis_up_state(MeasBasis basis);
char basis_letter(MeasBasis basis);
MeasBasis basis_from_letter(char letter);

// Probability of projecting rho onto the basis "up" state.
double up_probability(const DensityOperator& rho, MeasBasis basis);

struct CountRecord {
  MeasBasis basis = MeasBasis::X;
  std::int64_t n_up = 0;
  std::int64_t n_total = 0;
};

struct TomographyResult {
  DensityOperator rho;
  double fidelity = 0.0;
  double fidelity_err = 0.0;
  std::array<CountRecord, 3> records;  // x, y, z order
};

// Draws n_up binomially with success probability Tr(Pi_up rho); deterministic
// given the stream state.
CountRecord simulate_counts(const DensityOperator& rho, MeasBasis basis, std::int64_t n,
                            std::mt19937_64& rng);

// Linear inversion rho = (I + sum_i s_i sigma_i)/2 from the three basis
// rates. When finite statistics push the raw estimate outside the physical
// set, eigenvalues are clamped to zero and the trace renormalized (the
// closest physical state under that projection).
DensityOperator reconstruct_rates(double p_x, double p_y, double p_z);

// Same inversion from counts; records must cover each basis exactly once in
// any order.
DensityOperator reconstruct(const std::array<CountRecord, 3>& records);

// Reconstruction plus fidelity against a pure target, with a parametric
// bootstrap error bar: each replicate redraws every n_up binomially at the
// observed rate, reconstructs, and re-evaluates the fidelity; fidelity_err is
// the standard deviation over replicates.
TomographyResult analyze(const std::array<CountRecord, 3>& records, const StateVector& target,
                         int bootstrap_B, std::mt19937_64& rng);

}  // namespace rsp
