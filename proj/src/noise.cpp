#include "rspsim/noise.hpp"

#include <cmath>
#include <stdexcept>

namespace rsp {

namespace {

void require_range(double v, double lo, double hi, const char* what) {
  if (!(v >= lo && v <= hi)) {
    throw std::invalid_argument(std::string(what) + " out of range");
  }
}

// Both single-qubit reductions of a maximally entangled pure state are I/2.
bool is_maximally_entangled(const StateVector& bell) {
  const Vec& v = bell.amps();
  Mat first = Mat::Zero(2, 2);
  Mat second = Mat::Zero(2, 2);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      for (int k = 0; k < 2; ++k) {
        first(i, j) += v(2 * i + k) * std::conj(v(2 * j + k));
        second(i, j) += v(2 * k + i) * std::conj(v(2 * k + j));
      }
    }
  }
  const Mat half = 0.5 * Mat::Identity(2, 2);
  return (first - half).cwiseAbs().maxCoeff() <= 1e-6 &&
         (second - half).cwiseAbs().maxCoeff() <= 1e-6;
}

}  // namespace

void NoiseParams::validate() const {
  require_range(entanglement_fidelity, 0.25, 1.0, "entanglement_fidelity");
  require_range(bsa_visibility, 0.0, 1.0, "bsa_visibility");
  require_range(readout_depolarization, 0.0, 1.0, "readout_depolarization");
  if (!(dephasing_tau > 0.0) || !std::isfinite(dephasing_tau)) {
    throw std::invalid_argument("dephasing_tau must be positive");
  }
  if (!(readout_delay >= 0.0) || !std::isfinite(readout_delay)) {
    throw std::invalid_argument("readout_delay must be nonnegative");
  }
}

DensityOperator werner_mix(const StateVector& bell, double target_fidelity) {
  if (bell.dim() != 4) {
    throw std::invalid_argument("werner_mix: expected dim 4");
  }
  require_range(target_fidelity, 0.25, 1.0, "werner_mix: target_fidelity");
  if (!is_maximally_entangled(bell)) {
    throw std::invalid_argument("werner_mix: input is not maximally entangled");
  }
  // F = p + (1-p)/4 inverts to p = (4F - 1)/3.
  const double p = (4.0 * target_fidelity - 1.0) / 3.0;
  const Mat pure = bell.amps() * bell.amps().adjoint();
  return DensityOperator(p * pure + (1.0 - p) * 0.25 * Mat::Identity(4, 4));
}

DensityOperator apply_visibility(const StateVector& spatial, double V) {
  return apply_visibility(density_of(spatial), V);
}

DensityOperator apply_visibility(const DensityOperator& spatial, double V) {
  if (spatial.dim() != 2) {
    throw std::invalid_argument("apply_visibility: expected dim 2");
  }
  require_range(V, 0.0, 1.0, "apply_visibility: V");
  Mat m = spatial.entries();
  m(0, 1) *= V;
  m(1, 0) *= V;
  return DensityOperator(std::move(m));
}

DensityOperator dephase_atom(const DensityOperator& rho, double t, double tau) {
  if (rho.dim() != 2) {
    throw std::invalid_argument("dephase_atom: expected dim 2");
  }
  if (!(tau > 0.0)) {
    throw std::invalid_argument("dephase_atom: tau must be positive");
  }
  if (!(t >= 0.0)) {
    throw std::invalid_argument("dephase_atom: t must be nonnegative");
  }
  const double ratio = t / tau;
  const double envelope = std::exp(-ratio * ratio);
  Mat m = rho.entries();
  m(0, 1) *= envelope;
  m(1, 0) *= envelope;
  return DensityOperator(std::move(m));
}

DensityOperator depolarize(const DensityOperator& rho, double d) {
  if (rho.dim() != 2) {
    throw std::invalid_argument("depolarize: expected dim 2");
  }
  require_range(d, 0.0, 1.0, "depolarize: d");
  return DensityOperator((1.0 - d) * rho.entries() + d * 0.5 * Mat::Identity(2, 2));
}

}  // namespace rsp
