#include "rspsim/tomography.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

#include "rspsim/rng.hpp"

namespace rsp {

namespace {

int basis_index(MeasBasis basis) { return static_cast<int>(basis); }

std::array<double, 3> rates_from_records(const std::array<CountRecord, 3>& records) {
  std::array<bool, 3> seen = {false, false, false};
  std::array<double, 3> rates = {0.0, 0.0, 0.0};
  for (const CountRecord& rec : records) {
    if (rec.n_total <= 0 || rec.n_up < 0 || rec.n_up > rec.n_total) {
      throw std::invalid_argument("reconstruct: malformed count record");
    }
    const int i = basis_index(rec.basis);
    if (seen[i]) {
      throw std::invalid_argument("reconstruct: duplicate basis");
    }
    seen[i] = true;
    rates[i] = static_cast<double>(rec.n_up) / static_cast<double>(rec.n_total);
  }
  for (const bool s : seen) {
    if (!s) throw std::invalid_argument("reconstruct: missing basis");
  }
  return rates;
}

}  // namespace

StateVector basis_up_state(MeasBasis basis) {
  const double r = std::numbers::sqrt2 / 2.0;
  Vec amps(2);
  switch (basis) {
    case MeasBasis::X: amps << cxd(r, 0.0), cxd(r, 0.0); break;
    case MeasBasis::Y: amps << cxd(r, 0.0), cxd(0.0, r); break;
    case MeasBasis::Z: amps << cxd(1.0, 0.0), cxd(0.0, 0.0); break;
  }
  return StateVector(std::move(amps), "atom");
}

char basis_letter(MeasBasis basis) {
  switch (basis) {
    case MeasBasis::X: return 'x';
    case MeasBasis::Y: return 'y';
    case MeasBasis::Z: return 'z';
  }
  throw std::invalid_argument("basis_letter: unknown basis");
}

MeasBasis basis_from_letter(char letter) {
  switch (letter) {
    case 'x': case 'X': return MeasBasis::X;
    case 'y': case 'Y': return MeasBasis::Y;
    case 'z': case 'Z': return MeasBasis::Z;
    default: throw std::invalid_argument("basis_from_letter: unknown basis");
  }
}

double up_probability(const DensityOperator& rho, MeasBasis basis) {
  return fidelity_pure(basis_up_state(basis), rho);
}

CountRecord simulate_counts(const DensityOperator& rho, MeasBasis basis, std::int64_t n,
                            std::mt19937_64& rng) {
  if (n <= 0) {
    throw std::invalid_argument("simulate_counts: n must be positive");
  }
  CountRecord rec;
  rec.basis = basis;
  rec.n_total = n;
  rec.n_up = binomial_draw(rng, n, up_probability(rho, basis));
  return rec;
}

DensityOperator reconstruct_rates(double p_x, double p_y, double p_z) {
  for (const double p : {p_x, p_y, p_z}) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::invalid_argument("reconstruct_rates: rate outside [0, 1]");
    }
  }
  const double sx = 2.0 * p_x - 1.0;
  const double sy = 2.0 * p_y - 1.0;
  const double sz = 2.0 * p_z - 1.0;
  Mat raw(2, 2);
  raw(0, 0) = cxd(0.5 * (1.0 + sz), 0.0);
  raw(1, 1) = cxd(0.5 * (1.0 - sz), 0.0);
  raw(0, 1) = cxd(0.5 * sx, -0.5 * sy);
  raw(1, 0) = std::conj(raw(0, 1));

  const Eig2 eig = eig2(Operator(raw, Operator::Flag::Hermitian));
  if (eig.values[1] >= 0.0) {
    return DensityOperator(std::move(raw));
  }
  double big = std::max(eig.values[0], 0.0);
  double small = std::max(eig.values[1], 0.0);
  const double total = big + small;
  if (total <= 0.0) {
    // Unreachable for rates in [0, 1]: the raw trace is always 1 and at most
    // one eigenvalue can be negative.
    throw std::logic_error("reconstruct_rates: degenerate clamp");
  }
  big /= total;
  small /= total;
  Mat proj = big * (eig.vectors[0] * eig.vectors[0].adjoint()) +
             small * (eig.vectors[1] * eig.vectors[1].adjoint());
  return DensityOperator(std::move(proj));
}

DensityOperator reconstruct(const std::array<CountRecord, 3>& records) {
  const std::array<double, 3> rates = rates_from_records(records);
  return reconstruct_rates(rates[0], rates[1], rates[2]);
}

TomographyResult analyze(const std::array<CountRecord, 3>& records, const StateVector& target,
                         int bootstrap_B, std::mt19937_64& rng) {
  if (bootstrap_B < 100) {
    throw std::invalid_argument("analyze: bootstrap_B must be at least 100");
  }
  const std::array<double, 3> rates = rates_from_records(records);
  std::array<CountRecord, 3> ordered;
  std::array<std::int64_t, 3> totals = {0, 0, 0};
  for (const CountRecord& rec : records) {
    ordered[basis_index(rec.basis)] = rec;
    totals[basis_index(rec.basis)] = rec.n_total;
  }

  TomographyResult result{reconstruct_rates(rates[0], rates[1], rates[2]), 0.0, 0.0, ordered};
  result.fidelity = fidelity_pure(target, result.rho);

  double sum = 0.0;
  double sum_sq = 0.0;
  for (int b = 0; b < bootstrap_B; ++b) {
    std::array<double, 3> resampled;
    for (int i = 0; i < 3; ++i) {
      resampled[i] = static_cast<double>(binomial_draw(rng, totals[i], rates[i])) /
                     static_cast<double>(totals[i]);
    }
    const double f =
        fidelity_pure(target, reconstruct_rates(resampled[0], resampled[1], resampled[2]));
    sum += f;
    sum_sq += f * f;
  }
  const double n = static_cast<double>(bootstrap_B);
  const double var = std::max(0.0, (sum_sq - sum * sum / n) / (n - 1.0));
  result.fidelity_err = std::sqrt(var);
  return result;
}

}  // namespace rsp
