#include "rspsim/experiment.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <thread>
#include <utility>

#include "rspsim/rng.hpp"

namespace rsp {

namespace {

int outcome_index(BellOutcome outcome) { return static_cast<int>(outcome); }

std::mt19937_64 counts_stream(const SweepSpec& spec, const PhaseSetting& setting,
                              BellOutcome outcome, MeasBasis basis) {
  return StreamKey(spec.master_seed)
      .absorb("counts")
      .absorb(spec.set_id)
      .absorb(setting.alpha_deg())
      .absorb(setting.phi_deg())
      .absorb(outcome_index(outcome))
      .absorb(static_cast<int>(basis))
      .stream();
}

std::mt19937_64 bootstrap_stream(const SweepSpec& spec, const PhaseSetting& setting,
                                 BellOutcome outcome) {
  return StreamKey(spec.master_seed)
      .absorb("bootstrap")
      .absorb(spec.set_id)
      .absorb(setting.alpha_deg())
      .absorb(setting.phi_deg())
      .absorb(outcome_index(outcome))
      .stream();
}

DensityOperator corrected_readout_state(const ConditionalState& branch,
                                        const NoiseParams& noise) {
  if (!branch.atom_state) {
    throw std::runtime_error("run_point: Bell branch with vanishing probability");
  }
  const Mat u = pauli_correction(branch.outcome).entries();
  DensityOperator rho(u * branch.atom_state->entries() * u.adjoint());
  rho = dephase_atom(rho, noise.readout_delay, noise.dephasing_tau);
  return depolarize(rho, noise.readout_depolarization);
}

std::array<ConditionalState, 4> noisy_branches(const PhaseSetting& setting,
                                               const NoiseParams& noise) {
  const DensityOperator pair = werner_mix(entangled_atom_photon(), noise.entanglement_fidelity);
  const DensityOperator spatial = apply_visibility(spatial_encoding(setting), noise.bsa_visibility);
  return measure_bell(joint_state(pair, spatial));
}

// Greedy clustering is enough at this tolerance: genuinely distinct grid
// states are separated by far more than 1e-6 on the Bloch sphere.
bool is_new_state(const std::vector<BlochVector>& reps, const BlochVector& b, double tol) {
  for (const BlochVector& r : reps) {
    const double dx = r.x - b.x;
    const double dy = r.y - b.y;
    const double dz = r.z - b.z;
    if (std::sqrt(dx * dx + dy * dy + dz * dz) <= tol) return false;
  }
  return true;
}

}  // namespace

void SweepSpec::validate() const {
  if (points.empty()) {
    throw std::invalid_argument("SweepSpec: at least one point required");
  }
  if (events_per_point_per_basis < 1) {
    throw std::invalid_argument("SweepSpec: events_per_point_per_basis must be >= 1");
  }
  if (bootstrap_B < 100) {
    throw std::invalid_argument("SweepSpec: bootstrap_B must be at least 100");
  }
  if (threads < 0) {
    throw std::invalid_argument("SweepSpec: threads must be nonnegative");
  }
  noise.validate();
}

std::vector<CurvePoint> analytic_curves(double alpha_deg, const std::vector<double>& phis_deg) {
  std::vector<CurvePoint> out;
  out.reserve(phis_deg.size() * 4);
  for (const double phi : phis_deg) {
    const PhaseSetting setting(alpha_deg, phi);
    for (const BellOutcome o : kBellOutcomes) {
      const int k = outcome_map()[outcome_index(o)];
      const DensityOperator heralded = density_of(target_family(setting, k));
      CurvePoint cp;
      cp.phi_deg = setting.phi_deg();
      cp.outcome = o;
      cp.p_up_z = up_probability(heralded, MeasBasis::Z);
      cp.p_down_x = 1.0 - up_probability(heralded, MeasBasis::X);
      cp.p_up_y = up_probability(heralded, MeasBasis::Y);
      out.push_back(cp);
    }
  }
  return out;
}

PointResult run_point(const PhaseSetting& setting, const SweepSpec& spec) {
  spec.validate();
  const StateVector target = target_state(setting);
  const std::array<ConditionalState, 4> branches = noisy_branches(setting, spec.noise);

  auto cell = [&](BellOutcome o) {
    const DensityOperator readout = corrected_readout_state(branches[outcome_index(o)], spec.noise);
    std::array<CountRecord, 3> records;
    for (const MeasBasis basis : kMeasBases) {
      std::mt19937_64 rng = counts_stream(spec, setting, o, basis);
      records[static_cast<int>(basis)] =
          simulate_counts(readout, basis, spec.events_per_point_per_basis, rng);
    }
    std::mt19937_64 boot = bootstrap_stream(spec, setting, o);
    return OutcomeResult{o, analyze(records, target, spec.bootstrap_B, boot), target};
  };

  return PointResult{setting,
                     {cell(kBellOutcomes[0]), cell(kBellOutcomes[1]), cell(kBellOutcomes[2]),
                      cell(kBellOutcomes[3])}};
}

SweepSummary run_sweep(const SweepSpec& spec) {
  spec.validate();
  const int n_points = static_cast<int>(spec.points.size());
  std::vector<std::optional<PointResult>> slots(n_points);

  unsigned int n_threads = spec.threads > 0
                               ? static_cast<unsigned int>(spec.threads)
                               : std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min<unsigned int>(n_threads, static_cast<unsigned int>(n_points));

  if (n_threads <= 1) {
    for (int i = 0; i < n_points; ++i) {
      slots[i] = run_point(spec.points[i], spec);
    }
  } else {
    // Cells are keyed by content, not schedule, so any work distribution
    // yields the same results; merging by index keeps output order fixed.
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned int t = 0; t < n_threads; ++t) {
      pool.emplace_back([&] {
        for (int i = next.fetch_add(1); i < n_points; i = next.fetch_add(1)) {
          slots[i] = run_point(spec.points[i], spec);
        }
      });
    }
    for (std::thread& th : pool) th.join();
  }

  SweepSummary summary;
  summary.per_point.reserve(n_points);
  for (std::optional<PointResult>& slot : slots) {
    summary.per_point.push_back(std::move(*slot));
  }
  double sum = 0.0;
  double err_sq = 0.0;
  int cells = 0;
  for (const PointResult& pr : summary.per_point) {
    for (const OutcomeResult& oc : pr.per_outcome) {
      sum += oc.tomo.fidelity;
      err_sq += oc.tomo.fidelity_err * oc.tomo.fidelity_err;
      ++cells;
    }
  }
  summary.mean_fidelity = sum / cells;
  summary.mean_fidelity_err = std::sqrt(err_sq) / cells;
  return summary;
}

double analytic_prepared_fidelity(const PhaseSetting& setting, const NoiseParams& noise) {
  noise.validate();
  const double p = (4.0 * noise.entanglement_fidelity - 1.0) / 3.0;
  const double v = noise.bsa_visibility;
  const double d = noise.readout_depolarization;
  const double ratio = noise.readout_delay / noise.dephasing_tau;
  const double f = std::exp(-ratio * ratio);
  const double ca = std::cos(setting.alpha_rad());
  const double sa = std::sin(setting.alpha_rad());
  const double cp = std::cos(setting.phi_rad());
  const double sp = std::sin(setting.phi_rad());
  // Bloch overlap of the corrected readout state with the target: the Werner
  // weight scales everything, visibility spares the x component (the target
  // family's x component survives spatial decoherence), dephasing spares z.
  const double overlap = f * ca * ca + v * f * sa * sa * cp * cp + v * sa * sa * sp * sp;
  return 0.5 + 0.5 * (1.0 - d) * p * overlap;
}

double oracle_prepared_fidelity(const PhaseSetting& setting, BellOutcome outcome,
                                const NoiseParams& noise) {
  noise.validate();
  const std::array<ConditionalState, 4> branches = noisy_branches(setting, noise);
  const DensityOperator readout =
      corrected_readout_state(branches[outcome_index(outcome)], noise);
  return fidelity_pure(target_state(setting), readout);
}

double verification_fidelity(const NoiseParams& noise) {
  noise.validate();
  const StateVector bell = entangled_atom_photon();
  return fidelity_pure(bell, werner_mix(bell, noise.entanglement_fidelity));
}

std::array<std::vector<PhaseSetting>, 4> table1_grids() {
  std::array<std::vector<PhaseSetting>, 4> grids;
  for (int i = 0; i < 12; ++i) {
    const double step = 30.0 * i;
    grids[0].emplace_back(90.0, step);
    grids[1].emplace_back(step, 0.0);
    grids[2].emplace_back(step, 90.0);
    grids[3].emplace_back(109.5, step);
  }
  return grids;
}

int distinct_state_count(const std::vector<PhaseSetting>& settings, double tol) {
  std::vector<BlochVector> reps;
  for (const PhaseSetting& s : settings) {
    const BlochVector b = bloch_of(density_of(target_state(s)));
    if (is_new_state(reps, b, tol)) {
      reps.push_back(b);
    }
  }
  return static_cast<int>(reps.size());
}

Table1Result run_table1(const NoiseParams& noise, std::uint64_t master_seed,
                        std::int64_t events_per_point_per_basis, int bootstrap_B, int threads) {
  const std::array<std::vector<PhaseSetting>, 4> grids = table1_grids();

  Table1Result result;
  std::vector<PhaseSetting> all_points;
  double sum = 0.0;
  double err_sq = 0.0;
  int cells = 0;
  for (int set = 0; set < 4; ++set) {
    SweepSpec spec;
    spec.points = grids[set];
    spec.events_per_point_per_basis = events_per_point_per_basis;
    spec.noise = noise;
    spec.master_seed = master_seed;
    spec.bootstrap_B = bootstrap_B;
    spec.set_id = set + 1;
    spec.threads = threads;
    result.sets[set] = run_sweep(spec);
    for (const PointResult& pr : result.sets[set].per_point) {
      for (const OutcomeResult& oc : pr.per_outcome) {
        sum += oc.tomo.fidelity;
        err_sq += oc.tomo.fidelity_err * oc.tomo.fidelity_err;
        ++cells;
      }
    }
    all_points.insert(all_points.end(), grids[set].begin(), grids[set].end());
  }
  result.overall_mean = sum / cells;
  result.overall_err = std::sqrt(err_sq) / cells;
  result.distinct_states = distinct_state_count(all_points);
  result.verification = verification_fidelity(noise);
  return result;
}

CalibrationResult calibrate(const CalibrationTargets& targets, const NoiseParams& base) {
  base.validate();
  if (!(targets.set1_mean >= 0.0 && targets.set1_mean <= 1.0) ||
      !(targets.verification >= 0.0 && targets.verification <= 1.0)) {
    throw std::invalid_argument("calibrate: targets must lie in [0, 1]");
  }
  const std::array<std::vector<PhaseSetting>, 4> grids = table1_grids();
  const std::vector<PhaseSetting>& set1 = grids[0];

  const auto set1_mean = [&](const NoiseParams& np) {
    double sum = 0.0;
    for (const PhaseSetting& s : set1) {
      sum += analytic_prepared_fidelity(s, np);
    }
    return sum / static_cast<double>(set1.size());
  };

  const auto loss = [&](double f_ent, double d) {
    NoiseParams np = base;
    np.entanglement_fidelity = f_ent;
    np.readout_depolarization = d;
    const double r1 = set1_mean(np) - targets.set1_mean;
    const double r2 = verification_fidelity(np) - targets.verification;
    return r1 * r1 + r2 * r2;
  };

  double lo_f = 0.25, hi_f = 1.0;
  double lo_d = 0.0, hi_d = 1.0;
  double best_f = lo_f, best_d = lo_d;
  const int grid_n = 60;
  for (int round = 0; round < 6; ++round) {
    double best_loss = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= grid_n; ++i) {
      const double f = lo_f + (hi_f - lo_f) * i / grid_n;
      for (int j = 0; j <= grid_n; ++j) {
        const double d = lo_d + (hi_d - lo_d) * j / grid_n;
        const double l = loss(f, d);
        if (l < best_loss) {
          best_loss = l;
          best_f = f;
          best_d = d;
        }
      }
    }
    // Zoom onto the winning cell's neighborhood for the next round.
    const double span_f = (hi_f - lo_f) * 2.0 / grid_n;
    const double span_d = (hi_d - lo_d) * 2.0 / grid_n;
    lo_f = std::max(0.25, best_f - span_f);
    hi_f = std::min(1.0, best_f + span_f);
    lo_d = std::max(0.0, best_d - span_d);
    hi_d = std::min(1.0, best_d + span_d);
  }

  CalibrationResult result;
  result.params = base;
  result.params.entanglement_fidelity = best_f;
  result.params.readout_depolarization = best_d;
  result.achieved_set1_mean = set1_mean(result.params);
  result.achieved_verification = verification_fidelity(result.params);
  result.residual_set1 = result.achieved_set1_mean - targets.set1_mean;
  result.residual_verification = result.achieved_verification - targets.verification;
  result.model_adequate = std::abs(result.residual_set1) <= 0.02 &&
                          std::abs(result.residual_verification) <= 0.02;
  return result;
}

}  // namespace rsp
