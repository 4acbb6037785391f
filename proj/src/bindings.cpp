#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rspsim/experiment.hpp"
#include "rspsim/rng.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace rsp;

namespace {

py::dict bloch_dict(const BlochVector& b) {
  return py::dict("x"_a = b.x, "y"_a = b.y, "z"_a = b.z);
}

py::dict tomo_dict(const TomographyResult& tomo) {
  py::list records;
  for (const CountRecord& rec : tomo.records) {
    records.append(py::dict("basis"_a = std::string(1, basis_letter(rec.basis)),
                            "n_up"_a = rec.n_up, "n_total"_a = rec.n_total));
  }
  return py::dict("rho"_a = tomo.rho.entries(), "fidelity"_a = tomo.fidelity,
                  "fidelity_err"_a = tomo.fidelity_err, "records"_a = records);
}

py::dict summary_dict(const SweepSummary& summary) {
  py::list points;
  for (const PointResult& pr : summary.per_point) {
    py::list cells;
    for (const OutcomeResult& oc : pr.per_outcome) {
      cells.append(py::dict("outcome"_a = std::string(outcome_name(oc.outcome)),
                            "detector_id"_a = detector_id(oc.outcome),
                            "tomo"_a = tomo_dict(oc.tomo)));
    }
    points.append(py::dict("alpha_deg"_a = pr.setting.alpha_deg(),
                           "phi_deg"_a = pr.setting.phi_deg(), "outcomes"_a = cells));
  }
  return py::dict("mean_fidelity"_a = summary.mean_fidelity,
                  "mean_fidelity_err"_a = summary.mean_fidelity_err, "points"_a = points);
}

SweepSpec make_spec(const std::vector<std::pair<double, double>>& points,
                    const NoiseParams& noise, std::uint64_t seed, std::int64_t events,
                    int bootstrap_B, int set_id, int threads) {
  SweepSpec spec;
  for (const auto& [alpha, phi] : points) {
    spec.points.emplace_back(alpha, phi);
  }
  spec.noise = noise;
  spec.master_seed = seed;
  spec.events_per_point_per_basis = events;
  spec.bootstrap_B = bootstrap_B;
  spec.set_id = set_id;
  spec.threads = threads;
  return spec;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Remote state preparation simulator core";

  py::class_<NoiseParams>(m, "NoiseParams")
      .def(py::init<>())
      .def_readwrite("entanglement_fidelity", &NoiseParams::entanglement_fidelity)
      .def_readwrite("bsa_visibility", &NoiseParams::bsa_visibility)
      .def_readwrite("dephasing_tau", &NoiseParams::dephasing_tau)
      .def_readwrite("readout_depolarization", &NoiseParams::readout_depolarization)
      .def_readwrite("readout_delay", &NoiseParams::readout_delay)
      .def("validate", &NoiseParams::validate);

  m.def("outcome_names", [] {
    std::vector<std::string> names;
    for (const BellOutcome o : kBellOutcomes) names.emplace_back(outcome_name(o));
    return names;
  });

  m.def(
      "entangled_atom_photon", [] { return entangled_atom_photon().amps(); },
      "Amplitudes of the ideal atom-photon pair over (up H, up V, down H, down V)");

  m.def(
      "spatial_encoding",
      [](double alpha_deg, double phi_deg) {
        return spatial_encoding(PhaseSetting(alpha_deg, phi_deg)).amps();
      },
      "alpha_deg"_a, "phi_deg"_a, "Spatial-mode amplitudes over (a, b)");

  m.def(
      "target_state",
      [](double alpha_deg, double phi_deg) {
        return target_state(PhaseSetting(alpha_deg, phi_deg)).amps();
      },
      "alpha_deg"_a, "phi_deg"_a, "Amplitudes of the state the protocol prepares");

  m.def(
      "target_bloch",
      [](double alpha_deg, double phi_deg) {
        return bloch_dict(bloch_of(density_of(target_state(PhaseSetting(alpha_deg, phi_deg)))));
      },
      "alpha_deg"_a, "phi_deg"_a);

  m.def(
      "branch_probabilities",
      [](double alpha_deg, double phi_deg, const NoiseParams& noise) {
        const DensityOperator pair =
            werner_mix(entangled_atom_photon(), noise.entanglement_fidelity);
        const DensityOperator spatial = apply_visibility(
            spatial_encoding(PhaseSetting(alpha_deg, phi_deg)), noise.bsa_visibility);
        py::dict out;
        for (const ConditionalState& br : measure_bell(joint_state(pair, spatial))) {
          out[py::str(std::string(outcome_name(br.outcome)))] = br.probability;
        }
        return out;
      },
      "alpha_deg"_a, "phi_deg"_a, "noise"_a = NoiseParams{},
      "Bell outcome probabilities of the (noisy) pipeline");

  m.def(
      "prepared_state",
      [](double alpha_deg, double phi_deg, const std::string& outcome,
         const NoiseParams& noise) {
        const PhaseSetting setting(alpha_deg, phi_deg);
        const DensityOperator pair =
            werner_mix(entangled_atom_photon(), noise.entanglement_fidelity);
        const DensityOperator spatial =
            apply_visibility(spatial_encoding(setting), noise.bsa_visibility);
        const auto branches = measure_bell(joint_state(pair, spatial));
        const BellOutcome o = outcome_from_name(outcome);
        const ConditionalState& br = branches[static_cast<int>(o)];
        if (!br.atom_state) {
          throw std::runtime_error("branch has vanishing probability");
        }
        const Mat u = pauli_correction(o).entries();
        DensityOperator rho(u * br.atom_state->entries() * u.adjoint());
        rho = dephase_atom(rho, noise.readout_delay, noise.dephasing_tau);
        return depolarize(rho, noise.readout_depolarization).entries();
      },
      "alpha_deg"_a, "phi_deg"_a, "outcome"_a, "noise"_a = NoiseParams{},
      "Corrected readout-time density matrix for one Bell outcome");

  m.def(
      "analytic_curves",
      [](double alpha_deg, const std::vector<double>& phis_deg) {
        py::list out;
        for (const CurvePoint& cp : analytic_curves(alpha_deg, phis_deg)) {
          out.append(py::dict("phi_deg"_a = cp.phi_deg,
                              "outcome"_a = std::string(outcome_name(cp.outcome)),
                              "p_up_z"_a = cp.p_up_z, "p_down_x"_a = cp.p_down_x,
                              "p_up_y"_a = cp.p_up_y));
        }
        return out;
      },
      "alpha_deg"_a, "phis_deg"_a);

  m.def(
      "analytic_prepared_fidelity",
      [](double alpha_deg, double phi_deg, const NoiseParams& noise) {
        return analytic_prepared_fidelity(PhaseSetting(alpha_deg, phi_deg), noise);
      },
      "alpha_deg"_a, "phi_deg"_a, "noise"_a = NoiseParams{});

  m.def("verification_fidelity", &verification_fidelity, "noise"_a);

  m.def(
      "reconstruct_rates",
      [](double p_x, double p_y, double p_z) {
        return reconstruct_rates(p_x, p_y, p_z).entries();
      },
      "p_x"_a, "p_y"_a, "p_z"_a, "Density matrix from exact basis rates");

  m.def(
      "tomo_analyze",
      [](const std::vector<std::tuple<std::string, std::int64_t, std::int64_t>>& counts,
         double alpha_deg, double phi_deg, std::uint64_t seed, int bootstrap_B) {
        if (counts.size() != 3) {
          throw std::invalid_argument("counts must hold exactly three (basis, n_up, n_total)");
        }
        std::array<CountRecord, 3> records;
        for (int i = 0; i < 3; ++i) {
          const auto& [letter, n_up, n_total] = counts[i];
          if (letter.size() != 1) {
            throw std::invalid_argument("basis must be a single letter");
          }
          records[i] = CountRecord{basis_from_letter(letter[0]), n_up, n_total};
        }
        const PhaseSetting setting(alpha_deg, phi_deg);
        std::mt19937_64 rng = StreamKey(seed)
                                  .absorb("tomo")
                                  .absorb(setting.alpha_deg())
                                  .absorb(setting.phi_deg())
                                  .stream();
        return tomo_dict(analyze(records, target_state(setting), bootstrap_B, rng));
      },
      "counts"_a, "alpha_deg"_a, "phi_deg"_a, "seed"_a = 12345, "bootstrap_B"_a = 1000);

  m.def(
      "run_sweep",
      [](const std::vector<std::pair<double, double>>& points, const NoiseParams& noise,
         std::uint64_t seed, std::int64_t events, int bootstrap_B, int set_id, int threads) {
        return summary_dict(
            run_sweep(make_spec(points, noise, seed, events, bootstrap_B, set_id, threads)));
      },
      "points"_a, "noise"_a = NoiseParams{}, "seed"_a = 12345, "events"_a = 300,
      "bootstrap_B"_a = 1000, "set_id"_a = 0, "threads"_a = 0,
      "Monte Carlo sweep over (alpha_deg, phi_deg) points");

  m.def(
      "run_table1",
      [](const NoiseParams& noise, std::uint64_t seed, std::int64_t events, int bootstrap_B,
         int threads) {
        const Table1Result result = run_table1(noise, seed, events, bootstrap_B, threads);
        py::list sets;
        for (const SweepSummary& set : result.sets) {
          sets.append(summary_dict(set));
        }
        return py::dict("sets"_a = sets, "distinct_states"_a = result.distinct_states,
                        "overall_mean"_a = result.overall_mean,
                        "overall_err"_a = result.overall_err,
                        "verification"_a = result.verification);
      },
      "noise"_a = NoiseParams{}, "seed"_a = 12345, "events"_a = 300, "bootstrap_B"_a = 1000,
      "threads"_a = 0, "The four standard measurement sets");

  m.def(
      "calibrate",
      [](double set1_mean, double verification, const NoiseParams& base) {
        CalibrationTargets targets;
        targets.set1_mean = set1_mean;
        targets.verification = verification;
        const CalibrationResult result = calibrate(targets, base);
        return py::dict(
            "entanglement_fidelity"_a = result.params.entanglement_fidelity,
            "readout_depolarization"_a = result.params.readout_depolarization,
            "achieved_set1_mean"_a = result.achieved_set1_mean,
            "achieved_verification"_a = result.achieved_verification,
            "residual_set1"_a = result.residual_set1,
            "residual_verification"_a = result.residual_verification,
            "model_adequate"_a = result.model_adequate);
      },
      "set1_mean"_a = 0.826, "verification"_a = 0.87, "base"_a = NoiseParams{},
      "Fit pair fidelity and readout depolarization to the targets");

  m.def(
      "distinct_state_count",
      [](const std::vector<std::pair<double, double>>& points, double tol) {
        std::vector<PhaseSetting> settings;
        for (const auto& [alpha, phi] : points) settings.emplace_back(alpha, phi);
        return distinct_state_count(settings, tol);
      },
      "points"_a, "tol"_a = 1e-6);

  m.def("standard_grid_points", [] {
    std::vector<std::pair<double, double>> out;
    for (const auto& grid : table1_grids()) {
      for (const PhaseSetting& s : grid) {
        out.emplace_back(s.alpha_deg(), s.phi_deg());
      }
    }
    return out;
  });
}
