#include "rspsim/cli.hpp"

#include <cmath>
#include <filesystem>
#include <initializer_list>
#include <iostream>
#include <sstream>
#include <string_view>

#include "CLI11.hpp"
#include "json.hpp"

#include "rspsim/io.hpp"
#include "rspsim/rng.hpp"

namespace rsp {

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

void require_keys(const json& j, std::initializer_list<std::string_view> allowed,
                  const std::string& where) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const std::string_view key : allowed) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw std::invalid_argument("config: unknown key \"" + item.key() + "\" in " + where);
    }
  }
}

double get_number(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) {
    throw std::invalid_argument(std::string("config: \"") + key + "\" must be a number");
  }
  return j[key].get<double>();
}

std::string get_range_text(const json& j, const char* key, const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  if (j[key].is_number()) {
    return format_g6(j[key].get<double>());
  }
  if (j[key].is_string()) {
    return j[key].get<std::string>();
  }
  throw std::invalid_argument(std::string("config: \"") + key +
                              "\" must be a number or a range string");
}

NoiseParams noise_from_json(const json& j) {
  require_keys(j,
               {"entanglement_fidelity", "bsa_visibility", "dephasing_tau",
                "readout_depolarization", "readout_delay"},
               "noise");
  NoiseParams np;
  np.entanglement_fidelity = get_number(j, "entanglement_fidelity", np.entanglement_fidelity);
  np.bsa_visibility = get_number(j, "bsa_visibility", np.bsa_visibility);
  np.dephasing_tau = get_number(j, "dephasing_tau", np.dephasing_tau);
  np.readout_depolarization = get_number(j, "readout_depolarization", np.readout_depolarization);
  np.readout_delay = get_number(j, "readout_delay", np.readout_delay);
  np.validate();
  return np;
}

ordered_json noise_to_json(const NoiseParams& np) {
  ordered_json j;
  j["entanglement_fidelity"] = np.entanglement_fidelity;
  j["bsa_visibility"] = np.bsa_visibility;
  j["dephasing_tau"] = np.dephasing_tau;
  j["readout_depolarization"] = np.readout_depolarization;
  j["readout_delay"] = np.readout_delay;
  return j;
}

std::string correction_name(BellOutcome outcome) {
  switch (outcome_map()[static_cast<int>(outcome)]) {
    case 1: return "identity";
    case 2: return "sigma_x";
    case 3: return "sigma_y";
    default: return "sigma_z";
  }
}

std::string detector_map_line() {
  std::string line;
  for (const BellOutcome o : kBellOutcomes) {
    if (!line.empty()) line += " ";
    line += "APD" + std::to_string(detector_id(o)) + "=" + std::string(outcome_name(o));
  }
  return line;
}

std::string correction_map_line() {
  std::string line;
  for (const BellOutcome o : kBellOutcomes) {
    if (!line.empty()) line += " ";
    line += std::string(outcome_name(o)) + "=" + correction_name(o);
  }
  return line;
}

std::string noise_line(const NoiseParams& np) {
  std::ostringstream out;
  out << "entanglement_fidelity=" << format_g6(np.entanglement_fidelity)
      << " bsa_visibility=" << format_g6(np.bsa_visibility)
      << " dephasing_tau=" << format_g6(np.dephasing_tau)
      << " readout_depolarization=" << format_g6(np.readout_depolarization)
      << " readout_delay=" << format_g6(np.readout_delay);
  return out.str();
}

std::string convention_line() {
  const BasisConvention conv;
  return conv.description() + " (circular_sign=" +
         (conv.circular_sign > 0 ? "+1" : "-1") + ")";
}

ordered_json provenance_json(const std::string& command, std::uint64_t seed,
                             const NoiseParams& noise, std::int64_t events, int bootstrap) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = command;
  j["seed"] = seed;
  j["events_per_point_per_basis"] = events;
  j["bootstrap_replicates"] = bootstrap;
  j["noise"] = noise_to_json(noise);
  j["basis_convention"] = convention_line();
  j["detectors"] = detector_map_line();
  j["corrections"] = correction_map_line();
  return j;
}

std::string csv_provenance(const std::string& command, const std::string& seed_line,
                           const std::string& noise_desc, std::int64_t events, int bootstrap) {
  std::ostringstream out;
  out << "# schema_version: " << kSchemaVersion << "\n";
  out << "# command: " << command << "\n";
  out << "# seed: " << seed_line << "\n";
  if (events > 0) {
    out << "# events_per_point_per_basis: " << events << "\n";
    out << "# bootstrap_replicates: " << bootstrap << "\n";
  }
  out << "# noise: " << noise_desc << "\n";
  out << "# basis_convention: " << convention_line() << "\n";
  out << "# detectors: " << detector_map_line() << "\n";
  out << "# corrections: " << correction_map_line() << "\n";
  return out.str();
}

std::filesystem::path prepare_out_dir(const std::string& out_dir) {
  const std::filesystem::path dir = out_dir.empty() ? "." : out_dir;
  std::filesystem::create_directories(dir);
  return dir;
}

void append_sweep_rows(std::ostringstream& out, const SweepSummary& summary, int set_id) {
  for (const PointResult& pr : summary.per_point) {
    for (const OutcomeResult& oc : pr.per_outcome) {
      for (const MeasBasis basis : kMeasBases) {
        const CountRecord& rec = oc.tomo.records[static_cast<int>(basis)];
        const double p_hat =
            static_cast<double>(rec.n_up) / static_cast<double>(rec.n_total);
        const double p_err =
            std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(rec.n_total));
        out << set_id << "," << format_g6(pr.setting.alpha_deg()) << ","
            << format_g6(pr.setting.phi_deg()) << "," << detector_id(oc.outcome) << ","
            << outcome_name(oc.outcome) << "," << basis_letter(basis) << "," << rec.n_up
            << "," << rec.n_total << "," << format_g6(p_hat) << "," << format_g6(p_err)
            << "," << format_g6(oc.tomo.fidelity) << "," << format_g6(oc.tomo.fidelity_err)
            << "\n";
      }
    }
  }
}

ordered_json set_summary_json(const SweepSummary& summary, int set_id) {
  ordered_json j;
  j["set_id"] = set_id;
  j["n_points"] = summary.per_point.size();
  j["mean_fidelity"] = summary.mean_fidelity;
  j["mean_fidelity_err"] = summary.mean_fidelity_err;
  return j;
}

int fail_usage(const std::exception& e) {
  std::cerr << "error: " << e.what() << "\n";
  return 1;
}

int fail_runtime(const std::exception& e) {
  std::cerr << "error: " << e.what() << "\n";
  return 2;
}

}  // namespace

RunConfig RunConfig::from_json_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) {
    throw std::invalid_argument("config: top level must be an object");
  }
  require_keys(doc,
               {"schema_version", "seed", "events_per_point_per_basis",
                "bootstrap_replicates", "threads", "noise", "sweep", "calibrate"},
               "top level");

  RunConfig cfg;
  if (doc.contains("schema_version")) {
    if (!doc["schema_version"].is_string() ||
        doc["schema_version"].get<std::string>() != kSchemaVersion) {
      throw std::invalid_argument("config: unsupported schema_version");
    }
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) {
      throw std::invalid_argument("config: \"seed\" must be a nonnegative integer");
    }
    cfg.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("events_per_point_per_basis")) {
    if (!doc["events_per_point_per_basis"].is_number_integer()) {
      throw std::invalid_argument("config: \"events_per_point_per_basis\" must be an integer");
    }
    cfg.events_per_point_per_basis = doc["events_per_point_per_basis"].get<std::int64_t>();
  }
  if (doc.contains("bootstrap_replicates")) {
    if (!doc["bootstrap_replicates"].is_number_integer()) {
      throw std::invalid_argument("config: \"bootstrap_replicates\" must be an integer");
    }
    cfg.bootstrap_replicates = doc["bootstrap_replicates"].get<int>();
  }
  if (doc.contains("threads")) {
    if (!doc["threads"].is_number_integer()) {
      throw std::invalid_argument("config: \"threads\" must be an integer");
    }
    cfg.threads = doc["threads"].get<int>();
  }
  if (doc.contains("noise")) {
    cfg.noise = noise_from_json(doc["noise"]);
  }
  if (doc.contains("sweep")) {
    const json& sweep = doc["sweep"];
    require_keys(sweep, {"alpha", "phi", "set_id"}, "sweep");
    cfg.sweep_alpha = get_range_text(sweep, "alpha", cfg.sweep_alpha);
    cfg.sweep_phi = get_range_text(sweep, "phi", cfg.sweep_phi);
    if (sweep.contains("set_id")) {
      if (!sweep["set_id"].is_number_integer()) {
        throw std::invalid_argument("config: \"set_id\" must be an integer");
      }
      cfg.sweep_set_id = sweep["set_id"].get<int>();
    }
  }
  if (doc.contains("calibrate")) {
    const json& cal = doc["calibrate"];
    require_keys(cal, {"set1_mean", "verification_fidelity"}, "calibrate");
    cfg.targets.set1_mean = get_number(cal, "set1_mean", cfg.targets.set1_mean);
    cfg.targets.verification = get_number(cal, "verification_fidelity", cfg.targets.verification);
  }
  return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
  if (path.empty()) {
    return RunConfig{};
  }
  return from_json_text(read_text_file(path));
}

int cmd_curves(double alpha_deg, const std::string& phi_range, const std::string& out_dir) {
  std::vector<double> phis;
  try {
    phis = parse_range(phi_range);
    if (!std::isfinite(alpha_deg)) {
      throw std::invalid_argument("alpha must be finite");
    }
  } catch (const std::exception& e) {
    return fail_usage(e);
  }

  try {
    const std::vector<CurvePoint> rows = analytic_curves(alpha_deg, phis);
    std::ostringstream out;
    out << csv_provenance("curves", "unused (analytic)", "ideal (noise-free pipeline)", 0, 0);
    out << "# alpha_deg: " << format_g6(PhaseSetting(alpha_deg, 0.0).alpha_deg()) << "\n";
    out << "# probability column: projection onto up(z) / down(x) / up(y) per basis row\n";
    out << "phi_deg,outcome,basis,probability\n";
    for (const CurvePoint& cp : rows) {
      const std::array<std::pair<char, double>, 3> entries = {
          std::make_pair('z', cp.p_up_z), std::make_pair('x', cp.p_down_x),
          std::make_pair('y', cp.p_up_y)};
      for (const auto& [basis, prob] : entries) {
        out << format_g6(cp.phi_deg) << "," << outcome_name(cp.outcome) << "," << basis << ","
            << format_g6(prob) << "\n";
      }
    }
    write_text_file((prepare_out_dir(out_dir) / "curves.csv").string(), out.str());
    return 0;
  } catch (const std::exception& e) {
    return fail_runtime(e);
  }
}

int cmd_sweep(const RunConfig& cfg, const std::string& out_dir) {
  SweepSpec spec;
  try {
    for (const double alpha : parse_range(cfg.sweep_alpha)) {
      for (const double phi : parse_range(cfg.sweep_phi)) {
        spec.points.emplace_back(alpha, phi);
      }
    }
    spec.events_per_point_per_basis = cfg.events_per_point_per_basis;
    spec.noise = cfg.noise;
    spec.master_seed = cfg.seed;
    spec.bootstrap_B = cfg.bootstrap_replicates;
    spec.set_id = cfg.sweep_set_id;
    spec.threads = cfg.threads;
    spec.validate();
  } catch (const std::exception& e) {
    return fail_usage(e);
  }

  try {
    const SweepSummary summary = run_sweep(spec);

    std::ostringstream csv;
    csv << csv_provenance("sweep", std::to_string(cfg.seed), noise_line(cfg.noise),
                          cfg.events_per_point_per_basis, cfg.bootstrap_replicates);
    csv << "set_id,alpha_deg,phi_deg,detector_id,outcome,basis,n_up,n_total,p_hat,p_err,"
           "fidelity,fidelity_err\n";
    append_sweep_rows(csv, summary, cfg.sweep_set_id);

    ordered_json j;
    j["provenance"] = provenance_json("sweep", cfg.seed, cfg.noise,
                                      cfg.events_per_point_per_basis, cfg.bootstrap_replicates);
    j["summary"] = set_summary_json(summary, cfg.sweep_set_id);

    const std::filesystem::path dir = prepare_out_dir(out_dir);
    write_text_file((dir / "sweep.csv").string(), csv.str());
    write_text_file((dir / "sweep_summary.json").string(), j.dump(2) + "\n");
    return 0;
  } catch (const std::exception& e) {
    return fail_runtime(e);
  }
}

int cmd_table1(const RunConfig& cfg, const std::string& out_dir) {
  try {
    cfg.noise.validate();
  } catch (const std::exception& e) {
    return fail_usage(e);
  }

  try {
    const Table1Result result =
        run_table1(cfg.noise, cfg.seed, cfg.events_per_point_per_basis,
                   cfg.bootstrap_replicates, cfg.threads);

    std::ostringstream csv;
    csv << csv_provenance("table1", std::to_string(cfg.seed), noise_line(cfg.noise),
                          cfg.events_per_point_per_basis, cfg.bootstrap_replicates);
    csv << "set_id,alpha_deg,phi_deg,detector_id,outcome,basis,n_up,n_total,p_hat,p_err,"
           "fidelity,fidelity_err\n";
    for (int set = 0; set < 4; ++set) {
      append_sweep_rows(csv, result.sets[set], set + 1);
    }

    ordered_json j;
    j["provenance"] = provenance_json("table1", cfg.seed, cfg.noise,
                                      cfg.events_per_point_per_basis, cfg.bootstrap_replicates);
    ordered_json sets = ordered_json::array();
    for (int set = 0; set < 4; ++set) {
      sets.push_back(set_summary_json(result.sets[set], set + 1));
    }
    j["sets"] = sets;
    j["overall_mean_fidelity"] = result.overall_mean;
    j["overall_mean_fidelity_err"] = result.overall_err;
    j["distinct_states"] = result.distinct_states;
    j["verification_fidelity"] = result.verification;

    const std::filesystem::path dir = prepare_out_dir(out_dir);
    write_text_file((dir / "table1.csv").string(), csv.str());
    write_text_file((dir / "table1_summary.json").string(), j.dump(2) + "\n");
    return 0;
  } catch (const std::exception& e) {
    return fail_runtime(e);
  }
}

int cmd_calibrate(const RunConfig& cfg, const std::string& out_dir) {
  CalibrationResult result{NoiseParams{}, 0.0, 0.0, 0.0, 0.0, false};
  try {
    result = calibrate(cfg.targets, cfg.noise);
  } catch (const std::exception& e) {
    return fail_usage(e);
  }

  try {
    ordered_json j;
    j["provenance"] = provenance_json("calibrate", cfg.seed, cfg.noise,
                                      cfg.events_per_point_per_basis, cfg.bootstrap_replicates);
    j["targets"] = {{"set1_mean", cfg.targets.set1_mean},
                    {"verification_fidelity", cfg.targets.verification}};
    j["fixed"] = {{"bsa_visibility", cfg.noise.bsa_visibility},
                  {"dephasing_tau", cfg.noise.dephasing_tau},
                  {"readout_delay", cfg.noise.readout_delay}};
    j["calibrated"] = {{"entanglement_fidelity", result.params.entanglement_fidelity},
                       {"readout_depolarization", result.params.readout_depolarization}};
    j["achieved"] = {{"set1_mean", result.achieved_set1_mean},
                     {"verification_fidelity", result.achieved_verification}};
    j["residuals"] = {{"set1_mean", result.residual_set1},
                      {"verification_fidelity", result.residual_verification}};
    j["model_adequate"] = result.model_adequate;
    j["noise"] = noise_to_json(result.params);

    // The budget the calibrated parameters imply for the standard grids.
    const std::array<std::vector<PhaseSetting>, 4> grids = table1_grids();
    ordered_json means = ordered_json::array();
    double overall = 0.0;
    for (const std::vector<PhaseSetting>& grid : grids) {
      double sum = 0.0;
      for (const PhaseSetting& s : grid) {
        sum += analytic_prepared_fidelity(s, result.params);
      }
      const double mean = sum / static_cast<double>(grid.size());
      means.push_back(mean);
      overall += mean / 4.0;
    }
    j["analytic_set_means"] = means;
    j["analytic_overall_mean"] = overall;

    write_text_file((prepare_out_dir(out_dir) / "calibration.json").string(), j.dump(2) + "\n");
    return result.model_adequate ? 0 : 3;
  } catch (const std::exception& e) {
    return fail_runtime(e);
  }
}

int cmd_tomo(const std::string& counts_csv_path, std::optional<double> alpha_deg,
             std::optional<double> phi_deg, std::uint64_t seed, int bootstrap_B,
             const std::string& out_dir) {
  std::array<CountRecord, 3> records;
  try {
    if (alpha_deg.has_value() != phi_deg.has_value()) {
      throw std::invalid_argument("tomo: provide both --alpha and --phi or neither");
    }
    const std::string text = read_text_file(counts_csv_path);
    std::istringstream in(text);
    std::string line;
    int row = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      if (!header_seen) {
        if (line != "basis,n_up,n_total") {
          throw std::invalid_argument("tomo: expected header basis,n_up,n_total");
        }
        header_seen = true;
        continue;
      }
      std::istringstream fields(line);
      std::string basis_field, up_field, total_field;
      if (!std::getline(fields, basis_field, ',') || !std::getline(fields, up_field, ',') ||
          !std::getline(fields, total_field)) {
        throw std::invalid_argument("tomo: malformed row \"" + line + "\"");
      }
      if (basis_field.size() != 1) {
        throw std::invalid_argument("tomo: basis must be a single letter");
      }
      if (row >= 3) {
        throw std::invalid_argument("tomo: expected exactly three rows");
      }
      CountRecord rec;
      rec.basis = basis_from_letter(basis_field[0]);
      rec.n_up = std::stoll(up_field);
      rec.n_total = std::stoll(total_field);
      records[row] = rec;
      ++row;
    }
    if (row != 3) {
      throw std::invalid_argument("tomo: expected exactly three rows");
    }
  } catch (const std::exception& e) {
    return fail_usage(e);
  }

  try {
    ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["command"] = "tomo";
    j["seed"] = seed;
    j["basis_convention"] = convention_line();
    j["input"] = ordered_json::array();
    for (const CountRecord& rec : records) {
      j["input"].push_back({{"basis", std::string(1, basis_letter(rec.basis))},
                            {"n_up", rec.n_up},
                            {"n_total", rec.n_total}});
    }

    const DensityOperator rho = reconstruct(records);
    const BlochVector b = bloch_of(rho);
    j["bloch"] = {{"x", b.x}, {"y", b.y}, {"z", b.z}};
    j["rho"] = {{"re", {{rho.entries()(0, 0).real(), rho.entries()(0, 1).real()},
                        {rho.entries()(1, 0).real(), rho.entries()(1, 1).real()}}},
                {"im", {{rho.entries()(0, 0).imag(), rho.entries()(0, 1).imag()},
                        {rho.entries()(1, 0).imag(), rho.entries()(1, 1).imag()}}}};

    if (alpha_deg) {
      const PhaseSetting setting(*alpha_deg, *phi_deg);
      std::mt19937_64 rng =
          StreamKey(seed).absorb("tomo").absorb(setting.alpha_deg()).absorb(setting.phi_deg()).stream();
      const TomographyResult tomo =
          analyze(records, target_state(setting), bootstrap_B, rng);
      j["target"] = {{"alpha_deg", setting.alpha_deg()}, {"phi_deg", setting.phi_deg()}};
      j["fidelity"] = tomo.fidelity;
      j["fidelity_err"] = tomo.fidelity_err;
    }

    write_text_file((prepare_out_dir(out_dir) / "tomo_result.json").string(), j.dump(2) + "\n");
    return 0;
  } catch (const std::exception& e) {
    return fail_runtime(e);
  }
}

namespace {

// A --alpha/--phi value that must be a single angle, not a range.
std::optional<double> parse_single_angle(const std::string& text, const char* what) {
  if (text.empty()) return std::nullopt;
  const std::vector<double> values = parse_range(text);
  if (values.size() != 1) {
    throw std::invalid_argument(std::string(what) + " must be a single angle here");
  }
  return values[0];
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Simulator for remote preparation of an atomic qubit through "
               "atom-photon entanglement and a complete Bell-state measurement"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed_flag;
  std::optional<std::int64_t> events_flag;
  std::string alpha_flag;
  std::string phi_flag;

  app.add_option("--config", config_path, "JSON configuration file");
  app.add_option("--out", out_dir, "output directory (default: current)");
  app.add_option("--seed", seed_flag, "master seed override");
  app.add_option("--events", events_flag, "events per point per basis override");
  app.add_option("--alpha", alpha_flag,
                 "alpha in degrees; start:stop:step ranges allowed for sweep");
  app.add_option("--phi", phi_flag,
                 "phi in degrees; start:stop:step ranges allowed for curves and sweep");

  CLI::App* curves = app.add_subcommand("curves", "exact per-outcome probability curves");
  CLI::App* sweep = app.add_subcommand("sweep", "Monte Carlo sweep over a setting grid");
  CLI::App* table1 = app.add_subcommand("table1", "the four standard measurement sets");
  CLI::App* calibrate_cmd = app.add_subcommand("calibrate", "fit noise knobs to targets");
  CLI::App* tomo = app.add_subcommand("tomo", "reconstruct a state from a counts CSV");
  std::string counts_path;
  tomo->add_option("counts_csv", counts_path, "CSV with basis,n_up,n_total rows")->required();
  for (CLI::App* sub : {curves, sweep, table1, calibrate_cmd, tomo}) {
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  RunConfig cfg;
  try {
    cfg = RunConfig::load(config_path);
  } catch (const std::exception& e) {
    return fail_usage(e);
  }
  if (seed_flag) cfg.seed = *seed_flag;
  if (events_flag) cfg.events_per_point_per_basis = *events_flag;

  if (curves->parsed()) {
    double alpha = 90.0;
    try {
      alpha = parse_single_angle(alpha_flag, "--alpha").value_or(90.0);
    } catch (const std::exception& e) {
      return fail_usage(e);
    }
    return cmd_curves(alpha, phi_flag.empty() ? "0:330:30" : phi_flag, out_dir);
  }
  if (sweep->parsed()) {
    if (!alpha_flag.empty()) cfg.sweep_alpha = alpha_flag;
    if (!phi_flag.empty()) cfg.sweep_phi = phi_flag;
    return cmd_sweep(cfg, out_dir);
  }
  if (table1->parsed()) {
    return cmd_table1(cfg, out_dir);
  }
  if (calibrate_cmd->parsed()) {
    return cmd_calibrate(cfg, out_dir);
  }
  if (tomo->parsed()) {
    std::optional<double> alpha;
    std::optional<double> phi;
    try {
      alpha = parse_single_angle(alpha_flag, "--alpha");
      phi = parse_single_angle(phi_flag, "--phi");
    } catch (const std::exception& e) {
      return fail_usage(e);
    }
    return cmd_tomo(counts_path, alpha, phi, cfg.seed, cfg.bootstrap_replicates, out_dir);
  }
  return 1;
}

}  // namespace rsp
