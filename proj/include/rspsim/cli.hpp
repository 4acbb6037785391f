#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "rspsim/experiment.hpp"

namespace rsp {

inline constexpr const char* kSchemaVersion = "1";

// One JSON document configures every command; sections not used by a command
// are ignored by it but still validated. Unknown keys are rejected anywhere
// in the document.
struct RunConfig {
  std::uint64_t seed = 12345;
  std::int64_t events_per_point_per_basis = 300;
  int bootstrap_replicates = 1000;
  int threads = 0;
  NoiseParams noise;
  std::string sweep_alpha = "90";
  std::string sweep_phi = "0:330:30";
  int sweep_set_id = 0;
  CalibrationTargets targets;

  static RunConfig from_json_text(const std::string& text);
  // Empty path yields the defaults above.
  static RunConfig load(const std::string& path);
};

// Command entry points shared by the executable and the tests. Each returns
// a process exit status: 0 on success, 1 on usage or configuration errors,
// 2 on execution failures, 3 when calibration cannot meet its targets.
int cmd_curves(double alpha_deg, const std::string& phi_range, const std::string& out_dir);
int cmd_sweep(const RunConfig& cfg, const std::string& out_dir);
int cmd_table1(const RunConfig& cfg, const std::string& out_dir);
int cmd_calibrate(const RunConfig& cfg, const std::string& out_dir);
int cmd_tomo(const std::string& counts_csv_path, std::optional<double> alpha_deg,
             std::optional<double> phi_deg, std::uint64_t seed, int bootstrap_B,
             const std::string& out_dir);

int run_cli(int argc, const char* const* argv);

}  // namespace rsp
