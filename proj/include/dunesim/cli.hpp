#pragma once

// Configuration-driven front end.  A run is described by a line-oriented
// "key = value" text with [section] headers; parsing is strict (unknown keys,
// unknown sections, malformed values and command/preset mismatches are all
// collected with line numbers).  run_config dispatches the named pipeline,
// writes every artifact under the output directory, and finishes with a
// digest manifest covering the directory contents.  All numeric output is
// printf-formatted with '.' decimal separators regardless of locale, and a
// fixed config + seed reproduces every artifact byte for byte.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dunesim/preset.hpp"

namespace dunesim {

// Parse/validation failure: one "line N: message" entry per problem (line 0
// entries are whole-config complaints without a specific source line).
struct ConfigError : std::runtime_error {
  explicit ConfigError(std::vector<std::string> errs);
  std::vector<std::string> errors;
};

struct RunConfig {
  // [run]
  std::string command;  // simulate|cell|homogenize|verify|corrector|hypotheses
  double T_final = 0.5;
  double eps = 0.1;                // single-run commands
  std::vector<double> eps_ladder;  // verify: >= 3 strictly decreasing entries
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  bool quiet = false;
  bool has_z0_constant = false;  // constant initial height instead of the
  double z0_constant = 0.0;      // bundled default

  // [grid]
  int n = 32;
  int theta_nodes = 32;
  int tau_nodes = 8;
  int t_intervals = 32;
  int snapshots_per_period = 32;

  // [preset]
  std::string preset_name;
  std::map<std::string, double> overrides;  // numeric members by key
  Preset preset;                            // resolved: bundled + overrides

  // [solver]
  double tol = 1e-9;
  std::vector<double> nu_schedule = {1e-1, 3e-2, 1e-2};
  double safety = 0.8;
  long max_steps = 60000000;
  double slice_t = 0.0;    // cell: slow time of the coefficient slice
  double slice_tau = 0.0;  // cell: intermediate time of the slice
  bool well_prepared = false;  // verify, mean regime only
};

// Strict parse + full validation; throws ConfigError listing every problem.
RunConfig parse_config(const std::string& text);

// Canonical text form: fixed key order, %.17g numbers, only meaningful keys.
// serialize_config(parse_config(text)) reparses to an equal config.
std::string serialize_config(const RunConfig& cfg);

struct ManifestEntry {
  std::string path;      // relative to the output directory, '/'-separated
  std::string digest;    // FNV-1a 64 of the file bytes, 16 hex digits
};

struct CheckResult {
  std::string id;
  double value = 0.0;
  double bound = 0.0;
  bool pass = false;
};

struct RunReport {
  RunConfig config;
  std::vector<std::pair<std::string, double>> constants;
  std::vector<CheckResult> checks;
  // Wall-clock stage timings; printed to stdout, never written to artifacts
  // (artifact bytes stay reproducible).
  std::vector<std::pair<std::string, double>> timings_s;
  std::vector<ManifestEntry> manifest;
  int exit_code = 0;    // 0 pass, 1 check failure, 3 solver failure
  std::string failure;  // non-empty when exit_code == 3

  bool all_pass() const;
};

// Executes cfg.command; writes the pipeline artifacts plus config.cfg,
// report.csv and manifest.csv under cfg.out_dir.  Solver failures are
// captured in the report (exit_code 3, partial artifacts retained), not
// thrown.
RunReport run_config(const RunConfig& cfg);

// Process entry point: --config <path> (required), --out <dir>, --seed <u64>,
// --quiet.  Returns 0 (all checks pass), 1 (check failure), 2 (flag/config
// error), 3 (solver failure).
int cli_main(int argc, const char* const* argv);

}  // namespace dunesim
