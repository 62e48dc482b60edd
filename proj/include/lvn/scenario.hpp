// scenario.hpp — configuration-driven runner binding the invariant, density
// and factorization modules into reproducible scenarios: JSON config parsing
// with key-level validation, the four scenario pipelines, and CSV/JSON
// output with fixed schemas.
#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lvn/exec.hpp"

namespace lvn {

// Invalid configuration: unknown kind or key, missing key, wrong type,
// out-of-range value. The CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Validated scenario parameters. parse_config fills kind-specific defaults
// first, so only the fields of the active kind are meaningful.
struct ScenarioConfig {
  std::string kind;  // rabi | invariant | reduce | susy
  ExecMode exec = ExecMode::Parallel;

  // rabi: constant coupling of strength `rabi` between levels ω_a, ω_b.
  double omega_a = 1.0;
  double omega_b = 1.0;
  double rabi = 1.0;
  double dt = 1e-3;

  // invariant / reduce: circularly driven two-level system
  // H(t) = (ω₀/2)σ_z + A(cos ωt·σ_x + sin ωt·σ_y) on t ∈ [0, t_final].
  double omega0 = 0.4;
  double omega = 0.4;
  double amplitude = 0.2;
  double t_final = 2.0;

  int n_steps = 0;  // time steps for all three time-evolution kinds

  // susy: superpotential family on [x_min, x_max].
  std::string superpotential = "linear";  // linear: W = c·x; constant: W = c
  double coefficient = 1.0;
  double x_min = -10.0;
  double x_max = 10.0;
  int n_points = 2001;
  int k_pairs = 5;
  double hbar = 1.0;
  double mass = 0.5;
  std::string boundary = "decay";  // decay | finite_box
  std::optional<double> expected_epsilon0;
};

// One acceptance metric. `pass` already encodes the comparison direction
// (most checks are value ≤ threshold; fidelities, overlaps and resolved-pair
// counts are value ≥ threshold — see the README table).
struct CheckResult {
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct RunReport {
  std::string kind;
  std::vector<std::pair<std::string, CheckResult>> checks;  // insertion order
  std::vector<std::string> files;  // relative paths, filled by write_outputs
  double duration_seconds = 0.0;

  bool all_pass() const;
  const CheckResult* find(const std::string& name) const;
};

// One CSV table: fixed header line and numeric rows. Every cell is written
// with 12 significant digits (format_cell), LF line endings.
struct Table {
  std::string filename;
  std::string header;
  std::vector<std::vector<double>> rows;
};

struct ScenarioOutput {
  RunReport report;
  std::vector<Table> tables;
};

// Parses and validates a JSON config. Unknown kinds list the valid ones;
// unknown keys, type mismatches and range violations name the key.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig parse_config_file(const std::string& path);

// Executes the pipeline for cfg.kind and returns the report plus the CSV
// tables, without touching the filesystem. Numeric guard breaches propagate
// as NumericGuardError.
ScenarioOutput run_scenario(const ScenarioConfig& cfg);

// Writes the tables and report.json under dir (created if needed), fills
// out.report.files with the CSV names, and returns the manifest of all
// paths written (CSVs plus report.json). I/O failures name the path.
std::vector<std::string> write_outputs(ScenarioOutput& out,
                                       const std::string& dir);

// 12-significant-digit cell formatter shared by all CSV output.
std::string format_cell(double v);

}  // namespace lvn
