#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sagin/bcd_orchestrator.hpp"
#include "sagin/scenario.hpp"

namespace sagin {

enum class SweepKind { None, BsPower, NumUes };

const char* to_string(SweepKind kind);

struct Sweep {
  SweepKind kind = SweepKind::None;
  std::vector<double> values;  // dBm for BsPower, L for NumUes
};

/// "none", "bs_power:20,25,30,35" or "num_ues:1,2,3".
Sweep parse_sweep(const std::string& text);
/// "0-19", "1,4,7" or a mix such as "0-3,10".
std::vector<std::uint64_t> parse_seeds(const std::string& text);
/// Comma-separated scheme names.
std::vector<Scheme> parse_schemes(const std::string& text);

struct ExperimentConfig {
  ScenarioParams params;
  Sweep sweep;
  std::vector<std::uint64_t> seeds;
  std::vector<Scheme> schemes{Scheme::Proposed};
  std::string output_path;
  int workers = 0;  // 0 means one per hardware thread
  OptimizeOptions optimizer;

  /// Throws ConfigError.
  void validate() const;
};

/// Scenario keys plus `experiment.*` and `optimizer.*`. Unknown keys are errors.
ExperimentConfig experiment_from_config(const KeyValueConfig& config);

/// Optimizer keys only (`optimizer.*`), applied over `options`.
void apply_optimizer_keys(const KeyValueConfig& config, OptimizeOptions& options);

/// Scenario for one sweep point; placement is drawn from `seed`.
Scenario build_scenario(const ScenarioParams& params, const Sweep& sweep, std::size_t sweep_index,
                        std::uint64_t seed);

struct ExperimentRecord {
  std::string scheme;
  std::string sweep;
  std::string sweep_value;  // empty without a sweep
  std::uint64_t seed = 0;
  bool final_row = false;
  int iteration = 0;
  double weighted_sum_rate = 0.0;
  double wmmse_objective = 0.0;
  std::vector<double> es_rates;  // final rows only
  std::vector<double> ue_rates;  // final rows only, row-major [k][l]
  bool feasible = false;
  std::string statuses;  // rate/beam/phase/pose, per-iteration rows only
};

extern const char* const kCsvHeader;
extern const char* const kTimingHeader;

std::string csv_field(const std::string& text);
std::string csv_row(const ExperimentRecord& record);

struct RunSummary {
  int cells = 0;
  int failed = 0;             // infeasible starts, repeated rate failures, failed certification
  std::size_t rows = 0;
};

/// Runs every (scheme, sweep value, seed) cell and writes records in cell order.
/// `timing` receives one runtime row per successful cell when non-null.
RunSummary run_experiment(const ExperimentConfig& config, std::ostream& csv, std::ostream* timing,
                          std::ostream& diagnostics);

/// Exit status 0 on success, 3 when any cell failed. Writes `output_path` and
/// `output_path`.timing.csv.
int run_to_files(const ExperimentConfig& config, std::ostream& diagnostics);

}  // namespace sagin
