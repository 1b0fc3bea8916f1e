#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "harness/config.hpp"
#include "json.hpp"

namespace bandlab::harness {

struct StatSummary {
  double q05 = 0.0, q50 = 0.0, q95 = 0.0;
  std::optional<double> pass_fraction;
  std::optional<double> threshold;
};

struct ExperimentReport {
  ExperimentConfig config;
  // per N: statistic name -> summary
  std::map<std::int64_t, std::map<std::string, StatSummary>> per_n;
  std::vector<std::string> notes;  // calibration details, one line each
  nlohmann::json extra;            // experiment-specific aggregates
  double total_wall_ms = 0.0;      // excluded from the determinism contract

  nlohmann::json to_json() const;
  void write_summary_csv(const std::string& path) const;
};

/// Runs the experiment named in config.experiment. When config.output_dir is
/// nonempty, writes trials.jsonl (deterministic, ordered by trial key),
/// report.json, summary.csv and timings.csv (wall clock; not deterministic).
ExperimentReport run_experiment(const ExperimentConfig& config);

ExperimentReport run_local_law(const ExperimentConfig& config);
ExperimentReport run_trace_law(const ExperimentConfig& config);
ExperimentReport run_entrywise_failure(const ExperimentConfig& config);
ExperimentReport run_boundedness(const ExperimentConfig& config);
ExperimentReport run_spectral_statistics(const ExperimentConfig& config);
ExperimentReport run_concentration(const ExperimentConfig& config);

const std::vector<std::string>& experiment_names();

/// Deterministic invariant suite; returns pass/fail and appends one line per
/// check to log.
bool selftest(std::vector<std::string>& log);

/// JSON report endpoints backing the C API / CLI.
std::string green_report_json(const std::string& request_json);
std::string spectrum_report_json(const std::string& request_json);

}  // namespace bandlab::harness
