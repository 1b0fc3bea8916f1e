#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "noise/noise.hpp"

namespace bandlab::harness {

enum class ModelKind { kLaplacian, kBetaLimit, kWigner };

const char* model_name(ModelKind m);
ModelKind model_from_name(const std::string& name);

struct MeshSpec {
  int n_energy = 9;
  int n_eta = 6;
};

struct EntryPolicy {
  enum class Kind { kFull, kSampled };
  Kind kind = Kind::kFull;
  std::int64_t random_pairs = 64;  // R for the sampled policy
};

/// Extra knobs for the synthetic concentration experiment (no matrices).
struct ConcentrationSpec {
  std::int64_t n = 10000;         // number of summands
  double alpha = 1.0;
  double q_exponent = 0.05;       // q = n^q_exponent
  std::vector<int> xi_list{2, 3};
  double nu = 0.05;               // pass gate: empirical tail <= exp(-nu (log n)^xi)
  std::int64_t replications = 10000;
  std::string psi = "ones";       // ones | ramp
  double psi_scale = 1.0;
};

struct ExperimentConfig {
  std::string experiment;  // local_law | trace_law | entrywise_failure |
                           // boundedness | spectral_statistics | concentration
  ModelKind model = ModelKind::kLaplacian;
  noise::NoiseSpec noise;
  std::vector<std::int64_t> n_list{1000, 2000, 4000};
  double epsilon = 0.4;
  double kappa = 0.5;
  int removal_exponent = 3;  // p
  MeshSpec mesh;
  int trials = 100;
  EntryPolicy entry_policy;
  std::uint64_t master_seed = 1;
  std::string output_dir;
  std::optional<ConcentrationSpec> concentration;

  void validate() const;
  std::string to_json_string() const;
  /// Strict parse: unknown keys are rejected at every level.
  static ExperimentConfig from_json_string(const std::string& text);
};

}  // namespace bandlab::harness
