#pragma once

#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "json.hpp"

namespace bandlab::harness {

/// Streams JSON-Lines records in ascending key order while trials complete
/// out of order: completed records wait in a reorder buffer until the
/// contiguous prefix is ready, so the file is crash-safe AND byte-identical
/// across runs regardless of the worker count.
class OrderedJsonlWriter {
 public:
  explicit OrderedJsonlWriter(const std::string& path);

  /// key must eventually cover 0..total-1 exactly once.
  void submit(std::int64_t key, const nlohmann::json& record);
  void close();

 private:
  void flush_ready();

  std::ofstream out_;
  std::mutex mu_;
  std::int64_t next_ = 0;
  std::map<std::int64_t, std::string> pending_;
};

/// Rejects NaN/Inf anywhere in a record (validation error per the trial
/// record contract).
void require_finite(const nlohmann::json& record);

double quantile(std::vector<double> values, double p);

/// Runs bodies 0..count-1 on a small worker pool (worker count from the
/// BANDLAB_WORKERS environment variable, defaulting to the hardware
/// concurrency), forwarding each result to the writer in key order. Wall
/// times per body are returned indexed by key. Exceptions propagate.
std::vector<double> run_indexed(std::int64_t count,
                                const std::function<nlohmann::json(std::int64_t)>& body,
                                OrderedJsonlWriter* writer);

int worker_count();

}  // namespace bandlab::harness
