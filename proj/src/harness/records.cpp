#include "harness/records.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

namespace bandlab::harness {

OrderedJsonlWriter::OrderedJsonlWriter(const std::string& path) : out_(path) {
  if (!out_) throw std::runtime_error("cannot open " + path);
}

void OrderedJsonlWriter::submit(std::int64_t key, const nlohmann::json& record) {
  require_finite(record);
  std::lock_guard<std::mutex> lock(mu_);
  pending_[key] = record.dump();
  flush_ready();
}

void OrderedJsonlWriter::flush_ready() {
  while (!pending_.empty() && pending_.begin()->first == next_) {
    out_ << pending_.begin()->second << "\n";
    pending_.erase(pending_.begin());
    ++next_;
  }
  out_.flush();
}

void OrderedJsonlWriter::close() {
  std::lock_guard<std::mutex> lock(mu_);
  flush_ready();
  if (!pending_.empty()) {
    throw std::runtime_error("OrderedJsonlWriter: gap in submitted keys at close");
  }
  out_.close();
}

void require_finite(const nlohmann::json& record) {
  if (record.is_number_float()) {
    const double v = record.get<double>();
    if (!std::isfinite(v)) {
      throw std::invalid_argument("trial record contains a non-finite number");
    }
    return;
  }
  if (record.is_array() || record.is_object()) {
    for (const auto& item : record) require_finite(item);
  }
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw std::invalid_argument("quantile of empty set");
  std::sort(values.begin(), values.end());
  const double pos = p * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(values.size() - 1, lo + 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] * (1.0 - frac) + values[hi] * frac;
}

int worker_count() {
  if (const char* env = std::getenv("BANDLAB_WORKERS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 2;
}

std::vector<double> run_indexed(std::int64_t count,
                                const std::function<nlohmann::json(std::int64_t)>& body,
                                OrderedJsonlWriter* writer) {
  std::vector<double> wall(static_cast<std::size_t>(count), 0.0);
  if (count == 0) return wall;
  const int workers = std::min<std::int64_t>(worker_count(), count);
  std::atomic<std::int64_t> next{0};
  std::mutex err_mu;
  std::exception_ptr first_error;

  auto work = [&]() {
    while (true) {
      const std::int64_t key = next.fetch_add(1);
      if (key >= count) return;
      {
        std::lock_guard<std::mutex> lock(err_mu);
        if (first_error) return;
      }
      try {
        const auto start = std::chrono::steady_clock::now();
        nlohmann::json rec = body(key);
        const auto stop = std::chrono::steady_clock::now();
        wall[static_cast<std::size_t>(key)] =
            std::chrono::duration<double, std::milli>(stop - start).count();
        if (writer) writer->submit(key, rec);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  return wall;
}

}  // namespace bandlab::harness
