#pragma once

#include <cmath>
#include <cstdint>

namespace bandlab::noise {

/// SplitMix64 finalizer; the mixing primitive of the reproducibility contract.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Wire contract for substreams: the stream that samples entry `entry` in
/// trial `trial` of a run with master seed `master` starts from
///   mix64(mix64(mix64(master) ^ trial) ^ entry).
inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t trial,
                                    std::uint64_t entry) {
  return mix64(mix64(mix64(master) ^ trial) ^ entry);
}

inline std::uint64_t trial_seed(std::uint64_t master, std::uint64_t trial) {
  return mix64(mix64(master) ^ trial);
}

/// SplitMix64 generator.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform on the open interval (0, 1); safe under log() and pow(-1/alpha).
  double uniform01() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

/// Box-Muller; consumes exactly two uniforms.
inline double standard_normal(SplitMix64& rng) {
  const double u1 = rng.uniform01();
  const double u2 = rng.uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace bandlab::noise
