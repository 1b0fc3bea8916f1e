#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace bandlab::core {

/// Spectral parameter z = E + i*eta with eta > 0.
struct SpectralParameter {
  double energy = 0.0;
  double eta = 0.0;

  SpectralParameter() = default;
  SpectralParameter(double energy_in, double eta_in);

  std::complex<double> z() const { return {energy, eta}; }
};

/// Union of open intervals (point - radius, point + radius) around the
/// energies where sin(l * arccos(E/2)) vanishes for some l = 2..K.
struct RemovalSet {
  std::vector<double> points;  // sorted, symmetric about 0
  double radius = 0.0;

  bool empty() const { return points.empty(); }
  bool contains(double energy) const;

  /// Shifts an energy inside a removed interval to the nearest interval
  /// boundary (handles overlapping intervals); identity otherwise.
  double shift_out(double energy) const;
};

/// Closed-form removal set: for each l = 2..K the interior roots are
/// E = 2 cos(m pi / l), m = 1..l-1. Radius is 10^-p.
RemovalSet removal_set(int bandwidth, int radius_exponent);

enum class EtaFloorMode {
  kEntrywise,  // floor N^(-1 + 2*sigma*alpha + eps)
  kTrace,      // floor N^(-1 + sigma*alpha + eps)
};

/// The spectral windows S(eps, kappa), S(eps, kappa, sigma) and their
/// removal-set variants. sigma = 0 recovers the unscaled model, in which case
/// the eta floor is N^(-1+eps) for either mode.
struct SpectralDomain {
  double epsilon = 0.4;
  double kappa = 0.5;
  double sigma = 0.0;
  double alpha = 1.0;      // tail exponent entering the floor through sigma*alpha
  int bandwidth = 0;       // K, used for the removal set
  int removal_exponent = 3;  // p
  EtaFloorMode mode = EtaFloorMode::kTrace;

  double eta_floor(std::int64_t n) const;
  void validate() const;
};

/// nE energies uniformly spaced on [-2+kappa, 2-kappa] (points inside removed
/// intervals shifted to the nearest boundary, then deduplicated) crossed with
/// nEta etas geometrically spaced from eta_floor(n) to 1. Deterministic.
/// Throws when eta_floor(n) >= 1 (n too small for the requested exponents).
std::vector<SpectralParameter> domain_mesh(const SpectralDomain& domain, std::int64_t n,
                                           int n_energy, int n_eta);

}  // namespace bandlab::core
