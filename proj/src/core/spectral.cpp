#include "core/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bandlab::core {

SpectralParameter::SpectralParameter(double energy_in, double eta_in)
    : energy(energy_in), eta(eta_in) {
  if (!(eta > 0.0)) throw std::invalid_argument("SpectralParameter: eta must be > 0");
}

bool RemovalSet::contains(double energy) const {
  for (double p : points) {
    if (std::abs(energy - p) < radius) return true;
  }
  return false;
}

double RemovalSet::shift_out(double energy) const {
  if (!contains(energy)) return energy;
  // Merge overlapping intervals, then snap to the nearest boundary.
  std::vector<std::pair<double, double>> merged;
  for (double p : points) {
    const double lo = p - radius, hi = p + radius;
    if (!merged.empty() && lo <= merged.back().second) {
      merged.back().second = std::max(merged.back().second, hi);
    } else {
      merged.emplace_back(lo, hi);
    }
  }
  for (const auto& [lo, hi] : merged) {
    if (energy > lo && energy < hi) {
      return (energy - lo <= hi - energy) ? lo : hi;
    }
  }
  return energy;
}

RemovalSet removal_set(int bandwidth, int radius_exponent) {
  if (bandwidth < 0) throw std::invalid_argument("removal_set: K must be >= 0");
  if (radius_exponent < 1) throw std::invalid_argument("removal_set: p must be >= 1");
  RemovalSet out;
  out.radius = std::pow(10.0, -radius_exponent);
  for (int l = 2; l <= bandwidth; ++l) {
    for (int m = 1; m < l; ++m) {
      out.points.push_back(2.0 * std::cos(m * M_PI / l));
    }
  }
  std::sort(out.points.begin(), out.points.end());
  auto last = std::unique(out.points.begin(), out.points.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-12; });
  out.points.erase(last, out.points.end());
  return out;
}

double SpectralDomain::eta_floor(std::int64_t n) const {
  double expo = -1.0 + epsilon;
  if (sigma > 0.0) {
    expo += (mode == EtaFloorMode::kEntrywise ? 2.0 : 1.0) * sigma * alpha;
  }
  return std::pow(static_cast<double>(n), expo);
}

void SpectralDomain::validate() const {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("SpectralDomain: epsilon must be in (0,1)");
  if (!(kappa > 0.0 && kappa < 2.0))
    throw std::invalid_argument("SpectralDomain: kappa must be in (0,2)");
  if (sigma < 0.0) throw std::invalid_argument("SpectralDomain: sigma must be >= 0");
  if (bandwidth < 0) throw std::invalid_argument("SpectralDomain: K must be >= 0");
  if (removal_exponent < 1) throw std::invalid_argument("SpectralDomain: p must be >= 1");
}

std::vector<SpectralParameter> domain_mesh(const SpectralDomain& domain, std::int64_t n,
                                           int n_energy, int n_eta) {
  domain.validate();
  if (n_energy < 1 || n_eta < 1) throw std::invalid_argument("domain_mesh: nE, nEta must be >= 1");
  const double floor = domain.eta_floor(n);
  if (floor >= 1.0) {
    throw std::invalid_argument("domain_mesh: eta floor >= 1; N too small for requested exponents");
  }

  const RemovalSet removal = removal_set(domain.bandwidth, domain.removal_exponent);
  const double lo = -2.0 + domain.kappa, hi = 2.0 - domain.kappa;
  std::vector<double> energies;
  for (int i = 0; i < n_energy; ++i) {
    double e = (n_energy == 1) ? lo : lo + (hi - lo) * i / (n_energy - 1.0);
    e = removal.shift_out(e);
    energies.push_back(e);
  }
  std::sort(energies.begin(), energies.end());
  auto last = std::unique(energies.begin(), energies.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-12; });
  energies.erase(last, energies.end());

  std::vector<double> etas;
  for (int j = 0; j < n_eta; ++j) {
    const double t = (n_eta == 1) ? 0.0 : static_cast<double>(j) / (n_eta - 1.0);
    etas.push_back(std::pow(floor, 1.0 - t));  // geometric from floor to 1
  }

  std::vector<SpectralParameter> mesh;
  mesh.reserve(energies.size() * etas.size());
  for (double e : energies) {
    for (double eta : etas) mesh.emplace_back(e, eta);
  }
  return mesh;
}

}  // namespace bandlab::core
