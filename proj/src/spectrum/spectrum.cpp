#include "spectrum/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "noise/rng.hpp"
#include "resolvent/band_lu.hpp"
#include "resolvent/resolvent.hpp"

namespace bandlab::spectrum {

namespace {

double vector_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::vector<double> band_mul(const core::BandedSymmetricMatrix& h,
                             std::span<const double> x) {
  const std::int64_t n = h.dim();
  std::vector<double> y(static_cast<std::size_t>(n), 0.0);
  for (int d = 0; d <= h.bandwidth(); ++d) {
    auto band = h.band(d);
    for (std::int64_t i = 0; i + d < n; ++i) {
      const double v = band[static_cast<std::size_t>(i)];
      if (v == 0.0) continue;
      y[static_cast<std::size_t>(i)] += v * x[static_cast<std::size_t>(i + d)];
      if (d > 0) y[static_cast<std::size_t>(i + d)] += v * x[static_cast<std::size_t>(i)];
    }
  }
  return y;
}

resolvent::BandLU<double> shifted_real_factor(const core::BandedSymmetricMatrix& h,
                                              double shift) {
  const int k = h.bandwidth();
  resolvent::BandLU<double> lu(h.dim(), k, k);
  for (int d = 0; d <= k; ++d) {
    auto band = h.band(d);
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(band.size()); ++i) {
      lu.at(i, i + d) = band[static_cast<std::size_t>(i)];
      if (d > 0) lu.at(i + d, i) = band[static_cast<std::size_t>(i)];
    }
  }
  for (std::int64_t i = 0; i < h.dim(); ++i) lu.at(i, i) -= shift;
  lu.factorize();
  return lu;
}

void fill_random_unit(std::vector<double>& v, std::uint64_t seed) {
  noise::SplitMix64 rng(seed);
  for (double& x : v) x = 2.0 * rng.uniform01() - 1.0;
  const double nrm = vector_norm(v);
  for (double& x : v) x /= nrm;
}

std::uint64_t lambda_bits(double lambda) {
  std::uint64_t b = 0;
  std::memcpy(&b, &lambda, sizeof(b));
  return b;
}

}  // namespace

std::vector<double> eigenvector(const core::BandedSymmetricMatrix& h, double lambda) {
  const std::int64_t n = h.dim();
  const double scale = std::max(1.0, h.inf_norm());
  const double jitter = 1e-12 * std::max(1.0, std::abs(lambda));
  const double tol = 1e-8 * scale;

  const auto lu = shifted_real_factor(h, lambda + jitter);
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int restart = 0; restart < 3; ++restart) {
    fill_random_unit(v, noise::mix64(0x5EEDF00DULL ^ lambda_bits(lambda)) +
                            static_cast<std::uint64_t>(restart));
    double prev_residual = 1e300;
    for (int iter = 0; iter < 5; ++iter) {
      lu.solve_in_place(v, 0);
      const double nrm = vector_norm(v);
      if (!(nrm > 0.0) || !std::isfinite(nrm)) break;
      for (double& x : v) x /= nrm;
      const auto hv = band_mul(h, v);
      double res = 0.0;
      for (std::int64_t i = 0; i < n; ++i) {
        const double r = hv[static_cast<std::size_t>(i)] - lambda * v[static_cast<std::size_t>(i)];
        res += r * r;
      }
      res = std::sqrt(res);
      if (res <= tol) return v;
      if (res >= 0.5 * prev_residual && iter >= 2) break;  // stagnated
      prev_residual = res;
    }
  }
  throw std::runtime_error("eigenvector: inverse iteration failed to converge");
}

std::vector<std::vector<double>> eigenvector_cluster(const core::BandedSymmetricMatrix& h,
                                                     std::span<const double> lambdas) {
  if (lambdas.empty()) return {};
  const std::int64_t n = h.dim();
  const std::size_t m = lambdas.size();
  double center = 0.0;
  for (double l : lambdas) center += l;
  center /= static_cast<double>(m);
  const auto lu = shifted_real_factor(h, center + 1e-12 * std::max(1.0, std::abs(center)));

  std::vector<std::vector<double>> basis(m, std::vector<double>(static_cast<std::size_t>(n)));
  for (std::size_t c = 0; c < m; ++c) {
    fill_random_unit(basis[c], noise::mix64(0xC1B5E7E2ULL ^ lambda_bits(center)) + c);
  }
  for (int iter = 0; iter < 4; ++iter) {
    for (auto& col : basis) lu.solve_in_place(col, 0);
    // modified Gram-Schmidt
    for (std::size_t c = 0; c < m; ++c) {
      for (std::size_t p = 0; p < c; ++p) {
        double dot = 0.0;
        for (std::int64_t i = 0; i < n; ++i) {
          dot += basis[c][static_cast<std::size_t>(i)] * basis[p][static_cast<std::size_t>(i)];
        }
        for (std::int64_t i = 0; i < n; ++i) {
          basis[c][static_cast<std::size_t>(i)] -= dot * basis[p][static_cast<std::size_t>(i)];
        }
      }
      const double nrm = vector_norm(basis[c]);
      for (double& x : basis[c]) x /= nrm;
    }
  }
  return basis;
}

WegnerResult wegner_check(const core::BandedSymmetricMatrix& h, const Tridiagonal& t,
                          const core::SpectralParameter& z) {
  WegnerResult out;
  const double a = z.energy - z.eta / 2.0, b = z.energy + z.eta / 2.0;
  out.count = eigen_count(t, a, b);
  const auto m = resolvent::stieltjes_trace(h, z);
  out.bound = 1.25 * static_cast<double>(h.dim()) * z.eta * m.imag();
  out.holds = static_cast<double>(out.count) <= out.bound;
  out.ratio = out.bound > 0.0 ? static_cast<double>(out.count) / out.bound : 0.0;
  return out;
}

WegnerResult wegner_check(const core::BandedSymmetricMatrix& h, const core::SpectralParameter& z) {
  return wegner_check(h, reduce_to_tridiagonal(h), z);
}

double rigidity_report(std::span<const double> eigs_sorted, std::int64_t n, double kappa,
                       RigidityDetail* detail) {
  const auto gamma = models::classical_locations(n);
  std::vector<double> positive, negative;
  for (double l : eigs_sorted) {
    if (l >= 0.0) {
      positive.push_back(l);
    } else {
      negative.push_back(-l);
    }
  }
  std::sort(positive.begin(), positive.end());
  std::sort(negative.begin(), negative.end());

  RigidityDetail local;
  double dev = 0.0;
  const auto run = [&](const std::vector<double>& side, std::int64_t& used) {
    for (std::size_t i = 0; i < side.size(); ++i) {
      if (side[i] > 2.0 - kappa) break;
      if (i >= gamma.size()) {
        local.mismatched_counts = true;
        break;
      }
      dev = std::max(dev, std::abs(side[i] - gamma[i]));
      ++used;
    }
  };
  run(positive, local.positive_used);
  run(negative, local.negative_used);
  if (detail) *detail = local;
  return dev;
}

DelocalizationResult delocalization_report(const core::BandedSymmetricMatrix& h, double kappa,
                                           const core::RemovalSet& removal, double eta,
                                           std::uint64_t check_seed) {
  const std::int64_t n = h.dim();
  const Tridiagonal t = reduce_to_tridiagonal(h);
  const auto eigs = eigenvalues_bisection(t, std::make_pair(-2.0 + kappa, 2.0 - kappa));

  DelocalizationResult out;
  noise::SplitMix64 pick(noise::mix64(check_seed ^ 0xDE10CA11ULL));

  std::size_t idx = 0;
  while (idx < eigs.size()) {
    // group near-degenerate eigenvalues (gap < 1e-10) into one cluster
    std::size_t end = idx + 1;
    while (end < eigs.size() && eigs[end] - eigs[end - 1] < 1e-10) ++end;

    std::vector<std::vector<double>> vectors;
    if (removal.contains(eigs[idx])) {
      idx = end;
      continue;
    }
    try {
      if (end - idx == 1) {
        vectors.push_back(eigenvector(h, eigs[idx]));
      } else {
        vectors = eigenvector_cluster(
            h, std::span<const double>(eigs.data() + idx, end - idx));
      }
    } catch (const std::runtime_error&) {
      out.failures += static_cast<std::int64_t>(end - idx);
      idx = end;
      continue;
    }

    for (const auto& v : vectors) {
      double vinf = 0.0;
      std::int64_t peak = 0;
      for (std::int64_t i = 0; i < n; ++i) {
        const double a = std::abs(v[static_cast<std::size_t>(i)]);
        if (a > vinf) {
          vinf = a;
          peak = i;
        }
      }
      out.max_inf_norm = std::max(out.max_inf_norm, vinf);
      ++out.vectors_computed;

      // Green route must dominate: ||v||_inf^2 <= eta * max_k Im G_kk at
      // z = lambda + i eta, with the peak coordinate among the probed k.
      const core::SpectralParameter z(eigs[idx], eta);
      resolvent::ShiftedBandFactorization fact(h, z.z());
      double max_im = 0.0;
      std::vector<std::int64_t> ks{peak};
      for (int s = 0; s < 10; ++s) {
        ks.push_back(static_cast<std::int64_t>(pick.next() % static_cast<std::uint64_t>(n)));
      }
      for (std::int64_t k : ks) {
        max_im = std::max(max_im, fact.green_column(k)[static_cast<std::size_t>(k)].imag());
      }
      const double margin = vinf * vinf - eta * max_im;
      out.worst_green_margin = std::max(out.worst_green_margin, margin);
      if (margin > 1e-12) out.green_bound_holds = false;
    }
    idx = end;
  }
  return out;
}

double empirical_vs_arcsine(std::span<const double> eigs_sorted, std::int64_t n, double kappa) {
  const double lo = -2.0 + kappa, hi = 2.0 - kappa;
  const double step = std::pow(2.0, -10);
  const auto cdf = [](double x) { return 0.5 + std::asin(x / 2.0) / M_PI; };
  const auto count_leq = [&](double x) {
    return static_cast<double>(std::upper_bound(eigs_sorted.begin(), eigs_sorted.end(), x) -
                               eigs_sorted.begin());
  };
  const auto count_lt = [&](double x) {
    return static_cast<double>(std::lower_bound(eigs_sorted.begin(), eigs_sorted.end(), x) -
                               eigs_sorted.begin());
  };

  // Exact sup over grid-endpoint closed intervals [a, b], a <= b, of
  // |mu - rho|: a one-pass scan over D+(b) - min D-(a) and max D-(a) - D+(b).
  double best = 0.0;
  double min_dm = 1e300, max_dm = -1e300;
  const double inv_n = 1.0 / static_cast<double>(n);
  for (double x = lo; x <= hi + 0.5 * step; x += step) {
    const double g = std::min(x, hi);
    const double c = cdf(g);
    const double dp = count_leq(g) * inv_n - c;
    const double dm = count_lt(g) * inv_n - c;
    min_dm = std::min(min_dm, dm);
    max_dm = std::max(max_dm, dm);
    best = std::max(best, std::max(dp - min_dm, max_dm - dp));
  }
  return best;
}

void SpectralDecomposition::write_eigenvalues_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "index,eigenvalue\n";
  out.precision(17);
  for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
    out << i << "," << eigenvalues[i] << "\n";
  }
}

std::int64_t SpectralDecomposition::write_eigenvectors_binary(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  std::int64_t bytes = 0;
  for (const auto& [idx, vec] : eigenvectors) {
    out.write(reinterpret_cast<const char*>(vec.data()),
              static_cast<std::streamsize>(vec.size() * sizeof(double)));
    bytes += static_cast<std::int64_t>(vec.size() * sizeof(double));
  }
  return bytes;
}

}  // namespace bandlab::spectrum
