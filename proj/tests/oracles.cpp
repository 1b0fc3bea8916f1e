#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oracles {

std::vector<Complex> dense_solve(std::vector<Complex> m, std::vector<Complex> b, std::int64_t n) {
  for (std::int64_t k = 0; k < n; ++k) {
    std::int64_t p = k;
    double best = std::abs(m[static_cast<std::size_t>(k) * n + k]);
    for (std::int64_t i = k + 1; i < n; ++i) {
      const double v = std::abs(m[static_cast<std::size_t>(i) * n + k]);
      if (v > best) {
        best = v;
        p = i;
      }
    }
    if (best == 0.0) throw std::runtime_error("dense_solve: singular");
    if (p != k) {
      for (std::int64_t j = 0; j < n; ++j) {
        std::swap(m[static_cast<std::size_t>(k) * n + j], m[static_cast<std::size_t>(p) * n + j]);
      }
      std::swap(b[static_cast<std::size_t>(k)], b[static_cast<std::size_t>(p)]);
    }
    for (std::int64_t i = k + 1; i < n; ++i) {
      const Complex mult = m[static_cast<std::size_t>(i) * n + k] / m[static_cast<std::size_t>(k) * n + k];
      if (mult == Complex(0.0)) continue;
      for (std::int64_t j = k; j < n; ++j) {
        m[static_cast<std::size_t>(i) * n + j] -= mult * m[static_cast<std::size_t>(k) * n + j];
      }
      b[static_cast<std::size_t>(i)] -= mult * b[static_cast<std::size_t>(k)];
    }
  }
  for (std::int64_t i = n - 1; i >= 0; --i) {
    Complex s = b[static_cast<std::size_t>(i)];
    for (std::int64_t j = i + 1; j < n; ++j) {
      s -= m[static_cast<std::size_t>(i) * n + j] * b[static_cast<std::size_t>(j)];
    }
    b[static_cast<std::size_t>(i)] = s / m[static_cast<std::size_t>(i) * n + i];
  }
  return b;
}

std::vector<Complex> dense_resolvent(const bandlab::core::BandedSymmetricMatrix& h, Complex z) {
  const std::int64_t n = h.dim();
  std::vector<Complex> base(static_cast<std::size_t>(n) * n, Complex(0.0));
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t j = std::max<std::int64_t>(0, i - h.bandwidth());
         j <= std::min<std::int64_t>(n - 1, i + h.bandwidth()); ++j) {
      base[static_cast<std::size_t>(i) * n + j] = h.get(i, j);
    }
    base[static_cast<std::size_t>(i) * n + i] -= z;
  }
  std::vector<Complex> out(static_cast<std::size_t>(n) * n);
  for (std::int64_t c = 0; c < n; ++c) {
    std::vector<Complex> e(static_cast<std::size_t>(n), Complex(0.0));
    e[static_cast<std::size_t>(c)] = 1.0;
    const auto col = dense_solve(base, std::move(e), n);
    for (std::int64_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i) * n + c] = col[static_cast<std::size_t>(i)];
  }
  return out;
}

namespace {

std::vector<double> jacobi_dense(std::vector<double> a, std::int64_t n) {
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
      for (std::int64_t j = i + 1; j < n; ++j) {
        off += a[static_cast<std::size_t>(i) * n + j] * a[static_cast<std::size_t>(i) * n + j];
      }
    }
    if (off < 1e-28) break;
    for (std::int64_t p = 0; p < n; ++p) {
      for (std::int64_t q = p + 1; q < n; ++q) {
        const double apq = a[static_cast<std::size_t>(p) * n + q];
        if (std::abs(apq) < 1e-300) continue;
        const double app = a[static_cast<std::size_t>(p) * n + p];
        const double aqq = a[static_cast<std::size_t>(q) * n + q];
        const double theta = 0.5 * (aqq - app) / apq;
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::int64_t k = 0; k < n; ++k) {
          const double akp = a[static_cast<std::size_t>(k) * n + p];
          const double akq = a[static_cast<std::size_t>(k) * n + q];
          a[static_cast<std::size_t>(k) * n + p] = c * akp - s * akq;
          a[static_cast<std::size_t>(k) * n + q] = s * akp + c * akq;
        }
        for (std::int64_t k = 0; k < n; ++k) {
          const double apk = a[static_cast<std::size_t>(p) * n + k];
          const double aqk = a[static_cast<std::size_t>(q) * n + k];
          a[static_cast<std::size_t>(p) * n + k] = c * apk - s * aqk;
          a[static_cast<std::size_t>(q) * n + k] = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> eigs(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) eigs[static_cast<std::size_t>(i)] = a[static_cast<std::size_t>(i) * n + i];
  std::sort(eigs.begin(), eigs.end());
  return eigs;
}

}  // namespace

std::vector<double> jacobi_eigenvalues(const bandlab::models::DenseSymmetricMatrix& m) {
  return jacobi_dense(m.data(), m.dim());
}

std::vector<double> jacobi_eigenvalues(const bandlab::core::BandedSymmetricMatrix& h) {
  const std::int64_t n = h.dim();
  std::vector<double> a(static_cast<std::size_t>(n) * n, 0.0);
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t j = std::max<std::int64_t>(0, i - h.bandwidth());
         j <= std::min<std::int64_t>(n - 1, i + h.bandwidth()); ++j) {
      a[static_cast<std::size_t>(i) * n + j] = h.get(i, j);
    }
  }
  return jacobi_dense(std::move(a), n);
}

namespace {

struct GaussNodes {
  std::vector<double> x, w;  // on [-1, 1]
};

const GaussNodes& gl256() {
  static const GaussNodes nodes = [] {
    constexpr int n = 256;
    GaussNodes g;
    g.x.resize(n);
    g.w.resize(n);
    for (int i = 0; i < n; ++i) {
      // Newton iteration on P_n from the Chebyshev initial guess.
      double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      for (int iter = 0; iter < 100; ++iter) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        const double dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-15) break;
      }
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (x * p1 - p0) / (x * x - 1.0);
      g.x[static_cast<std::size_t>(i)] = x;
      g.w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return g;
  }();
  return nodes;
}

}  // namespace

// Composite rule (16 panels x 256 nodes) so poles within ~1e-2 of the contour
// still integrate to near machine precision.
double gauss_legendre(const std::function<double(double)>& f, double a, double b) {
  const auto& g = gl256();
  double sum = 0.0;
  constexpr int panels = 16;
  for (int p = 0; p < panels; ++p) {
    const double pa = a + (b - a) * p / panels;
    const double pb = a + (b - a) * (p + 1) / panels;
    const double mid = 0.5 * (pa + pb), half = 0.5 * (pb - pa);
    for (std::size_t i = 0; i < g.x.size(); ++i) sum += half * g.w[i] * f(mid + half * g.x[i]);
  }
  return sum;
}

Complex gauss_legendre_c(const std::function<Complex(double)>& f, double a, double b) {
  const auto& g = gl256();
  Complex sum = 0.0;
  constexpr int panels = 16;
  for (int p = 0; p < panels; ++p) {
    const double pa = a + (b - a) * p / panels;
    const double pb = a + (b - a) * (p + 1) / panels;
    const double mid = 0.5 * (pa + pb), half = 0.5 * (pb - pa);
    for (std::size_t i = 0; i < g.x.size(); ++i) sum += half * g.w[i] * f(mid + half * g.x[i]);
  }
  return sum;
}

Complex arcsine_stieltjes_quadrature(Complex z) {
  // rho(x) dx with x = 2 sin(theta): density becomes 1/pi on (-pi/2, pi/2).
  return gauss_legendre_c(
      [&](double theta) { return 1.0 / ((2.0 * std::sin(theta) - z) * M_PI); }, -M_PI / 2.0,
      M_PI / 2.0);
}

double arcsine_mass_quadrature(double x) {
  return gauss_legendre(
      [](double t) { return 1.0 / (2.0 * M_PI * std::sqrt(1.0 - t * t / 4.0)); }, 0.0, x);
}

double hill_tail_exponent(std::span<const double> magnitudes, double threshold) {
  double sum = 0.0;
  std::int64_t count = 0;
  for (double m : magnitudes) {
    if (m > threshold) {
      sum += std::log(m / threshold);
      ++count;
    }
  }
  if (count == 0) throw std::invalid_argument("hill estimator: no exceedances");
  return static_cast<double>(count) / sum;
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double c = cdf(samples[i]);
    worst = std::max(worst, std::abs(c - static_cast<double>(i) / n));
    worst = std::max(worst, std::abs(static_cast<double>(i + 1) / n - c));
  }
  return worst;
}

double interval_deviation_bruteforce(std::span<const double> eigs_sorted, std::int64_t n,
                                     double kappa) {
  const double lo = -2.0 + kappa, hi = 2.0 - kappa;
  const auto cdf = [](double x) { return 0.5 + std::asin(std::clamp(x / 2.0, -1.0, 1.0)) / M_PI; };
  std::vector<double> candidates{lo, hi};
  for (double l : eigs_sorted) {
    if (l < lo || l > hi) continue;
    candidates.push_back(l);
    candidates.push_back(std::nextafter(l, -4.0));
    candidates.push_back(std::nextafter(l, 4.0));
  }
  std::sort(candidates.begin(), candidates.end());
  const auto count_leq = [&](double x) {
    return static_cast<double>(std::upper_bound(eigs_sorted.begin(), eigs_sorted.end(), x) -
                               eigs_sorted.begin());
  };
  double best = 0.0;
  for (std::size_t ia = 0; ia < candidates.size(); ++ia) {
    for (std::size_t ib = ia; ib < candidates.size(); ++ib) {
      const double a = candidates[ia], b = candidates[ib];
      if (a < lo || b > hi) continue;
      const double mu = (count_leq(b) - count_leq(std::nextafter(a, -4.0))) /
                        static_cast<double>(n);
      const double rho = cdf(b) - cdf(a);
      best = std::max(best, std::abs(mu - rho));
    }
  }
  return best;
}

}  // namespace oracles
