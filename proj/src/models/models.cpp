#include "models/models.hpp"

#include <cmath>
#include <stdexcept>

#include "noise/rng.hpp"

namespace bandlab::models {

core::BandedSymmetricMatrix laplacian_1d(std::int64_t n) {
  if (n < 1) throw std::invalid_argument("laplacian_1d: n must be >= 1");
  core::BandedSymmetricMatrix m(n, n >= 2 ? 1 : 0);
  if (n >= 2) {
    auto off = m.band(1);
    for (auto& v : off) v = 1.0;
  }
  return m;
}

core::BandedSymmetricMatrix beta_limit_matrix(std::int64_t n) {
  if (n < 1) throw std::invalid_argument("beta_limit_matrix: n must be >= 1");
  core::BandedSymmetricMatrix m(n, n >= 2 ? 1 : 0);
  if (n >= 2) {
    auto off = m.band(1);
    for (std::int64_t k = 0; k + 1 < n; ++k) {
      off[k] = 2.0 * std::sqrt(static_cast<double>(n - 1 - k) / static_cast<double>(n));
    }
  }
  return m;
}

DenseSymmetricMatrix::DenseSymmetricMatrix(std::int64_t n) : n_(n) {
  if (n < 1) throw std::invalid_argument("DenseSymmetricMatrix: n must be >= 1");
  a_.assign(static_cast<std::size_t>(n) * n, 0.0);
}

DenseSymmetricMatrix wigner(std::int64_t n, std::uint64_t seed, bool goe_diagonal) {
  DenseSymmetricMatrix w(n);
  const double off_sd = std::sqrt(1.0 / static_cast<double>(n));
  const double diag_sd = goe_diagonal ? std::sqrt(2.0 / static_cast<double>(n)) : off_sd;
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t j = i; j < n; ++j) {
      const std::uint64_t entry = static_cast<std::uint64_t>(i) * n + j;
      noise::SplitMix64 s(noise::mix64(seed ^ noise::mix64(entry)));
      const double g = noise::standard_normal(s);
      w.set(i, j, (i == j ? diag_sd : off_sd) * g);
    }
  }
  return w;
}

ClosedFormContext::ClosedFormContext(std::int64_t n, Complex z) : n_(n), z_(z) {
  if (n < 1) throw std::invalid_argument("ClosedFormContext: n must be >= 1");
  lambda_ = std::acos(z / 2.0);
  // The expression is even in lambda; normalize to Im lambda <= 0 so that
  // e^{i m lambda} carries the growing exponential.
  if (lambda_.imag() > 0.0) lambda_ = -lambda_;
  const Complex sin_lambda = std::sin(lambda_);
  if (std::abs(sin_lambda) < 1e-14) {
    throw std::domain_error("green_closed_form: z within machine precision of +-2");
  }
  a_ = lambda_.real();
  beta_ = -lambda_.imag();

  const std::size_t len = static_cast<std::size_t>(n_) + 2;
  scaled_cos_.resize(len);
  decay_.resize(len);
  for (std::size_t m = 0; m < len; ++m) {
    const Complex fwd = std::polar(1.0, a_ * static_cast<double>(m));
    const double damp = std::exp(-2.0 * beta_ * static_cast<double>(m));
    scaled_cos_[m] = 0.5 * (fwd + damp * std::conj(fwd));
    decay_[m] = std::exp((static_cast<double>(m) - static_cast<double>(n_ + 1)) * beta_);
  }
  // sin((n+1) lambda) e^{-(n+1) beta}
  const Complex fwd = std::polar(1.0, a_ * static_cast<double>(n_ + 1));
  const double damp = std::exp(-2.0 * beta_ * static_cast<double>(n_ + 1));
  const Complex scaled_sin = (fwd - damp * std::conj(fwd)) / Complex(0.0, 2.0);
  denom_ = 2.0 * sin_lambda * scaled_sin;
  if (std::abs(denom_) < 1e-300) {
    throw std::domain_error("green_closed_form: degenerate denominator (z too close to spectrum)");
  }
}

Complex ClosedFormContext::entry(std::int64_t i, std::int64_t j) const {
  if (i < 0 || j < 0 || i >= n_ || j >= n_) throw std::out_of_range("closed form entry: index");
  const std::int64_t i1 = i + 1, j1 = j + 1;  // the recursion is 1-based
  const std::size_t p = static_cast<std::size_t>(n_ + 1 - std::llabs(i1 - j1));
  const std::size_t q = static_cast<std::size_t>(std::llabs(n_ + 1 - i1 - j1));
  return (scaled_cos_[p] * decay_[p] - scaled_cos_[q] * decay_[q]) / denom_;
}

Complex ClosedFormContext::trace_mean() const {
  Complex sum = 0.0;
  for (std::int64_t j = 0; j < n_; ++j) sum += diagonal(j);
  return sum / static_cast<double>(n_);
}

Complex green_closed_form(std::int64_t n, Complex z, std::int64_t i, std::int64_t j) {
  return ClosedFormContext(n, z).entry(i, j);
}

Complex green_closed_form(std::int64_t n, const core::SpectralParameter& z, std::int64_t i,
                          std::int64_t j) {
  return green_closed_form(n, z.z(), i, j);
}

Complex stieltjes_arcsine(Complex z) {
  Complex w = std::sqrt(z * z / 4.0 - 1.0);
  if (w.imag() > 0.0) w = -w;  // Herglotz branch: Im m > 0 for Im z > 0
  return 1.0 / (2.0 * w);
}

Complex stieltjes_semicircle(Complex z) {
  const Complex w = std::sqrt(z * z - 4.0);
  Complex m = (-z + w) / 2.0;
  if (m.imag() <= 0.0) m = (-z - w) / 2.0;
  return m;
}

std::vector<double> classical_locations(std::int64_t n) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("classical_locations: n must be even");
  std::vector<double> gamma(static_cast<std::size_t>(n / 2));
  for (std::int64_t i = 1; i <= n / 2; ++i) {
    gamma[static_cast<std::size_t>(i - 1)] =
        2.0 * std::sin(M_PI * (static_cast<double>(i) - 0.5) / static_cast<double>(n));
  }
  return gamma;
}

Complex offdiag_imag_ratio(Complex z, std::int64_t n, int k) {
  if (k < 0) throw std::invalid_argument("offdiag_imag_ratio: K must be >= 0");
  if (k == 0) return 1.0;
  Complex lambda = std::acos(z / 2.0);
  if (lambda.imag() > 0.0) lambda = -lambda;
  // tan((n+1) lambda) = -i (1 - v)/(1 + v) with v = e^{-2 i (n+1) lambda};
  // |v| = e^{-2 (n+1) |Im lambda|} <= 1, so the quotient is well conditioned.
  const double a = lambda.real(), beta = -lambda.imag();
  const Complex v = std::exp(-2.0 * (n + 1) * beta) *
                    std::polar(1.0, -2.0 * a * static_cast<double>(n + 1));
  const Complex tan_big = Complex(0.0, -1.0) * (1.0 - v) / (1.0 + v);
  return std::cos(static_cast<double>(k) * lambda) +
         tan_big * std::sin(static_cast<double>(k) * lambda);
}

}  // namespace bandlab::models
