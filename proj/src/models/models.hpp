#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "core/banded_matrix.hpp"
#include "core/spectral.hpp"

namespace bandlab::models {

using Complex = std::complex<double>;

/// 1d discrete Laplacian: zero diagonal, ones on the first off-diagonal.
core::BandedSymmetricMatrix laplacian_1d(std::int64_t n);

/// Deterministic limit matrix of the beta-ensemble tridiagonal model:
/// zero diagonal, entry (k, k+1) = 2*sqrt((n-k)/n) for 1-based k.
core::BandedSymmetricMatrix beta_limit_matrix(std::int64_t n);

/// Dense symmetric matrix, full row-major storage.
class DenseSymmetricMatrix {
 public:
  explicit DenseSymmetricMatrix(std::int64_t n);
  std::int64_t dim() const { return n_; }
  double get(std::int64_t i, std::int64_t j) const { return a_[i * n_ + j]; }
  void set(std::int64_t i, std::int64_t j, double v) {
    a_[i * n_ + j] = v;
    a_[j * n_ + i] = v;
  }
  const std::vector<double>& data() const { return a_; }
  std::vector<double>& data() { return a_; }

 private:
  std::int64_t n_;
  std::vector<double> a_;
};

/// Wigner matrix: independent centered Gaussians with variance 1/n.
/// The diagonal uses variance 1/n as well unless goe_diagonal is set
/// (then 2/n). Deterministic for a fixed seed.
DenseSymmetricMatrix wigner(std::int64_t n, std::uint64_t seed, bool goe_diagonal = false);

/// Closed-form resolvent of the 1d Laplacian at a fixed z, evaluated through
/// lambda = arccos(z/2). All sin/cos of m*lambda are kept in factored
/// exponential form (the dominant e^{m |Im lambda|} factors cancel between
/// numerator and denominator analytically), so entries are finite for any
/// N*eta instead of overflowing near N*eta ~ 700.
class ClosedFormContext {
 public:
  /// Throws std::domain_error when |sin lambda| < 1e-14 (z within machine
  /// precision of the band edges +-2).
  ClosedFormContext(std::int64_t n, Complex z);

  std::int64_t dim() const { return n_; }
  Complex z() const { return z_; }
  Complex lambda() const { return lambda_; }

  /// G^inf_{ij}(z), 0-based indices.
  Complex entry(std::int64_t i, std::int64_t j) const;
  Complex diagonal(std::int64_t j) const { return entry(j, j); }

  /// m^inf(z): plain average of the n closed-form diagonal entries.
  Complex trace_mean() const;

 private:
  std::int64_t n_;
  Complex z_;
  Complex lambda_;  // principal branch normalized to Im lambda <= 0
  Complex denom_;   // 2 sin(lambda) * sin((n+1) lambda) * e^{-(n+1) beta}
  double a_ = 0.0;  // Re lambda
  double beta_ = 0.0;  // -Im lambda >= 0
  std::vector<Complex> scaled_cos_;  // cos(m lambda) e^{-m beta}, m = 0..n+1
  std::vector<double> decay_;        // e^{(m - (n+1)) beta},      m = 0..n+1
};

/// Convenience single-entry evaluation (0-based i, j).
Complex green_closed_form(std::int64_t n, Complex z, std::int64_t i, std::int64_t j);
Complex green_closed_form(std::int64_t n, const core::SpectralParameter& z, std::int64_t i,
                          std::int64_t j);

/// Stieltjes transform of the arcsine law, branch with Im m > 0:
/// m(z) = 1 / (2 sqrt(z^2/4 - 1)).
Complex stieltjes_arcsine(Complex z);
inline Complex stieltjes_arcsine(const core::SpectralParameter& z) {
  return stieltjes_arcsine(z.z());
}

/// Stieltjes transform of the semicircle law, branch with Im m > 0:
/// m(z) = (-z + sqrt(z^2 - 4)) / 2, satisfying m = 1/(-z - m).
Complex stieltjes_semicircle(Complex z);
inline Complex stieltjes_semicircle(const core::SpectralParameter& z) {
  return stieltjes_semicircle(z.z());
}

/// Classical locations of the arcsine law: gamma_i = 2 sin(pi (i - 1/2) / n)
/// for i = 1..n/2 (n even; negative side by symmetry).
std::vector<double> classical_locations(std::int64_t n);

/// Stable evaluation of cos((n+1-K) lambda) / cos((n+1) lambda); approximates
/// the bulk ratio G^inf_{i,i+K} / G^inf_{ii} up to an exponentially small
/// error. Equals cos(K lambda) + tan((n+1) lambda) sin(K lambda).
Complex offdiag_imag_ratio(Complex z, std::int64_t n, int k);

}  // namespace bandlab::models
