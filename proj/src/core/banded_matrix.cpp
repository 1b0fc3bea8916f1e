#include "core/banded_matrix.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace bandlab::core {

BandedSymmetricMatrix::BandedSymmetricMatrix(std::int64_t n, int bandwidth)
    : n_(n), k_(bandwidth) {
  if (n < 1) throw std::invalid_argument("BandedSymmetricMatrix: n must be >= 1");
  if (bandwidth < 0) throw std::invalid_argument("BandedSymmetricMatrix: bandwidth must be >= 0");
  bands_.resize(static_cast<std::size_t>(k_) + 1);
  for (int d = 0; d <= k_; ++d) {
    bands_[d].assign(static_cast<std::size_t>(std::max<std::int64_t>(n_ - d, 0)), 0.0);
  }
}

double BandedSymmetricMatrix::get(std::int64_t i, std::int64_t j) const {
  if (i < 0 || j < 0 || i >= n_ || j >= n_) throw std::out_of_range("banded get: index");
  const std::int64_t d = std::llabs(i - j);
  if (d > k_) return 0.0;
  return bands_[static_cast<std::size_t>(d)][static_cast<std::size_t>(std::min(i, j))];
}

void BandedSymmetricMatrix::set(std::int64_t i, std::int64_t j, double v) {
  if (i < 0 || j < 0 || i >= n_ || j >= n_) throw std::out_of_range("banded set: index");
  const std::int64_t d = std::llabs(i - j);
  if (d > k_) throw std::out_of_range("banded set: entry outside band");
  bands_[static_cast<std::size_t>(d)][static_cast<std::size_t>(std::min(i, j))] = v;
}

double BandedSymmetricMatrix::trace() const {
  double t = 0.0;
  for (double v : bands_[0]) t += v;
  return t;
}

double BandedSymmetricMatrix::inf_norm() const {
  double worst = 0.0;
  for (std::int64_t i = 0; i < n_; ++i) {
    double row = 0.0;
    for (std::int64_t j = std::max<std::int64_t>(0, i - k_);
         j <= std::min<std::int64_t>(n_ - 1, i + k_); ++j) {
      row += std::abs(get(i, j));
    }
    worst = std::max(worst, row);
  }
  return worst;
}

BandedSymmetricMatrix add(const BandedSymmetricMatrix& a, const BandedSymmetricMatrix& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("add: dimension mismatch");
  BandedSymmetricMatrix out(a.dim(), std::max(a.bandwidth(), b.bandwidth()));
  for (int d = 0; d <= out.bandwidth(); ++d) {
    auto dst = out.band(d);
    if (d <= a.bandwidth()) {
      auto sa = a.band(d);
      for (std::size_t i = 0; i < sa.size(); ++i) dst[i] += sa[i];
    }
    if (d <= b.bandwidth()) {
      auto sb = b.band(d);
      for (std::size_t i = 0; i < sb.size(); ++i) dst[i] += sb[i];
    }
  }
  return out;
}

}  // namespace bandlab::core
