#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace bandlab::resolvent {

/// Banded LU with partial pivoting. The input has kl sub- and ku
/// superdiagonals; pivoting fills at most kl extra superdiagonals, so U is
/// stored with kl+ku superdiagonals. Diagonal-major storage: entry (i, j)
/// with d = j - i in [-kl, kl+ku] lives at data[(d + kl) * n + i].
template <typename Scalar>
class BandLU {
 public:
  BandLU(std::int64_t n, int kl, int ku)
      : n_(n), kl_(kl), ku_(ku), width_(2 * kl + ku + 1) {
    data_.assign(static_cast<std::size_t>(width_) * n_, Scalar(0));
    piv_.assign(static_cast<std::size_t>(std::max<std::int64_t>(n_ - 1, 0)), 0);
  }

  std::int64_t dim() const { return n_; }

  Scalar& at(std::int64_t i, std::int64_t j) {
    return data_[static_cast<std::size_t>((j - i + kl_)) * n_ + i];
  }
  Scalar at(std::int64_t i, std::int64_t j) const {
    return data_[static_cast<std::size_t>((j - i + kl_)) * n_ + i];
  }

  /// Throws std::runtime_error when a pivot magnitude drops below 1e-300
  /// (unreachable for eta > 0 shifts; indicates an underflow pathology).
  void factorize() {
    for (std::int64_t k = 0; k + 1 < n_; ++k) {
      const std::int64_t last_row = std::min<std::int64_t>(k + kl_, n_ - 1);
      std::int64_t p = k;
      double best = std::abs(at(k, k));
      for (std::int64_t i = k + 1; i <= last_row; ++i) {
        const double v = std::abs(at(i, k));
        if (v > best) {
          best = v;
          p = i;
        }
      }
      if (best < 1e-300) throw std::runtime_error("band LU: numerically singular pivot");
      piv_[static_cast<std::size_t>(k)] = static_cast<std::int32_t>(p);
      const std::int64_t last_col = std::min<std::int64_t>(k + kl_ + ku_, n_ - 1);
      if (p != k) {
        for (std::int64_t j = k; j <= last_col; ++j) std::swap(at(k, j), at(p, j));
      }
      const Scalar pivot = at(k, k);
      for (std::int64_t i = k + 1; i <= last_row; ++i) {
        const Scalar m = at(i, k) / pivot;
        at(i, k) = m;
        if (m != Scalar(0)) {
          for (std::int64_t j = k + 1; j <= last_col; ++j) at(i, j) -= m * at(k, j);
        }
      }
    }
    if (std::abs(at(n_ - 1, n_ - 1)) < 1e-300) {
      throw std::runtime_error("band LU: numerically singular pivot");
    }
    inv_diag_.resize(static_cast<std::size_t>(n_));
    for (std::int64_t i = 0; i < n_; ++i) {
      inv_diag_[static_cast<std::size_t>(i)] = Scalar(1) / at(i, i);
    }
  }

  /// x_j of the solve A x = e_j: forward elimination starts at the leading
  /// nonzero and back substitution stops once row j is reached. The scratch
  /// buffer must have size n; contents are clobbered.
  Scalar diagonal_entry_of_inverse(std::span<Scalar> scratch, std::int64_t j) const {
    const Scalar* data = data_.data();
    const std::int64_t n = n_;
    std::fill(scratch.begin() + std::max<std::int64_t>(0, j - kl_), scratch.end(), Scalar(0));
    scratch[j] = Scalar(1);
    for (std::int64_t k = std::max<std::int64_t>(0, j - kl_); k + 1 < n; ++k) {
      const std::int64_t p = piv_[static_cast<std::size_t>(k)];
      if (p != k) std::swap(scratch[k], scratch[p]);
      const Scalar bk = scratch[k];
      if (bk == Scalar(0)) continue;
      const std::int64_t last_row = std::min<std::int64_t>(k + kl_, n - 1);
      for (std::int64_t i = k + 1; i <= last_row; ++i) {
        scratch[i] -= data[static_cast<std::size_t>(k - i + kl_) * n + i] * bk;
      }
    }
    const Scalar* inv = inv_diag_.data();
    const int reach = kl_ + ku_;
    for (std::int64_t i = n - 1; i >= j; --i) {
      Scalar s = scratch[i];
      const std::int64_t last_col = std::min<std::int64_t>(i + reach, n - 1);
      for (std::int64_t jj = i + 1; jj <= last_col; ++jj) {
        s -= data[static_cast<std::size_t>(jj - i + kl_) * n + i] * scratch[jj];
      }
      scratch[i] = s * inv[i];
    }
    return scratch[j];
  }

  /// Solves A x = b in place. first_nonzero is an optional hint (e.g. j for
  /// b = e_j); with partial pivoting leading zeros can only move up by kl.
  void solve_in_place(std::span<Scalar> b, std::int64_t first_nonzero = 0) const {
    const Scalar* data = data_.data();
    const std::int64_t n = n_;
    // forward elimination through L (multipliers on the kl subdiagonals)
    const std::int64_t start = std::max<std::int64_t>(0, first_nonzero - kl_);
    for (std::int64_t k = start; k + 1 < n; ++k) {
      const std::int64_t p = piv_[static_cast<std::size_t>(k)];
      if (p != k) std::swap(b[k], b[p]);
      const Scalar bk = b[k];
      if (bk == Scalar(0)) continue;
      const std::int64_t last_row = std::min<std::int64_t>(k + kl_, n - 1);
      for (std::int64_t i = k + 1; i <= last_row; ++i) {
        // entry (i, k): diagonal index d = k - i in [-kl, 0)
        b[i] -= data[static_cast<std::size_t>(k - i + kl_) * n + i] * bk;
      }
    }
    // back substitution through U (kl + ku superdiagonals)
    const Scalar* inv = inv_diag_.data();
    const int reach = kl_ + ku_;
    for (std::int64_t i = n - 1; i >= 0; --i) {
      Scalar s = b[i];
      const std::int64_t last_col = std::min<std::int64_t>(i + reach, n - 1);
      for (std::int64_t j = i + 1; j <= last_col; ++j) {
        s -= data[static_cast<std::size_t>(j - i + kl_) * n + i] * b[j];
      }
      b[i] = s * inv[i];
    }
  }

 private:
  std::int64_t n_;
  int kl_, ku_;
  int width_;
  std::vector<Scalar> data_;
  std::vector<Scalar> inv_diag_;
  std::vector<std::int32_t> piv_;
};

}  // namespace bandlab::resolvent
