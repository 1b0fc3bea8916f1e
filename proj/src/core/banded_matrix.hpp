#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace bandlab::core {

/// Real symmetric matrix stored as its K+1 upper bands.
///
/// Band d (d = 0..K) holds the entries M[i, i+d] for i = 0..n-d-1; the lower
/// triangle is implied by symmetry and entries with |i-j| > K are identically
/// zero. Immutable use after construction is safe across threads.
class BandedSymmetricMatrix {
 public:
  BandedSymmetricMatrix(std::int64_t n, int bandwidth);

  std::int64_t dim() const { return n_; }
  int bandwidth() const { return k_; }

  /// Entry (i, j), 0-based; zero outside the band.
  double get(std::int64_t i, std::int64_t j) const;

  /// Sets M[i,j] = M[j,i] = v. Requires |i-j| <= bandwidth.
  void set(std::int64_t i, std::int64_t j, double v);

  std::span<const double> band(int d) const { return bands_[d]; }
  std::span<double> band(int d) { return bands_[d]; }

  double trace() const;

  /// Max absolute row sum; upper bound for the spectral radius.
  double inf_norm() const;

 private:
  std::int64_t n_;
  int k_;
  std::vector<std::vector<double>> bands_;
};

/// Entry-wise sum; the result takes the larger bandwidth.
BandedSymmetricMatrix add(const BandedSymmetricMatrix& a, const BandedSymmetricMatrix& b);

}  // namespace bandlab::core
