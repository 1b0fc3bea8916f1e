#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "core/banded_matrix.hpp"
#include "core/spectral.hpp"
#include "models/models.hpp"
#include "resolvent/band_lu.hpp"

namespace bandlab::resolvent {

using Complex = std::complex<double>;

/// Banded LU of (H - z) for a real symmetric banded H and Im z > 0.
/// Immutable after construction; concurrent solves are safe.
class ShiftedBandFactorization {
 public:
  ShiftedBandFactorization(const core::BandedSymmetricMatrix& h, Complex z);

  std::int64_t dim() const { return n_; }
  Complex z() const { return z_; }

  /// Column j of G = (H - z)^{-1}.
  std::vector<Complex> green_column(std::int64_t j) const;

  /// x := (H - z)^{-1} x.
  void solve(std::vector<Complex>& x) const;

  /// In-place solve with the leading-zero hint (x = e_j pattern).
  void solve_column(std::vector<Complex>& x, std::int64_t first_nonzero) const {
    lu_.solve_in_place(x, first_nonzero);
  }

  /// G_jj via an early-stopping solve; scratch must have size n.
  Complex diagonal_entry(std::span<Complex> scratch, std::int64_t j) const {
    return lu_.diagonal_entry_of_inverse(scratch, j);
  }

 private:
  std::int64_t n_;
  Complex z_;
  BandLU<Complex> lu_;
};

inline ShiftedBandFactorization factorize(const core::BandedSymmetricMatrix& h,
                                          const core::SpectralParameter& z) {
  return ShiftedBandFactorization(h, z.z());
}

/// Requested Green entries; columns are cached and G_ij = G_ji halves solves.
std::map<std::pair<std::int64_t, std::int64_t>, Complex> green_entries(
    const ShiftedBandFactorization& fact,
    const std::vector<std::pair<std::int64_t, std::int64_t>>& pairs);

/// m_N(z) = (1/N) sum_k G_kk(z).
Complex stieltjes_trace(const core::BandedSymmetricMatrix& h, const core::SpectralParameter& z);
Complex stieltjes_trace(const ShiftedBandFactorization& fact);

/// | sum_j |G_jk|^2 - Im G_kk / eta |; machine-precision small for any
/// symmetric H (Ward identity).
double ward_residual(const core::BandedSymmetricMatrix& h, const core::SpectralParameter& z,
                     std::int64_t k);

/// Max-entry residual of (G - G^inf) + G A G^inf; full sweep for n <= 512,
/// a deterministic 64-pair sample above that.
double resolvent_identity_residual(const core::BandedSymmetricMatrix& h_inf,
                                   const core::BandedSymmetricMatrix& a,
                                   const core::SpectralParameter& z);

struct EtaComparisonReport {
  bool offdiag_bound_holds = false;  // |G_jk - G'_jk| <= eta'/(2 eta) (|Im G'_jj| + |Im G_kk|)
  bool diag_ratio_holds = false;     // min/max(|G'_jj|, |G_jj|) > 1 - eta'/eta
  double worst_offdiag_margin = 0.0;  // max over pairs of lhs - rhs (<= 0 when holding)
  double worst_diag_margin = 0.0;     // max over j of (1 - eta'/eta) - ratio
};

/// Compares G at z = E + i eta with G' at z' = E + i (eta + eta'); checks the
/// two deterministic comparison inequalities at all pairs (n <= 256) or over a
/// deterministic 64-column sample.
EtaComparisonReport eta_comparison_check(const core::BandedSymmetricMatrix& h, double energy,
                                         double eta, double eta_prime);

/// Trace of the resolvent of H with rows/columns in T removed, normalized by
/// the ORIGINAL dimension. Rejects T = everything.
Complex minor_trace(const core::BandedSymmetricMatrix& h, const std::vector<std::int64_t>& t,
                    const core::SpectralParameter& z);

/// The minor itself (bandwidth can only shrink under row/column removal).
core::BandedSymmetricMatrix minor_matrix(const core::BandedSymmetricMatrix& h,
                                         const std::vector<std::int64_t>& t);

/// Full resolvent of (W + A - z) for the dense Wigner-model path (A optional
/// banded addend). Row-major n*n output; dense Gaussian elimination with
/// partial pivoting, intended for n <= 2048.
std::vector<Complex> dense_green_matrix(const models::DenseSymmetricMatrix& w,
                                        const core::BandedSymmetricMatrix* a, Complex z);

/// Green-function report at one z: requested entries, trace, deviations
/// against a reference (closed form or arcsine trace) when available.
struct GreenReport {
  core::SpectralParameter z;
  std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
  std::vector<Complex> values;
  Complex trace{};
  std::vector<double> entry_deviation;  // empty when no reference
  double trace_deviation = -1.0;        // negative when no reference
  std::string to_json_string() const;
};

}  // namespace bandlab::resolvent
