#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "core/banded_matrix.hpp"
#include "models/models.hpp"

namespace bandlab::spectrum {

struct Tridiagonal {
  std::vector<double> diag;
  std::vector<double> off;  // off[i] couples i and i+1

  std::int64_t dim() const { return static_cast<std::int64_t>(diag.size()); }
  /// Gershgorin interval containing every eigenvalue.
  std::pair<double, double> gershgorin() const;
};

/// Orthogonally similar tridiagonal matrix via Givens band reduction with
/// bulge chasing; K <= 1 inputs pass through unchanged.
Tridiagonal reduce_to_tridiagonal(const core::BandedSymmetricMatrix& h);

/// Householder reduction of a dense symmetric matrix (the Wigner-model path).
Tridiagonal reduce_dense_to_tridiagonal(const models::DenseSymmetricMatrix& h);

/// Number of eigenvalues strictly below x (Sturm sequence).
std::int64_t sturm_count_below(const Tridiagonal& t, double x);

/// Exact count of eigenvalues in the closed interval [a, b].
std::int64_t eigen_count(const Tridiagonal& t, double a, double b);

/// All eigenvalues (or those within the closed interval), ascending, to the
/// given absolute tolerance, via Sturm-count bisection.
std::vector<double> eigenvalues_bisection(
    const Tridiagonal& t, std::optional<std::pair<double, double>> interval = std::nullopt,
    double tol = 1e-11);

}  // namespace bandlab::spectrum
