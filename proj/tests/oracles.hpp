// Test-only reference implementations, independent of the library's
// production code paths: dense complex solves, a dense Jacobi eigensolver,
// Gauss-Legendre quadrature, tail-exponent and KS statistics, and a
// brute-force interval-deviation scan.
#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "core/banded_matrix.hpp"
#include "models/models.hpp"

namespace oracles {

using Complex = std::complex<double>;

/// Dense Gaussian elimination with partial pivoting: solves (M) x = b where
/// M is given row-major. Intended for n <= 256.
std::vector<Complex> dense_solve(std::vector<Complex> m, std::vector<Complex> b, std::int64_t n);

/// Full inverse of (H - z) computed densely from a banded H.
std::vector<Complex> dense_resolvent(const bandlab::core::BandedSymmetricMatrix& h, Complex z);

/// Cyclic Jacobi eigensolver for dense symmetric matrices (n <= 160).
/// Returns eigenvalues ascending.
std::vector<double> jacobi_eigenvalues(const bandlab::models::DenseSymmetricMatrix& a);
std::vector<double> jacobi_eigenvalues(const bandlab::core::BandedSymmetricMatrix& h);

/// Gauss-Legendre quadrature of f over [a, b] with 256 nodes.
double gauss_legendre(const std::function<double(double)>& f, double a, double b);
Complex gauss_legendre_c(const std::function<Complex(double)>& f, double a, double b);

/// Stieltjes transform of the arcsine law by quadrature (substitution
/// x = 2 sin(theta) removes the endpoint singularity).
Complex arcsine_stieltjes_quadrature(Complex z);

/// CDF integral of the arcsine density from 0 to x by quadrature.
double arcsine_mass_quadrature(double x);

/// Hill estimator of the tail exponent from samples exceeding `threshold`.
double hill_tail_exponent(std::span<const double> magnitudes, double threshold);

/// Kolmogorov-Smirnov statistic against a CDF.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

/// Brute-force sup over closed intervals (endpoints at eigenvalues +- tiny
/// offsets and the window ends) of |mu_N(I) - arcsine(I)|.
double interval_deviation_bruteforce(std::span<const double> eigs_sorted, std::int64_t n,
                                     double kappa);

}  // namespace oracles
