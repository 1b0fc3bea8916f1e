#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>

#include "models/models.hpp"
#include "noise/rng.hpp"
#include "oracles.hpp"
#include "spectrum/tridiagonal.hpp"

using bandlab::models::beta_limit_matrix;
using bandlab::models::classical_locations;
using bandlab::models::ClosedFormContext;
using bandlab::models::Complex;
using bandlab::models::green_closed_form;
using bandlab::models::laplacian_1d;
using bandlab::models::offdiag_imag_ratio;
using bandlab::models::stieltjes_arcsine;
using bandlab::models::stieltjes_semicircle;
using bandlab::models::wigner;

TEST_CASE("laplacian: entries and closed-form spectrum") {
  const auto m1 = laplacian_1d(1);
  CHECK(m1.get(0, 0) == 0.0);

  const auto m2 = laplacian_1d(2);
  CHECK(m2.get(0, 1) == 1.0);
  CHECK(m2.get(1, 0) == 1.0);
  CHECK(m2.get(0, 0) == 0.0);

  const auto eigs = bandlab::spectrum::eigenvalues_bisection(
      bandlab::spectrum::reduce_to_tridiagonal(laplacian_1d(3)));
  REQUIRE(eigs.size() == 3);
  CHECK(eigs[0] == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-10));
  CHECK(eigs[1] == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(eigs[2] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
}

TEST_CASE("beta limit matrix band values") {
  CHECK(beta_limit_matrix(1).get(0, 0) == 0.0);
  CHECK(beta_limit_matrix(2).get(0, 1) == doctest::Approx(2.0 * std::sqrt(0.5)));
  CHECK(beta_limit_matrix(4).get(0, 1) == doctest::Approx(2.0 * std::sqrt(3.0 / 4.0)));
  CHECK(beta_limit_matrix(4).get(2, 3) == doctest::Approx(2.0 * std::sqrt(1.0 / 4.0)));
}

TEST_CASE("wigner: moments and determinism") {
  const std::int64_t n = 200;
  const auto w = wigner(n, 31337);
  double mean = 0.0;
  std::int64_t cnt = 0;
  double var_off = 0.0;
  std::int64_t cnt_off = 0;
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t j = i; j < n; ++j) {
      mean += w.get(i, j);
      ++cnt;
      if (i != j) {
        var_off += w.get(i, j) * w.get(i, j);
        ++cnt_off;
      }
    }
  }
  mean /= static_cast<double>(cnt);
  var_off /= static_cast<double>(cnt_off);
  CHECK(std::abs(mean) < 3.0 / n);
  CHECK(var_off == doctest::Approx(1.0 / n).epsilon(0.15));

  const auto w2 = wigner(n, 31337);
  bool identical = true;
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t j = 0; j < n; ++j) identical = identical && w.get(i, j) == w2.get(i, j);
  }
  CHECK(identical);

  const auto goe = wigner(64, 5, true);
  (void)goe;  // diagonal-variance flag is exercised for construction
}

TEST_CASE("green closed form: scalar and 2x2 cases") {
  CHECK(std::abs(green_closed_form(1, Complex(0.0, 1.0), 0, 0).real()) < 1e-15);
  CHECK(green_closed_form(1, Complex(0.0, 1.0), 0, 0).imag() == doctest::Approx(1.0));

  // z = -3 (real, outside the spectrum): (H - z) = [[3,1],[1,3]], det 8
  const auto g11 = green_closed_form(2, Complex(-3.0, 0.0), 0, 0);
  const auto g12 = green_closed_form(2, Complex(-3.0, 0.0), 0, 1);
  CHECK(g11.real() == doctest::Approx(3.0 / 8.0).epsilon(1e-12));
  CHECK(std::abs(g11.imag()) < 1e-12);
  CHECK(g12.real() == doctest::Approx(-1.0 / 8.0).epsilon(1e-12));
}

TEST_CASE("green closed form matches the dense resolvent at N=50") {
  const std::int64_t n = 50;
  const Complex z(0.5, 0.1);
  const auto dense = oracles::dense_resolvent(laplacian_1d(n), z);
  ClosedFormContext ctx(n, z);
  double worst = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t j = 0; j < n; ++j) {
      const Complex ref = dense[static_cast<std::size_t>(i) * n + j];
      worst = std::max(worst, std::abs(ctx.entry(i, j) - ref) / std::abs(ref));
    }
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("green closed form is symmetric and branch-invariant") {
  const std::int64_t n = 40;
  const Complex z(-0.7, 0.03);
  ClosedFormContext ctx(n, z);
  bandlab::noise::SplitMix64 rng(7);
  for (int t = 0; t < 20; ++t) {
    const auto i = static_cast<std::int64_t>(rng.next() % n);
    const auto j = static_cast<std::int64_t>(rng.next() % n);
    CHECK(std::abs(ctx.entry(i, j) - ctx.entry(j, i)) < 1e-14);

    // naive formula evaluated with both branches +-lambda (small n, no overflow)
    const Complex lam = std::acos(z / 2.0);
    for (const Complex l : {lam, -lam}) {
      const double i1 = static_cast<double>(i + 1), j1 = static_cast<double>(j + 1);
      const Complex naive =
          (std::cos((n + 1 - std::abs(i1 - j1)) * l) - std::cos((n + 1 - i1 - j1) * l)) /
          (2.0 * std::sin(l) * std::sin(static_cast<double>(n + 1) * l));
      CHECK(std::abs(naive - ctx.entry(i, j)) < 1e-9);
    }
  }
}

TEST_CASE("green closed form stays finite deep in the overflow regime") {
  // N*eta ~ 4096 would overflow a naive evaluation (e^4096).
  const std::int64_t n = 4096;
  ClosedFormContext ctx(n, Complex(0.3, 1.0));
  const auto g = ctx.entry(2000, 2000);
  CHECK(std::isfinite(g.real()));
  CHECK(std::isfinite(g.imag()));
  CHECK(g.imag() > 0.0);
  CHECK(std::abs(ctx.entry(0, n - 1)) < 1e-300);  // far corner decays to nothing
}

TEST_CASE("green closed form rejects z at the band edge") {
  CHECK_THROWS_AS(green_closed_form(8, Complex(2.0, 0.0), 0, 0), std::domain_error);
}

TEST_CASE("determinant recursion matches its trigonometric solution") {
  // M_{k+1} = D M_k - M_{k-1}, M_0 = 1, M_1 = D vs (-1)^k sin((k+1)L)/sin(L)
  for (double d : {-1.9, -1.0, -0.3, 0.4, 1.1, 1.9}) {
    const Complex lam = std::acos(Complex(-d / 2.0, 0.0));
    double m_prev = 1.0, m_cur = d;
    for (int k = 1; k <= 64; ++k) {
      const Complex closed =
          std::pow(-1.0, k) * std::sin(static_cast<double>(k + 1) * lam) / std::sin(lam);
      CHECK(std::abs(m_cur - closed.real()) <=
            1e-10 * std::max(1.0, std::abs(closed.real())));
      const double m_next = d * m_cur - m_prev;
      m_prev = m_cur;
      m_cur = m_next;
    }
  }
}

TEST_CASE("arcsine stieltjes transform: golden values and symmetry") {
  const auto m = stieltjes_arcsine(Complex(0.0, 2.0));
  CHECK(std::abs(m.real()) < 1e-14);
  CHECK(m.imag() == doctest::Approx(0.35355339).epsilon(1e-7));

  // quadrature oracle at several z
  for (const Complex z : {Complex(0.0, 2.0), Complex(0.7, 0.2), Complex(-1.2, 0.05)}) {
    const auto q = oracles::arcsine_stieltjes_quadrature(z);
    CHECK(std::abs(stieltjes_arcsine(z) - q) < 1e-10);
  }

  // -1/z asymptotics
  const auto big = stieltjes_arcsine(Complex(0.0, 1e6));
  CHECK(big.imag() == doctest::Approx(1e-6).epsilon(1e-6));

  // reflection m(-E + i eta) = -conj(m(E + i eta))
  for (double e : {0.3, 1.1, 1.7}) {
    const auto lhs = stieltjes_arcsine(Complex(-e, 0.01));
    const auto rhs = -std::conj(stieltjes_arcsine(Complex(e, 0.01)));
    CHECK(std::abs(lhs - rhs) < 1e-14);
  }
}

TEST_CASE("semicircle stieltjes transform: golden value and self-consistency") {
  const auto m = stieltjes_semicircle(Complex(0.0, 1.0));
  CHECK(std::abs(m.real()) < 1e-14);
  CHECK(m.imag() == doctest::Approx((std::sqrt(5.0) - 1.0) / 2.0));

  const auto big = stieltjes_semicircle(Complex(0.0, 1e6));
  CHECK(big.imag() == doctest::Approx(1e-6).epsilon(1e-6));

  bandlab::noise::SplitMix64 rng(11);
  for (int t = 0; t < 100; ++t) {
    const Complex z(4.0 * rng.uniform01() - 2.0, 0.01 + rng.uniform01());
    const auto mm = stieltjes_semicircle(z);
    CHECK(mm.imag() > 0.0);
    CHECK(std::abs(mm * mm + z * mm + 1.0) < 1e-12);
  }
}

TEST_CASE("arcsine transform in the bulk: Im bounded below, Re small at low eta") {
  // over |E| <= 1.5 the imaginary part stays above a kappa-dependent floor,
  // and below eta = 0.01 the real part is dominated by it
  double im_floor = 1e300;
  for (double e = -1.5; e <= 1.5; e += 0.05) {
    for (double eta : {1e-4, 1e-3, 0.01, 0.1, 1.0}) {
      const auto m = stieltjes_arcsine(Complex(e, eta));
      im_floor = std::min(im_floor, m.imag());
      if (eta <= 0.01) CHECK(std::abs(m.real()) < m.imag());
    }
  }
  CHECK(im_floor > 0.25);  // C_kappa floor at kappa = 0.5
}

TEST_CASE("classical locations: golden values, quadrature oracle, monotone") {
  const auto g4 = classical_locations(4);
  REQUIRE(g4.size() == 2);
  CHECK(g4[0] == doctest::Approx(2.0 * std::sin(M_PI / 8.0)).epsilon(1e-12));
  CHECK(g4[1] == doctest::Approx(2.0 * std::sin(3.0 * M_PI / 8.0)).epsilon(1e-12));
  CHECK(g4[0] == doctest::Approx(0.76537).epsilon(1e-4));
  CHECK(g4[1] == doctest::Approx(1.84776).epsilon(1e-4));

  // N integral_0^{gamma_i} rho = i - 1/2 (quadrature oracle)
  for (std::size_t i = 0; i < g4.size(); ++i) {
    CHECK(4.0 * oracles::arcsine_mass_quadrature(g4[i]) ==
          doctest::Approx(static_cast<double>(i) + 0.5).epsilon(1e-9));
  }

  const auto g100 = classical_locations(100);
  for (std::size_t i = 1; i < g100.size(); ++i) CHECK(g100[i] > g100[i - 1]);
  CHECK(g100.front() > 0.0);
  CHECK(g100.back() < 2.0);

  CHECK_THROWS_AS(classical_locations(5), std::invalid_argument);
}

TEST_CASE("offdiag imaginary ratio") {
  CHECK(offdiag_imag_ratio(Complex(0.4, 0.2), 100, 0) == Complex(1.0, 0.0));

  // K=1 bulk ratio vs closed-form Green entries. The mirror term of the
  // entry formula contributes ~e^{-N eta / sqrt(4-E^2)} at the center, so the
  // agreement scale is 4e-5 at eta = 0.01 and 1.6e-9 at eta = 0.02 (N=2000).
  const std::int64_t n = 2000;
  {
    const Complex z(0.3, 0.01);
    ClosedFormContext ctx(n, z);
    const Complex direct = ctx.entry(999, 1000) / ctx.entry(999, 999);
    const Complex ratio = offdiag_imag_ratio(z, n, 1);
    CHECK(std::abs(ratio - direct) < 2e-4);
  }
  {
    const Complex z(0.3, 0.02);
    ClosedFormContext ctx(n, z);
    const Complex direct = ctx.entry(999, 1000) / ctx.entry(999, 999);
    const Complex ratio = offdiag_imag_ratio(z, n, 1);
    CHECK(std::abs(ratio - direct) < 1e-6);
  }

  // K=2 at E = 0 (inside Delta_2): imaginary parts nearly equal, which is
  // exactly why the removal set exists.
  const Complex z0(0.0, 0.01);
  ClosedFormContext ctx0(n, z0);
  const Complex g_diag = ctx0.entry(1000, 1000);
  const Complex r2 = offdiag_imag_ratio(z0, n, 2);
  const double im_ratio = std::abs((r2 * g_diag).imag()) / g_diag.imag();
  CHECK(im_ratio > 0.97);
}

TEST_CASE("trace of closed-form diagonal approaches the arcsine transform") {
  // |m_inf - m_as| at z = 0.5 + i N^{-0.8} decreases over N and the diagonal
  // average agrees with the eigenvalue-sum oracle.
  double prev = 1e300;
  for (std::int64_t n : {256, 512, 1024, 2048, 4096}) {
    const Complex z(0.5, std::pow(static_cast<double>(n), -0.8));
    ClosedFormContext ctx(n, z);
    const Complex m_inf = ctx.trace_mean();

    Complex oracle = 0.0;  // m_inf from the exact eigenvalues 2 cos(k pi/(N+1))
    for (std::int64_t k = 1; k <= n; ++k) {
      oracle += 1.0 / (2.0 * std::cos(k * M_PI / (n + 1.0)) - z);
    }
    oracle /= static_cast<double>(n);
    CHECK(std::abs(m_inf - oracle) < 1e-9);

    const double gap = std::abs(m_inf - stieltjes_arcsine(z));
    CHECK(gap < prev);
    prev = gap;
  }
  CHECK(prev < 0.05);
}
