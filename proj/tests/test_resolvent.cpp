#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>

#include "core/banded_matrix.hpp"
#include "models/models.hpp"
#include "noise/noise.hpp"
#include "oracles.hpp"
#include "resolvent/resolvent.hpp"

using bandlab::core::BandedSymmetricMatrix;
using bandlab::core::SpectralParameter;
using bandlab::models::Complex;
using bandlab::models::laplacian_1d;
using bandlab::resolvent::ShiftedBandFactorization;

namespace {

BandedSymmetricMatrix random_banded(std::int64_t n, int k, std::uint64_t seed) {
  BandedSymmetricMatrix m(n, k);
  bandlab::noise::SplitMix64 rng(seed);
  for (int d = 0; d <= k; ++d) {
    for (auto& v : m.band(d)) v = 2.0 * rng.uniform01() - 1.0;
  }
  return m;
}

bandlab::noise::NoiseSpec pareto_spec(double alpha, int k, std::uint64_t seed) {
  bandlab::noise::NoiseSpec s;
  s.family = bandlab::noise::NoiseFamily::kPareto;
  s.alpha = alpha;
  s.bandwidth = k;
  s.seed = seed;
  return s;
}

}  // namespace

TEST_CASE("factorize: zero matrix gives G = i I at z = i") {
  const BandedSymmetricMatrix h(3, 0);
  ShiftedBandFactorization fact(h, Complex(0.0, 1.0));
  for (std::int64_t j = 0; j < 3; ++j) {
    const auto col = fact.green_column(j);
    for (std::int64_t i = 0; i < 3; ++i) {
      const Complex expect = i == j ? Complex(0.0, 1.0) : Complex(0.0, 0.0);
      CHECK(std::abs(col[static_cast<std::size_t>(i)] - expect) < 1e-15);
    }
  }
}

TEST_CASE("factorize: 2x2 Laplacian at z = i") {
  ShiftedBandFactorization fact(laplacian_1d(2), Complex(0.0, 1.0));
  const auto c0 = fact.green_column(0);
  CHECK(std::abs(c0[0] - Complex(0.0, 0.5)) < 1e-15);
  CHECK(std::abs(c0[1] - Complex(0.5, 0.0)) < 1e-15);
}

TEST_CASE("factorize requires a positive eta") {
  CHECK_THROWS_AS(ShiftedBandFactorization(laplacian_1d(4), Complex(0.5, 0.0)),
                  std::invalid_argument);
}

TEST_CASE("banded solve matches the closed form at N=512") {
  const std::int64_t n = 512;
  const Complex z(0.5, 0.05);
  ShiftedBandFactorization fact(laplacian_1d(n), z);
  bandlab::models::ClosedFormContext ctx(n, z);
  double worst = 0.0, scale = 0.0;
  for (std::int64_t j = 0; j < n; j += 7) {
    const auto col = fact.green_column(j);
    for (std::int64_t i = 0; i < n; ++i) {
      worst = std::max(worst, std::abs(col[static_cast<std::size_t>(i)] - ctx.entry(i, j)));
      scale = std::max(scale, std::abs(ctx.entry(i, j)));
    }
  }
  CHECK(worst / scale < 1e-9);
}

TEST_CASE("green entries: symmetry, cache, dense oracle") {
  const auto h = random_banded(64, 3, 91);
  const Complex z(0.2, 0.3);
  ShiftedBandFactorization fact(h, z);

  SUBCASE("diagonal of the zero matrix at z = 2i") {
    const BandedSymmetricMatrix zero(5, 0);
    ShiftedBandFactorization fz(zero, Complex(0.0, 2.0));
    std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
    for (std::int64_t i = 0; i < 5; ++i) pairs.emplace_back(i, i);
    const auto got = bandlab::resolvent::green_entries(fz, pairs);
    for (const auto& [key, val] : got) CHECK(std::abs(val - Complex(0.0, 0.5)) < 1e-15);
  }

  SUBCASE("complex symmetry on random pairs") {
    bandlab::noise::SplitMix64 rng(4);
    for (int t = 0; t < 100; ++t) {
      const auto i = static_cast<std::int64_t>(rng.next() % 64);
      const auto j = static_cast<std::int64_t>(rng.next() % 64);
      const auto got = bandlab::resolvent::green_entries(fact, {{i, j}, {j, i}});
      CHECK(std::abs(got.at({i, j}) - got.at({j, i})) < 1e-12);
    }
  }

  SUBCASE("full matrix vs dense Gaussian elimination") {
    const auto dense = oracles::dense_resolvent(h, z);
    double worst = 0.0;
    for (std::int64_t j = 0; j < 64; ++j) {
      const auto col = fact.green_column(j);
      for (std::int64_t i = 0; i < 64; ++i) {
        worst = std::max(worst,
                         std::abs(col[static_cast<std::size_t>(i)] -
                                  dense[static_cast<std::size_t>(i) * 64 + j]));
      }
    }
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("stieltjes trace") {
  SUBCASE("zero matrix: m = i at z = i") {
    const BandedSymmetricMatrix h(8, 0);
    const auto m = bandlab::resolvent::stieltjes_trace(h, SpectralParameter(0.0, 1.0));
    CHECK(std::abs(m - Complex(0.0, 1.0)) < 1e-14);
  }
  SUBCASE("large Laplacian approaches the arcsine transform") {
    const std::int64_t n = 4096;
    const SpectralParameter z(0.5, std::pow(static_cast<double>(n), -0.5));
    const auto m = bandlab::resolvent::stieltjes_trace(laplacian_1d(n), z);
    CHECK(std::abs(m - bandlab::models::stieltjes_arcsine(z.z())) < 0.05);
    CHECK(m.imag() > 0.0);
  }
  SUBCASE("Herglotz at every mesh point of a noisy run") {
    const auto h = bandlab::core::add(laplacian_1d(200),
                                      bandlab::noise::build_noise(200, pareto_spec(1.0, 1, 5)));
    for (double e : {-1.5, 0.0, 1.5}) {
      for (double eta : {0.01, 0.1, 1.0}) {
        CHECK(bandlab::resolvent::stieltjes_trace(h, SpectralParameter(e, eta)).imag() > 0.0);
      }
    }
  }
}

TEST_CASE("ward identity") {
  SUBCASE("2x2 Laplacian by hand") {
    // G = [[i/2, 1/2],[1/2, i/2]]: sum |G_j0|^2 = 1/4 + 1/4 = Im(i/2)/1
    CHECK(bandlab::resolvent::ward_residual(laplacian_1d(2), SpectralParameter(0.0, 1.0), 0) <
          1e-14);
  }
  SUBCASE("zero matrix: residual is analytic zero") {
    const BandedSymmetricMatrix h(6, 0);
    for (double eta : {0.01, 0.5, 2.0}) {
      CHECK(bandlab::resolvent::ward_residual(h, SpectralParameter(0.0, eta), 3) < 1e-12);
    }
  }
  SUBCASE("random banded instances") {
    bandlab::noise::SplitMix64 rng(12);
    const auto h = random_banded(256, 2, 1001);
    for (int t = 0; t < 20; ++t) {
      const auto k = static_cast<std::int64_t>(rng.next() % 256);
      CHECK(bandlab::resolvent::ward_residual(h, SpectralParameter(0.3, 0.02), k) < 1e-9);
    }
  }
}

TEST_CASE("resolvent identity residual") {
  SUBCASE("A = 0: residual vanishes and G == Ginf") {
    const BandedSymmetricMatrix zero(128, 0);
    CHECK(bandlab::resolvent::resolvent_identity_residual(laplacian_1d(128), zero,
                                                          SpectralParameter(0.5, 0.1)) < 1e-13);
  }
  SUBCASE("noisy instance at N=128") {
    const auto a = bandlab::noise::build_noise(128, pareto_spec(1.0, 1, 77));
    CHECK(bandlab::resolvent::resolvent_identity_residual(laplacian_1d(128), a,
                                                          SpectralParameter(0.5, 0.05)) < 1e-9);
  }
  SUBCASE("sampled path at N > 512") {
    const auto a = bandlab::noise::build_noise(600, pareto_spec(1.0, 0, 78));
    CHECK(bandlab::resolvent::resolvent_identity_residual(laplacian_1d(600), a,
                                                          SpectralParameter(0.2, 0.05)) < 1e-9);
  }
  SUBCASE("rank-one diagonal perturbation: exact scalar identity") {
    // G_ii - Ginf_ii = -G_ii a Ginf_ii for a single diagonal entry a at site i
    const std::int64_t n = 64, site = 20;
    const double a_val = 2.5;
    BandedSymmetricMatrix a(n, 0);
    a.set(site, site, a_val);
    const Complex z(0.4, 0.08);
    ShiftedBandFactorization fact_g(bandlab::core::add(laplacian_1d(n), a), z);
    bandlab::models::ClosedFormContext ctx(n, z);
    const Complex g_ii = fact_g.green_column(site)[site];
    const Complex ginf_ii = ctx.entry(site, site);
    CHECK(std::abs((g_ii - ginf_ii) + g_ii * a_val * ginf_ii) < 1e-12);
  }
}

TEST_CASE("eta comparison inequalities") {
  SUBCASE("laplacian N=100") {
    const auto rep =
        bandlab::resolvent::eta_comparison_check(laplacian_1d(100), 0.5, 0.01, 0.005);
    CHECK(rep.offdiag_bound_holds);
    CHECK(rep.diag_ratio_holds);
  }
  SUBCASE("tiny eta_prime is trivially fine") {
    const auto rep =
        bandlab::resolvent::eta_comparison_check(laplacian_1d(50), 0.0, 0.1, 1e-9);
    CHECK(rep.offdiag_bound_holds);
    CHECK(rep.diag_ratio_holds);
  }
  SUBCASE("property: holds on random banded matrices") {
    for (int t = 0; t < 50; ++t) {
      const auto h = random_banded(60, 1 + t % 3, 3000 + t);
      const auto rep = bandlab::resolvent::eta_comparison_check(h, -0.3, 0.05, 0.02);
      CHECK(rep.offdiag_bound_holds);
      CHECK(rep.diag_ratio_holds);
    }
  }
}

TEST_CASE("minor trace") {
  const auto h = bandlab::core::add(laplacian_1d(100),
                                    bandlab::noise::build_noise(100, pareto_spec(1.0, 1, 123)));
  const SpectralParameter z(0.2, 0.05);

  SUBCASE("empty T equals the full trace") {
    CHECK(std::abs(bandlab::resolvent::minor_trace(h, {}, z) -
                   bandlab::resolvent::stieltjes_trace(h, z)) < 1e-14);
  }
  SUBCASE("rejects removing everything") {
    std::vector<std::int64_t> all(100);
    for (std::int64_t i = 0; i < 100; ++i) all[static_cast<std::size_t>(i)] = i;
    CHECK_THROWS_AS(bandlab::resolvent::minor_trace(h, all, z), std::invalid_argument);
  }
  SUBCASE("|m - m^(T)| <= |T|/(N eta) on random instances") {
    bandlab::noise::SplitMix64 rng(9);
    for (int t = 0; t < 50; ++t) {
      const auto hh = random_banded(80, 1 + t % 2, 500 + t);
      const double eta = 0.02 + 0.1 * rng.uniform01();
      const SpectralParameter zz(0.5 - rng.uniform01(), eta);
      std::vector<std::int64_t> rem;
      const int count = 1 + static_cast<int>(rng.next() % 5);
      for (int r = 0; r < count; ++r) {
        rem.push_back(static_cast<std::int64_t>(rng.next() % 80));
      }
      std::sort(rem.begin(), rem.end());
      rem.erase(std::unique(rem.begin(), rem.end()), rem.end());
      const auto m = bandlab::resolvent::stieltjes_trace(hh, zz);
      const auto mt = bandlab::resolvent::minor_trace(hh, rem, zz);
      CHECK(std::abs(m - mt) <= static_cast<double>(rem.size()) / (80.0 * eta) + 1e-12);
    }
  }
  SUBCASE("single-removal telescoping matches [(G)^2]_kk / G_kk / N") {
    const std::int64_t k = 37;
    const auto m = bandlab::resolvent::stieltjes_trace(h, z);
    const auto mk = bandlab::resolvent::minor_trace(h, {k}, z);
    ShiftedBandFactorization fact(h, z.z());
    const auto col = fact.green_column(k);
    Complex g2_kk = 0.0;  // [(G)^2]_kk = sum_i G_ki G_ik (complex symmetric)
    for (const Complex& g : col) g2_kk += g * g;
    const Complex rhs = g2_kk / col[static_cast<std::size_t>(k)] / 100.0;
    CHECK(std::abs((m - mk) - rhs) < 1e-9);
  }
  SUBCASE("single-removal bound 1/(N eta)") {
    for (std::int64_t k : {0, 13, 50, 99}) {
      const auto m = bandlab::resolvent::stieltjes_trace(h, z);
      const auto mk = bandlab::resolvent::minor_trace(h, {k}, z);
      CHECK(std::abs(m - mk) <= 1.0 / (100.0 * z.eta) + 1e-12);
    }
  }
}

TEST_CASE("monotonicity of y -> y Im m(x + iy)") {
  bandlab::noise::SplitMix64 rng(31);
  for (int t = 0; t < 20; ++t) {
    const auto h = random_banded(48, 1 + t % 3, 9000 + t);
    const double e = 1.5 - 3.0 * rng.uniform01();
    double prev = -1.0;
    for (double eta = 0.01; eta <= 1.0; eta *= 2.3) {
      const auto m = bandlab::resolvent::stieltjes_trace(h, SpectralParameter(e, eta));
      const double val = eta * m.imag();
      CHECK(val >= prev - 1e-13);
      prev = val;
    }
  }
}

TEST_CASE("block structure: separable removals from the Laplacian decouple exactly") {
  const std::int64_t n = 120;
  const auto h = laplacian_1d(n);
  const std::vector<std::int64_t> t{30, 75};
  const auto minor = bandlab::resolvent::minor_matrix(h, t);
  ShiftedBandFactorization fact(minor, Complex(0.4, 0.02));
  // blocks in minor indexing: [0,29], [30,73], [74,117]
  const auto col = fact.green_column(10);
  for (std::int64_t i = 30; i < minor.dim(); ++i) {
    CHECK(col[static_cast<std::size_t>(i)] == Complex(0.0, 0.0));
  }
  const auto col2 = fact.green_column(50);
  for (std::int64_t i = 0; i < 30; ++i) {
    CHECK(col2[static_cast<std::size_t>(i)] == Complex(0.0, 0.0));
  }
  for (std::int64_t i = 74; i < minor.dim(); ++i) {
    CHECK(col2[static_cast<std::size_t>(i)] == Complex(0.0, 0.0));
  }
}

TEST_CASE("solves reproduce (H - z) x = e_j") {
  const auto h = random_banded(40, 2, 55);
  const Complex z(0.1, 0.2);
  ShiftedBandFactorization fact(h, z);
  bandlab::noise::SplitMix64 rng(2);
  for (int t = 0; t < 5; ++t) {
    const auto j = static_cast<std::int64_t>(rng.next() % 40);
    const auto col = fact.green_column(j);
    for (std::int64_t i = 0; i < 40; ++i) {
      Complex acc = -z * col[static_cast<std::size_t>(i)];
      for (std::int64_t k = std::max<std::int64_t>(0, i - 2);
           k <= std::min<std::int64_t>(39, i + 2); ++k) {
        acc += h.get(i, k) * col[static_cast<std::size_t>(k)];
      }
      const Complex expect = i == j ? Complex(1.0) : Complex(0.0);
      CHECK(std::abs(acc - expect) < 1e-10);
    }
  }
}
