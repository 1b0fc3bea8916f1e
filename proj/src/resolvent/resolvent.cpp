#include "resolvent/resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "json.hpp"
#include "noise/rng.hpp"

namespace bandlab::resolvent {

ShiftedBandFactorization::ShiftedBandFactorization(const core::BandedSymmetricMatrix& h,
                                                   Complex z)
    : n_(h.dim()), z_(z), lu_(h.dim(), h.bandwidth(), h.bandwidth()) {
  if (!(z.imag() > 0.0)) {
    throw std::invalid_argument("factorize: Im z must be > 0");
  }
  const int k = h.bandwidth();
  for (int d = 0; d <= k; ++d) {
    auto band = h.band(d);
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(band.size()); ++i) {
      const Complex v = band[static_cast<std::size_t>(i)];
      lu_.at(i, i + d) = v;
      if (d > 0) lu_.at(i + d, i) = v;
    }
  }
  for (std::int64_t i = 0; i < n_; ++i) lu_.at(i, i) -= z;
  lu_.factorize();
}

std::vector<Complex> ShiftedBandFactorization::green_column(std::int64_t j) const {
  if (j < 0 || j >= n_) throw std::out_of_range("green_column: index");
  std::vector<Complex> col(static_cast<std::size_t>(n_), Complex(0.0));
  col[static_cast<std::size_t>(j)] = 1.0;
  lu_.solve_in_place(col, j);
  return col;
}

void ShiftedBandFactorization::solve(std::vector<Complex>& x) const {
  if (static_cast<std::int64_t>(x.size()) != n_) {
    throw std::invalid_argument("solve: size mismatch");
  }
  lu_.solve_in_place(x, 0);
}

std::map<std::pair<std::int64_t, std::int64_t>, Complex> green_entries(
    const ShiftedBandFactorization& fact,
    const std::vector<std::pair<std::int64_t, std::int64_t>>& pairs) {
  std::map<std::pair<std::int64_t, std::int64_t>, Complex> out;
  std::unordered_map<std::int64_t, std::vector<Complex>> columns;
  for (const auto& [i, j] : pairs) {
    auto have_j = columns.find(j);
    if (have_j != columns.end()) {
      out[{i, j}] = have_j->second[static_cast<std::size_t>(i)];
      continue;
    }
    auto have_i = columns.find(i);
    if (have_i != columns.end()) {  // G is complex symmetric
      out[{i, j}] = have_i->second[static_cast<std::size_t>(j)];
      continue;
    }
    auto [it, inserted] = columns.emplace(j, fact.green_column(j));
    out[{i, j}] = it->second[static_cast<std::size_t>(i)];
  }
  return out;
}

Complex stieltjes_trace(const ShiftedBandFactorization& fact) {
  const std::int64_t n = fact.dim();
  std::vector<Complex> scratch(static_cast<std::size_t>(n));
  Complex sum = 0.0;
  for (std::int64_t j = 0; j < n; ++j) sum += fact.diagonal_entry(scratch, j);
  return sum / static_cast<double>(n);
}

Complex stieltjes_trace(const core::BandedSymmetricMatrix& h, const core::SpectralParameter& z) {
  // The early-stopping diagonal solve costs O(n - j) per index, so the upper
  // half of the diagonal is read off the index-reversed matrix instead:
  // G_jj(H) = G_{n-1-j,n-1-j}(J H J) exactly.
  const std::int64_t n = h.dim();
  core::BandedSymmetricMatrix rev(n, h.bandwidth());
  for (int d = 0; d <= h.bandwidth(); ++d) {
    auto src = h.band(d);
    auto dst = rev.band(d);
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[src.size() - 1 - i];
  }
  ShiftedBandFactorization fwd(h, z.z());
  ShiftedBandFactorization bwd(rev, z.z());
  std::vector<Complex> scratch(static_cast<std::size_t>(n));
  Complex sum = 0.0;
  // the early-stop solve costs O(n - index), so low j goes to the reversal
  for (std::int64_t j = 0; j < n; ++j) {
    sum += (2 * j < n) ? bwd.diagonal_entry(scratch, n - 1 - j)
                       : fwd.diagonal_entry(scratch, j);
  }
  return sum / static_cast<double>(n);
}

double ward_residual(const core::BandedSymmetricMatrix& h, const core::SpectralParameter& z,
                     std::int64_t k) {
  ShiftedBandFactorization fact(h, z.z());
  const auto col = fact.green_column(k);
  double sum = 0.0;
  for (const Complex& g : col) sum += std::norm(g);
  const double im_gkk = col[static_cast<std::size_t>(k)].imag();
  return std::abs(sum - im_gkk / z.eta);
}

namespace {

/// y = A x for banded symmetric A.
std::vector<Complex> band_mul(const core::BandedSymmetricMatrix& a,
                              const std::vector<Complex>& x) {
  const std::int64_t n = a.dim();
  std::vector<Complex> y(static_cast<std::size_t>(n), Complex(0.0));
  for (int d = 0; d <= a.bandwidth(); ++d) {
    auto band = a.band(d);
    for (std::int64_t i = 0; i + d < n; ++i) {
      const double v = band[static_cast<std::size_t>(i)];
      if (v == 0.0) continue;
      y[static_cast<std::size_t>(i)] += v * x[static_cast<std::size_t>(i + d)];
      if (d > 0) y[static_cast<std::size_t>(i + d)] += v * x[static_cast<std::size_t>(i)];
    }
  }
  return y;
}

}  // namespace

double resolvent_identity_residual(const core::BandedSymmetricMatrix& h_inf,
                                   const core::BandedSymmetricMatrix& a,
                                   const core::SpectralParameter& z) {
  const std::int64_t n = h_inf.dim();
  if (a.dim() != n) throw std::invalid_argument("resolvent_identity_residual: dim mismatch");
  const core::BandedSymmetricMatrix h = core::add(h_inf, a);
  ShiftedBandFactorization fact_g(h, z.z());
  ShiftedBandFactorization fact_ginf(h_inf, z.z());

  double worst = 0.0;
  if (n <= 512) {
    // Residual column j: (G - Ginf) e_j + G (A (Ginf e_j)).
    for (std::int64_t j = 0; j < n; ++j) {
      const auto ginf_col = fact_ginf.green_column(j);
      const auto g_col = fact_g.green_column(j);
      std::vector<Complex> g_a_ginf = band_mul(a, ginf_col);
      fact_g.solve(g_a_ginf);
      for (std::int64_t i = 0; i < n; ++i) {
        const Complex r = g_col[static_cast<std::size_t>(i)] -
                          ginf_col[static_cast<std::size_t>(i)] +
                          g_a_ginf[static_cast<std::size_t>(i)];
        worst = std::max(worst, std::abs(r));
      }
    }
  } else {
    noise::SplitMix64 pick(noise::mix64(0xB1D5A3C7ULL ^ static_cast<std::uint64_t>(n)));
    for (int s = 0; s < 64; ++s) {
      const std::int64_t i = static_cast<std::int64_t>(pick.next() % static_cast<std::uint64_t>(n));
      const std::int64_t j = static_cast<std::int64_t>(pick.next() % static_cast<std::uint64_t>(n));
      const auto ginf_col = fact_ginf.green_column(j);
      const auto g_row_i = fact_g.green_column(i);  // row i of G by symmetry
      const auto a_ginf = band_mul(a, ginf_col);
      Complex gag = 0.0;
      for (std::int64_t t = 0; t < n; ++t) {
        gag += g_row_i[static_cast<std::size_t>(t)] * a_ginf[static_cast<std::size_t>(t)];
      }
      const Complex r =
          g_row_i[static_cast<std::size_t>(j)] - ginf_col[static_cast<std::size_t>(i)] + gag;
      worst = std::max(worst, std::abs(r));
    }
  }
  return worst;
}

EtaComparisonReport eta_comparison_check(const core::BandedSymmetricMatrix& h, double energy,
                                         double eta, double eta_prime) {
  if (!(eta > 0.0) || !(eta_prime > 0.0)) {
    throw std::invalid_argument("eta_comparison_check: eta, eta_prime must be > 0");
  }
  const std::int64_t n = h.dim();
  ShiftedBandFactorization fact(h, Complex(energy, eta));
  ShiftedBandFactorization fact_prime(h, Complex(energy, eta + eta_prime));

  std::vector<std::int64_t> cols;
  if (n <= 256) {
    for (std::int64_t j = 0; j < n; ++j) cols.push_back(j);
  } else {
    noise::SplitMix64 pick(noise::mix64(0xE7A0C0FFULL ^ static_cast<std::uint64_t>(n)));
    for (int s = 0; s < 64; ++s) {
      cols.push_back(static_cast<std::int64_t>(pick.next() % static_cast<std::uint64_t>(n)));
    }
    std::sort(cols.begin(), cols.end());
    cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
  }

  std::vector<std::vector<Complex>> g_cols, gp_cols;
  g_cols.reserve(cols.size());
  gp_cols.reserve(cols.size());
  for (std::int64_t j : cols) {
    g_cols.push_back(fact.green_column(j));
    gp_cols.push_back(fact_prime.green_column(j));
  }

  EtaComparisonReport rep;
  double worst_off = -1e300, worst_diag = -1e300;
  const double ratio_bound = 1.0 - eta_prime / eta;
  for (std::size_t cj = 0; cj < cols.size(); ++cj) {
    const std::int64_t j = cols[cj];
    const Complex gjj = g_cols[cj][static_cast<std::size_t>(j)];
    const Complex gpjj = gp_cols[cj][static_cast<std::size_t>(j)];
    const double lo = std::min(std::abs(gpjj), std::abs(gjj));
    const double hi = std::max(std::abs(gpjj), std::abs(gjj));
    worst_diag = std::max(worst_diag, ratio_bound - (hi > 0.0 ? lo / hi : 1.0));
    // Pairs (j, k): the k diagonal is needed, so restrict k to sampled columns.
    for (std::size_t ck = 0; ck < cols.size(); ++ck) {
      const std::int64_t k = cols[ck];
      const double lhs = std::abs(g_cols[cj][static_cast<std::size_t>(k)] -
                                  gp_cols[cj][static_cast<std::size_t>(k)]);
      const Complex gkk = g_cols[ck][static_cast<std::size_t>(k)];
      const double rhs =
          eta_prime / (2.0 * eta) * (std::abs(gpjj.imag()) + std::abs(gkk.imag()));
      worst_off = std::max(worst_off, lhs - rhs);
    }
  }
  rep.worst_offdiag_margin = worst_off;
  rep.worst_diag_margin = worst_diag;
  rep.offdiag_bound_holds = worst_off <= 1e-12;
  rep.diag_ratio_holds = worst_diag <= 1e-12;
  return rep;
}

core::BandedSymmetricMatrix minor_matrix(const core::BandedSymmetricMatrix& h,
                                         const std::vector<std::int64_t>& t) {
  const std::int64_t n = h.dim();
  std::vector<bool> removed(static_cast<std::size_t>(n), false);
  for (std::int64_t idx : t) {
    if (idx < 0 || idx >= n) throw std::invalid_argument("minor_matrix: index out of range");
    removed[static_cast<std::size_t>(idx)] = true;
  }
  std::vector<std::int64_t> keep;
  for (std::int64_t i = 0; i < n; ++i) {
    if (!removed[static_cast<std::size_t>(i)]) keep.push_back(i);
  }
  if (keep.empty()) throw std::invalid_argument("minor_matrix: T removes every index");
  core::BandedSymmetricMatrix out(static_cast<std::int64_t>(keep.size()), h.bandwidth());
  for (std::size_t i = 0; i < keep.size(); ++i) {
    for (std::size_t j = i; j < keep.size() && keep[j] - keep[i] <= h.bandwidth(); ++j) {
      out.set(static_cast<std::int64_t>(i), static_cast<std::int64_t>(j),
              h.get(keep[i], keep[j]));
    }
  }
  return out;
}

Complex minor_trace(const core::BandedSymmetricMatrix& h, const std::vector<std::int64_t>& t,
                    const core::SpectralParameter& z) {
  if (t.empty()) return stieltjes_trace(h, z);
  const core::BandedSymmetricMatrix minor = minor_matrix(h, t);
  ShiftedBandFactorization fact(minor, z.z());
  Complex sum = 0.0;
  for (std::int64_t j = 0; j < minor.dim(); ++j) {
    sum += fact.green_column(j)[static_cast<std::size_t>(j)];
  }
  return sum / static_cast<double>(h.dim());  // normalized by the original N
}

std::vector<Complex> dense_green_matrix(const models::DenseSymmetricMatrix& w,
                                        const core::BandedSymmetricMatrix* a, Complex z) {
  const std::int64_t n = w.dim();
  if (n > 2048) throw std::invalid_argument("dense_green_matrix: n too large");
  if (a && a->dim() != n) throw std::invalid_argument("dense_green_matrix: dim mismatch");
  if (!(z.imag() > 0.0)) throw std::invalid_argument("dense_green_matrix: Im z must be > 0");
  std::vector<Complex> m(static_cast<std::size_t>(n) * n);
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t j = 0; j < n; ++j) {
      Complex v = w.get(i, j);
      if (a && std::llabs(i - j) <= a->bandwidth()) v += a->get(i, j);
      if (i == j) v -= z;
      m[static_cast<std::size_t>(i) * n + j] = v;
    }
  }
  // LU with partial pivoting, then invert by solving against the identity.
  std::vector<std::int64_t> piv(static_cast<std::size_t>(n));
  for (std::int64_t k = 0; k < n; ++k) {
    std::int64_t p = k;
    double best = std::abs(m[static_cast<std::size_t>(k) * n + k]);
    for (std::int64_t i = k + 1; i < n; ++i) {
      const double v = std::abs(m[static_cast<std::size_t>(i) * n + k]);
      if (v > best) {
        best = v;
        p = i;
      }
    }
    if (best < 1e-300) throw std::runtime_error("dense_green_matrix: singular");
    piv[static_cast<std::size_t>(k)] = p;
    if (p != k) {
      for (std::int64_t j = 0; j < n; ++j) {
        std::swap(m[static_cast<std::size_t>(k) * n + j], m[static_cast<std::size_t>(p) * n + j]);
      }
    }
    const Complex pivot = m[static_cast<std::size_t>(k) * n + k];
    for (std::int64_t i = k + 1; i < n; ++i) {
      const Complex mult = m[static_cast<std::size_t>(i) * n + k] / pivot;
      m[static_cast<std::size_t>(i) * n + k] = mult;
      if (mult != Complex(0.0)) {
        for (std::int64_t j = k + 1; j < n; ++j) {
          m[static_cast<std::size_t>(i) * n + j] -= mult * m[static_cast<std::size_t>(k) * n + j];
        }
      }
    }
  }
  std::vector<Complex> out(static_cast<std::size_t>(n) * n, Complex(0.0));
  std::vector<Complex> col(static_cast<std::size_t>(n));
  for (std::int64_t c = 0; c < n; ++c) {
    std::fill(col.begin(), col.end(), Complex(0.0));
    col[static_cast<std::size_t>(c)] = 1.0;
    for (std::int64_t k = 0; k < n; ++k) {
      const std::int64_t p = piv[static_cast<std::size_t>(k)];
      if (p != k) std::swap(col[static_cast<std::size_t>(k)], col[static_cast<std::size_t>(p)]);
      const Complex bk = col[static_cast<std::size_t>(k)];
      if (bk == Complex(0.0)) continue;
      for (std::int64_t i = k + 1; i < n; ++i) {
        col[static_cast<std::size_t>(i)] -= m[static_cast<std::size_t>(i) * n + k] * bk;
      }
    }
    for (std::int64_t i = n - 1; i >= 0; --i) {
      Complex s = col[static_cast<std::size_t>(i)];
      for (std::int64_t j = i + 1; j < n; ++j) {
        s -= m[static_cast<std::size_t>(i) * n + j] * col[static_cast<std::size_t>(j)];
      }
      col[static_cast<std::size_t>(i)] = s / m[static_cast<std::size_t>(i) * n + i];
    }
    for (std::int64_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i) * n + c] = col[static_cast<std::size_t>(i)];
  }
  return out;
}

std::string GreenReport::to_json_string() const {
  nlohmann::json j;
  j["z"] = {z.energy, z.eta};
  nlohmann::json entries = nlohmann::json::array();
  for (std::size_t s = 0; s < pairs.size(); ++s) {
    entries.push_back({pairs[s].first, pairs[s].second, values[s].real(), values[s].imag()});
  }
  j["entries"] = entries;
  j["trace"] = {trace.real(), trace.imag()};
  if (!entry_deviation.empty()) j["entry_deviation"] = entry_deviation;
  if (trace_deviation >= 0.0) j["trace_deviation"] = trace_deviation;
  return j.dump();
}

}  // namespace bandlab::resolvent
