#include "spectrum/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bandlab::spectrum {

std::pair<double, double> Tridiagonal::gershgorin() const {
  const std::int64_t n = dim();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::int64_t i = 0; i < n; ++i) {
    double r = 0.0;
    if (i > 0) r += std::abs(off[static_cast<std::size_t>(i - 1)]);
    if (i + 1 < n) r += std::abs(off[static_cast<std::size_t>(i)]);
    lo = std::min(lo, diag[static_cast<std::size_t>(i)] - r);
    hi = std::max(hi, diag[static_cast<std::size_t>(i)] + r);
  }
  return {lo, hi};
}

namespace {

/// Working copy of a symmetric band matrix with one spare band for the bulge.
class BandWorkspace {
 public:
  BandWorkspace(const core::BandedSymmetricMatrix& h)
      : n_(h.dim()), kw_(h.bandwidth() + 1), bands_(static_cast<std::size_t>(kw_) + 1) {
    for (int d = 0; d <= kw_; ++d) {
      bands_[static_cast<std::size_t>(d)].assign(
          static_cast<std::size_t>(std::max<std::int64_t>(n_ - d, 0)), 0.0);
    }
    for (int d = 0; d <= h.bandwidth(); ++d) {
      auto src = h.band(d);
      std::copy(src.begin(), src.end(), bands_[static_cast<std::size_t>(d)].begin());
    }
  }

  double get(std::int64_t i, std::int64_t j) const {
    const std::int64_t d = std::llabs(i - j);
    if (d > kw_) return 0.0;
    return bands_[static_cast<std::size_t>(d)][static_cast<std::size_t>(std::min(i, j))];
  }
  void set(std::int64_t i, std::int64_t j, double v) {
    const std::int64_t d = std::llabs(i - j);
    bands_[static_cast<std::size_t>(d)][static_cast<std::size_t>(std::min(i, j))] = v;
  }

  /// Symmetric similarity by the rotation in the (p, p+1) plane:
  /// row/col p -> c*p - s*q, row/col q -> s*p + c*q.
  void rotate(std::int64_t p, double c, double s) {
    const std::int64_t q = p + 1;
    const std::int64_t lo = std::max<std::int64_t>(0, p - kw_);
    const std::int64_t hi = std::min<std::int64_t>(n_ - 1, q + kw_);
    const double app = get(p, p), aqq = get(q, q), apq = get(p, q);
    for (std::int64_t i = lo; i <= hi; ++i) {
      if (i == p || i == q) continue;
      const double aip = get(i, p), aiq = get(i, q);
      const double nip = c * aip - s * aiq;
      const double niq = s * aip + c * aiq;
      if (std::llabs(i - p) <= kw_) set(i, p, nip);
      if (std::llabs(i - q) <= kw_) set(i, q, niq);
    }
    set(p, p, c * c * app - 2.0 * c * s * apq + s * s * aqq);
    set(q, q, s * s * app + 2.0 * c * s * apq + c * c * aqq);
    set(p, q, c * s * (app - aqq) + (c * c - s * s) * apq);
  }

  std::int64_t dim() const { return n_; }
  const std::vector<double>& band(int d) const { return bands_[static_cast<std::size_t>(d)]; }

 private:
  std::int64_t n_;
  int kw_;  // working bandwidth: K + 1 (one bulge band)
  std::vector<std::vector<double>> bands_;
};

/// Rotation (c, s) in the (y-1, y) plane that zeroes the (x, y) entry:
/// new a(x,y) = s*a(x,y-1) + c*a(x,y) = 0.
bool zeroing_rotation(double f, double g, double& c, double& s) {
  const double r = std::hypot(f, g);
  if (r == 0.0 || std::abs(g) == 0.0) return false;
  c = f / r;
  s = -g / r;
  return true;
}

}  // namespace

Tridiagonal reduce_to_tridiagonal(const core::BandedSymmetricMatrix& h) {
  const std::int64_t n = h.dim();
  Tridiagonal t;
  if (h.bandwidth() <= 1) {
    t.diag.assign(h.band(0).begin(), h.band(0).end());
    if (h.bandwidth() == 1) {
      t.off.assign(h.band(1).begin(), h.band(1).end());
    } else {
      t.off.assign(static_cast<std::size_t>(std::max<std::int64_t>(n - 1, 0)), 0.0);
    }
    return t;
  }

  BandWorkspace w(h);
  for (int b = h.bandwidth(); b >= 2; --b) {
    for (std::int64_t j = 0; j + b < n; ++j) {
      // Kill (j, j+b), then chase the bulge down the band.
      std::int64_t x = j, y = j + b;
      double c, s;
      if (!zeroing_rotation(w.get(x, y - 1), w.get(x, y), c, s)) continue;
      w.rotate(y - 1, c, s);
      w.set(x, y, 0.0);  // clamp rounding residue at the annihilated position
      // The rotation in the (y-1, y) plane spills a bulge to (y-1, y+b).
      x = y - 1;
      y = y + b;
      while (y < n) {
        if (!zeroing_rotation(w.get(x, y - 1), w.get(x, y), c, s)) break;
        w.rotate(y - 1, c, s);
        w.set(x, y, 0.0);
        x = y - 1;
        y = y + b;
      }
    }
  }
  t.diag = w.band(0);
  t.off.assign(w.band(1).begin(), w.band(1).end());
  return t;
}

Tridiagonal reduce_dense_to_tridiagonal(const models::DenseSymmetricMatrix& h) {
  const std::int64_t n = h.dim();
  std::vector<double> a = h.data();  // row-major working copy
  auto at = [&](std::int64_t i, std::int64_t j) -> double& {
    return a[static_cast<std::size_t>(i) * n + j];
  };
  Tridiagonal t;
  t.diag.resize(static_cast<std::size_t>(n));
  t.off.assign(static_cast<std::size_t>(std::max<std::int64_t>(n - 1, 0)), 0.0);

  std::vector<double> v(static_cast<std::size_t>(n)), p(static_cast<std::size_t>(n));
  for (std::int64_t k = 0; k + 2 < n; ++k) {
    double norm2 = 0.0;
    for (std::int64_t i = k + 1; i < n; ++i) norm2 += at(i, k) * at(i, k);
    const double norm = std::sqrt(norm2);
    if (norm == 0.0) continue;
    const double alpha = at(k + 1, k) >= 0.0 ? -norm : norm;
    // Householder vector v (rows k+1..n-1), H = I - 2 v v^T / (v^T v).
    double vtv = 0.0;
    for (std::int64_t i = k + 1; i < n; ++i) {
      v[static_cast<std::size_t>(i)] = at(i, k);
      if (i == k + 1) v[static_cast<std::size_t>(i)] -= alpha;
      vtv += v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)];
    }
    if (vtv == 0.0) continue;
    const double beta = 2.0 / vtv;
    // p = beta * A v; w = p - (beta/2) (p^T v) v; A -= v w^T + w v^T.
    double ptv = 0.0;
    for (std::int64_t i = k + 1; i < n; ++i) {
      double sum = 0.0;
      for (std::int64_t j = k + 1; j < n; ++j) {
        sum += at(i, j) * v[static_cast<std::size_t>(j)];
      }
      p[static_cast<std::size_t>(i)] = beta * sum;
      ptv += p[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)];
    }
    const double half = 0.5 * beta * ptv;
    for (std::int64_t i = k + 1; i < n; ++i) {
      p[static_cast<std::size_t>(i)] -= half * v[static_cast<std::size_t>(i)];
    }
    for (std::int64_t i = k + 1; i < n; ++i) {
      for (std::int64_t j = k + 1; j <= i; ++j) {
        const double upd = at(i, j) - v[static_cast<std::size_t>(i)] * p[static_cast<std::size_t>(j)] -
                           p[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(j)];
        at(i, j) = upd;
        at(j, i) = upd;
      }
    }
    at(k + 1, k) = alpha;
    at(k, k + 1) = alpha;
    for (std::int64_t i = k + 2; i < n; ++i) {
      at(i, k) = 0.0;
      at(k, i) = 0.0;
    }
  }
  for (std::int64_t i = 0; i < n; ++i) t.diag[static_cast<std::size_t>(i)] = at(i, i);
  for (std::int64_t i = 0; i + 1 < n; ++i) t.off[static_cast<std::size_t>(i)] = at(i, i + 1);
  return t;
}

std::int64_t sturm_count_below(const Tridiagonal& t, double x) {
  const std::int64_t n = t.dim();
  double emax2 = 0.0;
  for (double e : t.off) emax2 = std::max(emax2, e * e);
  const double pivmin = std::max(1.0, emax2) * 1e-292;
  std::int64_t count = 0;
  double q = t.diag[0] - x;
  if (std::abs(q) < pivmin) q = -pivmin;
  if (q < 0.0) ++count;
  for (std::int64_t i = 1; i < n; ++i) {
    const double e = t.off[static_cast<std::size_t>(i - 1)];
    q = t.diag[static_cast<std::size_t>(i)] - x - e * e / q;
    if (std::abs(q) < pivmin) q = -pivmin;
    if (q < 0.0) ++count;
  }
  return count;
}

std::int64_t eigen_count(const Tridiagonal& t, double a, double b) {
  if (a > b) return 0;
  const double b_up = std::nextafter(b, std::numeric_limits<double>::infinity());
  return sturm_count_below(t, b_up) - sturm_count_below(t, a);
}

std::vector<double> eigenvalues_bisection(const Tridiagonal& t,
                                          std::optional<std::pair<double, double>> interval,
                                          double tol) {
  auto [glo, ghi] = t.gershgorin();
  glo -= 1e-8;
  ghi += 1e-8;
  double lo = glo, hi = ghi;
  if (interval) {
    lo = std::max(lo, interval->first);
    hi = std::min(hi, std::nextafter(interval->second, std::numeric_limits<double>::infinity()));
    if (lo >= hi) return {};
  }

  struct Segment {
    double a, b;
    std::int64_t ca, cb;
  };
  std::vector<double> out;
  std::vector<Segment> stack;
  const std::int64_t clo = sturm_count_below(t, lo);
  const std::int64_t chi = sturm_count_below(t, hi);
  if (chi > clo) stack.push_back({lo, hi, clo, chi});
  while (!stack.empty()) {
    const Segment seg = stack.back();
    stack.pop_back();
    if (seg.b - seg.a < tol) {
      const double mid = 0.5 * (seg.a + seg.b);
      for (std::int64_t r = 0; r < seg.cb - seg.ca; ++r) out.push_back(mid);
      continue;
    }
    const double mid = 0.5 * (seg.a + seg.b);
    const std::int64_t cm = sturm_count_below(t, mid);
    if (cm > seg.ca) stack.push_back({seg.a, mid, seg.ca, cm});
    if (seg.cb > cm) stack.push_back({mid, seg.b, cm, seg.cb});
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace bandlab::spectrum
