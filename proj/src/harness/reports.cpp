#include <algorithm>
#include <cmath>
#include <filesystem>
#include <memory>
#include <numeric>
#include <stdexcept>

#include "harness/experiments.hpp"
#include "models/models.hpp"
#include "noise/noise.hpp"
#include "resolvent/resolvent.hpp"
#include "spectrum/spectrum.hpp"

namespace bandlab::harness {

using json = nlohmann::json;
using models::Complex;

namespace {

void reject_unknown_keys(const json& j, const std::vector<std::string>& known,
                         const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
      throw std::invalid_argument("request: unknown key \"" + it.key() + "\" in " + where);
    }
  }
}

core::BandedSymmetricMatrix request_matrix(const json& j, std::int64_t n, bool* noisy) {
  const auto model = model_from_name(j.value("model", "laplacian"));
  if (model == ModelKind::kWigner) {
    throw std::invalid_argument("request: wigner is not supported by this endpoint");
  }
  auto h = model == ModelKind::kLaplacian ? models::laplacian_1d(n)
                                          : models::beta_limit_matrix(n);
  if (noisy) *noisy = false;
  if (j.contains("noise")) {
    const auto spec = noise::NoiseSpec::from_json_string(j.at("noise").dump());
    if (spec.family != noise::NoiseFamily::kZero) {
      h = core::add(h, noise::build_noise(n, spec));
      if (noisy) *noisy = true;
    }
  }
  return h;
}

}  // namespace

std::string green_report_json(const std::string& request_json) {
  const json req = json::parse(request_json);
  reject_unknown_keys(req, {"model", "N", "energies", "etas", "noise", "pairs"}, "green request");
  const std::int64_t n = req.at("N").get<std::int64_t>();
  if (n < 1) throw std::invalid_argument("request: N must be >= 1");
  const auto energies = req.at("energies").get<std::vector<double>>();
  const auto etas = req.at("etas").get<std::vector<double>>();
  const std::string pairs_kind = req.value("pairs", "diag");

  bool noisy = false;
  const auto h = request_matrix(req, n, &noisy);
  const bool laplacian_ref = req.value("model", "laplacian") == std::string("laplacian");

  json reports = json::array();
  for (double energy : energies) {
    for (double eta : etas) {
      const core::SpectralParameter z(energy, eta);
      resolvent::ShiftedBandFactorization fact(h, z.z());

      resolvent::GreenReport rep;
      rep.z = z;
      if (pairs_kind == "diag") {
        for (std::int64_t i = 0; i < n; ++i) rep.pairs.emplace_back(i, i);
      } else if (pairs_kind == "band") {
        for (std::int64_t i = 0; i < n; ++i) {
          for (std::int64_t j = i; j <= std::min<std::int64_t>(n - 1, i + h.bandwidth()); ++j) {
            rep.pairs.emplace_back(i, j);
          }
        }
      } else if (pairs_kind == "full") {
        if (n > 256) throw std::invalid_argument("request: pairs=full needs N <= 256");
        for (std::int64_t i = 0; i < n; ++i) {
          for (std::int64_t j = i; j < n; ++j) rep.pairs.emplace_back(i, j);
        }
      } else {
        throw std::invalid_argument("request: pairs must be diag, band or full");
      }

      // group requested pairs by column and stream: one solve per column,
      // no O(N^2) retention
      std::vector<std::vector<std::pair<std::int64_t, std::size_t>>> by_column(
          static_cast<std::size_t>(n));
      for (std::size_t s = 0; s < rep.pairs.size(); ++s) {
        by_column[static_cast<std::size_t>(rep.pairs[s].second)].emplace_back(
            rep.pairs[s].first, s);
      }
      rep.values.assign(rep.pairs.size(), Complex(0.0));

      std::unique_ptr<models::ClosedFormContext> ctx;
      if (laplacian_ref && !noisy) {
        ctx = std::make_unique<models::ClosedFormContext>(n, z.z());
      }
      Complex trace_sum = 0.0;
      for (std::int64_t jcol = 0; jcol < n; ++jcol) {
        const auto col = fact.green_column(jcol);
        trace_sum += col[static_cast<std::size_t>(jcol)];
        for (const auto& [i, slot] : by_column[static_cast<std::size_t>(jcol)]) {
          rep.values[slot] = col[static_cast<std::size_t>(i)];
        }
      }
      rep.trace = trace_sum / static_cast<double>(n);
      if (ctx) {
        for (std::size_t s = 0; s < rep.pairs.size(); ++s) {
          rep.entry_deviation.push_back(
              std::abs(rep.values[s] - ctx->entry(rep.pairs[s].first, rep.pairs[s].second)));
        }
      }
      if (laplacian_ref) {
        rep.trace_deviation = std::abs(rep.trace - models::stieltjes_arcsine(z.z()));
      }
      reports.push_back(json::parse(rep.to_json_string()));
    }
  }
  json out;
  out["N"] = n;
  out["reports"] = reports;
  return out.dump();
}

std::string spectrum_report_json(const std::string& request_json) {
  const json req = json::parse(request_json);
  reject_unknown_keys(req,
                      {"model", "N", "kappa", "noise", "output_prefix", "eigenvectors", "p"},
                      "spectrum request");
  const std::int64_t n = req.at("N").get<std::int64_t>();
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("request: N must be even and >= 2");
  const double kappa = req.value("kappa", 0.5);
  const int p = req.value("p", 3);
  const bool want_vectors = req.value("eigenvectors", false);

  const auto h = request_matrix(req, n, nullptr);
  const auto tri = spectrum::reduce_to_tridiagonal(h);

  spectrum::SpectralDecomposition decomp;
  decomp.eigenvalues = spectrum::eigenvalues_bisection(tri);

  json out;
  out["N"] = n;
  out["kappa"] = kappa;
  spectrum::RigidityDetail detail;
  out["rigidity_dev"] = spectrum::rigidity_report(decomp.eigenvalues, n, kappa, &detail);
  out["rigidity_mismatched_counts"] = detail.mismatched_counts;
  out["arcsine_dev"] = spectrum::empirical_vs_arcsine(decomp.eigenvalues, n, kappa);
  out["trace"] = std::accumulate(decomp.eigenvalues.begin(), decomp.eigenvalues.end(), 0.0);

  if (want_vectors) {
    const auto removal = core::removal_set(h.bandwidth(), p);
    const double eta = std::pow(static_cast<double>(n), -0.6);
    const auto deloc = spectrum::delocalization_report(h, kappa, removal, eta);
    out["max_vinf"] = deloc.max_inf_norm;
    out["vectors_computed"] = deloc.vectors_computed;
    out["deloc_failures"] = deloc.failures;
  }

  if (req.contains("output_prefix")) {
    const std::string prefix = req.at("output_prefix").get<std::string>();
    const auto parent = std::filesystem::path(prefix).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    decomp.write_eigenvalues_csv(prefix + ".eigenvalues.csv");
    out["eigenvalues_csv"] = prefix + ".eigenvalues.csv";
    if (want_vectors) {
      // store the bulk eigenvectors referenced by index
      const auto eigs = spectrum::eigenvalues_bisection(
          tri, std::make_pair(-2.0 + kappa, 2.0 - kappa));
      std::int64_t idx = 0;
      for (double l : eigs) {
        try {
          decomp.eigenvectors[idx] = spectrum::eigenvector(h, l);
        } catch (const std::runtime_error&) {
          // recorded per index, not fatal
        }
        ++idx;
      }
      decomp.write_eigenvectors_binary(prefix + ".vectors.bin");
      out["eigenvectors_bin"] = prefix + ".vectors.bin";
      out["eigenvectors_stored"] = decomp.eigenvectors.size();
      out["eigenvector_format"] = "float64 little-endian row-major";
    }
  }
  return out.dump();
}

// ---------------------------------------------------------------------------
// selftest
// ---------------------------------------------------------------------------

namespace {

bool check(std::vector<std::string>& log, const std::string& name, bool ok,
           const std::string& detail = "") {
  log.push_back(std::string(ok ? "[ok]   " : "[FAIL] ") + name +
                (detail.empty() ? "" : " (" + detail + ")"));
  return ok;
}

}  // namespace

bool selftest(std::vector<std::string>& log) {
  bool all = true;
  try {
    // removal sets
    all &= check(log, "removal_set(0..1) empty",
                 core::removal_set(0, 3).empty() && core::removal_set(1, 3).empty());
    const auto r2 = core::removal_set(2, 3);
    all &= check(log, "removal_set(2,3) == {0} radius 1e-3",
                 r2.points.size() == 1 && std::abs(r2.points[0]) < 1e-15 &&
                     std::abs(r2.radius - 1e-3) < 1e-18);

    // closed form vs banded solve, N = 64
    {
      const auto h = models::laplacian_1d(64);
      const core::SpectralParameter z(0.5, 0.1);
      resolvent::ShiftedBandFactorization fact(h, z.z());
      models::ClosedFormContext ctx(64, z.z());
      double worst = 0.0, scale = 0.0;
      for (std::int64_t j = 0; j < 64; ++j) {
        const auto col = fact.green_column(j);
        for (std::int64_t i = 0; i < 64; ++i) {
          worst = std::max(worst, std::abs(col[static_cast<std::size_t>(i)] - ctx.entry(i, j)));
          scale = std::max(scale, std::abs(ctx.entry(i, j)));
        }
      }
      all &= check(log, "closed form vs banded LU (N=64)", worst / scale < 1e-9,
                   "normwise " + std::to_string(worst / scale));
    }

    // Ward identity on a noisy instance
    {
      noise::NoiseSpec spec;
      spec.family = noise::NoiseFamily::kPareto;
      spec.alpha = 1.0;
      spec.bandwidth = 1;
      spec.seed = 2024;
      const auto h = core::add(models::laplacian_1d(128), noise::build_noise(128, spec));
      double worst = 0.0;
      for (std::int64_t k : {0, 31, 64, 100, 127}) {
        worst = std::max(worst,
                         resolvent::ward_residual(h, core::SpectralParameter(0.3, 0.05), k));
      }
      all &= check(log, "Ward identity residual < 1e-9", worst < 1e-9, std::to_string(worst));

      const auto zero = noise::build_noise(128, [] {
        noise::NoiseSpec s;
        s.family = noise::NoiseFamily::kZero;
        return s;
      }());
      const double res = resolvent::resolvent_identity_residual(
          models::laplacian_1d(128), zero, core::SpectralParameter(0.5, 0.1));
      all &= check(log, "resolvent identity residual (A=0) == 0", res < 1e-14,
                   std::to_string(res));
    }

    // Herglotz branches
    {
      bool ok = true;
      for (double e : {-1.5, -0.5, 0.0, 0.5, 1.5}) {
        for (double eta : {1e-3, 0.1, 1.0}) {
          const Complex z(e, eta);
          ok = ok && models::stieltjes_arcsine(z).imag() > 0.0;
          const Complex m = models::stieltjes_semicircle(z);
          ok = ok && m.imag() > 0.0 && std::abs(m * m + z * m + 1.0) < 1e-12;
        }
      }
      all &= check(log, "arcsine/semicircle Herglotz branches + self-consistency", ok);
    }

    // Sturm bisection vs Laplacian spectrum
    {
      const auto tri = spectrum::reduce_to_tridiagonal(models::laplacian_1d(100));
      const auto eigs = spectrum::eigenvalues_bisection(tri);
      double worst = 0.0;
      for (std::size_t k = 0; k < eigs.size(); ++k) {
        const double exact = 2.0 * std::cos((100.0 - static_cast<double>(k)) * M_PI / 101.0);
        worst = std::max(worst, std::abs(eigs[k] - exact));
      }
      all &= check(log, "Sturm bisection vs closed-form Laplacian spectrum (N=100)",
                   worst < 1e-10, std::to_string(worst));
    }

    // noise determinism
    {
      noise::NoiseSpec spec;
      spec.family = noise::NoiseFamily::kStableCms;
      spec.alpha = 1.5;
      spec.bandwidth = 2;
      spec.seed = 99;
      const auto a1 = noise::build_noise(200, spec);
      const auto a2 = noise::build_noise(200, spec);
      bool same = true;
      for (int d = 0; d <= 2; ++d) {
        for (std::size_t i = 0; i < a1.band(d).size(); ++i) {
          same = same && a1.band(d)[i] == a2.band(d)[i];
        }
      }
      all &= check(log, "noise build determinism", same);
    }

    // minor-trace bounds on a fixed instance
    {
      noise::NoiseSpec spec;
      spec.family = noise::NoiseFamily::kPareto;
      spec.alpha = 1.0;
      spec.bandwidth = 0;
      spec.seed = 7;
      const auto h = core::add(models::laplacian_1d(100), noise::build_noise(100, spec));
      const core::SpectralParameter z(0.2, 0.05);
      const auto m = resolvent::stieltjes_trace(h, z);
      const auto m_t = resolvent::minor_trace(h, {10, 40, 90}, z);
      const double gap = std::abs(m - m_t);
      const double bound = 3.0 / (100.0 * 0.05);
      all &= check(log, "minor trace bound |m - m^(T)| <= |T|/(N eta)", gap <= bound,
                   std::to_string(gap) + " <= " + std::to_string(bound));
    }

    // domain mesh floors
    {
      core::SpectralDomain d;
      d.epsilon = 0.5;
      d.kappa = 0.5;
      const auto mesh = core::domain_mesh(d, 100, 3, 2);
      bool ok = mesh.size() == 6;
      for (const auto& zz : mesh) ok = ok && zz.eta >= std::pow(100.0, -0.5) - 1e-15;
      all &= check(log, "domain mesh eta floor", ok);
    }
  } catch (const std::exception& e) {
    all = check(log, "selftest aborted by exception", false, e.what());
  }
  return all;
}

}  // namespace bandlab::harness
