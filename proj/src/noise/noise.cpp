#include "noise/noise.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace bandlab::noise {

using nlohmann::json;

const char* family_name(NoiseFamily f) {
  switch (f) {
    case NoiseFamily::kStableCms: return "stable_cms";
    case NoiseFamily::kPareto: return "pareto";
    case NoiseFamily::kTruncated: return "truncated";
    case NoiseFamily::kHeavierMoment: return "heavier_moment";
    case NoiseFamily::kZero: return "zero";
  }
  return "?";
}

NoiseFamily family_from_name(const std::string& name) {
  if (name == "stable_cms") return NoiseFamily::kStableCms;
  if (name == "pareto") return NoiseFamily::kPareto;
  if (name == "truncated") return NoiseFamily::kTruncated;
  if (name == "heavier_moment") return NoiseFamily::kHeavierMoment;
  if (name == "zero") return NoiseFamily::kZero;
  throw std::invalid_argument("unknown noise family: " + name);
}

void NoiseSpec::validate() const {
  if (family == NoiseFamily::kZero) return;
  if (!(alpha > 0.0 && alpha < 2.0))
    throw std::invalid_argument("NoiseSpec: alpha must be in (0,2)");
  if (sigma < 0.0) throw std::invalid_argument("NoiseSpec: sigma must be >= 0");
  if (sigma > 0.0 && !(sigma < 1.0 / alpha))
    throw std::invalid_argument("NoiseSpec: sigma must be < 1/alpha");
  if (bandwidth < 0) throw std::invalid_argument("NoiseSpec: K must be >= 0");
  if (family == NoiseFamily::kHeavierMoment && !(delta > 0.0))
    throw std::invalid_argument("NoiseSpec: delta must be > 0");
  if (q_override && !(*q_override > 1.0))
    throw std::invalid_argument("NoiseSpec: q override must be > 1");
}

double NoiseSpec::q(std::int64_t n) const {
  if (q_override) return *q_override;
  return std::pow(static_cast<double>(n), omega / (10.0 * alpha));
}

double NoiseSpec::entry_scale(std::int64_t n) const {
  return std::pow(static_cast<double>(n), sigma - 1.0 / alpha);
}

double NoiseSpec::truncation_cutoff(std::int64_t n) const {
  return std::pow(static_cast<double>(n), 1.0 / alpha - sigma) / q(n);
}

std::string NoiseSpec::to_json_string() const {
  json j{{"family", family_name(family)}, {"alpha", alpha},   {"sigma", sigma},
         {"K", bandwidth},                {"delta", delta},   {"seed", seed}};
  if (family == NoiseFamily::kTruncated) j["omega"] = omega;
  if (q_override) j["q"] = *q_override;
  return j.dump();
}

NoiseSpec noise_spec_from_json(const json& j) {
  static const std::vector<std::string> known{"family", "alpha", "sigma", "K",
                                              "delta",  "seed",  "omega", "q"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
      throw std::invalid_argument("noise spec: unknown key \"" + it.key() + "\"");
    }
  }
  NoiseSpec s;
  s.family = family_from_name(j.at("family").get<std::string>());
  if (j.contains("alpha")) s.alpha = j.at("alpha").get<double>();
  if (j.contains("sigma")) s.sigma = j.at("sigma").get<double>();
  if (j.contains("K")) s.bandwidth = j.at("K").get<int>();
  if (j.contains("delta")) s.delta = j.at("delta").get<double>();
  if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("omega")) s.omega = j.at("omega").get<double>();
  if (j.contains("q")) s.q_override = j.at("q").get<double>();
  s.validate();
  return s;
}

NoiseSpec NoiseSpec::from_json_string(const std::string& text) {
  return noise_spec_from_json(json::parse(text));
}

double sample_symmetric_stable(double alpha, SplitMix64& rng) {
  if (!(alpha > 0.0 && alpha < 2.0))
    throw std::invalid_argument("sample_symmetric_stable: alpha must be in (0,2)");
  const double u = M_PI * (rng.uniform01() - 0.5);  // uniform on (-pi/2, pi/2)
  const double w = -std::log(rng.uniform01());      // exponential(1)
  if (alpha == 1.0) return std::tan(u);
  const double s = std::sin(alpha * u) / std::pow(std::cos(u), 1.0 / alpha);
  const double t = std::pow(std::cos(u - alpha * u) / w, (1.0 - alpha) / alpha);
  return s * t;
}

double sample_pareto_symmetric(double alpha, SplitMix64& rng) {
  if (!(alpha > 0.0 && alpha < 2.0))
    throw std::invalid_argument("sample_pareto_symmetric: alpha must be in (0,2)");
  const double mag = std::pow(rng.uniform01(), -1.0 / alpha);
  const double sign = rng.uniform01() < 0.5 ? -1.0 : 1.0;
  return sign * mag;
}

double sample_family_xi(const NoiseSpec& spec, std::int64_t n, SplitMix64& rng) {
  switch (spec.family) {
    case NoiseFamily::kZero:
      return 0.0;
    case NoiseFamily::kPareto:
      return sample_pareto_symmetric(spec.alpha, rng);
    case NoiseFamily::kStableCms:
      return sample_symmetric_stable(spec.alpha, rng);
    case NoiseFamily::kTruncated: {
      const double xi = sample_pareto_symmetric(spec.alpha, rng);
      return std::abs(xi) <= spec.truncation_cutoff(n) ? xi : 0.0;
    }
    case NoiseFamily::kHeavierMoment: {
      const double tail = spec.alpha + 2.0 * spec.delta;
      const double mag = std::pow(rng.uniform01(), -1.0 / tail);
      const double sign = rng.uniform01() < 0.5 ? -1.0 : 1.0;
      return sign * mag;
    }
  }
  return 0.0;
}

namespace {

SplitMix64 entry_stream(const NoiseSpec& spec, std::int64_t i, int d) {
  const std::uint64_t entry = static_cast<std::uint64_t>(i) *
                                  (static_cast<std::uint64_t>(spec.bandwidth) + 1) +
                              static_cast<std::uint64_t>(d);
  return SplitMix64(mix64(spec.seed ^ mix64(entry)));
}

}  // namespace

core::BandedSymmetricMatrix build_noise(std::int64_t n, const NoiseSpec& spec) {
  spec.validate();
  core::BandedSymmetricMatrix a(n, spec.bandwidth);
  if (spec.family == NoiseFamily::kZero) return a;
  const double scale = spec.entry_scale(n);
  for (int d = 0; d <= spec.bandwidth; ++d) {
    auto band = a.band(d);
    for (std::int64_t i = 0; i + d < n; ++i) {
      SplitMix64 s = entry_stream(spec, i, d);
      band[static_cast<std::size_t>(i)] = scale * sample_family_xi(spec, n, s);
    }
  }
  return a;
}

std::int64_t LabelMatrix::f_count() const {
  std::int64_t c = 0;
  for (const auto& band : flagged) {
    for (std::uint8_t v : band) c += v;
  }
  return c;
}

std::vector<std::int64_t> LabelMatrix::f_rows() const {
  std::vector<std::int64_t> rows;
  for (int d = 0; d < static_cast<int>(flagged.size()); ++d) {
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(flagged[d].size()); ++i) {
      if (flagged[d][static_cast<std::size_t>(i)]) rows.push_back(i);
    }
  }
  std::sort(rows.begin(), rows.end());
  return rows;
}

double label_cutoff_xi(std::int64_t n, const NoiseSpec& spec, double epsilon) {
  return std::pow(spec.bandwidth + 1.0, 1.0 / spec.alpha) *
         std::pow(static_cast<double>(n), (1.0 - epsilon / 10.0) / spec.alpha) *
         std::pow(static_cast<double>(n), -spec.sigma);
}

LabelMatrix sample_labels(std::int64_t n, const NoiseSpec& spec, double epsilon) {
  spec.validate();
  if (spec.family != NoiseFamily::kPareto && spec.family != NoiseFamily::kStableCms) {
    throw std::invalid_argument("sample_labels: family must be pareto or stable_cms");
  }
  LabelMatrix labels;
  labels.n = n;
  labels.bandwidth = spec.bandwidth;
  labels.cutoff_xi = label_cutoff_xi(n, spec, epsilon);
  labels.flagged.resize(static_cast<std::size_t>(spec.bandwidth) + 1);
  for (int d = 0; d <= spec.bandwidth; ++d) {
    auto& band = labels.flagged[static_cast<std::size_t>(d)];
    band.assign(static_cast<std::size_t>(std::max<std::int64_t>(n - d, 0)), 0);
    for (std::int64_t i = 0; i + d < n; ++i) {
      SplitMix64 s = entry_stream(spec, i, d);
      const double xi = sample_family_xi(spec, n, s);
      band[static_cast<std::size_t>(i)] = std::abs(xi) >= labels.cutoff_xi ? 1 : 0;
    }
  }
  return labels;
}

double pareto_f_probability(std::int64_t n, const NoiseSpec& spec, double epsilon) {
  const double cutoff = label_cutoff_xi(n, spec, epsilon);
  if (cutoff <= 1.0) return 1.0;  // Pareto support starts at 1
  return std::pow(cutoff, -spec.alpha);
}

const char* label_class_name(LabelClass c) {
  switch (c) {
    case LabelClass::kSeparablyAdmissible: return "separably_admissible";
    case LabelClass::kAdmissible: return "admissible";
    case LabelClass::kNeither: return "neither";
  }
  return "?";
}

LabelClass classify_label(const LabelMatrix& labels, std::int64_t n, double epsilon,
                          double sigma_alpha) {
  const double nn = static_cast<double>(n);
  const double cap = (labels.bandwidth + 1.0) *
                     std::pow(nn, sigma_alpha + epsilon / 4.0);
  if (static_cast<double>(labels.f_count()) > cap) return LabelClass::kNeither;

  const double l_sep = std::pow(nn, 1.0 - 2.0 * sigma_alpha - 0.5 * epsilon);
  const auto rows = labels.f_rows();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const double row1 = static_cast<double>(rows[r] + 1);  // 1-based
    if (row1 <= l_sep || row1 >= nn - l_sep) return LabelClass::kAdmissible;
    if (r > 0 && static_cast<double>(rows[r] - rows[r - 1]) <= l_sep) {
      return LabelClass::kAdmissible;
    }
  }
  return LabelClass::kSeparablyAdmissible;
}

bool detect_dn(const core::BandedSymmetricMatrix& a, double q, double l_scale) {
  const std::int64_t n = a.dim();
  const double threshold = 1.0 / q;
  std::vector<std::int64_t> rows;  // rows of atypical in-band entries (i <= j)
  for (int d = 0; d <= a.bandwidth(); ++d) {
    auto band = a.band(d);
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(band.size()); ++i) {
      if (std::abs(band[static_cast<std::size_t>(i)]) > threshold) rows.push_back(i);
    }
  }
  std::sort(rows.begin(), rows.end());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const double row1 = static_cast<double>(rows[r] + 1);
    if (row1 <= l_scale || row1 >= static_cast<double>(n) - l_scale) return true;  // D_N^2
    if (r > 0 && static_cast<double>(rows[r] - rows[r - 1]) <= 2.0 * l_scale) {
      return true;  // D_N^1
    }
  }
  return false;
}

double truncated_moment_bound(double alpha, int k, double x) {
  if (!(x >= 1.0)) throw std::invalid_argument("truncated_moment_bound: x must be >= 1");
  if (k < 1) throw std::invalid_argument("truncated_moment_bound: k must be >= 1");
  const double kk = static_cast<double>(k);
  if (kk == alpha)
    throw std::invalid_argument("truncated_moment_bound: k == alpha is undefined");
  if (kk < alpha) {
    // Constant branch: the k-th moment converges, so the sharp x-independent
    // constant for the unit-tail law is the full moment alpha/(alpha - k).
    return alpha / (alpha - kk);
  }
  return kk / (kk - alpha) * std::pow(x, kk - alpha);  // L0 == 1 convention
}

double sample_pareto_conditional(double alpha, double cutoff_xi, bool flagged,
                                 SplitMix64& rng) {
  // P(|xi| >= x) = x^-alpha on x >= 1; |xi| = U^{-1/alpha} with U uniform.
  // Conditioning restricts U to (0, cutoff^-alpha] (flagged) or
  // (cutoff^-alpha, 1) (typical).
  const double u_cut = std::min(1.0, std::pow(cutoff_xi, -alpha));
  const double u0 = rng.uniform01();
  const double u = flagged ? u0 * u_cut : u_cut + u0 * (1.0 - u_cut);
  const double sign = rng.uniform01() < 0.5 ? -1.0 : 1.0;
  return sign * std::pow(u, -1.0 / alpha);
}

}  // namespace bandlab::noise
