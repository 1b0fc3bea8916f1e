#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/banded_matrix.hpp"
#include "noise/rng.hpp"

namespace bandlab::noise {

enum class NoiseFamily {
  kStableCms,      // symmetric alpha-stable via Chambers-Mallows-Stuck
  kPareto,         // symmetric Pareto, P(|xi| >= x) = x^-alpha exactly for x >= 1
  kTruncated,      // symmetric Pareto zeroed beyond N^{1/alpha} N^{-sigma} / q
  kHeavierMoment,  // symmetric Pareto with tail exponent alpha + 2*delta
  kZero,
};

const char* family_name(NoiseFamily f);
NoiseFamily family_from_name(const std::string& name);

/// Law of the noisy matrix: family, tail exponent, scaling, bandwidth, seed.
/// Serializes to/from the harness JSON config (see noise.cpp).
struct NoiseSpec {
  NoiseFamily family = NoiseFamily::kPareto;
  double alpha = 1.0;
  double sigma = 0.0;
  int bandwidth = 0;  // K
  double delta = 0.25;           // heavier_moment tail is alpha + 2*delta
  std::uint64_t seed = 0;
  double omega = 0.4;            // q = N^(omega / (10 alpha)) for the truncated family
  std::optional<double> q_override;

  void validate() const;

  double q(std::int64_t n) const;
  /// Per-entry scale N^(sigma - 1/alpha); sigma = 0 recovers the base model.
  double entry_scale(std::int64_t n) const;
  /// Truncation cutoff in xi units, N^{1/alpha} N^{-sigma} / q, so that the
  /// scaled entry satisfies N^sigma |A_ij| <= 1/q almost surely.
  double truncation_cutoff(std::int64_t n) const;

  std::string to_json_string() const;
  static NoiseSpec from_json_string(const std::string& text);
};

/// One draw of a standard symmetric alpha-stable variable (CMS transform;
/// alpha = 1 reduces to tan(U), the standard Cauchy). Consumes two uniforms.
double sample_symmetric_stable(double alpha, SplitMix64& rng);

/// Symmetric Pareto: |xi| = U^(-1/alpha), independent sign; two uniforms.
double sample_pareto_symmetric(double alpha, SplitMix64& rng);

/// Family draw in xi units (before the N^(sigma - 1/alpha) scale).
double sample_family_xi(const NoiseSpec& spec, std::int64_t n, SplitMix64& rng);

/// Banded noisy matrix. Entry (i, i+d), 0-based, d = 0..K, is drawn from the
/// substream seeded by mix64(spec.seed ^ mix64(i*(K+1)+d)) and scaled by
/// N^(sigma - 1/alpha); deterministic for fixed (spec, n).
core::BandedSymmetricMatrix build_noise(std::int64_t n, const NoiseSpec& spec);

/// T/F marking of the in-band entries (i <= j <= i+K). F means the
/// (unscaled) draw satisfies |xi| >= cutoff_xi with
/// cutoff_xi = (K+1)^{1/alpha} N^{(1 - eps/10)/alpha} N^{-sigma}.
/// Shares the per-entry substreams of build_noise, so the labels of a trial
/// match its matrix exactly.
struct LabelMatrix {
  std::int64_t n = 0;
  int bandwidth = 0;
  double cutoff_xi = 0.0;
  std::vector<std::vector<std::uint8_t>> flagged;  // band layout; 1 = F

  std::int64_t f_count() const;
  /// Sorted 0-based rows i carrying at least one F label.
  std::vector<std::int64_t> f_rows() const;
};

LabelMatrix sample_labels(std::int64_t n, const NoiseSpec& spec, double epsilon);

/// Closed-form per-entry F probability for the Pareto family.
double pareto_f_probability(std::int64_t n, const NoiseSpec& spec, double epsilon);

enum class LabelClass { kSeparablyAdmissible, kAdmissible, kNeither };

const char* label_class_name(LabelClass c);

/// Admissible: F-count <= (K+1) N^{eps/4} (sigma = 0) or
/// (K+1) N^{sigma*alpha + eps/4}. Separably admissible additionally requires
/// every F row (1-based) outside [1, Lsep] u [N - Lsep, N] and pairwise row
/// gaps > Lsep, with Lsep = N^{1 - 0.5 eps} (sigma = 0) or
/// N^{1 - 2 sigma*alpha - 0.5 eps}.
LabelClass classify_label(const LabelMatrix& labels, std::int64_t n, double epsilon,
                          double sigma_alpha);

/// Event D_N: two atypical entries (|A| > 1/q) whose rows are within
/// 2*l_scale of each other, or one atypical entry with a 1-based row in
/// [1, l_scale] u [n - l_scale, n].
bool detect_dn(const core::BandedSymmetricMatrix& a, double q, double l_scale);

/// Truncated-moment bound E[A^k 1_{A <= x}] <= k/(k - alpha) x^{k - alpha}
/// for k > alpha (L0 == 1 convention) and 1 for k < alpha. Rejects k == alpha.
double truncated_moment_bound(double alpha, int k, double x);

/// Conditional draws given a label (test oracle for the two-stage sampling
/// equivalence): Pareto magnitude conditioned below / above cutoff_xi.
double sample_pareto_conditional(double alpha, double cutoff_xi, bool flagged, SplitMix64& rng);

}  // namespace bandlab::noise
