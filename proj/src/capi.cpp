#include "bandlab.h"

#include <complex>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <stdexcept>
#include <string>
#include <vector>

#include "core/banded_matrix.hpp"
#include "core/spectral.hpp"
#include "harness/experiments.hpp"
#include "models/models.hpp"
#include "noise/noise.hpp"
#include "resolvent/resolvent.hpp"
#include "spectrum/spectrum.hpp"

struct bandlab_matrix {
  bandlab::core::BandedSymmetricMatrix m;
};

namespace {

thread_local std::string g_last_error;

void set_error(const char* what) { g_last_error = what ? what : "unknown error"; }

int classify(const std::exception& e) {
  if (dynamic_cast<const std::invalid_argument*>(&e) ||
      dynamic_cast<const std::out_of_range*>(&e)) {
    return BANDLAB_ERR_INVALID;
  }
  return BANDLAB_ERR_NUMERIC;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return BANDLAB_OK;
  } catch (const std::exception& e) {
    set_error(e.what());
    return classify(e);
  } catch (...) {
    set_error("unknown failure");
    return BANDLAB_ERR_INTERNAL;
  }
}

template <typename Fn>
bandlab_matrix* guarded_matrix(Fn&& fn) {
  try {
    auto* out = new bandlab_matrix{fn()};
    g_last_error.clear();
    return out;
  } catch (const std::exception& e) {
    set_error(e.what());
    return nullptr;
  } catch (...) {
    set_error("unknown failure");
    return nullptr;
  }
}

}  // namespace

extern "C" {

const char* bandlab_version(void) { return "0.1.0"; }

const char* bandlab_last_error(void) { return g_last_error.c_str(); }

void bandlab_string_free(char* s) { std::free(s); }

bandlab_matrix* bandlab_matrix_laplacian(int64_t n) {
  return guarded_matrix([&] { return bandlab::models::laplacian_1d(n); });
}

bandlab_matrix* bandlab_matrix_beta_limit(int64_t n) {
  return guarded_matrix([&] { return bandlab::models::beta_limit_matrix(n); });
}

bandlab_matrix* bandlab_matrix_zero(int64_t n, int32_t bandwidth) {
  return guarded_matrix([&] { return bandlab::core::BandedSymmetricMatrix(n, bandwidth); });
}

bandlab_matrix* bandlab_matrix_noise(int64_t n, const char* noise_spec_json) {
  return guarded_matrix([&] {
    if (!noise_spec_json) throw std::invalid_argument("noise spec is null");
    const auto spec = bandlab::noise::NoiseSpec::from_json_string(noise_spec_json);
    return bandlab::noise::build_noise(n, spec);
  });
}

bandlab_matrix* bandlab_matrix_add(const bandlab_matrix* a, const bandlab_matrix* b) {
  return guarded_matrix([&] {
    if (!a || !b) throw std::invalid_argument("null matrix handle");
    return bandlab::core::add(a->m, b->m);
  });
}

int64_t bandlab_matrix_dim(const bandlab_matrix* m) { return m ? m->m.dim() : 0; }

int32_t bandlab_matrix_bandwidth(const bandlab_matrix* m) {
  return m ? static_cast<int32_t>(m->m.bandwidth()) : -1;
}

int bandlab_matrix_get(const bandlab_matrix* m, int64_t i, int64_t j, double* out) {
  return guarded([&] {
    if (!m || !out) throw std::invalid_argument("null argument");
    *out = m->m.get(i, j);
  });
}

void bandlab_matrix_free(bandlab_matrix* m) { delete m; }

int bandlab_green_entry(const bandlab_matrix* h, double energy, double eta, int64_t i, int64_t j,
                        double out_re_im[2]) {
  return guarded([&] {
    if (!h || !out_re_im) throw std::invalid_argument("null argument");
    const bandlab::core::SpectralParameter z(energy, eta);
    bandlab::resolvent::ShiftedBandFactorization fact(h->m, z.z());
    const auto col = fact.green_column(j);
    if (i < 0 || i >= h->m.dim()) throw std::out_of_range("row index");
    out_re_im[0] = col[static_cast<std::size_t>(i)].real();
    out_re_im[1] = col[static_cast<std::size_t>(i)].imag();
  });
}

int bandlab_stieltjes_trace(const bandlab_matrix* h, double energy, double eta,
                            double out_re_im[2]) {
  return guarded([&] {
    if (!h || !out_re_im) throw std::invalid_argument("null argument");
    const auto m =
        bandlab::resolvent::stieltjes_trace(h->m, bandlab::core::SpectralParameter(energy, eta));
    out_re_im[0] = m.real();
    out_re_im[1] = m.imag();
  });
}

int bandlab_green_closed_form(int64_t n, double energy, double eta, int64_t i, int64_t j,
                              double out_re_im[2]) {
  return guarded([&] {
    if (!out_re_im) throw std::invalid_argument("null argument");
    const auto g = bandlab::models::green_closed_form(n, std::complex<double>(energy, eta), i, j);
    out_re_im[0] = g.real();
    out_re_im[1] = g.imag();
  });
}

int bandlab_stieltjes_arcsine(double energy, double eta, double out_re_im[2]) {
  return guarded([&] {
    if (!out_re_im) throw std::invalid_argument("null argument");
    const auto m = bandlab::models::stieltjes_arcsine(std::complex<double>(energy, eta));
    out_re_im[0] = m.real();
    out_re_im[1] = m.imag();
  });
}

int bandlab_stieltjes_semicircle(double energy, double eta, double out_re_im[2]) {
  return guarded([&] {
    if (!out_re_im) throw std::invalid_argument("null argument");
    const auto m = bandlab::models::stieltjes_semicircle(std::complex<double>(energy, eta));
    out_re_im[0] = m.real();
    out_re_im[1] = m.imag();
  });
}

int bandlab_eigenvalues(const bandlab_matrix* h, double* out) {
  return guarded([&] {
    if (!h || !out) throw std::invalid_argument("null argument");
    const auto tri = bandlab::spectrum::reduce_to_tridiagonal(h->m);
    const auto eigs = bandlab::spectrum::eigenvalues_bisection(tri);
    std::memcpy(out, eigs.data(), eigs.size() * sizeof(double));
  });
}

int bandlab_green_report(const char* request_json, char** out_json) {
  return guarded([&] {
    if (!request_json || !out_json) throw std::invalid_argument("null argument");
    *out_json = dup_string(bandlab::harness::green_report_json(request_json));
    if (!*out_json) throw std::bad_alloc();
  });
}

int bandlab_spectrum_report(const char* request_json, char** out_json) {
  return guarded([&] {
    if (!request_json || !out_json) throw std::invalid_argument("null argument");
    *out_json = dup_string(bandlab::harness::spectrum_report_json(request_json));
    if (!*out_json) throw std::bad_alloc();
  });
}

const char* bandlab_experiment_list(void) {
  static const std::string names = [] {
    std::string s;
    for (const auto& n : bandlab::harness::experiment_names()) {
      s += n;
      s += "\n";
    }
    return s;
  }();
  return names.c_str();
}

int bandlab_experiment_run(const char* config_json, char** out_report_json) {
  return guarded([&] {
    if (!config_json) throw std::invalid_argument("null config");
    const auto config = bandlab::harness::ExperimentConfig::from_json_string(config_json);
    const auto report = bandlab::harness::run_experiment(config);
    if (out_report_json) {
      *out_report_json = dup_string(report.to_json().dump(2));
      if (!*out_report_json) throw std::bad_alloc();
    }
  });
}

int bandlab_selftest(char** out_log) {
  std::vector<std::string> log;
  bool ok = false;
  const int rc = guarded([&] { ok = bandlab::harness::selftest(log); });
  if (out_log) {
    std::string joined;
    for (const auto& line : log) {
      joined += line;
      joined += "\n";
    }
    *out_log = dup_string(joined);
  }
  if (rc != BANDLAB_OK) return rc;
  return ok ? BANDLAB_OK : BANDLAB_ERR_NUMERIC;
}

}  // extern "C"
