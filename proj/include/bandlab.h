/* bandlab -- banded-matrix spectral laboratory.
 *
 * C API for the shared library. All functions are thread-safe unless noted.
 * Functions returning int use the BANDLAB_* status codes below; on failure a
 * human-readable message is available from bandlab_last_error() (thread-local).
 * Strings returned through char** out parameters are heap-allocated and must
 * be released with bandlab_string_free().
 */
#ifndef BANDLAB_H
#define BANDLAB_H

#include <stddef.h>
#include <stdint.h>

#if defined _WIN32
#define BANDLAB_API __declspec(dllexport)
#else
#define BANDLAB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

enum {
  BANDLAB_OK = 0,
  BANDLAB_ERR_INVALID = 1, /* bad arguments / config validation failure */
  BANDLAB_ERR_NUMERIC = 2, /* numeric failure (singular factor, no convergence) */
  BANDLAB_ERR_IO = 3,      /* file system failure */
  BANDLAB_ERR_INTERNAL = 4
};

BANDLAB_API const char* bandlab_version(void);

/* Last error message for the calling thread; empty string if none. */
BANDLAB_API const char* bandlab_last_error(void);

BANDLAB_API void bandlab_string_free(char* s);

/* ---- matrices (opaque handles) ------------------------------------------ */

typedef struct bandlab_matrix bandlab_matrix;

/* 1d discrete Laplacian: zero diagonal, unit first off-diagonal. */
BANDLAB_API bandlab_matrix* bandlab_matrix_laplacian(int64_t n);

/* Deterministic limit of the beta-ensemble tridiagonal model:
 * off-diagonal entry (k, k+1) equals 2*sqrt((n-k)/n), 1-based k. */
BANDLAB_API bandlab_matrix* bandlab_matrix_beta_limit(int64_t n);

BANDLAB_API bandlab_matrix* bandlab_matrix_zero(int64_t n, int32_t bandwidth);

/* Noisy banded matrix from a noise-spec JSON object, e.g.
 * {"family":"pareto","alpha":1.0,"sigma":0.0,"K":1,"delta":0.25,"seed":7}.
 * Entries within the band are i.i.d. draws scaled by n^(sigma - 1/alpha);
 * deterministic for fixed (spec, n). Returns NULL on error. */
BANDLAB_API bandlab_matrix* bandlab_matrix_noise(int64_t n, const char* noise_spec_json);

/* Entry-wise sum; bandwidths may differ. Returns NULL on dimension mismatch. */
BANDLAB_API bandlab_matrix* bandlab_matrix_add(const bandlab_matrix* a, const bandlab_matrix* b);

BANDLAB_API int64_t bandlab_matrix_dim(const bandlab_matrix* m);
BANDLAB_API int32_t bandlab_matrix_bandwidth(const bandlab_matrix* m);

/* 0-based indices; entries outside the band read as 0. */
BANDLAB_API int bandlab_matrix_get(const bandlab_matrix* m, int64_t i, int64_t j, double* out);

BANDLAB_API void bandlab_matrix_free(bandlab_matrix* m);

/* ---- Green functions ----------------------------------------------------- */

/* G_ij(z) = [(H - z)^{-1}]_ij for z = energy + i*eta, eta > 0; 0-based i, j.
 * out_re_im receives {Re, Im}. */
BANDLAB_API int bandlab_green_entry(const bandlab_matrix* h, double energy, double eta,
                                    int64_t i, int64_t j, double out_re_im[2]);

/* m(z) = (1/n) Tr (H - z)^{-1}. */
BANDLAB_API int bandlab_stieltjes_trace(const bandlab_matrix* h, double energy, double eta,
                                        double out_re_im[2]);

/* Closed-form Green entry of the 1d Laplacian (overflow-safe evaluation). */
BANDLAB_API int bandlab_green_closed_form(int64_t n, double energy, double eta,
                                          int64_t i, int64_t j, double out_re_im[2]);

/* Stieltjes transforms of the arcsine and semicircle laws (Im > 0 branch). */
BANDLAB_API int bandlab_stieltjes_arcsine(double energy, double eta, double out_re_im[2]);
BANDLAB_API int bandlab_stieltjes_semicircle(double energy, double eta, double out_re_im[2]);

/* ---- eigenvalues ---------------------------------------------------------- */

/* All eigenvalues, ascending. out must have room for bandlab_matrix_dim(h). */
BANDLAB_API int bandlab_eigenvalues(const bandlab_matrix* h, double* out);

/* ---- JSON reports --------------------------------------------------------- */

/* Green-function report. Request JSON:
 *   {"model":"laplacian","N":64,"energies":[0.5],"etas":[0.1],
 *    "noise":{...optional...},"pairs":"diag"|"band"|"full"}
 * Response carries entries as [i, j, re, im], the trace, and deviations
 * against the closed form / arcsine reference where applicable. */
BANDLAB_API int bandlab_green_report(const char* request_json, char** out_json);

/* Spectrum report. Request JSON:
 *   {"model":"laplacian","N":256,"kappa":0.5,"noise":{...optional...},
 *    "output_prefix":"out/spec","eigenvectors":false}
 * Writes <prefix>.eigenvalues.csv (and optional <prefix>.vectors.bin) and
 * returns a JSON summary (rigidity, arcsine distance, max sup-norm). */
BANDLAB_API int bandlab_spectrum_report(const char* request_json, char** out_json);

/* ---- experiments ---------------------------------------------------------- */

/* Newline-separated names of the available experiments (static storage). */
BANDLAB_API const char* bandlab_experiment_list(void);

/* Runs the experiment named in the config (field "experiment"), writing
 * trials.jsonl / report.json / summary.csv / timings.csv under "output_dir".
 * On success returns the report JSON. Worker count is taken from the
 * BANDLAB_WORKERS environment variable when set. */
BANDLAB_API int bandlab_experiment_run(const char* config_json, char** out_report_json);

/* Deterministic invariant suite. Returns BANDLAB_OK when every check passes;
 * the log (one line per check) is returned through out_log when non-NULL. */
BANDLAB_API int bandlab_selftest(char** out_log);

#ifdef __cplusplus
}
#endif

#endif /* BANDLAB_H */
