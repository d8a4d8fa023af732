#ifndef AZTECENV_AZTECENV_H
#define AZTECENV_AZTECENV_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define AZ_API __declspec(dllexport)
#else
#define AZ_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Every call returns a status; on failure az_last_error() holds a message
   for the calling thread until its next call into the library. */
typedef enum az_status {
    AZ_OK = 0,
    AZ_ERR_INVALID_ARGUMENT = 1, /* bad input, config or spec string */
    AZ_ERR_TOLERANCE = 2,        /* a numerical self-consistency check failed */
    AZ_ERR_RUNTIME = 3,          /* sampler or solver failure */
    AZ_ERR_IO = 4,
    AZ_ERR_OUT_OF_MEMORY = 5,
    AZ_ERR_BUFFER_TOO_SMALL = 6 /* required size is still written to the length out-parameter */
} az_status;

typedef struct az_regime az_regime;
typedef struct az_tiling az_tiling;
typedef struct az_report az_report;

AZ_API const char* az_version(void);
AZ_API const char* az_last_error(void);
/* strings returned through char** are owned by the caller */
AZ_API void az_string_free(char* s);

/* Regime spec: a regime JSON object ({"regime":"fixed","dist":{...}} or
   {"regime":"critical","beta":..,"sigma":..}), a distribution JSON object,
   "critical:beta,sigma", or a distribution shorthand such as "point:0.5",
   "discreteW:0.5@0.5,5@0.5", "uniformW:0,2". */
AZ_API az_status az_regime_parse(const char* spec, az_regime** out);
AZ_API void az_regime_free(az_regime* r);
AZ_API az_status az_regime_describe(const az_regime* r, char** json_out);
/* smallest M for which the law of each weight is admissible */
AZ_API az_status az_regime_min_M(const az_regime* r, int* out);
/* i.i.d. environment of size M: betas[t-1] and weights[t-1] for t = 1..M */
AZ_API az_status az_environment_sample(const az_regime* r, int M, uint64_t seed, double* betas, double* weights);

/* ---- exact sampling ---- */

/* Tiling of the size-M diamond for the given edge weights W_1..W_M. */
AZ_API az_status az_tiling_shuffle(const double* weights, int M, uint64_t seed, az_tiling** out);
/* Same law through the signature Markov chain; M <= 12. */
AZ_API az_status az_tiling_chain(const double* betas, int M, uint64_t seed, az_tiling** out);
/* Seed of sample `index` in run `run` under master seed `master`; the rule
   every experiment uses. */
AZ_API uint64_t az_sample_seed(uint64_t master, uint64_t run, uint64_t index);
/* Annealed draw: environment and shuffle both driven by seed. */
AZ_API az_status az_tiling_sample(const az_regime* r, int M, uint64_t seed, az_tiling** out);
AZ_API void az_tiling_free(az_tiling* t);
AZ_API int az_tiling_M(const az_tiling* t);
/* M(M+1) records of (x, y, orientation 0 = horizontal, 1 = vertical); cap counts records */
AZ_API az_status az_tiling_dominos(const az_tiling* t, int* xyo, size_t cap, size_t* len);
/* λ^(level) for 0 <= level <= M, as `level` integers */
AZ_API az_status az_tiling_signature(const az_tiling* t, int level, int* out, size_t cap, size_t* len);
AZ_API az_status az_tiling_encode(const az_tiling* t, uint8_t* buf, size_t cap, size_t* len);
AZ_API az_status az_tiling_decode(const uint8_t* buf, size_t len, az_tiling** out);
/* palette 0: four colours by domino type, 1: eight shades by weight class */
AZ_API az_status az_tiling_svg(const az_tiling* t, int palette, double cell_px, char** out);
AZ_API az_status az_tiling_height_pgm(const az_tiling* t, uint8_t** out, size_t* len);
AZ_API void az_bytes_free(uint8_t* b);

/* ---- exact checks ---- */

/* Weights as decimal or p/q strings (NULL: 2, 1/2, 3). Writes the number of
   tilings and of fully verified tilings; *ok is 1 when everything matched. */
AZ_API az_status az_enumerate_verify(int M, const char* const* weights, long long* tilings, long long* verified,
                                     int* ok, char** details);
/* lemma property tests and consistency web; *ok is 1 when every line passed */
AZ_API az_status az_selfcheck(uint64_t seed, int* ok, char** details);

/* ---- asymptotics; `dist` is a distribution shorthand or JSON object ---- */

/* method 0: contour integral, 1: jets */
AZ_API az_status az_lln_moment(const char* dist, double alpha, int k, int method, double* out);
/* c_1..c_kmax, kmax <= 8 */
AZ_API az_status az_free_cumulants(const char* dist, double alpha, int kmax, double* out);
/* density, Re z, Im z, liquid flag and number of upper-half-plane roots */
AZ_API az_status az_limit_shape_point(const char* dist, double alpha, double y, double* density, double* re_z,
                                      double* im_z, int* liquid, int* upper_roots);
/* n x n cell centres, rows of (alpha, y, re_z, im_z, density); out has 5 n^2 slots */
AZ_API az_status az_limit_shape_grid(const char* dist, int n, int workers, double* out);
/* rows of (alpha, y) sorted by alpha; out has 2 cap slots */
AZ_API az_status az_arctic_curve(const char* dist, int n_points, double* out, size_t cap, size_t* len);
/* Cov/N^(k+l+1) in the fixed regime; form 0: a-carrying, 1: literal */
AZ_API az_status az_clt_cov_fixed(const char* dist, double alpha, int k, int l, int form, double* out);
AZ_API az_status az_clt_cov_jets(const char* dist, double alpha, int k, int l, double* out);
/* Cov(p_k1 at alpha1, p_k2 at alpha2)/M^(k1+k2) in the critical regime */
AZ_API az_status az_clt_cov_critical(int k1, int k2, double alpha1, double alpha2, double beta, double sigma,
                                     double* out);

/* ---- Monte Carlo ---- */

/* Config JSON as documented in the README; "seed", "workers" and "out" may be
   overridden (pass NULL / negative to keep the config values). Outputs are
   written when an output directory is set. */
AZ_API az_status az_experiment_run(const char* config_json, const uint64_t* seed, int workers, const char* out_dir,
                                   az_report** out);
AZ_API void az_report_free(az_report* r);
AZ_API az_status az_report_json(const az_report* r, char** out);
AZ_API az_status az_report_csv(const az_report* r, char** out);
AZ_API az_status az_report_manifest(const az_report* r, char** out);

#ifdef __cplusplus
}
#endif

#endif
