#ifndef QVORTEX_H
#define QVORTEX_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  define QV_API __declspec(dllexport)
#elif defined(__GNUC__)
#  define QV_API __attribute__((visibility("default")))
#else
#  define QV_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qv_status {
  QV_OK = 0,
  QV_ERR_VALIDATION = 1,
  QV_ERR_BLOWUP = 2,
  QV_ERR_TOLERANCE = 3,
  QV_ERR_NO_BRACKET = 4,
  QV_ERR_UNREACHABLE = 5,
  QV_ERR_COINCIDENT = 6,
  QV_ERR_MISMATCHED = 7,
  QV_ERR_NONPOSITIVE_PRESSURE = 8,
  QV_ERR_EMPTY_SWEEP = 9,
  QV_ERR_CONFIG = 10,
  QV_ERR_IO = 11,
  QV_ERR_INTERNAL = 12
} qv_status;

typedef struct qv_params qv_params;
typedef struct qv_state qv_state;
typedef struct qv_sweep qv_sweep;
typedef struct qv_mc_setup qv_mc_setup;
typedef struct qv_mc_result qv_mc_result;

/* Message for the last failing call on this thread; never NULL. */
QV_API const char* qv_last_error(void);
QV_API const char* qv_status_name(qv_status s);
QV_API const char* qv_version(void);

/* Model parameters. Setters store values; qv_params_validate reports every problem. */
QV_API qv_status qv_params_create(qv_params** out);
QV_API qv_status qv_params_load(const char* path, qv_params** out);
QV_API void qv_params_destroy(qv_params* p);
QV_API qv_status qv_params_set(qv_params* p, const char* name, double value);
QV_API qv_status qv_params_get(const qv_params* p, const char* name, double* value);
QV_API qv_status qv_params_validate(const qv_params* p);

/* Self-consistent equilibrium at (mu, z). p->mu is ignored; mu is explicit. */
QV_API qv_status qv_solve(const qv_params* p, double mu, double z, double tol, qv_state** out);
QV_API void qv_state_destroy(qv_state* s);

typedef struct qv_thermo {
  double mu, z, a;
  double beta, temperature, energy;
  double rho0, pressure, entropy;
  double virial_residual, residual;
  int regime; /* 0 uniform, 1 edge-peaked, 2 centre-peaked */
  int multiple_roots;
} qv_thermo;

QV_API qv_status qv_state_thermo(const qv_state* s, qv_thermo* out);
QV_API const char* qv_regime_name(int regime);
/* Density at n equally spaced radii in [0, R]. */
QV_API qv_status qv_state_density(const qv_state* s, size_t n, double* r, double* rho);
QV_API qv_status qv_state_integrated_circulation(const qv_state* s, double* out);
QV_API qv_status qv_state_mean_square_radius(const qv_state* s, double* out);
/* Scaled profile v1(r1), v1'(r1) on [0, z]. */
QV_API qv_status qv_state_profile_csv(const qv_state* s, const char* path);
QV_API qv_status qv_state_thermo_csv(const qv_state* s, const char* path);
QV_API qv_status qv_state_thermo_json(const qv_state* s, char** json);

/* Free strings returned by the library. */
QV_API void qv_string_free(char* s);

/* Scaled profile at fixed a, without self-consistency. */
QV_API qv_status qv_profile_csv(double a, double r1_end, double tol, const char* path);

QV_API qv_status qv_sweep_run(const qv_params* p, double mu, double z_min, double z_max,
                              size_t n, double tol, unsigned threads, qv_sweep** out);
QV_API void qv_sweep_destroy(qv_sweep* s);
QV_API size_t qv_sweep_size(const qv_sweep* s);
/* status: 0 ok, 1 unreachable, 2 failed; has_cv is 0 when c_v is undefined. */
QV_API qv_status qv_sweep_node(const qv_sweep* s, size_t i, double* z, int* status,
                               qv_thermo* thermo, int* has_cv, double* cv);
QV_API size_t qv_sweep_metastable_count(const qv_sweep* s);
QV_API qv_status qv_sweep_metastable(const qv_sweep* s, size_t i, double* z_start, double* z_end);
QV_API qv_status qv_sweep_csv(const qv_sweep* s, const char* path, int append);
/* One SVG with E, T and rho0 panels for all sweeps given. */
QV_API qv_status qv_sweep_svg(const qv_sweep* const* sweeps, size_t count, const char* path);

QV_API qv_status qv_mc_setup_load(const char* path, qv_mc_setup** out);
QV_API void qv_mc_setup_destroy(qv_mc_setup* s);
/* Overrides a key of the config (same names as the file). The whole config is
   validated by qv_mc_setup_describe_json and qv_mc_run, so order does not matter. */
QV_API qv_status qv_mc_setup_set(qv_mc_setup* s, const char* key, const char* value);
QV_API qv_status qv_mc_setup_describe_json(const qv_mc_setup* s, char** json);
QV_API qv_status qv_mc_run(const qv_mc_setup* s, qv_mc_result** out);
QV_API qv_status qv_mc_result_load(const char* summary_path, qv_mc_result** out);
QV_API void qv_mc_result_destroy(qv_mc_result* r);

typedef struct qv_mc_stats {
  uint64_t samples;
  double acceptance_rate, point_acceptance, translate_acceptance;
  double kinetic_per_filament, kinetic_per_filament_error;
  double equipartition_kinetic;
  double mean_square_radius, mean_square_radius_error;
  double radius_q99;
  double meanfield_mu, meanfield_beta, meanfield_z;
} qv_mc_stats;

/* Mean-field mapping uses radius (and lambda_total = N gamma) from p. */
QV_API qv_status qv_mc_result_stats(const qv_mc_result* r, const qv_params* p, qv_mc_stats* out);
QV_API qv_status qv_mc_result_write(const qv_mc_result* r, const char* summary_json,
                                    const char* histogram_csv, const char* trace_csv);
QV_API qv_status qv_mc_result_trace_digest(const qv_mc_result* r, char** hex);

typedef struct qv_comparison {
  double l1, moment_ratio;
  double mc_mean_square_radius, mf_mean_square_radius;
  double fraction_outside;
  size_t bins_used;
} qv_comparison;

QV_API qv_status qv_mc_compare(const qv_mc_result* r, const qv_state* s, qv_comparison* out);

QV_API qv_status qv_sha256_file(const char* path, char** hex);
/* Atomic write through a sibling temporary file. */
QV_API qv_status qv_write_file(const char* path, const char* content, size_t size);

#ifdef __cplusplus
}
#endif

#endif
