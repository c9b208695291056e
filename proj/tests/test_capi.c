/* Exercises the shared library through its C header only. */
#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "qvortex/qvortex.h"

static int failures = 0;

#define EXPECT(cond)                                                  \
  do {                                                                \
    if (!(cond)) {                                                    \
      fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                     \
    }                                                                 \
  } while (0)

#define EXPECT_STATUS(call, status)                                        \
  do {                                                                     \
    qv_status s_ = (call);                                                 \
    if (s_ != (status)) {                                                  \
      fprintf(stderr, "%s:%d: %s returned %s (%s)\n", __FILE__, __LINE__, #call, \
              qv_status_name(s_), qv_last_error());                        \
      ++failures;                                                          \
    }                                                                      \
  } while (0)

static void test_params(void) {
  qv_params* p = NULL;
  double v = 0.0;
  EXPECT_STATUS(qv_params_create(&p), QV_OK);
  EXPECT_STATUS(qv_params_get(p, "lambda_total", &v), QV_OK);
  EXPECT(v == 1.0);
  EXPECT_STATUS(qv_params_set(p, "radius", 2.0), QV_OK);
  EXPECT_STATUS(qv_params_get(p, "radius", &v), QV_OK);
  EXPECT(v == 2.0);
  EXPECT_STATUS(qv_params_set(p, "nonsense", 1.0), QV_ERR_VALIDATION);
  EXPECT(strstr(qv_last_error(), "nonsense") != NULL);
  EXPECT_STATUS(qv_params_validate(p), QV_OK);
  qv_params_set(p, "epsilon", -1.0);
  qv_params_set(p, "mu", -1.0);
  EXPECT_STATUS(qv_params_validate(p), QV_ERR_VALIDATION);
  EXPECT(strstr(qv_last_error(), "epsilon") != NULL);
  EXPECT(strstr(qv_last_error(), "mu") != NULL);
  EXPECT_STATUS(qv_params_create(NULL), QV_ERR_VALIDATION);
  EXPECT_STATUS(qv_params_load("/nonexistent.conf", &p), QV_ERR_CONFIG);
  qv_params_destroy(p);
  qv_params_destroy(NULL);
}

static void test_solve(void) {
  qv_params* p = NULL;
  qv_state* s = NULL;
  qv_thermo t;
  double r[5], rho[5], circ = 0.0;
  char* json = NULL;
  qv_params_create(&p);

  EXPECT_STATUS(qv_solve(p, 0.5, 1.5, 1e-10, &s), QV_OK);
  EXPECT_STATUS(qv_state_thermo(s, &t), QV_OK);
  EXPECT(fabs(t.a + 0.25) <= 1e-9);
  EXPECT(fabs(t.energy) <= 1e-8);
  EXPECT(fabs(t.beta - 1.125) <= 1e-9);
  EXPECT(strcmp(qv_regime_name(t.regime), "Uniform") == 0);
  EXPECT_STATUS(qv_state_density(s, 5, r, rho), QV_OK);
  EXPECT(r[4] == 1.0);
  EXPECT(fabs(rho[4] - rho[0]) <= 1e-6 * rho[0]);
  EXPECT_STATUS(qv_state_integrated_circulation(s, &circ), QV_OK);
  EXPECT(fabs(circ - 0.5) <= 1e-6);
  EXPECT_STATUS(qv_state_thermo_json(s, &json), QV_OK);
  EXPECT(json != NULL && strstr(json, "\"regime\": \"Uniform\"") != NULL);
  qv_string_free(json);
  qv_state_destroy(s);
  s = NULL;

  EXPECT_STATUS(qv_solve(p, 0.0, 3.0, 1e-10, &s), QV_ERR_UNREACHABLE);
  EXPECT(s == NULL);
  EXPECT(strstr(qv_last_error(), "2*sqrt(2)") != NULL);
  EXPECT_STATUS(qv_solve(p, 0.5, -1.0, 1e-10, &s), QV_ERR_VALIDATION);
  EXPECT_STATUS(qv_profile_csv(0.0, 3.0, 1e-10, "/tmp/qv_capi_profile.csv"), QV_ERR_BLOWUP);
  qv_params_destroy(p);
}

static void test_sweep(void) {
  qv_params* p = NULL;
  qv_sweep* w = NULL;
  double lo = 0, hi = 0, z = 0, cv = 0;
  int status = -1, has_cv = -1;
  qv_thermo t;
  qv_params_create(&p);
  EXPECT_STATUS(qv_sweep_run(p, 0.75, 0.5, 3.0, 26, 1e-10, 1, &w), QV_OK);
  EXPECT(qv_sweep_size(w) == 26);
  EXPECT(qv_sweep_metastable_count(w) == 1);
  EXPECT_STATUS(qv_sweep_metastable(w, 0, &lo, &hi), QV_OK);
  EXPECT(fabs(lo - 0.6) < 1e-12 && fabs(hi - 2.9) < 1e-12);
  EXPECT_STATUS(qv_sweep_node(w, 3, &z, &status, &t, &has_cv, &cv), QV_OK);
  EXPECT(status == 0 && has_cv == 1 && cv < 0.0);
  EXPECT_STATUS(qv_sweep_node(w, 0, NULL, NULL, NULL, &has_cv, NULL), QV_OK);
  EXPECT(has_cv == 0);
  EXPECT_STATUS(qv_sweep_node(w, 26, NULL, NULL, NULL, NULL, NULL), QV_ERR_VALIDATION);
  qv_sweep_destroy(w);
  w = NULL;
  EXPECT_STATUS(qv_sweep_run(p, 0.0, 3.0, 4.0, 5, 1e-10, 1, &w), QV_ERR_EMPTY_SWEEP);
  qv_params_destroy(p);
}

static void test_mc(void) {
  qv_mc_setup* setup = NULL;
  qv_mc_result *a = NULL, *b = NULL;
  qv_params* p = NULL;
  qv_state* s = NULL;
  qv_comparison cmp;
  qv_mc_stats st;
  char *da = NULL, *db = NULL, *hex = NULL;

  EXPECT_STATUS(qv_mc_setup_load(QVORTEX_SOURCE_DIR "/configs/mc_trap_off.conf", &setup), QV_OK);
  EXPECT_STATUS(qv_mc_setup_set(setup, "sweeps", "400"), QV_OK);
  EXPECT_STATUS(qv_mc_run(setup, &a), QV_ERR_VALIDATION);
  EXPECT(a == NULL && strstr(qv_last_error(), "burn_in") != NULL);
  EXPECT_STATUS(qv_mc_setup_set(setup, "burn_in", "100"), QV_OK);
  EXPECT_STATUS(qv_mc_setup_set(setup, "n_filaments", "6"), QV_OK);
  EXPECT_STATUS(qv_mc_setup_set(setup, "beta_s", "-1"), QV_OK);
  EXPECT_STATUS(qv_mc_run(setup, &a), QV_ERR_VALIDATION);
  EXPECT_STATUS(qv_mc_setup_set(setup, "beta_s", "400"), QV_OK);
  EXPECT_STATUS(qv_mc_run(setup, &a), QV_OK);
  EXPECT_STATUS(qv_mc_run(setup, &b), QV_OK);
  EXPECT_STATUS(qv_mc_result_trace_digest(a, &da), QV_OK);
  EXPECT_STATUS(qv_mc_result_trace_digest(b, &db), QV_OK);
  EXPECT(da && db && strcmp(da, db) == 0 && strlen(da) == 64);

  qv_params_create(&p);
  qv_params_set(p, "lambda_total", 6.0);
  EXPECT_STATUS(qv_mc_result_stats(a, p, &st), QV_OK);
  EXPECT(st.samples == 300);
  EXPECT(st.acceptance_rate > 0.0 && st.acceptance_rate < 1.0);
  EXPECT(st.meanfield_mu == 0.0);

  EXPECT_STATUS(qv_solve(p, 0.5, 16.0, 1e-10, &s), QV_OK);
  EXPECT_STATUS(qv_mc_compare(a, s, &cmp), QV_ERR_MISMATCHED);

  EXPECT_STATUS(qv_mc_result_write(a, "/tmp/qv_capi_summary.json", NULL, NULL), QV_OK);
  EXPECT_STATUS(qv_sha256_file("/tmp/qv_capi_summary.json", &hex), QV_OK);
  EXPECT(hex && strlen(hex) == 64);
  qv_mc_result_destroy(b);
  b = NULL;
  EXPECT_STATUS(qv_mc_result_load("/tmp/qv_capi_summary.json", &b), QV_OK);
  EXPECT_STATUS(qv_mc_result_load("/nonexistent.json", &b), QV_ERR_IO);
  EXPECT_STATUS(qv_sha256_file("/nonexistent", &hex), QV_ERR_IO);

  qv_string_free(da);
  qv_string_free(db);
  qv_string_free(hex);
  qv_state_destroy(s);
  qv_params_destroy(p);
  qv_mc_result_destroy(a);
  qv_mc_result_destroy(b);
  qv_mc_setup_destroy(setup);
}

int main(void) {
  EXPECT(strcmp(qv_version(), QVORTEX_EXPECTED_VERSION) == 0);
  EXPECT(strcmp(qv_status_name(QV_ERR_UNREACHABLE), "unreachable") == 0);
  test_params();
  test_solve();
  test_sweep();
  test_mc();
  if (failures) {
    fprintf(stderr, "%d C API check(s) failed\n", failures);
    return 1;
  }
  printf("C API checks passed\n");
  return 0;
}
