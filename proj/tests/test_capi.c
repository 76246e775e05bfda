/*
 * Copyright 2026 The crystalflow Authors.
 * SPDX-License-Identifier: Apache-2.0
 *
 * Exercises the C interface from C: handle lifetimes, status codes and the
 * error channel.
 */
#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "crystalflow/crystalflow.h"

static int failures = 0;

#define EXPECT(cond)                                               \
  do {                                                             \
    if (!(cond)) {                                                 \
      fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                  \
    }                                                              \
  } while (0)

static void test_operators(void) {
  cf_grid* g = NULL;
  EXPECT(cf_grid_create(1, 3, 0, 1.0, 0.0, &g) == CF_OK);
  EXPECT(cf_grid_size(g) == 3);
  EXPECT(cf_grid_dim(g) == 1);
  EXPECT(fabs(cf_grid_spacing(g, 0) - 0.5) < 1e-15);

  const double bump[3] = {0.0, 1.0, 0.0};
  cf_field* f = NULL;
  cf_field* lap = NULL;
  EXPECT(cf_field_create(g, bump, 3, &f) == CF_OK);
  EXPECT(cf_laplacian(f, &lap) == CF_OK);
  const double* v = cf_field_values(lap);
  EXPECT(fabs(v[0] - 8.0) < 1e-12);
  EXPECT(fabs(v[1] + 8.0) < 1e-12);
  EXPECT(fabs(v[2] - 8.0) < 1e-12);

  double integral = 0.0;
  EXPECT(cf_integrate(lap, &integral) == CF_OK);
  EXPECT(fabs(integral) < 1e-12);

  cf_field* wrong = NULL;
  EXPECT(cf_field_create(g, bump, 2, &wrong) == CF_ERR_INVALID_ARGUMENT);
  EXPECT(wrong == NULL);
  EXPECT(strlen(cf_last_error()) > 0);

  cf_field* p_lap = NULL;
  EXPECT(cf_p_laplacian(f, 1.5, &p_lap) == CF_ERR_INVALID_EXPONENT);

  cf_field_destroy(lap);
  cf_field_destroy(f);
  cf_grid_destroy(g);

  EXPECT(cf_grid_create(3, 5, 5, 1.0, 1.0, &g) == CF_ERR_UNSUPPORTED_DIMENSION);
  EXPECT(cf_grid_create(1, 2, 0, 1.0, 0.0, &g) != CF_OK);
}

static void test_helmholtz(void) {
  cf_grid* g = NULL;
  EXPECT(cf_grid_create(2, 9, 9, 1.0, 1.0, &g) == CF_OK);
  double rhs[81];
  for (int i = 0; i < 81; ++i) rhs[i] = 0.25 * 3.0;
  cf_field* b = NULL;
  cf_field* u = NULL;
  EXPECT(cf_field_create(g, rhs, 81, &b) == CF_OK);
  EXPECT(cf_solve_helmholtz(0.25, b, &u) == CF_OK);
  double out[81];
  EXPECT(cf_field_copy_values(u, out, 81) == CF_OK);
  for (int i = 0; i < 81; ++i) EXPECT(fabs(out[i] - 3.0) < 1e-9);

  cf_field* c = NULL;
  cf_field* w = NULL;
  for (int i = 0; i < 81; ++i) rhs[i] = 0.5;
  EXPECT(cf_field_create(g, rhs, 81, &c) == CF_OK);
  EXPECT(cf_solve_weighted_helmholtz(0.25, c, b, &w) == CF_ERR_INVALID_COEFFICIENT);
  cf_field_destroy(c);
  cf_field_destroy(u);
  cf_field_destroy(b);
  cf_grid_destroy(g);
}

static void test_run_and_reports(void) {
  cf_grid* g = NULL;
  EXPECT(cf_grid_create(1, 9, 0, 1.0, 0.0, &g) == CF_OK);
  double u0[9];
  for (int i = 0; i < 9; ++i) u0[i] = 2.0;
  cf_field* f = NULL;
  EXPECT(cf_field_create(g, u0, 9, &f) == CF_OK);

  cf_scheme_params p = cf_scheme_params_default();
  p.tau = 0.5;
  p.horizon = 4.0;
  cf_variant var = cf_variant_default();
  cf_trajectory* t = NULL;
  EXPECT(cf_run(f, &p, &var, &t) == CF_OK);
  EXPECT(cf_trajectory_length(t) == 9);
  for (size_t k = 0; k < cf_trajectory_length(t); ++k) {
    cf_field* uk = NULL;
    EXPECT(cf_trajectory_u(t, k, &uk) == CF_OK);
    const double exact = 2.0 / pow(1.125, (double)k);
    for (int i = 0; i < 9; ++i) EXPECT(fabs(cf_field_values(uk)[i] - exact) <= 1e-9);
    cf_field_destroy(uk);
  }
  int iters = -1, newton = -1;
  double res = -1.0;
  EXPECT(cf_trajectory_step_info(t, 3, &iters, &newton, &res) == CF_OK);
  EXPECT(iters >= 1 && newton == 0 && res <= p.picard_tol);
  EXPECT(cf_trajectory_step_info(t, 99, &iters, &newton, &res) == CF_ERR_INVALID_ARGUMENT);

  cf_report* r = NULL;
  EXPECT(cf_verify_prop31(t, &r) == CF_OK);
  EXPECT(strcmp(cf_report_name(r), "prop31") == 0);
  EXPECT(cf_report_pass(r));
  EXPECT(fabs(cf_report_rhs(r) - cf_report_lhs(r) - cf_report_margin(r)) < 1e-12);
  EXPECT(cf_report_term_count(r) > 8);
  const char* name = NULL;
  double value = 0.0;
  EXPECT(cf_report_term(r, 0, &name, &value) == CF_OK);
  EXPECT(strcmp(name, "sum_dt_u_sq") == 0);
  cf_report_destroy(r);

  EXPECT(cf_p_variant_energy(t, 3.0, &r) == CF_ERR_INVALID_ARGUMENT);
  cf_trajectory_destroy(t);

  /* Overflow surfaces with the failing step. */
  for (int i = 0; i < 9; ++i) u0[i] = 10.0 * cos(3.141592653589793 * i / 8.0);
  cf_field_destroy(f);
  EXPECT(cf_field_create(g, u0, 9, &f) == CF_OK);
  p.tau = 0.01;
  p.horizon = 0.05;
  p.sinh_arg_cap = 50.0;
  EXPECT(cf_run(f, &p, &var, &t) == CF_ERR_OVERFLOW);
  EXPECT(t == NULL);
  EXPECT(cf_last_error_step() >= 0);
  EXPECT(strstr(cf_last_error(), "cap") != NULL);

  cf_field_destroy(f);
  cf_grid_destroy(g);
}

static void test_config(void) {
  cf_config* cfg = NULL;
  EXPECT(cf_config_parse("[grid]\nnodes = 2\n", &cfg) == CF_ERR_CONFIG);
  EXPECT(strstr(cf_last_error(), "line 2") != NULL);
  EXPECT(cf_config_parse("[grid]\ndim = 1\nnodes = 17\n[scheme]\nhorizon = 0.05\n",
                         &cfg) == CF_OK);
  char* text = NULL;
  EXPECT(cf_config_print(cfg, &text) == CF_OK);
  EXPECT(strstr(text, "nodes = 17") != NULL);
  cf_config* again = NULL;
  EXPECT(cf_config_parse(text, &again) == CF_OK);
  cf_string_free(text);
  cf_config_destroy(again);

  EXPECT(cf_config_set_output(cfg, "capi_run") == CF_OK);
  char* dir = NULL;
  EXPECT(cf_config_output_dir(cfg, &dir) == CF_OK);
  EXPECT(strstr(dir, "capi_run") != NULL);

  int exit_code = -1;
  EXPECT(cf_run_experiment(cfg, &exit_code) == CF_OK);
  EXPECT(exit_code == 0);
  int all_pass = 0;
  EXPECT(cf_verify_directory(dir, &all_pass) == CF_OK);
  EXPECT(all_pass);
  cf_report_list* list = NULL;
  EXPECT(cf_verify_directory_reports(dir, &list) == CF_OK);
  EXPECT(cf_report_list_size(list) == 3);
  EXPECT(cf_report_pass(cf_report_list_get(list, 0)));
  EXPECT(cf_report_list_get(list, 3) == NULL);
  cf_report_list_destroy(list);
  cf_string_free(dir);

  const double taus[2] = {1e-2, 5e-3};
  int all_ok = 0;
  EXPECT(cf_config_set_output(cfg, "capi_sweep") == CF_OK);
  EXPECT(cf_sweep(cfg, "tau", taus, 2, 2, &all_ok) == CF_OK);
  EXPECT(all_ok);
  EXPECT(cf_sweep(cfg, "colour", taus, 2, 2, &all_ok) == CF_ERR_INVALID_ARGUMENT);

  const double ks[2] = {1.0, 0.5};
  EXPECT(cf_config_set_output(cfg, "capi_compare") == CF_OK);
  EXPECT(cf_compare(cfg, "sinh,exp", ks, 2, 2) == CF_OK);
  EXPECT(cf_compare(cfg, "sinh,bogus", NULL, 0, 1) == CF_ERR_INVALID_ARGUMENT);

  EXPECT(cf_verify_directory("/nonexistent/crystalflow", &all_pass) != CF_OK);
  cf_config_destroy(cfg);

  /* A failed run is a status-OK call with exit code 2 and the error kept. */
  EXPECT(cf_config_parse("[initial]\namplitude = 10\n[scheme]\nsinh_arg_cap = 50\n"
                         "[output]\ndirectory = capi_overflow\n",
                         &cfg) == CF_OK);
  EXPECT(cf_run_experiment(cfg, &exit_code) == CF_OK);
  EXPECT(exit_code == 2);
  EXPECT(strstr(cf_last_error(), "cap") != NULL);
  EXPECT(cf_last_error_step() >= 0);
  cf_config_destroy(cfg);
}

static void test_null_handling(void) {
  EXPECT(cf_laplacian(NULL, NULL) == CF_ERR_INVALID_ARGUMENT);
  cf_grid_destroy(NULL);
  cf_field_destroy(NULL);
  cf_trajectory_destroy(NULL);
  cf_report_destroy(NULL);
  cf_report_list_destroy(NULL);
  cf_config_destroy(NULL);
  cf_string_free(NULL);
  EXPECT(strcmp(cf_status_name(CF_ERR_OVERFLOW), "overflow") == 0 ||
         strlen(cf_status_name(CF_ERR_OVERFLOW)) > 0);
  EXPECT(strcmp(cf_version(), "0.1.0") == 0);
}

int main(void) {
  test_operators();
  test_helmholtz();
  test_run_and_reports();
  test_config();
  test_null_handling();
  if (failures) {
    fprintf(stderr, "%d C API expectation(s) failed\n", failures);
    return 1;
  }
  printf("C API: all expectations met\n");
  return 0;
}
