/*
 * Copyright 2026 The crystalflow Authors.
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface to the crystalflow solver for
 *
 *   u_t - Lap sinh(-Lap u) = 0   on a box, homogeneous Neumann data,
 *
 * integrated with a regularized implicit scheme, plus the discrete energy
 * estimates evaluated on its trajectories.
 *
 * Conventions:
 *   - Every function returns a cf_status. On failure, cf_last_error() gives
 *     a message and cf_last_error_step() the time step involved (or -1).
 *     Both are thread-local and are reset by the next call.
 *   - Objects are opaque handles created by cf_*_create / returned through
 *     out-parameters and released with the matching cf_*_destroy. Destroy
 *     functions accept NULL. Handle and string out-parameters are set to
 *     NULL when a call fails.
 *   - Fields are stored in row-major node order: node (i, j) is i * ny + j.
 *   - Handles are not synchronized; distinct handles may be used from
 *     distinct threads.
 */
#ifndef CRYSTALFLOW_CRYSTALFLOW_H_
#define CRYSTALFLOW_CRYSTALFLOW_H_

#include <stddef.h>

#if defined(_WIN32)
#define CF_API __declspec(dllexport)
#else
#define CF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cf_status {
  CF_OK = 0,
  CF_ERR_INVALID_ARGUMENT = 1,
  CF_ERR_UNSUPPORTED_DIMENSION = 2,
  CF_ERR_INVALID_EXPONENT = 3,
  CF_ERR_INVALID_COEFFICIENT = 4,
  CF_ERR_SOLVER_FAILURE = 5,
  CF_ERR_STEP_FAILURE = 6,
  CF_ERR_OVERFLOW = 7,
  CF_ERR_CONFIG = 8,
  CF_ERR_IO = 9,
  CF_ERR_INTERNAL = 10
} cf_status;

typedef struct cf_grid cf_grid;
typedef struct cf_field cf_field;
typedef struct cf_trajectory cf_trajectory;
typedef struct cf_report cf_report;
typedef struct cf_config cf_config;
typedef struct cf_report_list cf_report_list;

CF_API const char* cf_version(void);
CF_API const char* cf_status_name(cf_status status);
CF_API const char* cf_last_error(void);
CF_API int cf_last_error_step(void);

/* ---- grids and fields -------------------------------------------------- */

/* dim is 1 or 2; for dim = 1 the second axis arguments are ignored. */
CF_API cf_status cf_grid_create(int dim, int nodes_x, int nodes_y,
                                double extent_x, double extent_y,
                                cf_grid** out);
CF_API void cf_grid_destroy(cf_grid* grid);
CF_API size_t cf_grid_size(const cf_grid* grid);
CF_API int cf_grid_dim(const cf_grid* grid);
CF_API double cf_grid_spacing(const cf_grid* grid, int axis);

/* Copies `count` values (must equal the grid size); values may be NULL for
 * a zero field. */
CF_API cf_status cf_field_create(const cf_grid* grid, const double* values,
                                 size_t count, cf_field** out);
CF_API void cf_field_destroy(cf_field* field);
CF_API size_t cf_field_size(const cf_field* field);
/* Read-only view, valid until the field is destroyed. */
CF_API const double* cf_field_values(const cf_field* field);
CF_API cf_status cf_field_copy_values(const cf_field* field, double* out,
                                      size_t count);

/* ---- operators ----------------------------------------------------------- */

CF_API cf_status cf_laplacian(const cf_field* f, cf_field** out);
CF_API cf_status cf_p_laplacian(const cf_field* f, double p, cf_field** out);
CF_API cf_status cf_integrate(const cf_field* f, double* out);
CF_API cf_status cf_grad_sq_integral(const cf_field* f, double* out);
CF_API cf_status cf_cosh_energy(const cf_field* w, double cap, double* out);

/* (-Lap + tau) u = rhs, and -div(c grad w) + tau w = rhs. */
CF_API cf_status cf_solve_helmholtz(double tau, const cf_field* rhs,
                                    cf_field** out);
CF_API cf_status cf_solve_weighted_helmholtz(double tau, const cf_field* c,
                                             const cf_field* rhs,
                                             cf_field** out);

CF_API cf_status cf_snapshot_write(const char* path, const cf_field* f);
CF_API cf_status cf_snapshot_read(const char* path, cf_field** out);

/* ---- time stepping -------------------------------------------------------- */

typedef enum cf_variant_kind {
  CF_VARIANT_SINH = 0,
  CF_VARIANT_EXP = 1,
  CF_VARIANT_SCALED_SINH = 2,
  CF_VARIANT_LINEAR = 3,
  CF_VARIANT_P_EXPONENT = 4
} cf_variant_kind;

typedef struct cf_variant {
  cf_variant_kind kind;
  double K;       /* scaled_sinh */
  int normalized; /* scaled_sinh: nonzero for sinh(K s) / K */
  double p;       /* p_exponent, p >= 2 */
} cf_variant;

typedef struct cf_scheme_params {
  double tau;
  double horizon;
  int decoupled;  /* zero: regularization weight is tau */
  double eps;     /* regularization weight when decoupled */
  double picard_tol;
  int picard_max_iter;
  double picard_damping;
  int newton_fallback;
  double sinh_arg_cap;
} cf_scheme_params;

CF_API cf_scheme_params cf_scheme_params_default(void);
CF_API cf_variant cf_variant_default(void);

CF_API cf_status cf_run(const cf_field* u0, const cf_scheme_params* params,
                        const cf_variant* variant, cf_trajectory** out);
CF_API void cf_trajectory_destroy(cf_trajectory* traj);
/* Number of records, j + 1. */
CF_API size_t cf_trajectory_length(const cf_trajectory* traj);
/* New field handles holding u_k / w_k. */
CF_API cf_status cf_trajectory_u(const cf_trajectory* traj, size_t k,
                                 cf_field** out);
CF_API cf_status cf_trajectory_w(const cf_trajectory* traj, size_t k,
                                 cf_field** out);
/* residual_inf is the larger sup-norm of the two step residuals at
 * acceptance. It is at most picard_tol unless round-off in evaluating the
 * residual exceeds that, in which case the floor is used. Any out-pointer
 * may be NULL. */
CF_API cf_status cf_trajectory_step_info(const cf_trajectory* traj, size_t k,
                                         int* picard_iters, int* newton_used,
                                         double* residual_inf);

/* ---- estimates --------------------------------------------------------- */

CF_API cf_status cf_verify_prop31(const cf_trajectory* traj, cf_report** out);
CF_API cf_status cf_verify_prop32(const cf_trajectory* traj, cf_report** out);
CF_API cf_status cf_verify_prop33(const cf_trajectory* traj, cf_report** out);
CF_API cf_status cf_p_variant_energy(const cf_trajectory* traj, double p,
                                     cf_report** out);
CF_API void cf_report_destroy(cf_report* report);
CF_API const char* cf_report_name(const cf_report* report);
CF_API double cf_report_lhs(const cf_report* report);
CF_API double cf_report_rhs(const cf_report* report);
CF_API double cf_report_margin(const cf_report* report);
CF_API int cf_report_pass(const cf_report* report);
CF_API size_t cf_report_term_count(const cf_report* report);
CF_API cf_status cf_report_term(const cf_report* report, size_t i,
                                const char** name, double* value);

CF_API void cf_report_list_destroy(cf_report_list* list);
CF_API size_t cf_report_list_size(const cf_report_list* list);
/* Borrowed pointer, valid while the list lives. */
CF_API const cf_report* cf_report_list_get(const cf_report_list* list,
                                           size_t i);

/* ---- configuration and experiments ------------------------------------- */

CF_API cf_status cf_config_parse(const char* text, cf_config** out);
CF_API cf_status cf_config_load(const char* path, cf_config** out);
CF_API void cf_config_destroy(cf_config* cfg);
/* Canonical text; release with cf_string_free. */
CF_API cf_status cf_config_print(const cf_config* cfg, char** out);
CF_API cf_status cf_config_set_output(cf_config* cfg, const char* directory);
/* Output directory after applying CRYSTALFLOW_OUTPUT_ROOT; release with
 * cf_string_free. */
CF_API cf_status cf_config_output_dir(const cf_config* cfg, char** out);
CF_API void cf_string_free(char* s);

/* Writes a run directory. *exit_code is 0 when the run completed and every
 * report passed, 1 when a report failed and 2 when the run failed; the
 * return status is CF_OK in all three cases, and a failed run leaves its
 * message and step in cf_last_error / cf_last_error_step. */
CF_API cf_status cf_run_experiment(const cf_config* cfg, int* exit_code);
/* *all_pass is nonzero when every recomputed report passes. */
CF_API cf_status cf_verify_directory(const char* directory, int* all_pass);
/* The recomputed reports of a run directory. */
CF_API cf_status cf_verify_directory_reports(const char* directory,
                                             cf_report_list** out);
/* param: tau, eps, K, p or amplitude. workers <= 0 uses all cores. */
CF_API cf_status cf_sweep(const cf_config* cfg, const char* param,
                          const double* values, size_t count, int workers,
                          int* all_ok);
/* variants: comma-separated list such as "sinh,exp"; k_values may be NULL. */
CF_API cf_status cf_compare(const cf_config* cfg, const char* variants,
                            const double* k_values, size_t k_count,
                            int workers);

#ifdef __cplusplus
}
#endif

#endif /* CRYSTALFLOW_CRYSTALFLOW_H_ */
