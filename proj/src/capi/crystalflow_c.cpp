// Copyright 2026 The crystalflow Authors.
// SPDX-License-Identifier: Apache-2.0

#include "crystalflow/crystalflow.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "crystalflow/estimates.hpp"
#include "crystalflow/harness/experiment.hpp"

struct cf_grid {
  crystalflow::Grid grid;
};
struct cf_field {
  crystalflow::Field field;
};
struct cf_trajectory {
  crystalflow::Trajectory traj;
};
struct cf_report {
  crystalflow::EstimateReport report;
};
struct cf_config {
  crystalflow::ExperimentConfig cfg;
};
struct cf_report_list {
  std::vector<cf_report> reports;
};

namespace {

using namespace crystalflow;

thread_local std::string g_error;
thread_local int g_error_step = -1;

cf_status to_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return CF_ERR_INVALID_ARGUMENT;
    case ErrorCode::UnsupportedDimension: return CF_ERR_UNSUPPORTED_DIMENSION;
    case ErrorCode::InvalidExponent: return CF_ERR_INVALID_EXPONENT;
    case ErrorCode::InvalidCoefficient: return CF_ERR_INVALID_COEFFICIENT;
    case ErrorCode::SolverFailure: return CF_ERR_SOLVER_FAILURE;
    case ErrorCode::StepFailure: return CF_ERR_STEP_FAILURE;
    case ErrorCode::Overflow: return CF_ERR_OVERFLOW;
    case ErrorCode::Config: return CF_ERR_CONFIG;
    case ErrorCode::Io: return CF_ERR_IO;
  }
  return CF_ERR_INTERNAL;
}

cf_status set_error(cf_status s, const std::string& msg, int step = -1) {
  g_error = msg;
  g_error_step = step;
  return s;
}

// Runs fn, translating exceptions into status codes.
template <class Fn>
cf_status guard(Fn&& fn) {
  try {
    g_error.clear();
    g_error_step = -1;
    fn();
    return CF_OK;
  } catch (const Error& e) {
    return set_error(to_status(e.code()), e.what(), e.step());
  } catch (const std::bad_alloc&) {
    return set_error(CF_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(CF_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(CF_ERR_INTERNAL, "unknown error");
  }
}

template <class T>
void require(const T* p, const char* what) {
  if (!p) fail(ErrorCode::InvalidArgument, std::string(what) + " is NULL");
}

SchemeParams to_params(const cf_scheme_params& p) {
  SchemeParams s;
  s.tau = p.tau;
  s.horizon = p.horizon;
  s.coupling = p.decoupled ? RegCoupling::decoupled(p.eps) : RegCoupling::coupled();
  s.picard_tol = p.picard_tol;
  s.picard_max_iter = p.picard_max_iter;
  s.picard_damping = p.picard_damping;
  s.newton_fallback = p.newton_fallback != 0;
  s.sinh_arg_cap = p.sinh_arg_cap;
  return s;
}

Variant to_variant(const cf_variant& v) {
  switch (v.kind) {
    case CF_VARIANT_SINH: return Variant::sinh();
    case CF_VARIANT_EXP: return Variant::exp();
    case CF_VARIANT_LINEAR: return Variant::linear();
    case CF_VARIANT_SCALED_SINH: return Variant::scaled_sinh(v.K, v.normalized != 0);
    case CF_VARIANT_P_EXPONENT: return Variant::p_exponent(v.p);
  }
  fail(ErrorCode::InvalidArgument, "unknown variant kind");
}

cf_field* wrap(Field f) { return new cf_field{std::move(f)}; }

cf_status report_out(const cf_trajectory* traj, cf_report** out,
                     EstimateReport (*fn)(const Trajectory&)) {
  if (out) *out = nullptr;
  return guard([&] {
    require(traj, "trajectory");
    require(out, "out");
    *out = new cf_report{fn(traj->traj)};
  });
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* cf_version(void) { return kVersion; }

const char* cf_status_name(cf_status status) {
  switch (status) {
    case CF_OK: return "ok";
    case CF_ERR_INVALID_ARGUMENT: return "invalid argument";
    case CF_ERR_UNSUPPORTED_DIMENSION: return "unsupported dimension";
    case CF_ERR_INVALID_EXPONENT: return "invalid exponent";
    case CF_ERR_INVALID_COEFFICIENT: return "invalid coefficient";
    case CF_ERR_SOLVER_FAILURE: return "solver failure";
    case CF_ERR_STEP_FAILURE: return "step failure";
    case CF_ERR_OVERFLOW: return "overflow";
    case CF_ERR_CONFIG: return "config error";
    case CF_ERR_IO: return "i/o error";
    case CF_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* cf_last_error(void) { return g_error.c_str(); }
int cf_last_error_step(void) { return g_error_step; }

cf_status cf_grid_create(int dim, int nodes_x, int nodes_y, double extent_x,
                         double extent_y, cf_grid** out) {
  if (out) *out = nullptr;
  return guard([&] {
    require(out, "out");
    *out = new cf_grid{Grid(dim, {nodes_x, nodes_y}, {extent_x, extent_y})};
  });
}

void cf_grid_destroy(cf_grid* grid) { delete grid; }
size_t cf_grid_size(const cf_grid* grid) { return grid ? grid->grid.size() : 0; }
int cf_grid_dim(const cf_grid* grid) { return grid ? grid->grid.dim() : 0; }
double cf_grid_spacing(const cf_grid* grid, int axis) {
  if (!grid || axis < 0 || axis >= grid->grid.dim()) return 0.0;
  return grid->grid.spacing(axis);
}

cf_status cf_field_create(const cf_grid* grid, const double* values,
                          size_t count, cf_field** out) {
  if (out) *out = nullptr;
  return guard([&] {
    require(grid, "grid");
    require(out, "out");
    if (count != grid->grid.size()) {
      fail(ErrorCode::InvalidArgument,
           "value count " + std::to_string(count) + " does not match grid size " +
               std::to_string(grid->grid.size()));
    }
    Field f(grid->grid);
    if (values) {
      for (size_t n = 0; n < count; ++n) f[n] = values[n];
      require_finite(f, "cf_field_create");
    }
    *out = wrap(std::move(f));
  });
}

void cf_field_destroy(cf_field* field) { delete field; }
size_t cf_field_size(const cf_field* field) {
  return field ? field->field.size() : 0;
}
const double* cf_field_values(const cf_field* field) {
  return field ? field->field.data().data() : nullptr;
}

cf_status cf_field_copy_values(const cf_field* field, double* out,
                               size_t count) {
  return guard([&] {
    require(field, "field");
    require(out, "out");
    if (count != field->field.size()) {
      fail(ErrorCode::InvalidArgument, "buffer size does not match field size");
    }
    std::memcpy(out, field->field.data().data(), count * sizeof(double));
  });
}

cf_status cf_laplacian(const cf_field* f, cf_field** out) {
  if (out) *out = nullptr;
  return guard([&] {
    require(f, "field");
    require(out, "out");
    *out = wrap(laplacian_neumann(f->field));
  });
}

cf_status cf_p_laplacian(const cf_field* f, double p, cf_field** out) {
  if (out) *out = nullptr;
  return guard([&] {
    require(f, "field");
    require(out, "out");
    *out = wrap(p_laplacian_1d(f->field, p));
  });
}

cf_status cf_integrate(const cf_field* f, double* out) {
  return guard([&] {
    require(f, "field");
    require(out, "out");
    *out = integrate(f->field);
  });
}

cf_status cf_grad_sq_integral(const cf_field* f, double* out) {
  return guard([&] {
    require(f, "field");
    require(out, "out");
    *out = grad_sq_integral(f->field);
  });
}

cf_status cf_cosh_energy(const cf_field* w, double cap, double* out) {
  return guard([&] {
    require(w, "field");
    require(out, "out");
    *out = cosh_energy(w->field, cap);
  });
}

cf_status cf_solve_helmholtz(double tau, const cf_field* rhs, cf_field** out) {
  if (out) *out = nullptr;
  return guard([&] {
    require(rhs, "rhs");
    require(out, "out");
    *out = wrap(solve_helmholtz_neumann(rhs->field.grid(), tau, rhs->field).solution);
  });
}

cf_status cf_solve_weighted_helmholtz(double tau, const cf_field* c,
                                      const cf_field* rhs, cf_field** out) {
  if (out) *out = nullptr;
  return guard([&] {
    require(c, "c");
    require(rhs, "rhs");
    require(out, "out");
    *out = wrap(solve_weighted_helmholtz(rhs->field.grid(), tau, c->field,
                                         rhs->field)
                    .solution);
  });
}

cf_status cf_snapshot_write(const char* path, const cf_field* f) {
  return guard([&] {
    require(path, "path");
    require(f, "field");
    save_snapshot(path, f->field);
  });
}

cf_status cf_snapshot_read(const char* path, cf_field** out) {
  if (out) *out = nullptr;
  return guard([&] {
    require(path, "path");
    require(out, "out");
    *out = wrap(load_snapshot(path));
  });
}

cf_scheme_params cf_scheme_params_default(void) {
  const SchemeParams s;
  return {s.tau,
          s.horizon,
          0,
          0.0,
          s.picard_tol,
          s.picard_max_iter,
          s.picard_damping,
          s.newton_fallback ? 1 : 0,
          s.sinh_arg_cap};
}

cf_variant cf_variant_default(void) { return {CF_VARIANT_SINH, 1.0, 1, 2.0}; }

cf_status cf_run(const cf_field* u0, const cf_scheme_params* params,
                 const cf_variant* variant, cf_trajectory** out) {
  if (out) *out = nullptr;
  return guard([&] {
    require(u0, "u0");
    require(params, "params");
    require(out, "out");
    const Variant v = variant ? to_variant(*variant) : Variant::sinh();
    *out = new cf_trajectory{run(u0->field, to_params(*params), v)};
  });
}

void cf_trajectory_destroy(cf_trajectory* traj) { delete traj; }
size_t cf_trajectory_length(const cf_trajectory* traj) {
  return traj ? traj->traj.records.size() : 0;
}

namespace {
const StepRecord& record_at(const cf_trajectory* traj, size_t k) {
  require(traj, "trajectory");
  if (k >= traj->traj.records.size()) {
    fail(ErrorCode::InvalidArgument, "step index out of range");
  }
  return traj->traj.records[k];
}
}  // namespace

cf_status cf_trajectory_u(const cf_trajectory* traj, size_t k, cf_field** out) {
  if (out) *out = nullptr;
  return guard([&] {
    require(out, "out");
    *out = wrap(record_at(traj, k).u);
  });
}

cf_status cf_trajectory_w(const cf_trajectory* traj, size_t k, cf_field** out) {
  if (out) *out = nullptr;
  return guard([&] {
    require(out, "out");
    *out = wrap(record_at(traj, k).w);
  });
}

cf_status cf_trajectory_step_info(const cf_trajectory* traj, size_t k,
                                  int* picard_iters, int* newton_used,
                                  double* residual_inf) {
  return guard([&] {
    const StepRecord& r = record_at(traj, k);
    if (picard_iters) *picard_iters = r.picard_iters;
    if (newton_used) *newton_used = r.newton_used ? 1 : 0;
    if (residual_inf) *residual_inf = r.residual_inf;
  });
}

cf_status cf_verify_prop31(const cf_trajectory* traj, cf_report** out) {
  return report_out(traj, out, verify_prop31);
}
cf_status cf_verify_prop32(const cf_trajectory* traj, cf_report** out) {
  return report_out(traj, out, verify_prop32);
}
cf_status cf_verify_prop33(const cf_trajectory* traj, cf_report** out) {
  return report_out(traj, out, verify_prop33);
}

cf_status cf_p_variant_energy(const cf_trajectory* traj, double p,
                              cf_report** out) {
  if (out) *out = nullptr;
  return guard([&] {
    require(traj, "trajectory");
    require(out, "out");
    *out = new cf_report{p_variant_energy(traj->traj, p)};
  });
}

void cf_report_destroy(cf_report* report) { delete report; }
const char* cf_report_name(const cf_report* r) {
  return r ? r->report.name.c_str() : "";
}
double cf_report_lhs(const cf_report* r) { return r ? r->report.lhs : 0.0; }
double cf_report_rhs(const cf_report* r) { return r ? r->report.rhs : 0.0; }
double cf_report_margin(const cf_report* r) { return r ? r->report.margin : 0.0; }
int cf_report_pass(const cf_report* r) { return r && r->report.pass ? 1 : 0; }
size_t cf_report_term_count(const cf_report* r) {
  return r ? r->report.terms.size() : 0;
}

cf_status cf_report_term(const cf_report* r, size_t i, const char** name,
                         double* value) {
  return guard([&] {
    require(r, "report");
    if (i >= r->report.terms.size()) {
      fail(ErrorCode::InvalidArgument, "term index out of range");
    }
    if (name) *name = r->report.terms[i].first.c_str();
    if (value) *value = r->report.terms[i].second;
  });
}

void cf_report_list_destroy(cf_report_list* list) { delete list; }
size_t cf_report_list_size(const cf_report_list* list) {
  return list ? list->reports.size() : 0;
}
const cf_report* cf_report_list_get(const cf_report_list* list, size_t i) {
  if (!list || i >= list->reports.size()) return nullptr;
  return &list->reports[i];
}

cf_status cf_config_parse(const char* text, cf_config** out) {
  if (out) *out = nullptr;
  return guard([&] {
    require(text, "text");
    require(out, "out");
    *out = new cf_config{parse_config(text)};
  });
}

cf_status cf_config_load(const char* path, cf_config** out) {
  if (out) *out = nullptr;
  return guard([&] {
    require(path, "path");
    require(out, "out");
    *out = new cf_config{load_config(path)};
  });
}

void cf_config_destroy(cf_config* cfg) { delete cfg; }

cf_status cf_config_print(const cf_config* cfg, char** out) {
  if (out) *out = nullptr;
  return guard([&] {
    require(cfg, "config");
    require(out, "out");
    *out = copy_string(print_config(cfg->cfg));
  });
}

cf_status cf_config_set_output(cf_config* cfg, const char* directory) {
  return guard([&] {
    require(cfg, "config");
    require(directory, "directory");
    if (!*directory) fail(ErrorCode::InvalidArgument, "directory is empty");
    cfg->cfg.output.directory = directory;
  });
}

cf_status cf_config_output_dir(const cf_config* cfg, char** out) {
  if (out) *out = nullptr;
  return guard([&] {
    require(cfg, "config");
    require(out, "out");
    *out = copy_string(resolve_output_dir(cfg->cfg.output.directory));
  });
}

void cf_string_free(char* s) { std::free(s); }

cf_status cf_run_experiment(const cf_config* cfg, int* exit_code) {
  return guard([&] {
    require(cfg, "config");
    const ExperimentOutcome o = run_experiment(cfg->cfg);
    if (exit_code) *exit_code = o.exit_code();
    if (!o.ok) {
      g_error = o.error;
      g_error_step = o.error_step;
    }
  });
}

cf_status cf_verify_directory(const char* directory, int* all_pass) {
  return guard([&] {
    require(directory, "directory");
    const auto reports = verify_directory(directory);
    bool ok = true;
    for (const auto& r : reports) ok = ok && r.pass;
    if (all_pass) *all_pass = ok ? 1 : 0;
  });
}

cf_status cf_verify_directory_reports(const char* directory,
                                      cf_report_list** out) {
  if (out) *out = nullptr;
  return guard([&] {
    require(directory, "directory");
    require(out, "out");
    auto list = std::make_unique<cf_report_list>();
    for (auto& r : verify_directory(directory)) list->reports.push_back({r});
    *out = list.release();
  });
}

cf_status cf_sweep(const cf_config* cfg, const char* param,
                   const double* values, size_t count, int workers,
                   int* all_ok) {
  return guard([&] {
    require(cfg, "config");
    require(param, "param");
    require(values, "values");
    const SweepSummary s = sweep(cfg->cfg, parse_sweep_param(param),
                                 std::vector<double>(values, values + count),
                                 workers);
    if (all_ok) *all_ok = s.ok() ? 1 : 0;
  });
}

cf_status cf_compare(const cf_config* cfg, const char* variants,
                     const double* k_values, size_t k_count, int workers) {
  return guard([&] {
    require(cfg, "config");
    require(variants, "variants");
    const std::vector<Variant> list = parse_variant_list(variants);
    std::vector<double> ks;
    if (k_values) ks.assign(k_values, k_values + k_count);
    compare_variants(cfg->cfg, list, ks, workers);
  });
}

}  // extern "C"
