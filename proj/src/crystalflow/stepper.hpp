// Copyright 2026 The crystalflow Authors.
// SPDX-License-Identifier: Apache-2.0

// Implicit time stepping of the regularized system
//
//   (u_k - u_{k-1}) / tau - Delta_h f(w_k) + eps * w_k = 0
//   -Delta_h u_k + eps * u_k = w_k
//
// with homogeneous Neumann data, where eps is the regularization weight
// (eps = tau in the coupled scheme). Each step is a nonlinear elliptic
// problem solved by a damped fixed-point iteration with a Newton fallback.

#pragma once

#include <functional>
#include <vector>

#include "crystalflow/elliptic_solve.hpp"
#include "crystalflow/grid_ops.hpp"
#include "crystalflow/nonlinearity.hpp"

namespace crystalflow {

struct RegCoupling {
  enum class Kind { TauCoupled, Decoupled };
  Kind kind = Kind::TauCoupled;
  double eps = 0.0;

  static RegCoupling coupled() { return {}; }
  static RegCoupling decoupled(double eps) { return {Kind::Decoupled, eps}; }

  bool operator==(const RegCoupling&) const = default;
};

// Which fixed-point map the Picard iteration applies.
enum class PicardMap {
  // Freeze f'(phi) and solve the linear u-w system jointly.
  FrozenCoupled,
  // phi -> u from (-Delta + eps) u = phi, then w from the f'(phi)-weighted
  // problem with data -(u - v) / tau. Contracts only for moderate tau.
  Alternating,
};

struct SchemeParams {
  double tau = 1e-2;
  double horizon = 0.1;
  RegCoupling coupling;
  double picard_tol = 1e-10;
  int picard_max_iter = 200;
  double picard_damping = 1.0;
  bool newton_fallback = true;
  double sinh_arg_cap = 700.0;
  PicardMap picard_map = PicardMap::FrozenCoupled;
  LinearBackend linear_backend = LinearBackend::ConjugateGradient;

  double reg_weight() const {
    return coupling.kind == RegCoupling::Kind::TauCoupled ? tau
                                                            : coupling.eps;
  }
  int step_count() const;
  void validate() const;

  bool operator==(const SchemeParams&) const = default;
};

struct StepDiagnostics {
  int picard_iters = 0;
  int newton_iters = 0;
  bool newton_used = false;
  // max of the two sup-norm residuals below.
  double residual_inf = 0.0;
  double residual_update = 0.0;      // (u - v)/tau - Delta f(w) + eps w
  double residual_constraint = 0.0;  // -Delta u + eps u - w
  // StepResidual::relative_to(picard_tol) at acceptance.
  double tolerance_ratio = 0.0;
  double final_damping = 1.0;
  // eps * ||w||_inf / ||(u - v)/tau||_inf; the L-infinity bootstrap bound
  // keeps this at or below 1 for the continuous regularized problem.
  double bootstrap_ratio = 0.0;
  std::vector<double> residual_history;
};

struct StepResult {
  Field u;
  Field w;
  StepDiagnostics diagnostics;
};

// Roundoff allowance, in units of machine epsilon times the term scale.
inline constexpr double kRoundoffFactor = 16.0;

struct StepResidual {
  Field update;      // residual of the evolution equation
  Field constraint;  // residual of the w-definition
  double update_inf = 0.0;
  double constraint_inf = 0.0;
  // Size of the terms each residual is assembled from, with the stencil
  // entering through its operator norm.
  double update_scale = 1.0;
  double constraint_scale = 1.0;

  double sup() const { return std::max(update_inf, constraint_inf); }
  // Largest ratio of a residual sup-norm to max(tol, kRoundoffFactor *
  // epsilon * scale). A step is converged at 1. The absolute tolerance
  // governs unless the floating-point evaluation of the residual cannot
  // resolve it.
  double relative_to(double tol) const;
};

struct StepRecord {
  int k = 0;
  Field u;
  Field w;
  int picard_iters = 0;
  bool newton_used = false;
  double residual_inf = 0.0;
};

struct Trajectory {
  SchemeParams params;
  Grid grid;
  Variant variant;
  std::vector<StepRecord> records;

  double time(int k) const { return k * params.tau; }
};

// w-definition operator: -Delta_h u + eps u (or -Delta_p u + eps u).
Field constraint_operator(const Field& u, double eps, const Variant& variant);

StepResidual step_residual(const Field& v, const Field& u, const Field& w,
                           const SchemeParams& params,
                           const Variant& variant = Variant::sinh());

// w_0 chosen so that the w-definition holds exactly at k = 0.
Field init_w0(const Field& u0, const SchemeParams& params,
              const Variant& variant = Variant::sinh());

// One application of the alternating map phi -> (u, w) built from the two
// linear Neumann sub-problems, including the coefficient defect correction
// that makes its fixed points solve the discrete step exactly.
StepResult alternating_map(const Field& v, const Field& phi,
                           const SchemeParams& params,
                           const Variant& variant = Variant::sinh());

StepResult fixed_point_step(const Field& v, const SchemeParams& params,
                            const Field& phi_init,
                            const Variant& variant = Variant::sinh());

StepResult newton_step(const Field& v, const SchemeParams& params,
                       const Field& u_guess, const Field& w_guess,
                       const Variant& variant = Variant::sinh());

using StepObserver = std::function<void(const StepRecord&)>;

// Integrates from u0 to the horizon. The observer, when set, sees every
// record as it is appended (including k = 0).
Trajectory run(const Field& u0, const SchemeParams& params,
               const Variant& variant = Variant::sinh(),
               const StepObserver& observer = {});

}  // namespace crystalflow
