// Copyright 2026 The crystalflow Authors.
// SPDX-License-Identifier: Apache-2.0

#include "crystalflow/stepper.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "crystalflow/error.hpp"
#include "crystalflow/sparse_ops.hpp"

namespace crystalflow {

int SchemeParams::step_count() const {
  const double ratio = horizon / tau;
  const double j = std::round(ratio);
  if (!(j >= 1.0) || std::abs(ratio - j) > 1e-9 * std::max(1.0, ratio)) {
    fail(ErrorCode::InvalidArgument,
         "tau = " + format_real(tau) + " does not divide horizon T = " +
             format_real(horizon) + " into an integer number of steps");
  }
  return static_cast<int>(j);
}

void SchemeParams::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    fail(ErrorCode::InvalidArgument, "tau must be positive");
  }
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    fail(ErrorCode::InvalidArgument, "horizon T must be positive");
  }
  if (coupling.kind == RegCoupling::Kind::Decoupled && !(coupling.eps > 0.0)) {
    fail(ErrorCode::InvalidArgument,
         "decoupled regularization requires eps > 0");
  }
  if (!(picard_tol > 0.0)) {
    fail(ErrorCode::InvalidArgument, "picard_tol must be positive");
  }
  if (picard_max_iter < 1) {
    fail(ErrorCode::InvalidArgument, "picard_max_iter must be >= 1");
  }
  if (!(picard_damping > 0.0 && picard_damping <= 1.0)) {
    fail(ErrorCode::InvalidArgument, "picard_damping must lie in (0, 1]");
  }
  if (!(sinh_arg_cap > 0.0)) {
    fail(ErrorCode::InvalidArgument, "sinh_arg_cap must be positive");
  }
  step_count();
}

namespace {

constexpr int kNewtonMaxIterations = 50;
constexpr int kLineSearchHalvings = 30;
constexpr double kArmijo = 1e-4;

void check_variant_grid(const Grid& grid, const Variant& variant) {
  variant.validate();
  if (variant.uses_p_laplacian() && grid.dim() != 1) {
    fail(ErrorCode::UnsupportedDimension,
         "the p-exponent variant is one-dimensional only");
  }
}

// Negative of the principal part of the w-definition: -Delta u or -Delta_p u.
Field principal_part(const Field& u, const Variant& variant) {
  Field out = variant.uses_p_laplacian() ? p_laplacian_1d(u, variant.p)
                                         : laplacian_neumann(u);
  return out *= -1.0;
}

// Infinity norm of the discrete Neumann Laplacian.
double laplacian_norm(const Grid& g) {
  double n = 0.0;
  for (int a = 0; a < g.dim(); ++a) n += 4.0 / (g.spacing(a) * g.spacing(a));
  return n;
}

// Magnitude bound for the principal part at u, used for residual scaling.
double principal_scale(const Field& u, const Variant& variant,
                       double lap_norm) {
  if (!variant.uses_p_laplacian()) return lap_norm * u.sup_norm();
  double max_slope = 0.0;
  for (const auto& axis : EdgeCoefficients::slopes(u).axis) {
    for (double s : axis) max_slope = std::max(max_slope, std::abs(s));
  }
  return (variant.p - 1.0) * lap_norm * u.sup_norm() *
         std::max(1.0, std::pow(max_slope, variant.p - 2.0));
}

EdgeCoefficients p_edge_coefficients(const Field& u, double p, double scale) {
  EdgeCoefficients e = EdgeCoefficients::slopes(u);
  for (auto& axis : e.axis) {
    for (double& s : axis) {
      s = s == 0.0 ? 0.0 : scale * std::pow(std::abs(s), p - 2.0);
    }
  }
  return e;
}

// Linearization of the w-definition operator around u: eps I - J.
SparseMatrix constraint_jacobian(const Field& u, double eps,
                                 const Variant& variant,
                                 const SparseMatrix& lap) {
  const SparseMatrix id = sparse_identity(u.size());
  if (!variant.uses_p_laplacian()) return id * eps - lap;
  return id * eps -
         assemble_flux_divergence(
             u.grid(), p_edge_coefficients(u, variant.p, variant.p - 1.0));
}

// Secant (Kacanov) form of the same operator: eps I - div(|u'|^{p-2} grad).
SparseMatrix constraint_secant(const Field& u, double eps,
                               const Variant& variant,
                               const SparseMatrix& lap) {
  const SparseMatrix id = sparse_identity(u.size());
  if (!variant.uses_p_laplacian()) return id * eps - lap;
  return id * eps - assemble_flux_divergence(
                        u.grid(), p_edge_coefficients(u, variant.p, 1.0));
}

// Solves the coupled pair
//   u / tau + B w = r1
//   A u - w      = r2
// as one block system. Eliminating w first would square the stencil norm and
// with it the round-off floor of the mass balance.
std::pair<Vector, Vector> solve_coupled(const SparseMatrix& b,
                                        const SparseMatrix& a, double tau,
                                        const Vector& r1, const Vector& r2) {
  const Eigen::Index n = r1.size();
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(b.nonZeros() + a.nonZeros() + 2 * n));
  for (Eigen::Index i = 0; i < n; ++i) {
    t.emplace_back(i, i, 1.0 / tau);
    t.emplace_back(n + i, n + i, -1.0);
  }
  for (Eigen::Index c = 0; c < b.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(b, c); it; ++it) {
      t.emplace_back(it.row(), n + it.col(), it.value());
    }
  }
  for (Eigen::Index c = 0; c < a.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(a, c); it; ++it) {
      t.emplace_back(n + it.row(), it.col(), it.value());
    }
  }
  SparseMatrix m(2 * n, 2 * n);
  m.setFromTriplets(t.begin(), t.end());
  Vector rhs(2 * n);
  rhs << r1, r2;

  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(m);
  if (lu.info() != Eigen::Success) {
    fail(ErrorCode::SolverFailure, "sparse LU factorization failed");
  }
  Vector x = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !x.allFinite()) {
    fail(ErrorCode::SolverFailure, "sparse LU solve failed");
  }
  return {x.head(n), x.tail(n)};
}

double bootstrap_ratio(const Field& v, const Field& u, const Field& w,
                       double tau, double eps) {
  const double rate = (u - v).sup_norm() / tau;
  if (rate == 0.0) return 0.0;
  return eps * w.sup_norm() / rate;
}

Error annotate(const Error& e, int k) {
  Error out(e.code(), "step " + std::to_string(k) + ": " + e.what());
  out.set_step(k);
  out.set_residuals(e.residuals());
  return out;
}

// phi -> (u, w) with f'(phi) frozen and the u-w coupling solved implicitly:
//   (I/tau + K A) u = v/tau + R,  w = A u,
// with K = eps - div(c grad), A the (secant) w-definition operator and
// R = Delta f(phi) - div(c grad phi) the coefficient defect.
StepResult frozen_coupled_map(const Field& v, const Field& phi,
                              const Field& u_lin, const SchemeParams& params,
                              const Variant& variant,
                              const SparseMatrix& lap) {
  const Grid& g = v.grid();
  const double tau = params.tau;
  const double eps = params.reg_weight();
  const EdgeCoefficients c =
      EdgeCoefficients::arithmetic_mean(apply_df(phi, variant));
  const SparseMatrix div_c = assemble_flux_divergence(g, c);
  const SparseMatrix id = sparse_identity(g.size());
  const SparseMatrix k_op = id * eps - div_c;
  const SparseMatrix a_op = constraint_secant(u_lin, eps, variant, lap);

  const Vector defect =
      lap * to_vector(apply_f(phi, variant)) - div_c * to_vector(phi);
  const auto [u, w] = solve_coupled(k_op, a_op, tau, to_vector(v) / tau + defect,
                                    Vector::Zero(defect.size()));
  return {to_field(g, u), to_field(g, w), {}};
}

}  // namespace

Field constraint_operator(const Field& u, double eps, const Variant& variant) {
  Field out = principal_part(u, variant);
  for (std::size_t n = 0; n < out.size(); ++n) out[n] += eps * u[n];
  return out;
}

StepResidual step_residual(const Field& v, const Field& u, const Field& w,
                           const SchemeParams& params,
                           const Variant& variant) {
  check_exponent_cap(w, variant, params.sinh_arg_cap, "step residual");
  const double tau = params.tau;
  const double eps = params.reg_weight();
  const Field lap_f = laplacian_neumann(apply_f(w, variant));
  const Field du = u - v;

  StepResidual r{Field(u.grid()), Field(u.grid())};
  for (std::size_t n = 0; n < u.size(); ++n) {
    r.update[n] = du[n] / tau - lap_f[n] + eps * w[n];
  }
  const Field principal = principal_part(u, variant);
  for (std::size_t n = 0; n < u.size(); ++n) {
    r.constraint[n] = principal[n] + eps * u[n] - w[n];
  }
  const double lap_norm = laplacian_norm(u.grid());
  r.update_scale = 1.0 + (u.sup_norm() + v.sup_norm()) / tau +
                   lap_norm * apply_f(w, variant).sup_norm() +
                   eps * w.sup_norm();
  r.constraint_scale = 1.0 + principal_scale(u, variant, lap_norm) +
                       eps * u.sup_norm() + w.sup_norm();
  r.update_inf = r.update.sup_norm();
  r.constraint_inf = r.constraint.sup_norm();
  if (!std::isfinite(r.update_inf) || !std::isfinite(r.constraint_inf) ||
      !std::isfinite(r.update_scale) || !std::isfinite(r.constraint_scale)) {
    r.update_inf = r.constraint_inf = std::numeric_limits<double>::infinity();
  }
  return r;
}

double StepResidual::relative_to(double tol) const {
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  return std::max(
      update_inf / std::max(tol, kRoundoffFactor * kEps * update_scale),
      constraint_inf / std::max(tol, kRoundoffFactor * kEps * constraint_scale));
}

Field init_w0(const Field& u0, const SchemeParams& params,
              const Variant& variant) {
  require_finite(u0, "init_w0");
  variant.validate();
  return constraint_operator(u0, params.reg_weight(), variant);
}

StepResult alternating_map(const Field& v, const Field& phi,
                           const SchemeParams& params,
                           const Variant& variant) {
  if (variant.uses_p_laplacian()) {
    fail(ErrorCode::InvalidArgument,
         "the alternating map needs a linear w-definition; use the frozen "
         "coupled map for the p-exponent variant");
  }
  check_exponent_cap(phi, variant, params.sinh_arg_cap, "alternating map");
  const Grid& g = v.grid();
  const double tau = params.tau;
  const double eps = params.reg_weight();
  SolverOptions opts;
  opts.backend = params.linear_backend;
  opts.bound = variant.coefficient_bound();

  const SolveResult u = solve_helmholtz_neumann(g, eps, phi, opts);
  const Field c = apply_df(phi, variant);
  const Field defect =
      laplacian_neumann(apply_f(phi, variant)) -
      flux_divergence(phi, EdgeCoefficients::arithmetic_mean(c));
  Field rhs = (u.solution - v) * (-1.0 / tau);
  rhs += defect;
  const SolveResult w = solve_weighted_helmholtz(g, eps, c, rhs, opts);
  return {u.solution, w.solution, {}};
}

StepResult newton_step(const Field& v, const SchemeParams& params,
                       const Field& u_guess, const Field& w_guess,
                       const Variant& variant) {
  params.validate();
  check_variant_grid(v.grid(), variant);
  require_finite(v, "newton_step");
  require_same_grid(v, u_guess, "newton_step");
  require_same_grid(v, w_guess, "newton_step");

  const Grid& g = v.grid();
  const double tau = params.tau;
  const double eps = params.reg_weight();
  const SparseMatrix lap = assemble_laplacian(g);
  const SparseMatrix id = sparse_identity(g.size());

  StepResult out{u_guess, w_guess, {}};
  StepDiagnostics& d = out.diagnostics;
  d.newton_used = true;
  StepResidual res = step_residual(v, out.u, out.w, params, variant);
  d.residual_history.push_back(res.sup());

  while (res.relative_to(params.picard_tol) > 1.0) {
    if (d.newton_iters >= kNewtonMaxIterations) {
      Error e(ErrorCode::StepFailure,
              "Newton iteration did not converge in " +
                  std::to_string(kNewtonMaxIterations) +
                  " iterations, residual " + format_real(res.sup()));
      e.set_residuals(d.residual_history);
      throw e;
    }
    const SparseMatrix m_op =
        id * eps - lap * sparse_diagonal(apply_df(out.w, variant));
    const SparseMatrix a_op = constraint_jacobian(out.u, eps, variant, lap);
    const auto [du, dw] =
        solve_coupled(m_op, a_op, tau, -to_vector(res.update),
                      -to_vector(res.constraint));
    const Field du_f = to_field(g, du);
    const Field dw_f = to_field(g, dw);

    // Row-scaled least-squares merit with the scales frozen at the current
    // iterate; the Newton direction is a descent direction for it.
    const auto merit = [&](const StepResidual& r) {
      const double a = to_vector(r.update).norm() / res.update_scale;
      const double b = to_vector(r.constraint).norm() / res.constraint_scale;
      return a * a + b * b;
    };
    const double merit0 = merit(res);
    bool accepted = false;
    double lambda = 1.0;
    for (int h = 0; h < kLineSearchHalvings; ++h, lambda *= 0.5) {
      Field u_try = out.u + du_f * lambda;
      Field w_try = out.w + dw_f * lambda;
      StepResidual trial{Field(g), Field(g)};
      try {
        trial = step_residual(v, u_try, w_try, params, variant);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::Overflow) throw;
        continue;
      }
      if (merit(trial) <= (1.0 - kArmijo * lambda) * merit0) {
        out.u = std::move(u_try);
        out.w = std::move(w_try);
        res = std::move(trial);
        accepted = true;
        break;
      }
    }
    ++d.newton_iters;
    d.residual_history.push_back(res.sup());
    if (!accepted) {
      // Round-off floor: within 10x of the tolerance is accepted by the
      // caller's record invariant, anything else is stagnation.
      if (res.relative_to(params.picard_tol) <= 10.0) break;
      Error e(ErrorCode::StepFailure,
              "Newton line search stagnated at residual " +
                  format_real(res.sup()));
      e.set_residuals(d.residual_history);
      throw e;
    }
  }
  d.residual_inf = res.sup();
  d.residual_update = res.update_inf;
  d.residual_constraint = res.constraint_inf;
  d.tolerance_ratio = res.relative_to(params.picard_tol);
  d.bootstrap_ratio = bootstrap_ratio(v, out.u, out.w, tau, eps);
  return out;
}

StepResult fixed_point_step(const Field& v, const SchemeParams& params,
                            const Field& phi_init, const Variant& variant) {
  params.validate();
  check_variant_grid(v.grid(), variant);
  require_finite(v, "fixed_point_step");
  require_finite(phi_init, "fixed_point_step");
  require_same_grid(v, phi_init, "fixed_point_step");

  const SparseMatrix lap = assemble_laplacian(v.grid());
  double theta = params.picard_damping;
  double prev_increment = std::numeric_limits<double>::infinity();
  Field phi = phi_init;
  Field u_lin = v;

  StepDiagnostics d;
  StepResult best{v, phi_init, {}};
  double best_res = std::numeric_limits<double>::infinity();
  double best_ratio = std::numeric_limits<double>::infinity();

  for (int it = 1; it <= params.picard_max_iter; ++it) {
    check_exponent_cap(phi, variant, params.sinh_arg_cap, "fixed-point iterate");
    StepResult m{v, phi, {}};
    try {
      m = params.picard_map == PicardMap::Alternating
              ? alternating_map(v, phi, params, variant)
              : frozen_coupled_map(v, phi, u_lin, params, variant, lap);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SolverFailure) throw;
      break;
    }
    check_exponent_cap(m.w, variant, params.sinh_arg_cap, "fixed-point image");
    const StepResidual r = step_residual(v, m.u, m.w, params, variant);
    d.picard_iters = it;
    d.residual_history.push_back(r.sup());
    const double ratio = r.relative_to(params.picard_tol);
    if (ratio < best_ratio) {
      best_ratio = ratio;
      best_res = r.sup();
      best = m;
    }
    if (ratio <= 1.0) {
      d.residual_inf = r.sup();
      d.residual_update = r.update_inf;
      d.residual_constraint = r.constraint_inf;
      d.tolerance_ratio = ratio;
      d.final_damping = theta;
      d.bootstrap_ratio =
          bootstrap_ratio(v, m.u, m.w, params.tau, params.reg_weight());
      return {std::move(m.u), std::move(m.w), std::move(d)};
    }
    const double increment = (m.w - phi).sup_norm();
    if (increment > prev_increment) theta *= 0.5;
    prev_increment = increment;
    for (std::size_t n = 0; n < phi.size(); ++n) {
      phi[n] = (1.0 - theta) * phi[n] + theta * m.w[n];
    }
    u_lin = std::move(m.u);
  }

  if (!params.newton_fallback) {
    Error e(ErrorCode::StepFailure,
            "fixed-point iteration did not converge in " +
                std::to_string(params.picard_max_iter) +
                " iterations, best residual " + format_real(best_res));
    e.set_residuals(d.residual_history);
    throw e;
  }
  StepResult out = newton_step(v, params, best.u, best.w, variant);
  out.diagnostics.picard_iters = d.picard_iters;
  out.diagnostics.final_damping = theta;
  d.residual_history.insert(d.residual_history.end(),
                            out.diagnostics.residual_history.begin(),
                            out.diagnostics.residual_history.end());
  out.diagnostics.residual_history = std::move(d.residual_history);
  return out;
}

Trajectory run(const Field& u0, const SchemeParams& params,
               const Variant& variant, const StepObserver& observer) {
  params.validate();
  check_variant_grid(u0.grid(), variant);
  require_finite(u0, "run");
  const int steps = params.step_count();

  Trajectory traj{params, u0.grid(), variant, {}};
  traj.records.reserve(steps + 1);
  try {
    Field w0 = init_w0(u0, params, variant);
    check_exponent_cap(w0, variant, params.sinh_arg_cap, "initial w0");
    traj.records.push_back({0, u0, std::move(w0), 0, false, 0.0});
  } catch (const Error& e) {
    throw annotate(e, 0);
  }
  if (observer) observer(traj.records.back());

  for (int k = 1; k <= steps; ++k) {
    const StepRecord& prev = traj.records.back();
    StepResult s{prev.u, prev.w, {}};
    try {
      s = fixed_point_step(prev.u, params, prev.w, variant);
      if (!(s.diagnostics.tolerance_ratio <= 10.0)) {
        Error e(ErrorCode::StepFailure,
                "accepted step residual " +
                    format_real(s.diagnostics.residual_inf) +
                    " exceeds 10 * picard_tol");
        e.set_residuals(s.diagnostics.residual_history);
        throw e;
      }
    } catch (const Error& e) {
      throw annotate(e, k);
    }
    traj.records.push_back({k, std::move(s.u), std::move(s.w),
                            s.diagnostics.picard_iters,
                            s.diagnostics.newton_used,
                            s.diagnostics.residual_inf});
    if (observer) observer(traj.records.back());
  }
  return traj;
}

}  // namespace crystalflow
