// Copyright 2026 The crystalflow Authors.
// SPDX-License-Identifier: Apache-2.0

#include "crystalflow/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "crystalflow/error.hpp"

namespace crystalflow {

double EstimateReport::abs_tol() const { return 1e-8 * std::max(1.0, rhs); }

double EstimateReport::term(const std::string& key) const {
  for (const auto& [k, v] : terms) {
    if (k == key) return v;
  }
  fail(ErrorCode::InvalidArgument, "report " + name + " has no term " + key);
}

double cosh_energy(const Field& w, double cap) {
  return variant_energy(w, Variant::sinh(), cap);
}

double variant_energy(const Field& w, const Variant& variant, double cap) {
  check_exponent_cap(w, variant, cap, "energy");
  return integrate(map(w, [&](double s) { return variant.antiderivative(s); }));
}

namespace {

// A left-side term: either accumulated over steps (its per-step value is the
// already tau-weighted increment) or evaluated at the current step.
struct TermSpec {
  std::string name;
  double coeff;
  bool cumulative;
};

struct RunningInequality {
  std::string name;
  std::vector<TermSpec> specs;
  // values[k - 1][t] for k = 1..j.
  std::vector<std::vector<double>> values;
  std::vector<std::pair<std::string, double>> rhs_terms;
};

EstimateReport evaluate(const RunningInequality& ineq) {
  const std::size_t nt = ineq.specs.size();
  EstimateReport r;
  r.name = ineq.name;
  for (const auto& [n, v] : ineq.rhs_terms) r.rhs += v;

  std::vector<double> acc(nt, 0.0), horizon(nt, 0.0), worst(nt, 0.0);
  double worst_lhs = -std::numeric_limits<double>::infinity();
  int worst_step = 0;
  for (std::size_t m = 0; m < ineq.values.size(); ++m) {
    double lhs = 0.0;
    for (std::size_t t = 0; t < nt; ++t) {
      const double v = ineq.values[m][t];
      if (ineq.specs[t].cumulative) {
        acc[t] += v;
        horizon[t] += v;
      } else {
        acc[t] = v;
        horizon[t] = std::max(horizon[t], v);
      }
      lhs += ineq.specs[t].coeff * acc[t];
    }
    if (lhs > worst_lhs) {
      worst_lhs = lhs;
      worst_step = static_cast<int>(m) + 1;
      for (std::size_t t = 0; t < nt; ++t) {
        worst[t] = ineq.specs[t].coeff * acc[t];
      }
    }
  }

  r.lhs = worst_lhs;
  r.margin = r.rhs - r.lhs;
  r.pass = r.margin >= -r.abs_tol();

  double horizon_lhs = 0.0;
  for (std::size_t t = 0; t < nt; ++t) {
    r.terms.emplace_back(ineq.specs[t].name, worst[t]);
    horizon_lhs += ineq.specs[t].coeff * horizon[t];
  }
  for (const auto& [n, v] : ineq.rhs_terms) r.terms.emplace_back("rhs:" + n, v);
  r.terms.emplace_back("worst_step", worst_step);
  r.terms.emplace_back("horizon_lhs", horizon_lhs);
  r.terms.emplace_back("horizon_margin", r.rhs - horizon_lhs);
  return r;
}

void require_steps(const Trajectory& traj, const char* what) {
  if (traj.records.size() < 2) {
    fail(ErrorCode::InvalidArgument,
         std::string(what) + ": trajectory has no time steps");
  }
  if (traj.variant.uses_p_laplacian()) {
    fail(ErrorCode::InvalidArgument,
         std::string(what) +
             ": not defined for the p-exponent variant; use p_variant_energy");
  }
}

Field difference_quotient(const Field& now, const Field& before, double tau) {
  return (now - before) * (1.0 / tau);
}

}  // namespace

EstimateReport verify_prop31(const Trajectory& traj) {
  require_steps(traj, "verify_prop31");
  const double tau = traj.params.tau;
  const double eps = traj.params.reg_weight();
  const double cap = traj.params.sinh_arg_cap;
  const Variant& var = traj.variant;

  RunningInequality ineq{
      "prop31",
      {{"sum_dt_u_sq", 1.0, true},
       {"sum_lap_f_sq", 1.0, true},
       {"sum_eps2_w_sq", 1.0, true},
       {"sum_2eps_grad_f_sq", 2.0, true},
       {"sum_2eps2_w_f", 2.0, true},
       {"max_2_energy", 2.0, false},
       {"max_2_eps_dirichlet", 2.0, false},
       {"sum_2eps_grad_w_sq", 2.0, true}},
      {},
      {}};
  for (std::size_t k = 1; k < traj.records.size(); ++k) {
    const StepRecord& rec = traj.records[k];
    const Field f = apply_f(rec.w, var);
    const Field dq = difference_quotient(rec.u, traj.records[k - 1].u, tau);
    const Field lap_f = laplacian_neumann(f);
    ineq.values.push_back({
        tau * inner(dq, dq),
        tau * inner(lap_f, lap_f),
        tau * eps * eps * inner(rec.w, rec.w),
        tau * eps * grad_sq_integral(f),
        tau * eps * eps * inner(rec.w, f),
        variant_energy(rec.w, var, cap),
        eps * grad_sq_integral(rec.u) + eps * eps * inner(rec.u, rec.u),
        tau * eps * grad_sq_integral(rec.w),
    });
  }
  const StepRecord& r0 = traj.records.front();
  ineq.rhs_terms = {
      {"2_energy_0", 2.0 * variant_energy(r0.w, var, cap)},
      {"2eps_grad_u0_sq", 2.0 * eps * grad_sq_integral(r0.u)},
      {"2eps2_u0_sq", 2.0 * eps * eps * inner(r0.u, r0.u)},
  };
  return evaluate(ineq);
}

EstimateReport verify_prop32(const Trajectory& traj) {
  require_steps(traj, "verify_prop32");
  const double tau = traj.params.tau;
  const double eps = traj.params.reg_weight();

  RunningInequality ineq{"prop32",
                         {{"max_grad_u_sq", 1.0, false},
                          {"max_eps_u_sq", 1.0, false},
                          {"sum_eps3_u_sq", 1.0, true},
                          {"sum_grad_w_sq", 1.0, true},
                          {"sum_eps_lap_u_sq", 1.0, true},
                          {"sum_2eps2_grad_u_sq", 2.0, true}},
                         {},
                         {}};
  for (std::size_t k = 1; k < traj.records.size(); ++k) {
    const StepRecord& rec = traj.records[k];
    const Field lap_u = laplacian_neumann(rec.u);
    const double u_sq = inner(rec.u, rec.u);
    const double grad_u = grad_sq_integral(rec.u);
    ineq.values.push_back({
        grad_u,
        eps * u_sq,
        tau * eps * eps * eps * u_sq,
        tau * grad_sq_integral(rec.w),
        tau * eps * inner(lap_u, lap_u),
        tau * eps * eps * grad_u,
    });
  }
  const StepRecord& r0 = traj.records.front();
  ineq.rhs_terms = {{"grad_u0_sq", grad_sq_integral(r0.u)},
                    {"eps_u0_sq", eps * inner(r0.u, r0.u)}};
  return evaluate(ineq);
}

EstimateReport verify_prop33(const Trajectory& traj) {
  require_steps(traj, "verify_prop33");
  const double tau = traj.params.tau;
  const double eps = traj.params.reg_weight();
  const double cap = traj.params.sinh_arg_cap;
  const Variant& var = traj.variant;

  RunningInequality ineq{"prop33",
                         {{"sum_dt_w_sq", 1.0, true},
                          {"max_half_dt_u_sq", 0.5, false},
                          {"max_eps2_w_f", 1.0, false},
                          {"max_half_eps_grad_f_sq", 0.5, false},
                          {"sum_eps_grad_dt_u_sq", 1.0, true},
                          {"sum_eps2_dt_u_sq", 1.0, true}},
                         {},
                         {}};
  for (std::size_t k = 1; k < traj.records.size(); ++k) {
    const StepRecord& rec = traj.records[k];
    const StepRecord& prev = traj.records[k - 1];
    check_exponent_cap(rec.w, var, cap, "verify_prop33");
    const Field f = apply_f(rec.w, var);
    const Field q = difference_quotient(rec.u, prev.u, tau);
    const Field dw = difference_quotient(rec.w, prev.w, tau);
    const double q_sq = inner(q, q);
    ineq.values.push_back({
        tau * inner(dw, dw),
        q_sq,
        eps * eps * inner(rec.w, f),
        eps * grad_sq_integral(f),
        tau * eps * grad_sq_integral(q),
        tau * eps * eps * q_sq,
    });
  }
  const StepRecord& r0 = traj.records.front();
  check_exponent_cap(r0.w, var, cap, "verify_prop33");
  const Field f0 = apply_f(r0.w, var);
  Field q0 = laplacian_neumann(f0);
  for (std::size_t n = 0; n < q0.size(); ++n) q0[n] -= eps * r0.w[n];
  ineq.rhs_terms = {{"q0_sq", inner(q0, q0)},
                    {"eps_grad_f0_sq", eps * grad_sq_integral(f0)},
                    {"2eps2_w0_f0", 2.0 * eps * eps * inner(r0.w, f0)}};
  return evaluate(ineq);
}

EstimateReport p_variant_energy(const Trajectory& traj, double p) {
  if (!traj.variant.uses_p_laplacian() || traj.variant.p != p) {
    fail(ErrorCode::InvalidArgument,
         "p_variant_energy: trajectory was not produced with the p-exponent "
         "variant at p = " + format_real(p));
  }
  if (traj.grid.dim() != 1) {
    fail(ErrorCode::UnsupportedDimension,
         "p_variant_energy: one-dimensional runs only");
  }
  if (traj.records.size() < 2) {
    fail(ErrorCode::InvalidArgument,
         "p_variant_energy: trajectory has no time steps");
  }
  const double tau = traj.params.tau;
  const double eps = traj.params.reg_weight();
  const double half_p_eps = 0.5 * p * eps;

  RunningInequality ineq{"p_energy",
                         {{"max_grad_u_pow", 1.0, false},
                          {"max_half_p_eps_u_sq", 1.0, false},
                          {"sum_grad_w_sq", 1.0, true}},
                         {},
                         {}};
  for (std::size_t k = 1; k < traj.records.size(); ++k) {
    const StepRecord& rec = traj.records[k];
    ineq.values.push_back({grad_pow_integral_1d(rec.u, p),
                           half_p_eps * inner(rec.u, rec.u),
                           tau * grad_sq_integral(rec.w)});
  }
  const StepRecord& r0 = traj.records.front();
  ineq.rhs_terms = {{"grad_u0_pow", grad_pow_integral_1d(r0.u, p)},
                    {"half_p_eps_u0_sq", half_p_eps * inner(r0.u, r0.u)}};
  return evaluate(ineq);
}

MonitorSeries continuum_monitors(const Trajectory& traj) {
  const double tau = traj.params.tau;
  const double eps = traj.params.reg_weight();
  MonitorSeries out;
  for (std::size_t k = 0; k < traj.records.size(); ++k) {
    const StepRecord& rec = traj.records[k];
    MonitorSample s;
    s.k = rec.k;
    s.t = traj.time(rec.k);
    s.mass = integrate(rec.u);
    s.dirichlet = grad_sq_integral(rec.u);
    s.cosh_energy =
        variant_energy(rec.w, traj.variant, traj.params.sinh_arg_cap);
    s.w_sup = rec.w.sup_norm();
    if (k > 0) {
      const MonitorSample& prev = out.samples.back();
      const Field q = difference_quotient(rec.u, traj.records[k - 1].u, tau);
      s.l2_time_derivative = inner(q, q);
      s.mass_defect = std::abs((s.mass - prev.mass) / tau +
                               eps * integrate(rec.w)) /
                      (1.0 + std::abs(s.mass));
      const double slack = 1e-12 * std::max(1.0, std::abs(prev.cosh_energy));
      if (s.cosh_energy > prev.cosh_energy + slack) {
        out.energy_non_increasing = false;
      }
      if (s.dirichlet > prev.dirichlet + 1e-12 * std::max(1.0, prev.dirichlet)) {
        out.dirichlet_non_increasing = false;
      }
      out.max_mass_drift =
          std::max(out.max_mass_drift, std::abs(s.mass - out.samples[0].mass));
      out.max_mass_defect = std::max(out.max_mass_defect, s.mass_defect);
    }
    out.samples.push_back(s);
  }
  return out;
}

void write_reports_csv(std::ostream& os,
                       const std::vector<EstimateReport>& reports) {
  os << "name,lhs,rhs,margin,pass\n";
  for (const EstimateReport& r : reports) {
    os << r.name << ',' << format_real(r.lhs) << ',' << format_real(r.rhs)
       << ',' << format_real(r.margin) << ',' << (r.pass ? "true" : "false")
       << '\n';
  }
}

void write_report_terms_csv(std::ostream& os,
                            const std::vector<EstimateReport>& reports) {
  os << "name,term,value\n";
  for (const EstimateReport& r : reports) {
    for (const auto& [k, v] : r.terms) {
      os << r.name << ',' << k << ',' << format_real(v) << '\n';
    }
  }
}

}  // namespace crystalflow
