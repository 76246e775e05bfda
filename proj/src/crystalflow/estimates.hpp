// Copyright 2026 The crystalflow Authors.
// SPDX-License-Identifier: Apache-2.0

// Discrete a-priori estimates evaluated on stored trajectories.
//
// Conventions: time integrals are sums tau * sum_k over k = 1..m, time
// derivatives are difference quotients (x_k - x_{k-1}) / tau, and eps is the
// regularization weight of the run. Each inequality is checked in its running
// form: for every m = 1..j the left side accumulated up to t_m is compared
// with the right side, and the report keeps the worst m. The horizon form
// (independent maxima over all k plus sums over the whole horizon) is kept
// in the term breakdown for reference.

#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "crystalflow/stepper.hpp"

namespace crystalflow {

struct EstimateReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  bool pass = false;
  std::vector<std::pair<std::string, double>> terms;

  double abs_tol() const;
  // Value of a named term; throws InvalidArgument when absent.
  double term(const std::string& key) const;
};

// Integral of cosh(w); overflow error when |w| exceeds the cap.
double cosh_energy(const Field& w, double cap = 700.0);
// Integral of the variant antiderivative F(w) (cosh for sinh).
double variant_energy(const Field& w, const Variant& variant,
                      double cap = 700.0);

// Energy estimate tested with f(w):
//   2 F(w_m) + 2 (eps |grad u_m|^2 + eps^2 u_m^2)
//   + sum [ (D u)^2 + (Lap f(w))^2 + eps^2 w^2 + 2 eps |grad f(w)|^2
//           + 2 eps^2 w f(w) + 2 eps |grad w|^2 ]
//   <= 2 F(w_0) + 2 eps |grad u_0|^2 + 2 eps^2 u_0^2.
EstimateReport verify_prop31(const Trajectory& traj);

// Dirichlet estimate tested with w:
//   |grad u_m|^2 + eps u_m^2
//   + sum [ eps^3 u^2 + |grad w|^2 + eps (Lap u)^2 + 2 eps^2 |grad u|^2 ]
//   <= |grad u_0|^2 + eps u_0^2.
EstimateReport verify_prop32(const Trajectory& traj);

// Time-derivative estimate, q_k = (u_k - u_{k-1}) / tau and
// q_0 = Lap f(w_0) - eps w_0:
//   sum (D w)^2 + 1/2 q_m^2 + eps^2 w_m f(w_m) + 1/2 eps |grad f(w_m)|^2
//   + sum [ eps |grad q|^2 + eps^2 q^2 ]
//   <= q_0^2 + eps |grad f(w_0)|^2 + 2 eps^2 w_0 f(w_0).
EstimateReport verify_prop33(const Trajectory& traj);

// Dissipation of the p-exponent variant (one-dimensional runs):
//   |u_m'|^p + (p eps / 2) u_m^2 + sum |w'|^2 <= |u_0'|^p + (p eps / 2) u_0^2.
EstimateReport p_variant_energy(const Trajectory& traj, double p);

struct MonitorSample {
  int k = 0;
  double t = 0.0;
  double mass = 0.0;
  double dirichlet = 0.0;
  double cosh_energy = 0.0;  // integral of F(w_k)
  double l2_time_derivative = 0.0;  // integral of ((u_k - u_{k-1}) / tau)^2
  double w_sup = 0.0;
  // |(mass_k - mass_{k-1}) / tau + eps * int w_k| / (1 + |mass_k|).
  double mass_defect = 0.0;
};

struct MonitorSeries {
  std::vector<MonitorSample> samples;
  bool energy_non_increasing = true;
  bool dirichlet_non_increasing = true;
  double max_mass_drift = 0.0;   // max_k |mass_k - mass_0|
  double max_mass_defect = 0.0;  // max_k mass_defect
};

MonitorSeries continuum_monitors(const Trajectory& traj);

// CSV emission: summary (name, lhs, rhs, margin, pass) and long-form terms
// (name, term, value).
void write_reports_csv(std::ostream& os,
                       const std::vector<EstimateReport>& reports);
void write_report_terms_csv(std::ostream& os,
                            const std::vector<EstimateReport>& reports);

}  // namespace crystalflow
