// Copyright 2026 The crystalflow Authors.
// SPDX-License-Identifier: Apache-2.0

// Experiment orchestration. A run directory holds
//
//   config.ini          the effective configuration
//   trajectory.csv      one row per step
//   reports.csv         name, lhs, rhs, margin, pass
//   report_terms.csv    name, term, value
//   snapshots/u_NNNNN.csv, w_NNNNN.csv (and h_NNNNN.csv for 1-D height)
//   manifest.json       status, config hash, versions, timing, artifact hashes
//
// Failed runs keep their partial artifacts and are marked FAILED in the
// manifest.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "crystalflow/estimates.hpp"
#include "crystalflow/harness/config.hpp"

namespace crystalflow {

inline constexpr const char* kOutputRootEnv = "CRYSTALFLOW_OUTPUT_ROOT";
inline constexpr const char* kVersion = "0.1.0";

std::string sha256_hex(std::string_view bytes);

// Relative output directories are placed under $CRYSTALFLOW_OUTPUT_ROOT when
// it is set.
std::string resolve_output_dir(const std::string& directory);

struct ExperimentOutcome {
  std::string directory;
  bool ok = false;
  std::string error;          // empty on success
  int error_step = -1;
  std::vector<EstimateReport> reports;
  std::optional<Trajectory> trajectory;  // complete runs only

  bool all_reports_pass() const;
  // 0 on success with passing reports, 1 on failing reports, 2 on errors.
  int exit_code() const;
};

// Never throws for run-time failures; they are recorded in the outcome and
// the manifest. Invalid configurations still throw ConfigError.
ExperimentOutcome run_experiment(const ExperimentConfig& cfg);

void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

// Rebuilds the trajectory of a run directory from its config and snapshots
// (snapshot_stride must have been 1) and recomputes the reports.
Trajectory load_run(const std::string& directory);
std::vector<EstimateReport> verify_directory(const std::string& directory);
std::vector<EstimateReport> compute_reports(const Trajectory& traj,
                                            const ExperimentConfig& cfg);

// Successive-difference order estimates, one per run (NaN where undefined),
// for runs ordered from coarse to fine with a constant refinement ratio:
// entry i uses runs i, i+1, i+2 and is log(d_i / d_{i+1}) / log(ratio) with
// d_i = ||u_i - u_{i+1}||.
std::vector<double> successive_orders(const std::vector<double>& steps,
                                      const std::vector<Field>& finals);
double l2_distance(const Field& a, const Field& b);

enum class SweepParam { Tau, Eps, K, P, Amplitude };
SweepParam parse_sweep_param(const std::string& name);
std::string sweep_param_name(SweepParam p);

struct SweepRow {
  double value = 0.0;
  std::string directory;
  bool ok = false;
  std::string error;
  double l2_to_last = 0.0;  // final-time distance to the last listed run
  double observed_order = 0.0;  // NaN when not defined
};

struct SweepSummary {
  std::string directory;
  std::vector<SweepRow> rows;
  // (i, j, final-time L2 distance) over all completed pairs.
  std::vector<std::tuple<std::size_t, std::size_t, double>> pairwise;
  bool ok() const;
};

// Runs one experiment per value on a worker pool (workers <= 0 means the
// hardware concurrency), each in <output>/<param>_<index>, and writes
// sweep_summary.csv and sweep_pairwise.csv. For tau the runs are ordered
// coarse to fine before the order column is computed.
SweepSummary sweep(const ExperimentConfig& base, SweepParam param,
                   std::vector<double> values, int workers = 0);

struct VariantSeries {
  std::string label;
  Variant variant;
  bool ok = false;
  std::string error;
  std::vector<MonitorSample> samples;
  double max_w_sup = 0.0;
  double energy_growth = 0.0;  // final energy / initial energy
};

struct ComparisonReport {
  std::string directory;
  std::vector<VariantSeries> variants;
  // scaled_sinh(K) against the linear reference, K as listed.
  std::vector<double> k_values;
  std::vector<double> k_final_l2;
  std::vector<double> k_max_l2;
  bool k_monotone = true;
};

// Runs each variant from the same initial field; a failing variant is
// recorded and the rest continue. When k_values is non-empty the normalized
// scaled_sinh(K) runs are compared against the linear reference.
ComparisonReport compare_variants(const ExperimentConfig& base,
                                  const std::vector<Variant>& variants,
                                  const std::vector<double>& k_values,
                                  int workers = 0);
// "sinh", "exp", "linear", "scaled_sinh[:K]", "scaled_sinh_raw[:K]",
// "p_exponent[:p]"; lists are comma separated.
Variant parse_variant(const std::string& spec);
std::vector<Variant> parse_variant_list(const std::string& specs);

}  // namespace crystalflow
