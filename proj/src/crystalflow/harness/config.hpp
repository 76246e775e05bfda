// Copyright 2026 The crystalflow Authors.
// SPDX-License-Identifier: Apache-2.0

// Experiment configuration: a line-oriented key = value format with
// [section] headers. '#' and ';' start comments. Example:
//
//   [grid]
//   dim = 1
//   nodes = 65
//   extent = 1
//
//   [initial]
//   profile = cosine
//   amplitude = 0.1
//   mode = 1
//
//   [scheme]
//   tau = 0.01
//   horizon = 0.1
//
//   [model]
//   variant = sinh
//
//   [output]
//   directory = runs/cosine
//
// Every key is optional; print_config writes all of them, so
// parse_config(print_config(cfg)) == cfg.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "crystalflow/error.hpp"
#include "crystalflow/grid_ops.hpp"
#include "crystalflow/nonlinearity.hpp"
#include "crystalflow/stepper.hpp"

namespace crystalflow {

struct GridSpec {
  int dim = 1;
  std::array<int, 2> nodes{65, 65};
  std::array<double, 2> extents{1.0, 1.0};

  Grid make() const;
  // Compares the axes in use only.
  bool operator==(const GridSpec& other) const;
};

enum class ProfileKind { Constant, Cosine, GaussianBump, RandomSmooth, Snapshot };

struct InitialSpec {
  ProfileKind kind = ProfileKind::Cosine;
  double value = 0.0;       // constant
  double amplitude = 0.1;   // cosine, gaussian_bump, random_smooth
  int mode = 1;             // cosine
  double width = 0.1;       // gaussian_bump
  std::optional<std::uint64_t> seed;  // random_smooth
  std::string path;         // snapshot

  bool operator==(const InitialSpec&) const = default;
};

enum class ReportKind { Prop31, Prop32, Prop33, PEnergy };

struct OutputSpec {
  std::string directory = "crystalflow_run";
  int snapshot_stride = 1;  // 0 disables snapshots
  // Empty means the defaults for the variant.
  std::vector<ReportKind> reports;
  bool height = false;  // one-dimensional height reconstruction

  bool operator==(const OutputSpec&) const = default;
};

struct ExperimentConfig {
  GridSpec grid;
  InitialSpec initial;
  SchemeParams scheme;
  Variant variant;
  OutputSpec output;

  // Reports to run: the explicit list, or the variant defaults.
  std::vector<ReportKind> effective_reports() const;
  // Copy with every field that the chosen profile, variant and coupling do
  // not use reset to its default.
  ExperimentConfig canonical() const;
  // Equality of canonical forms.
  bool operator==(const ExperimentConfig& other) const;
};

std::string profile_name(ProfileKind kind);
std::string report_name(ReportKind kind);

// Carries every violation found, each prefixed with its line number.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> issues);
  const std::vector<std::string>& issues() const noexcept { return issues_; }

 private:
  std::vector<std::string> issues_;
};

ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);
std::string print_config(const ExperimentConfig& cfg);

// Checks cross-field invariants; throws ConfigError listing all violations.
void validate_config(const ExperimentConfig& cfg);

}  // namespace crystalflow
