// Copyright 2026 The crystalflow Authors.
// SPDX-License-Identifier: Apache-2.0

// Shared helpers for the unit tests.

#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "crystalflow/grid_ops.hpp"

namespace crystalflow::test {

inline constexpr double kPi = 3.14159265358979323846;

// Uniform noise in [-scale, scale]; fixed seeds keep the tests reproducible.
inline Field random_field(const Grid& g, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-scale, scale);
  Field f(g);
  for (std::size_t n = 0; n < f.size(); ++n) f[n] = dist(rng);
  return f;
}

inline double max_abs_diff(const Field& a, const Field& b) {
  return (a - b).sup_norm();
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("crystalflow_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace crystalflow::test
