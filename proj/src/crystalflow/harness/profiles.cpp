// Copyright 2026 The crystalflow Authors.
// SPDX-License-Identifier: Apache-2.0

#include "crystalflow/harness/profiles.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace crystalflow {

namespace {
constexpr double kPi = std::numbers::pi;
}

Field constant_profile(const Grid& grid, double value) {
  return Field::constant(grid, value);
}

Field cosine_profile(const Grid& grid, double amplitude, int mode) {
  const double kx = mode * kPi / grid.extent(0);
  const double ky = grid.dim() == 2 ? mode * kPi / grid.extent(1) : 0.0;
  return Field::sample(grid, [&](double x, double y) {
    return amplitude * std::cos(kx * x) * std::cos(ky * y);
  });
}

Field gaussian_bump_profile(const Grid& grid, double amplitude, double width) {
  auto chord = [&grid](int axis, double x) {
    const double len = grid.extent(axis);
    return len / kPi * std::sin(kPi * (x - 0.5 * len) / len);
  };
  return Field::sample(grid, [&](double x, double y) {
    double r2 = chord(0, x) * chord(0, x);
    if (grid.dim() == 2) r2 += chord(1, y) * chord(1, y);
    return amplitude * std::exp(-r2 / (2.0 * width * width));
  });
}

Field random_smooth_profile(const Grid& grid, std::uint64_t seed,
                            double amplitude) {
  std::mt19937_64 rng(seed);
  auto uniform = [&rng] {
    return static_cast<double>(rng() >> 11) * 0x1.0p-52 - 1.0;
  };
  constexpr int kModes = 3;
  const int my = grid.dim() == 2 ? kModes : 0;
  double coeff[kModes + 1][kModes + 1] = {};
  for (int m = 0; m <= kModes; ++m) {
    for (int n = 0; n <= my; ++n) {
      if (m == 0 && n == 0) continue;
      coeff[m][n] = uniform() / static_cast<double>(m * m + n * n);
    }
  }
  Field f = Field::sample(grid, [&](double x, double y) {
    double s = 0.0;
    for (int m = 0; m <= kModes; ++m) {
      for (int n = 0; n <= my; ++n) {
        s += coeff[m][n] * std::cos(m * kPi * x / grid.extent(0)) *
             (grid.dim() == 2 ? std::cos(n * kPi * y / grid.extent(1)) : 1.0);
      }
    }
    return s;
  });
  const double sup = f.sup_norm();
  if (sup > 0.0) f *= std::abs(amplitude) / sup;
  return f;
}

Field make_initial(const ExperimentConfig& cfg) {
  const Grid grid = cfg.grid.make();
  const InitialSpec& ic = cfg.initial;
  switch (ic.kind) {
    case ProfileKind::Constant:
      return constant_profile(grid, ic.value);
    case ProfileKind::Cosine:
      return cosine_profile(grid, ic.amplitude, ic.mode);
    case ProfileKind::GaussianBump:
      return gaussian_bump_profile(grid, ic.amplitude, ic.width);
    case ProfileKind::RandomSmooth:
      if (!ic.seed) {
        fail(ErrorCode::Config, "random_smooth requires a seed");
      }
      return random_smooth_profile(grid, *ic.seed, ic.amplitude);
    case ProfileKind::Snapshot: {
      Field f = load_snapshot(ic.path);
      if (!(f.grid() == grid)) {
        fail(ErrorCode::Config, "snapshot " + ic.path + " has grid '" +
                                    snapshot_header(f.grid()) +
                                    "' but the config asks for '" +
                                    snapshot_header(grid) + "'");
      }
      return f;
    }
  }
  fail(ErrorCode::Config, "unknown initial profile");
}

}  // namespace crystalflow
