// Copyright 2026 The crystalflow Authors.
// SPDX-License-Identifier: Apache-2.0

// Initial profiles. Every analytic profile has zero normal derivative on the
// box boundary, so it is compatible with the Neumann data.

#pragma once

#include <cstdint>

#include "crystalflow/grid_ops.hpp"
#include "crystalflow/harness/config.hpp"

namespace crystalflow {

Field constant_profile(const Grid& grid, double value);

// amplitude * prod_axes cos(mode * pi * x_a / L_a).
Field cosine_profile(const Grid& grid, double amplitude, int mode);

// amplitude * exp(-r^2 / (2 width^2)) centred in the box, with the distance
// along each axis measured as (L / pi) sin(pi (x - c) / L). This chord length
// matches |x - c| near the centre and is flat at the walls.
Field gaussian_bump_profile(const Grid& grid, double amplitude, double width);

// Random combination of the cosine modes 1..3 per axis with coefficients
// decaying like 1 / |m|^2, rescaled so that the nodal sup norm equals
// |amplitude|. The generator is mt19937_64 mapped to [-1, 1) by its top 53
// bits, so the field depends only on the seed.
Field random_smooth_profile(const Grid& grid, std::uint64_t seed,
                            double amplitude);

// Builds the configured initial field; snapshot grids must match the config.
Field make_initial(const ExperimentConfig& cfg);

}  // namespace crystalflow
