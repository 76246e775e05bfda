// Copyright 2026 The crystalflow Authors.
// SPDX-License-Identifier: Apache-2.0

// Sparse-matrix assembly of the flux-form stencils in grid_ops, for the
// direct solver backends. Rows follow the grid's node order.

#pragma once

#include <Eigen/Sparse>

#include "crystalflow/grid_ops.hpp"

namespace crystalflow {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;

// Matrix of f -> div(a grad f); same stencil as flux_divergence.
SparseMatrix assemble_flux_divergence(const Grid& grid,
                                      const EdgeCoefficients& a);
SparseMatrix assemble_laplacian(const Grid& grid);
SparseMatrix sparse_identity(std::size_t n);
SparseMatrix sparse_diagonal(const Field& d);

Vector to_vector(const Field& f);
Field to_field(const Grid& grid, const Vector& v);

}  // namespace crystalflow
