// Copyright 2026 The crystalflow Authors.
// SPDX-License-Identifier: Apache-2.0

// Linear Neumann problems of the form -div(c grad w) + shift * w = rhs.
//
// The operator is self-adjoint and positive definite in the quadrature inner
// product whenever shift > 0, so conjugate gradients run in that inner
// product with a Jacobi preconditioner. A sparse Cholesky backend solves the
// symmetrized system W * A instead; both report the true residual.

#pragma once

#include "crystalflow/grid_ops.hpp"

namespace crystalflow {

enum class LinearBackend { ConjugateGradient, SparseCholesky };

enum class CoefficientBound {
  AtLeastOne,  // c >= 1, the cosh structure
  Positive,    // c > 0, needed by the exponential nonlinearity
};

struct SolverOptions {
  double rtol = 1e-10;
  // 0 selects 10 * node count.
  int max_iterations = 0;
  LinearBackend backend = LinearBackend::ConjugateGradient;
  CoefficientBound bound = CoefficientBound::AtLeastOne;
};

struct SolveDiagnostics {
  int iterations = 0;
  // ||A x - rhs||_inf / ||rhs||_inf (absolute when rhs == 0).
  double relative_residual = 0.0;
};

struct SolveResult {
  Field solution;
  SolveDiagnostics diagnostics;
};

// (-div(a grad) + shift) f.
Field apply_shifted_operator(const Field& f, const EdgeCoefficients& a,
                             double shift);

// Solves (-Delta + tau) u = rhs.
SolveResult solve_helmholtz_neumann(const Grid& grid, double tau,
                                    const Field& rhs,
                                    const SolverOptions& opts = {});

// Solves -div(c grad w) + tau w = rhs, with c averaged arithmetically onto
// half nodes.
SolveResult solve_weighted_helmholtz(const Grid& grid, double tau,
                                     const Field& c, const Field& rhs,
                                     const SolverOptions& opts = {});

// Same problem with coefficients already on the edges.
SolveResult solve_edge_weighted(const Grid& grid, double tau,
                                const EdgeCoefficients& a, const Field& rhs,
                                const SolverOptions& opts = {});

}  // namespace crystalflow
