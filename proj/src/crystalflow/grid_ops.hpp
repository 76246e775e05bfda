// Copyright 2026 The crystalflow Authors.
// SPDX-License-Identifier: Apache-2.0

// Uniform tensor-product grids on boxes in one or two dimensions, nodal
// fields, and the finite-difference operators used by the solver.
//
// Node ordering is row-major: node (i, j) lives at i * nodes(1) + j, with the
// last axis running fastest. One-dimensional grids behave as if nodes(1) == 1.
//
// Boundaries carry homogeneous Neumann data through mirror ghost nodes. With
// trapezoid quadrature weights this makes every flux-form operator symmetric
// in the weighted inner product and makes its discrete integral vanish.

#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace crystalflow {

class Grid {
 public:
  Grid(int dim, std::array<int, 2> nodes, std::array<double, 2> extents);

  static Grid line(int nodes, double extent = 1.0);
  static Grid box(int nodes_x, int nodes_y, double extent_x = 1.0,
                  double extent_y = 1.0);

  int dim() const noexcept { return dim_; }
  int nodes(int axis) const noexcept { return nodes_[axis]; }
  double extent(int axis) const noexcept { return extents_[axis]; }
  double spacing(int axis) const noexcept { return spacing_[axis]; }

  std::size_t size() const noexcept {
    return static_cast<std::size_t>(nodes_[0]) * nodes_[1];
  }
  double measure() const noexcept;

  std::size_t index(int i, int j = 0) const noexcept {
    return static_cast<std::size_t>(i) * nodes_[1] + j;
  }
  double coordinate(int axis, int i) const noexcept {
    return i * spacing_[axis];
  }

  // Trapezoid weight of node i along one axis.
  double axis_weight(int axis, int i) const noexcept;
  double weight(std::size_t node) const noexcept;
  std::vector<double> weights() const;

  // Number of half-node edges normal to the given axis.
  std::size_t edge_count(int axis) const noexcept;

  friend bool operator==(const Grid& a, const Grid& b) noexcept;

 private:
  int dim_;
  std::array<int, 2> nodes_;
  std::array<double, 2> extents_;
  std::array<double, 2> spacing_;
};

class Field {
 public:
  explicit Field(Grid grid);
  Field(Grid grid, std::vector<double> values);

  static Field constant(const Grid& grid, double value);

  // Samples fn(x, y) at every node; y is 0 on one-dimensional grids.
  template <class Fn>
  static Field sample(const Grid& grid, Fn&& fn) {
    Field out(grid);
    for (int i = 0; i < grid.nodes(0); ++i) {
      for (int j = 0; j < grid.nodes(1); ++j) {
        const double y = grid.dim() == 2 ? grid.coordinate(1, j) : 0.0;
        out.values_[grid.index(i, j)] = fn(grid.coordinate(0, i), y);
      }
    }
    return out;
  }

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  const std::vector<double>& data() const noexcept { return values_; }

  double operator[](std::size_t n) const noexcept { return values_[n]; }
  double& operator[](std::size_t n) noexcept { return values_[n]; }

  double sup_norm() const noexcept;
  bool all_finite() const noexcept;

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(double s) noexcept;

  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(Field a, double s) { return a *= s; }
  friend Field operator*(double s, Field a) { return a *= s; }

  friend bool operator==(const Field& a, const Field& b) noexcept {
    return a.grid_ == b.grid_ && a.values_ == b.values_;
  }

 private:
  Grid grid_;
  std::vector<double> values_;
};

// Coefficients living on half-node edges, one array per axis.
struct EdgeCoefficients {
  std::array<std::vector<double>, 2> axis;

  static EdgeCoefficients unit(const Grid& grid);
  // Arithmetic mean of the nodal values at both ends of each edge.
  static EdgeCoefficients arithmetic_mean(const Field& nodal);
  // One-sided difference quotient of f across each edge.
  static EdgeCoefficients slopes(const Field& f);
};

void require_same_grid(const Field& a, const Field& b, const char* where);
void require_finite(const Field& f, const char* where);

// Discrete Laplacian with homogeneous Neumann data (3-point / 5-point).
Field laplacian_neumann(const Field& f);

// div(a grad f) in flux form with zero boundary flux.
Field flux_divergence(const Field& f, const EdgeCoefficients& a);

// One-dimensional p-Laplacian (|f'|^{p-2} f')' with zero boundary flux.
Field p_laplacian_1d(const Field& f, double p);

// |s|^{p-2} s, extended by 0 at s = 0.
double p_flux(double slope, double p) noexcept;

double integrate(const Field& f);
// Quadrature inner product.
double inner(const Field& f, const Field& g);
// Discrete Dirichlet energy over half-node differences. Equals
// -inner(f, laplacian_neumann(f)) up to round-off.
double grad_sq_integral(const Field& f);
// Discrete integral of |f'|^p over half nodes (one-dimensional grids).
double grad_pow_integral_1d(const Field& f, double p);

// Apply fn entrywise.
template <class Fn>
Field map(const Field& f, Fn&& fn) {
  Field out(f.grid());
  for (std::size_t n = 0; n < f.size(); ++n) out[n] = fn(f[n]);
  return out;
}

// Snapshot text format: a "# grid:" header line followed by one value per
// line in node order, written with 17 significant digits.
std::string format_real(double v);
std::string snapshot_header(const Grid& grid);
void write_snapshot(std::ostream& os, const Field& f);
Field read_snapshot(std::istream& is);
void save_snapshot(const std::string& path, const Field& f);
Field load_snapshot(const std::string& path);

}  // namespace crystalflow
