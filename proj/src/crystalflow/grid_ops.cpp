// Copyright 2026 The crystalflow Authors.
// SPDX-License-Identifier: Apache-2.0

#include "crystalflow/grid_ops.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "crystalflow/error.hpp"

namespace crystalflow {

Grid::Grid(int dim, std::array<int, 2> nodes, std::array<double, 2> extents)
    : dim_(dim), nodes_(nodes), extents_(extents), spacing_{0.0, 0.0} {
  if (dim != 1 && dim != 2) {
    fail(ErrorCode::UnsupportedDimension,
         "grid dimension must be 1 or 2, got " + std::to_string(dim));
  }
  if (dim == 1) {
    nodes_[1] = 1;
    extents_[1] = 1.0;
  }
  for (int a = 0; a < dim; ++a) {
    if (nodes_[a] < 3) {
      fail(ErrorCode::InvalidArgument,
           "nodes_per_axis must be >= 3 on every axis, axis " +
               std::to_string(a) + " has " + std::to_string(nodes_[a]));
    }
    if (!(extents_[a] > 0.0) || !std::isfinite(extents_[a])) {
      fail(ErrorCode::InvalidArgument, "grid extents must be positive");
    }
    spacing_[a] = extents_[a] / (nodes_[a] - 1);
  }
}

Grid Grid::line(int nodes, double extent) {
  return Grid(1, {nodes, 1}, {extent, 1.0});
}

Grid Grid::box(int nodes_x, int nodes_y, double extent_x, double extent_y) {
  return Grid(2, {nodes_x, nodes_y}, {extent_x, extent_y});
}

double Grid::measure() const noexcept {
  return dim_ == 1 ? extents_[0] : extents_[0] * extents_[1];
}

double Grid::axis_weight(int axis, int i) const noexcept {
  if (axis >= dim_) return 1.0;
  const double h = spacing_[axis];
  return (i == 0 || i == nodes_[axis] - 1) ? 0.5 * h : h;
}

double Grid::weight(std::size_t node) const noexcept {
  const int i = static_cast<int>(node / nodes_[1]);
  const int j = static_cast<int>(node % nodes_[1]);
  return axis_weight(0, i) * axis_weight(1, j);
}

std::vector<double> Grid::weights() const {
  std::vector<double> w(size());
  for (std::size_t n = 0; n < w.size(); ++n) w[n] = weight(n);
  return w;
}

std::size_t Grid::edge_count(int axis) const noexcept {
  if (axis >= dim_) return 0;
  if (axis == 0) return static_cast<std::size_t>(nodes_[0] - 1) * nodes_[1];
  return static_cast<std::size_t>(nodes_[0]) * (nodes_[1] - 1);
}

bool operator==(const Grid& a, const Grid& b) noexcept {
  return a.dim_ == b.dim_ && a.nodes_ == b.nodes_ && a.extents_ == b.extents_;
}

// ---------------------------------------------------------------------------

Field::Field(Grid grid) : grid_(grid), values_(grid.size(), 0.0) {}

Field::Field(Grid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    fail(ErrorCode::InvalidArgument,
         "field has " + std::to_string(values_.size()) +
             " values, grid has " + std::to_string(grid_.size()) + " nodes");
  }
}

Field Field::constant(const Grid& grid, double value) {
  return Field(grid, std::vector<double>(grid.size(), value));
}

double Field::sup_norm() const noexcept {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

bool Field::all_finite() const noexcept {
  for (double v : values_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

Field& Field::operator+=(const Field& other) {
  require_same_grid(*this, other, "field addition");
  for (std::size_t n = 0; n < values_.size(); ++n) values_[n] += other[n];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  require_same_grid(*this, other, "field subtraction");
  for (std::size_t n = 0; n < values_.size(); ++n) values_[n] -= other[n];
  return *this;
}

Field& Field::operator*=(double s) noexcept {
  for (double& v : values_) v *= s;
  return *this;
}

void require_same_grid(const Field& a, const Field& b, const char* where) {
  if (!(a.grid() == b.grid())) {
    fail(ErrorCode::InvalidArgument,
         std::string(where) + ": fields live on different grids");
  }
}

void require_finite(const Field& f, const char* where) {
  if (!f.all_finite()) {
    fail(ErrorCode::InvalidArgument,
         std::string(where) + ": field has non-finite entries");
  }
}

// ---------------------------------------------------------------------------

EdgeCoefficients EdgeCoefficients::unit(const Grid& grid) {
  EdgeCoefficients e;
  for (int a = 0; a < 2; ++a) e.axis[a].assign(grid.edge_count(a), 1.0);
  return e;
}

EdgeCoefficients EdgeCoefficients::arithmetic_mean(const Field& c) {
  const Grid& g = c.grid();
  const int nx = g.nodes(0);
  const int ny = g.nodes(1);
  EdgeCoefficients e;
  e.axis[0].resize(g.edge_count(0));
  for (int i = 0; i + 1 < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      e.axis[0][static_cast<std::size_t>(i) * ny + j] =
          0.5 * (c[g.index(i, j)] + c[g.index(i + 1, j)]);
    }
  }
  if (g.dim() == 2) {
    e.axis[1].resize(g.edge_count(1));
    for (int i = 0; i < nx; ++i) {
      for (int j = 0; j + 1 < ny; ++j) {
        e.axis[1][static_cast<std::size_t>(i) * (ny - 1) + j] =
            0.5 * (c[g.index(i, j)] + c[g.index(i, j + 1)]);
      }
    }
  }
  return e;
}

namespace {

// Generic flux-form divergence: flux(edge, slope) gives the flux through an
// edge for the one-sided slope across it. Control volumes are the trapezoid
// weights, so boundary nodes see half-width cells with zero outer flux.
template <class Flux>
Field divergence_of(const Field& f, Flux&& flux) {
  const Grid& g = f.grid();
  const int nx = g.nodes(0);
  const int ny = g.nodes(1);
  Field out(g);
  {
    const double h = g.spacing(0);
    for (int i = 0; i < nx; ++i) {
      const double width = g.axis_weight(0, i);
      for (int j = 0; j < ny; ++j) {
        double right = 0.0;
        double left = 0.0;
        if (i + 1 < nx) {
          right = flux(0, static_cast<std::size_t>(i) * ny + j,
                       (f[g.index(i + 1, j)] - f[g.index(i, j)]) / h);
        }
        if (i > 0) {
          left = flux(0, static_cast<std::size_t>(i - 1) * ny + j,
                      (f[g.index(i, j)] - f[g.index(i - 1, j)]) / h);
        }
        out[g.index(i, j)] = (right - left) / width;
      }
    }
  }
  if (g.dim() == 2) {
    const double h = g.spacing(1);
    for (int i = 0; i < nx; ++i) {
      for (int j = 0; j < ny; ++j) {
        const double width = g.axis_weight(1, j);
        double right = 0.0;
        double left = 0.0;
        if (j + 1 < ny) {
          right = flux(1, static_cast<std::size_t>(i) * (ny - 1) + j,
                       (f[g.index(i, j + 1)] - f[g.index(i, j)]) / h);
        }
        if (j > 0) {
          left = flux(1, static_cast<std::size_t>(i) * (ny - 1) + j - 1,
                      (f[g.index(i, j)] - f[g.index(i, j - 1)]) / h);
        }
        out[g.index(i, j)] += (right - left) / width;
      }
    }
  }
  return out;
}

// Calls fn(axis, edge, slope, edge_measure) for every half-node edge.
template <class Fn>
void for_each_edge(const Field& f, Fn&& fn) {
  const Grid& g = f.grid();
  const int nx = g.nodes(0);
  const int ny = g.nodes(1);
  const double hx = g.spacing(0);
  for (int i = 0; i + 1 < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      const double slope = (f[g.index(i + 1, j)] - f[g.index(i, j)]) / hx;
      fn(0, static_cast<std::size_t>(i) * ny + j, slope,
         hx * g.axis_weight(1, j));
    }
  }
  if (g.dim() == 2) {
    const double hy = g.spacing(1);
    for (int i = 0; i < nx; ++i) {
      for (int j = 0; j + 1 < ny; ++j) {
        const double slope = (f[g.index(i, j + 1)] - f[g.index(i, j)]) / hy;
        fn(1, static_cast<std::size_t>(i) * (ny - 1) + j, slope,
           hy * g.axis_weight(0, i));
      }
    }
  }
}

}  // namespace

EdgeCoefficients EdgeCoefficients::slopes(const Field& f) {
  EdgeCoefficients e;
  for (int a = 0; a < 2; ++a) e.axis[a].resize(f.grid().edge_count(a));
  for_each_edge(f, [&e](int ax, std::size_t k, double s, double) {
    e.axis[ax][k] = s;
  });
  return e;
}

Field laplacian_neumann(const Field& f) {
  require_finite(f, "laplacian_neumann");
  Field out = divergence_of(f, [](int, std::size_t, double s) { return s; });
  require_finite(out, "laplacian_neumann");
  return out;
}

Field flux_divergence(const Field& f, const EdgeCoefficients& a) {
  require_finite(f, "flux_divergence");
  for (int ax = 0; ax < 2; ++ax) {
    if (a.axis[ax].size() != f.grid().edge_count(ax)) {
      fail(ErrorCode::InvalidArgument,
           "flux_divergence: edge coefficient count does not match grid");
    }
  }
  Field out = divergence_of(f, [&a](int ax, std::size_t e, double s) {
    return a.axis[ax][e] * s;
  });
  require_finite(out, "flux_divergence");
  return out;
}

double p_flux(double slope, double p) noexcept {
  if (slope == 0.0) return 0.0;
  return std::pow(std::abs(slope), p - 2.0) * slope;
}

Field p_laplacian_1d(const Field& f, double p) {
  if (f.grid().dim() != 1) {
    fail(ErrorCode::UnsupportedDimension,
         "p_laplacian_1d requires a one-dimensional grid");
  }
  if (!(p >= 2.0) || !std::isfinite(p)) {
    fail(ErrorCode::InvalidExponent, "p-Laplacian exponent must be >= 2");
  }
  require_finite(f, "p_laplacian_1d");
  Field out = divergence_of(
      f, [p](int, std::size_t, double s) { return p_flux(s, p); });
  require_finite(out, "p_laplacian_1d");
  return out;
}

double integrate(const Field& f) {
  const Grid& g = f.grid();
  double sum = 0.0;
  for (std::size_t n = 0; n < f.size(); ++n) sum += g.weight(n) * f[n];
  return sum;
}

double inner(const Field& f, const Field& h) {
  require_same_grid(f, h, "inner");
  const Grid& g = f.grid();
  double sum = 0.0;
  for (std::size_t n = 0; n < f.size(); ++n) sum += g.weight(n) * f[n] * h[n];
  return sum;
}

double grad_sq_integral(const Field& f) {
  double sum = 0.0;
  for_each_edge(f, [&sum](int, std::size_t, double s, double m) {
    sum += m * s * s;
  });
  return sum;
}

double grad_pow_integral_1d(const Field& f, double p) {
  if (f.grid().dim() != 1) {
    fail(ErrorCode::UnsupportedDimension,
         "grad_pow_integral_1d requires a one-dimensional grid");
  }
  double sum = 0.0;
  for_each_edge(f, [&sum, p](int, std::size_t, double s, double m) {
    sum += m * std::pow(std::abs(s), p);
  });
  return sum;
}

// ---------------------------------------------------------------------------

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string snapshot_header(const Grid& g) {
  std::string s = "# grid: dim=" + std::to_string(g.dim()) + " nodes=";
  s += std::to_string(g.nodes(0));
  if (g.dim() == 2) s += "," + std::to_string(g.nodes(1));
  s += " extent=" + format_real(g.extent(0));
  if (g.dim() == 2) s += "," + format_real(g.extent(1));
  return s;
}

void write_snapshot(std::ostream& os, const Field& f) {
  os << snapshot_header(f.grid()) << '\n';
  for (double v : f.values()) os << format_real(v) << '\n';
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

double parse_real(const std::string& s, const char* what) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v)) {
    fail(ErrorCode::Io, std::string("snapshot: bad ") + what + " '" + s + "'");
  }
  return v;
}

}  // namespace

Field read_snapshot(std::istream& is) {
  std::string header;
  if (!std::getline(is, header) || header.rfind("# grid:", 0) != 0) {
    fail(ErrorCode::Io, "snapshot: missing '# grid:' header");
  }
  int dim = 0;
  std::vector<std::string> nodes;
  std::vector<std::string> extents;
  std::istringstream hs(header.substr(7));
  std::string tok;
  while (hs >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) fail(ErrorCode::Io, "snapshot: bad header");
    const std::string key = tok.substr(0, eq);
    const std::string val = tok.substr(eq + 1);
    if (key == "dim") {
      dim = static_cast<int>(parse_real(val, "dim"));
    } else if (key == "nodes") {
      nodes = split(val, ',');
    } else if (key == "extent") {
      extents = split(val, ',');
    } else {
      fail(ErrorCode::Io, "snapshot: unknown header key '" + key + "'");
    }
  }
  if ((dim != 1 && dim != 2) || nodes.size() != static_cast<std::size_t>(dim) ||
      extents.size() != static_cast<std::size_t>(dim)) {
    fail(ErrorCode::Io, "snapshot: inconsistent header '" + header + "'");
  }
  std::array<int, 2> n{1, 1};
  std::array<double, 2> e{1.0, 1.0};
  for (int a = 0; a < dim; ++a) {
    n[a] = static_cast<int>(parse_real(nodes[a], "node count"));
    e[a] = parse_real(extents[a], "extent");
  }
  Grid grid(dim, n, e);
  std::vector<double> values;
  values.reserve(grid.size());
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    values.push_back(parse_real(line, "value"));
  }
  if (values.size() != grid.size()) {
    fail(ErrorCode::Io, "snapshot: expected " + std::to_string(grid.size()) +
                            " values, found " + std::to_string(values.size()));
  }
  return Field(grid, std::move(values));
}

void save_snapshot(const std::string& path, const Field& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorCode::Io, "cannot write snapshot '" + path + "'");
  write_snapshot(os, f);
  if (!os) fail(ErrorCode::Io, "failed writing snapshot '" + path + "'");
}

Field load_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorCode::Io, "cannot read snapshot '" + path + "'");
  return read_snapshot(is);
}

}  // namespace crystalflow
