// Copyright 2026 The crystalflow Authors.
// SPDX-License-Identifier: Apache-2.0

#include "crystalflow/sparse_ops.hpp"

#include <vector>

namespace crystalflow {

SparseMatrix assemble_flux_divergence(const Grid& g,
                                      const EdgeCoefficients& a) {
  const int nx = g.nodes(0);
  const int ny = g.nodes(1);
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(g.size() * (1 + 2 * g.dim()));

  // Each edge couples nodes p and q with conductance c; both rows get the
  // flux scaled by their own control-volume width.
  auto couple = [&](std::size_t p, std::size_t q, double c, double wp,
                    double wq) {
    t.emplace_back(p, q, c / wp);
    t.emplace_back(p, p, -c / wp);
    t.emplace_back(q, p, c / wq);
    t.emplace_back(q, q, -c / wq);
  };

  const double hx = g.spacing(0);
  for (int i = 0; i + 1 < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      const double c = a.axis[0][static_cast<std::size_t>(i) * ny + j] / hx;
      couple(g.index(i, j), g.index(i + 1, j), c, g.axis_weight(0, i),
             g.axis_weight(0, i + 1));
    }
  }
  if (g.dim() == 2) {
    const double hy = g.spacing(1);
    for (int i = 0; i < nx; ++i) {
      for (int j = 0; j + 1 < ny; ++j) {
        const double c =
            a.axis[1][static_cast<std::size_t>(i) * (ny - 1) + j] / hy;
        couple(g.index(i, j), g.index(i, j + 1), c, g.axis_weight(1, j),
               g.axis_weight(1, j + 1));
      }
    }
  }
  SparseMatrix m(g.size(), g.size());
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

SparseMatrix assemble_laplacian(const Grid& grid) {
  return assemble_flux_divergence(grid, EdgeCoefficients::unit(grid));
}

SparseMatrix sparse_identity(std::size_t n) {
  SparseMatrix m(n, n);
  m.setIdentity();
  return m;
}

SparseMatrix sparse_diagonal(const Field& d) {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(d.size());
  for (std::size_t n = 0; n < d.size(); ++n) t.emplace_back(n, n, d[n]);
  SparseMatrix m(d.size(), d.size());
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

Vector to_vector(const Field& f) {
  return Eigen::Map<const Vector>(f.data().data(),
                                  static_cast<Eigen::Index>(f.size()));
}

Field to_field(const Grid& grid, const Vector& v) {
  return Field(grid, std::vector<double>(v.data(), v.data() + v.size()));
}

}  // namespace crystalflow
