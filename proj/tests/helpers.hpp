#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "tgfem/mesh.hpp"
#include "tgfem/space.hpp"

namespace testing {

using tgfem::Index;
using tgfem::Mesh;
using tgfem::Point;

// Barycentric coordinates of x in cell c, by direct solve of the affine map.
inline std::array<double, 4> barycentric_in(const Mesh& mesh, Index c, const Point& x) {
  const auto vs = mesh.cell(c);
  const int d = mesh.dim();
  const Point& p0 = mesh.vertex(vs[0]);
  double m[3][3] = {};
  double r[3] = {};
  for (int i = 0; i < d; ++i) {
    for (int k = 0; k < d; ++k) m[i][k] = mesh.vertex(vs[k + 1])[i] - p0[i];
    r[i] = x[i] - p0[i];
  }
  // Cramer's rule.
  auto det = [&](double a[3][3]) {
    if (d == 2) return a[0][0] * a[1][1] - a[0][1] * a[1][0];
    return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
           a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
  };
  const double dm = det(m);
  std::array<double, 4> lam{};
  double rest = 1.0;
  for (int k = 0; k < d; ++k) {
    double mk[3][3];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) mk[i][j] = j == k ? r[i] : m[i][j];
    lam[k + 1] = det(mk) / dm;
    rest -= lam[k + 1];
  }
  lam[0] = rest;
  return lam;
}

// Cell containing x (brute force) and the barycentric coordinates there.
inline std::pair<Index, std::array<double, 4>> locate(const Mesh& mesh, const Point& x) {
  Index best = 0;
  double best_min = -1e300;
  std::array<double, 4> best_lam{};
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    const auto lam = barycentric_in(mesh, c, x);
    const double lo = *std::min_element(lam.begin(), lam.begin() + mesh.dim() + 1);
    if (lo > best_min) {
      best_min = lo;
      best = c;
      best_lam = lam;
    }
  }
  return {best, best_lam};
}

inline Point random_point(std::mt19937_64& rng, int dim) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Point p{0.0, 0.0, 0.0};
  for (int i = 0; i < dim; ++i) p[i] = u(rng);
  return p;
}

inline std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

}  // namespace testing
