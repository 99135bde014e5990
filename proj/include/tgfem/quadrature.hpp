#pragma once

#include <array>
#include <vector>

namespace tgfem {

/// Quadrature on the reference simplex.  Points are barycentric tuples and the
/// weights sum to the reference volume 1/dim!, so an integral over a physical
/// cell is  det(J) * sum_q w_q f(x_q).
struct QuadratureRule {
  int dim = 0;
  int degree = 0;
  std::vector<std::array<double, 4>> points;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }

  /// Cheapest shipped rule of degree >= min_degree (supported up to 5).
  static const QuadratureRule& get(int dim, int min_degree);
  /// All shipped rules for a dimension.
  static const std::vector<QuadratureRule>& all(int dim);
};

/// Grundmann-Moeller rule of degree 2s+1 (has negative weights for s >= 1).
QuadratureRule grundmann_moeller(int dim, int s);

}  // namespace tgfem
