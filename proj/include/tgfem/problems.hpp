#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "tgfem/mesh.hpp"
#include "tgfem/space.hpp"

namespace tgfem {

using ScalarField = std::function<double(const Point&)>;
using VectorField = std::function<Gradient(const Point&)>;

/// -Laplace(u) = f on the unit square/cube with u = 0 on the boundary.
struct Problem {
  std::string id;
  int dim = 2;
  ScalarField f;
  std::optional<ScalarField> exact_u;
  std::optional<VectorField> exact_grad_u;

  bool has_exact_solution() const { return exact_u.has_value(); }
};

namespace problems {

/// "example1": polynomial solution 100 x^2(1-x)^2 y(1-y)(1-2y) [ (z^3 - z) in 3-D ].
/// "example2": logarithmic forcing, no closed-form solution.  log is natural.
Problem get(std::string_view id, int dim);

/// f = 0, u = 0; used for trivial-case checks.
Problem zero(int dim);

}  // namespace problems
}  // namespace tgfem
