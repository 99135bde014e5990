#pragma once

#include "tgfem/space.hpp"

namespace tgfem::detail {

inline double dot3(const Gradient& a, const Gradient& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

// Shared by the production and reference assemblers so both round identically.
inline double stiffness_entry(const CellGeometry& g, int a, int b) {
  return g.volume * dot3(g.grad_lambda[a], g.grad_lambda[b]);
}

}  // namespace tgfem::detail
