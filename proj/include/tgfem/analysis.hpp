#pragma once

#include <string>
#include <vector>

#include "tgfem/problems.hpp"
#include "tgfem/quadrature.hpp"
#include "tgfem/space.hpp"
#include "tgfem/twogrid.hpp"

namespace tgfem {

enum class NormKind { H1, L2 };

/// ||grad(u - approx)|| with u given by its gradient.  Requires quad.degree >= 5;
/// throws std::domain_error if the field is not finite at a quadrature point.
double h1_seminorm_error(const FeFunction& approx, const VectorField& exact_gradient,
                         const QuadratureRule& quad, Execution exec = Execution::Parallel);

/// ||u - approx|| in L2.  Same preconditions as h1_seminorm_error.
double l2_error(const FeFunction& approx, const ScalarField& exact, const QuadratureRule& quad,
                Execution exec = Execution::Parallel);

/// Exact ||grad(a - b)|| and ||a - b|| for two functions on the same space.
double h1_seminorm_distance(const FeFunction& a, const FeFunction& b, Execution exec = Execution::Parallel);
double l2_distance(const FeFunction& a, const FeFunction& b, Execution exec = Execution::Parallel);
double distance(const FeFunction& a, const FeFunction& b, NormKind norm, Execution exec = Execution::Parallel);

/// Convergence order against the exact solution:
///   1 + ln(e_coarse/e_final)/|ln H|  (H1),  2 + ln(e_coarse/e_final)/|ln H|  (L2).
/// Throws std::domain_error for nonpositive errors or H outside (0, 1).
double order1(double err_coarse, double err_final, double coarse_h, NormKind norm);

/// Same formula with errors measured against the fine Galerkin solution, capped
/// at 2 (H1) or 3 (L2).
double order2(double err_ref_coarse, double err_ref_final, double coarse_h, NormKind norm);

/// Standard Galerkin solution on the fine space.
FeFunction solve_fine_reference(const Problem& problem, const FeSpace& fine_space, int load_degree = 4,
                                double rel_tol = 1e-12, Execution exec = Execution::Parallel);
/// Same, reusing the operators already assembled in `disc`.
FeFunction solve_fine_reference(const Discretization& disc);

struct ConvergenceRow {
  int dim = 0;
  std::string problem;
  NormKind norm = NormKind::H1;
  int coarse_n = 0;
  int ratio = 0;
  /// Against u when the problem has an exact solution, else against u_h.
  double err_coarse = 0.0;
  /// ||u - u_h||; NaN without an exact solution.
  double err_fine_ref = 0.0;
  double err_final = 0.0;
  /// Error of u_{H,h} after the first sweep, measured like err_final.
  double err_intermediate = 0.0;
  /// Distances to u_h used by ORDER_2.
  double ref_coarse = 0.0;
  double ref_final = 0.0;
  double order1 = 0.0;
  double order2 = 0.0;
  int iterations = 0;
  double seconds = 0.0;
  std::vector<IterationRecord> history;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
};

}  // namespace tgfem
