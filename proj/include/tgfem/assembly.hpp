#pragma once

#include <span>
#include <vector>

#include "tgfem/linalg.hpp"
#include "tgfem/patches.hpp"
#include "tgfem/problems.hpp"
#include "tgfem/quadrature.hpp"
#include "tgfem/space.hpp"

namespace tgfem {

/// How the local residual problems are driven.  `Exact` integrates
/// (f, phi_j v) - a(u, phi_j v) with the piecewise-quadratic test function
/// phi_j v; `Interpolated` tests with I_h(phi_j v) instead.
enum class LocalRhs { Exact, Interpolated };

/// Stiffness matrix a(u,v) = (grad u, grad v) over the free dofs.  Each entry
/// accumulates its cell contributions in ascending cell order, so the result
/// does not depend on the thread count.
SparseMatrix assemble_stiffness(const FeSpace& space, Execution exec = Execution::Parallel);

/// (f, phi_v) for every vertex hat, constrained ones included.
std::vector<double> assemble_vertex_load(const Mesh& mesh, const ScalarField& f,
                                         const QuadratureRule& quad,
                                         Execution exec = Execution::Parallel);

/// (f, phi_i) over the free dofs.  Throws std::domain_error naming the point
/// if f is not finite at some quadrature point.
std::vector<double> assemble_load(const FeSpace& space, const ScalarField& f,
                                  const QuadratureRule& quad, Execution exec = Execution::Parallel);

/// Right-hand side of one local residual problem:
///   rhs_v = (f, phi_j v) - a(u, phi_j v)
/// for every local free dof v of the patch.  Integration runs over the fine
/// cells of D_j only.  The f term uses `load_quad`; the a-term integrand is
/// affine per fine cell and is integrated exactly with a degree-2 rule.
std::vector<double> assemble_local_rhs(const PatchSet& patches, const Patch& patch,
                                       const FeFunction& u_fine, const ScalarField& f,
                                       const QuadratureRule& load_quad);

/// Same right-hand side with the test function replaced by its fine nodal
/// interpolant I_h(phi_j v) = phi_j(x_v) v, i.e. rhs_v = phi_j(x_v) r_v for the
/// global fine residual r = b_h - A_h u.  The local right-hand sides then sum
/// to r exactly and all vanish at the fine Galerkin solution.
std::vector<double> assemble_local_rhs_interpolated(const PatchSet& patches, const Patch& patch,
                                                    std::span<const double> fine_residual);

/// P^T (b_h - A_h w): the coarse-space residual (f, v) - a(w, v) of a fine function.
std::vector<double> restrict_residual(const SparseMatrix& fine_stiffness, const FeFunction& w,
                                      std::span<const double> fine_load, const Prolongation& p,
                                      Execution exec = Execution::Parallel);

}  // namespace tgfem
