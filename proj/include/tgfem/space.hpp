#pragma once

#include <array>
#include <span>
#include <vector>

#include "tgfem/linalg.hpp"
#include "tgfem/mesh.hpp"

namespace tgfem {

/// Constant gradient of a P1 function on one cell; z is 0 in 2-D.
using Gradient = std::array<double, 3>;

/// Affine geometry of one simplex.
struct CellGeometry {
  int dim = 0;
  /// |det J| of the map from the reference simplex; volume = det / dim!.
  double det = 0.0;
  double volume = 0.0;
  /// Gradients of the (dim+1) barycentric coordinates, in stored vertex order.
  std::array<Gradient, 4> grad_lambda{};
  std::array<Point, 4> corners{};

  Point map(std::span<const double> barycentric) const;
};

/// Throws std::domain_error for a degenerate (zero-volume) cell.
CellGeometry cell_geometry(const Mesh& mesh, Index cell);

inline constexpr Index kConstrained = -1;

/// Continuous piecewise-linear space with homogeneous Dirichlet conditions:
/// boundary vertices are eliminated and the remaining ones numbered
/// 0..num_free-1 in ascending vertex order.
class FeSpace {
 public:
  explicit FeSpace(const Mesh& mesh);

  const Mesh& mesh() const { return *mesh_; }
  Index num_free() const { return static_cast<Index>(vertex_of_free_.size()); }
  Index free_dof(Index vertex) const { return free_of_vertex_[vertex]; }
  Index vertex_of(Index dof) const { return vertex_of_free_[dof]; }
  std::span<const Index> free_dof_map() const { return free_of_vertex_; }

 private:
  const Mesh* mesh_;
  std::vector<Index> free_of_vertex_;
  std::vector<Index> vertex_of_free_;
};

/// Coefficient vector over the free dofs of a space.
class FeFunction {
 public:
  explicit FeFunction(const FeSpace& space);
  FeFunction(const FeSpace& space, std::vector<double> coefficients);

  const FeSpace& space() const { return *space_; }
  std::span<const double> coefficients() const { return coefficients_; }
  std::span<double> coefficients() { return coefficients_; }
  std::vector<double>& values() { return coefficients_; }

  /// Value at a mesh vertex (0 when constrained).
  double vertex_value(Index vertex) const {
    const Index d = space_->free_dof(vertex);
    return d == kConstrained ? 0.0 : coefficients_[d];
  }

 private:
  const FeSpace* space_;
  std::vector<double> coefficients_;
};

/// Linear interpolation of vertex values inside `cell`.
double evaluate(const FeFunction& f, Index cell, std::span<const double> barycentric);

Gradient gradient_on_cell(const FeFunction& f, Index cell);
Gradient gradient_on_cell(const FeFunction& f, const CellGeometry& geometry, Index cell);

/// Prolongation between nested P1 spaces as a (fine free) x (coarse free)
/// sparse matrix.  Applying it to coarse coefficients gives the fine nodal
/// interpolant, which equals the coarse function pointwise.
class Prolongation {
 public:
  Prolongation(const FeSpace& coarse, const FeSpace& fine, const RefinementMap& map);

  const FeSpace& coarse_space() const { return *coarse_; }
  const FeSpace& fine_space() const { return *fine_; }
  const SparseMatrix& matrix() const { return p_; }

  FeFunction apply(const FeFunction& coarse_f, Execution exec = Execution::Parallel) const;
  /// P^T r for a fine free-dof vector r.
  std::vector<double> restrict_vector(std::span<const double> fine,
                                      Execution exec = Execution::Parallel) const;

 private:
  const FeSpace* coarse_;
  const FeSpace* fine_;
  SparseMatrix p_;
  SparseMatrix pt_;
};

/// One-shot prolongation; throws std::invalid_argument on a mismatched mesh pair.
FeFunction prolongate(const FeFunction& coarse_f, const RefinementMap& map, const FeSpace& fine_space);

}  // namespace tgfem
