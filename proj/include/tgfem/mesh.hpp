#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace tgfem {

using Index = std::int32_t;

/// Physical point; the z component is unused (and zero) in 2-D.
using Point = std::array<double, 3>;

/// Conforming simplicial mesh of the unit square or cube.
///
/// Structured meshes are built from n^d axis-aligned squares/cubes, each split
/// into d! simplices by the Kuhn (Freudenthal) rule: the simplex for an axis
/// permutation p walks from the cube's lower corner along e_{p0}, e_{p1}, ...
/// In 2-D this is the diagonal from (i,j) to (i+1,j+1) in every square.
/// Cells are stored with positive signed volume.
class Mesh {
 public:
  Mesh() = default;

  /// General mesh from raw arrays; `cells` holds (dim+1) vertex ids per cell.
  Mesh(int dim, int subdivisions, std::vector<Point> vertices, std::vector<Index> cells,
       std::vector<char> boundary);

  /// Unit square (dim=2) or cube (dim=3) with n subdivisions per axis.
  static Mesh structured(int dim, int n);

  int dim() const { return dim_; }
  int vertices_per_cell() const { return dim_ + 1; }
  /// Subdivisions per axis of the structured mesh this one came from.
  int subdivisions() const { return n_; }
  double mesh_size() const { return 1.0 / n_; }
  bool is_structured() const { return structured_; }

  Index num_vertices() const { return static_cast<Index>(vertices_.size()); }
  Index num_cells() const { return static_cast<Index>(cells_.size() / (dim_ + 1)); }

  const Point& vertex(Index v) const { return vertices_[v]; }
  std::span<const Point> vertices() const { return vertices_; }
  std::span<const Index> cell(Index c) const {
    return {cells_.data() + static_cast<std::size_t>(c) * (dim_ + 1),
            static_cast<std::size_t>(dim_ + 1)};
  }
  std::span<const Index> cell_array() const { return cells_; }
  bool is_boundary(Index v) const { return boundary_[v] != 0; }
  Index num_boundary_vertices() const;

  /// Cells incident to vertex v, ascending.
  std::span<const Index> cells_of_vertex(Index v) const {
    return {vertex_cells_.data() + vertex_cell_offsets_[v],
            static_cast<std::size_t>(vertex_cell_offsets_[v + 1] - vertex_cell_offsets_[v])};
  }

  double signed_volume(Index c) const;
  Point centroid(Index c) const;
  double cell_diameter(Index c) const;

 private:
  void build_incidence();

  int dim_ = 0;
  int n_ = 0;
  bool structured_ = false;
  std::vector<Point> vertices_;
  std::vector<Index> cells_;
  std::vector<char> boundary_;
  std::vector<Index> vertex_cell_offsets_;
  std::vector<Index> vertex_cells_;
};

/// Links a structured coarse mesh to its uniform refinement.
///
/// The Kuhn triangulation of the grid with spacing 1/(n*r) refines the one with
/// spacing 1/n (its cutting hyperplanes x_a = k/n, x_a - x_b = k/n are a subset),
/// so every fine cell lies in exactly one coarse cell and coarse P1 functions
/// are reproduced exactly by nodal interpolation.
struct RefinementMap {
  int dim = 0;
  int ratio = 1;
  Index num_coarse_vertices = 0;
  Index num_fine_vertices = 0;
  std::vector<Index> fine_vertex_of_coarse_vertex;
  std::vector<Index> coarse_cell_of_fine_cell;
  /// For each fine vertex: a coarse cell containing it ...
  std::vector<Index> host_cell;
  /// ... and its barycentric coordinates there, (dim+1) per fine vertex in
  /// the host cell's stored vertex order.
  std::vector<double> barycentric;
  /// Fine cells of each coarse cell (CSR).
  std::vector<Index> child_offsets;
  std::vector<Index> children;

  std::span<const double> weights(Index fine_vertex) const {
    return {barycentric.data() + static_cast<std::size_t>(fine_vertex) * (dim + 1),
            static_cast<std::size_t>(dim + 1)};
  }
  std::span<const Index> fine_cells_of(Index coarse_cell) const {
    return {children.data() + child_offsets[coarse_cell],
            static_cast<std::size_t>(child_offsets[coarse_cell + 1] - child_offsets[coarse_cell])};
  }
  bool links(const Mesh& coarse, const Mesh& fine) const;
};

/// Uniform refinement of a structured mesh by an integer ratio.  The fine mesh
/// is identical to Mesh::structured(dim, n*ratio).
std::pair<Mesh, RefinementMap> refine_uniform(const Mesh& coarse, int ratio);

struct Submesh {
  Mesh mesh;
  std::vector<Index> local_to_global;
  /// -1 for global vertices not in the submesh.
  std::vector<Index> global_to_local;
};

/// Restriction of `mesh` to the given cells.  A local vertex is flagged
/// boundary if it lies on a facet used by only one selected cell, or was a
/// boundary vertex of `mesh`.  Local vertices keep ascending global order.
Submesh extract_submesh(const Mesh& mesh, std::span<const Index> cell_ids);

}  // namespace tgfem
