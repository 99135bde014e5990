#pragma once

#include <span>
#include <vector>

#include "tgfem/linalg.hpp"
#include "tgfem/mesh.hpp"
#include "tgfem/space.hpp"

namespace tgfem {

/// One member of the coarse-hat partition of unity.
///
/// phi_j is the coarse P1 hat at vertex j, its support D_j the coarse cells
/// around j, and the local domain Omega_j the union of the supports of all
/// coarse vertices in D_j (one extra coarse layer).  Local functions live in
/// the fine P1 space on Omega_j with zero trace on its boundary.
struct Patch {
  Index vertex = 0;
  std::vector<Index> support_cells;
  std::vector<Index> domain_cells;
  /// Local free dof -> global fine free dof, ascending.  These are the fine
  /// vertices strictly inside Omega_j that are not on the domain boundary.
  std::vector<Index> local_to_global;

  Index num_local() const { return static_cast<Index>(local_to_global.size()); }
};

/// All N patches of a coarse/fine mesh pair, one per coarse vertex (boundary
/// vertices included).
class PatchSet {
 public:
  PatchSet(const Mesh& coarse, const FeSpace& fine_space, const RefinementMap& map,
           Execution exec = Execution::Parallel);

  const Mesh& coarse_mesh() const { return *coarse_; }
  const Mesh& fine_mesh() const { return fine_space_->mesh(); }
  const FeSpace& fine_space() const { return *fine_space_; }
  const RefinementMap& map() const { return *map_; }

  std::span<const Patch> patches() const { return patches_; }
  std::size_t size() const { return patches_.size(); }
  const Patch& operator[](std::size_t j) const { return patches_[j]; }

  /// Fine cells inside Omega_j, ascending.
  std::vector<Index> fine_cells(const Patch& patch) const;
  /// Fine cells inside D_j, ascending.
  std::vector<Index> support_fine_cells(const Patch& patch) const;

  /// phi_j at a fine vertex.
  double phi_at_vertex(const Patch& patch, Index fine_vertex) const;
  /// phi_j at a point of a fine cell given by barycentric coordinates; 0
  /// outside D_j.
  double phi_value(const Patch& patch, Index fine_cell, std::span<const double> barycentric) const;

 private:
  const Mesh* coarse_;
  const FeSpace* fine_space_;
  const RefinementMap* map_;
  std::vector<Patch> patches_;
};

/// Maximum over fine cells of the number of patch domains containing the cell.
int overlap_count(const PatchSet& patches);

}  // namespace tgfem
