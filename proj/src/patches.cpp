#include "tgfem/patches.hpp"

#include <algorithm>
#include <stdexcept>

namespace tgfem {

PatchSet::PatchSet(const Mesh& coarse, const FeSpace& fine_space, const RefinementMap& map,
                   Execution exec)
    : coarse_(&coarse), fine_space_(&fine_space), map_(&map) {
  const Mesh& fine = fine_space.mesh();
  if (!map.links(coarse, fine)) throw std::invalid_argument("build_patches: mismatched mesh pair");

  const Index nj = coarse.num_vertices();
  patches_.resize(nj);

#pragma omp parallel if (exec == Execution::Parallel)
  {
    // Stamps avoid clearing the markers between patches.
    std::vector<Index> cell_stamp(coarse.num_cells(), -1);
    std::vector<Index> vertex_stamp(fine.num_vertices(), -1);

#pragma omp for schedule(dynamic, 4)
    for (Index j = 0; j < nj; ++j) {
      Patch& patch = patches_[j];
      patch.vertex = j;
      const auto star = coarse.cells_of_vertex(j);
      patch.support_cells.assign(star.begin(), star.end());

      for (Index c : star)
        for (Index i : coarse.cell(c))
          for (Index k : coarse.cells_of_vertex(i)) patch.domain_cells.push_back(k);
      std::sort(patch.domain_cells.begin(), patch.domain_cells.end());
      patch.domain_cells.erase(std::unique(patch.domain_cells.begin(), patch.domain_cells.end()),
                               patch.domain_cells.end());

      for (Index c : patch.domain_cells) cell_stamp[c] = j;
      for (Index c : patch.domain_cells)
        for (Index fc : map.fine_cells_of(c))
          for (Index v : fine.cell(fc)) {
            if (vertex_stamp[v] == j) continue;
            vertex_stamp[v] = j;
            const Index dof = fine_space.free_dof(v);
            if (dof == kConstrained) continue;
            const auto around = fine.cells_of_vertex(v);
            const bool inside = std::all_of(around.begin(), around.end(), [&](Index f) {
              return cell_stamp[map.coarse_cell_of_fine_cell[f]] == j;
            });
            if (inside) patch.local_to_global.push_back(dof);
          }
      std::sort(patch.local_to_global.begin(), patch.local_to_global.end());
    }
  }
}

std::vector<Index> PatchSet::fine_cells(const Patch& patch) const {
  std::vector<Index> cells;
  for (Index c : patch.domain_cells) {
    const auto kids = map_->fine_cells_of(c);
    cells.insert(cells.end(), kids.begin(), kids.end());
  }
  std::sort(cells.begin(), cells.end());
  return cells;
}

std::vector<Index> PatchSet::support_fine_cells(const Patch& patch) const {
  std::vector<Index> cells;
  for (Index c : patch.support_cells) {
    const auto kids = map_->fine_cells_of(c);
    cells.insert(cells.end(), kids.begin(), kids.end());
  }
  std::sort(cells.begin(), cells.end());
  return cells;
}

double PatchSet::phi_at_vertex(const Patch& patch, Index fine_vertex) const {
  // Coarse hats are continuous, so any host cell gives the same value; a host
  // cell without vertex j has phi_j identically zero on it.
  const auto hosts = coarse_->cell(map_->host_cell[fine_vertex]);
  const auto w = map_->weights(fine_vertex);
  for (std::size_t k = 0; k < hosts.size(); ++k)
    if (hosts[k] == patch.vertex) return w[k];
  return 0.0;
}

double PatchSet::phi_value(const Patch& patch, Index fine_cell,
                           std::span<const double> barycentric) const {
  const Index parent = map_->coarse_cell_of_fine_cell[fine_cell];
  if (!std::binary_search(patch.support_cells.begin(), patch.support_cells.end(), parent)) return 0.0;
  const auto vs = fine_mesh().cell(fine_cell);
  double value = 0.0;
  for (std::size_t k = 0; k < vs.size(); ++k) value += barycentric[k] * phi_at_vertex(patch, vs[k]);
  return value;
}

int overlap_count(const PatchSet& patches) {
  std::vector<int> per_coarse(patches.coarse_mesh().num_cells(), 0);
  for (const Patch& p : patches.patches())
    for (Index c : p.domain_cells) ++per_coarse[c];
  int kappa = 0;
  for (Index parent : patches.map().coarse_cell_of_fine_cell) kappa = std::max(kappa, per_coarse[parent]);
  return kappa;
}

}  // namespace tgfem
