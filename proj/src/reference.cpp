#include "tgfem/reference.hpp"

#include "detail/kernels.hpp"
#include "tgfem/assembly.hpp"

namespace tgfem::reference {

std::vector<double> spmv(const SparseMatrix& a, std::span<const double> x) {
  std::vector<double> y(a.rows(), 0.0);
  for (Index i = 0; i < a.rows(); ++i) {
    const auto cols = a.row_columns(i);
    const auto vals = a.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) y[i] += vals[k] * x[cols[k]];
  }
  return y;
}

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

SparseMatrix assemble_stiffness(const FeSpace& space) {
  const Mesh& mesh = space.mesh();
  std::vector<Index> rows, cols;
  std::vector<double> vals;
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    const CellGeometry g = cell_geometry(mesh, c);
    const auto vs = mesh.cell(c);
    for (std::size_t a = 0; a < vs.size(); ++a)
      for (std::size_t b = 0; b < vs.size(); ++b) {
        const Index i = space.free_dof(vs[a]);
        const Index j = space.free_dof(vs[b]);
        if (i == kConstrained || j == kConstrained) continue;
        rows.push_back(i);
        cols.push_back(j);
        vals.push_back(detail::stiffness_entry(g, static_cast<int>(a), static_cast<int>(b)));
      }
  }
  return SparseMatrix::from_triplets(space.num_free(), space.num_free(), std::move(rows), std::move(cols),
                                     std::move(vals));
}

FeFunction local_solve_all(const Discretization& disc, const FeFunction& iterate) {
  const PatchSet& patches = disc.patches();
  std::vector<Index> scratch(disc.fine_space().num_free(), -1);
  FeFunction w(disc.fine_space());
  const bool interpolated = disc.options().local_rhs == LocalRhs::Interpolated;
  std::vector<double> residual;
  if (interpolated) {
    residual = reference::spmv(disc.fine_stiffness(), iterate.coefficients());
    for (std::size_t i = 0; i < residual.size(); ++i) residual[i] = disc.fine_load()[i] - residual[i];
  }
  for (const Patch& patch : patches.patches()) {
    const std::vector<double> rhs =
        interpolated ? assemble_local_rhs_interpolated(patches, patch, residual)
                     : assemble_local_rhs(patches, patch, iterate, disc.problem().f, disc.load_quadrature());
    const SparseMatrix local = disc.fine_stiffness().principal_submatrix(patch.local_to_global, scratch);
    const SolveResult r = solve_spd(local, rhs, disc.solver_options(Execution::Serial));
    for (std::size_t l = 0; l < r.x.size(); ++l) w.values()[patch.local_to_global[l]] += r.x[l];
  }
  return w;
}

}  // namespace tgfem::reference
