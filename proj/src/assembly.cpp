#include "tgfem/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "detail/kernels.hpp"

namespace tgfem {

namespace {

constexpr int kMaxRow = 64;

// Records the first failing cell so the parallel loops can report a
// deterministic error after the region ends.
struct FirstFailure {
  Index cell = -1;
  Point point{};
  double value = 0.0;

  void record(Index c, const Point& p, double v) {
#pragma omp critical(tgfem_first_failure)
    if (cell < 0 || c < cell) {
      cell = c;
      point = p;
      value = v;
    }
  }
  void throw_if_failed() const {
    if (cell < 0) return;
    std::ostringstream msg;
    msg << "source term is not finite (" << value << ") at point (" << point[0] << ", " << point[1]
        << ", " << point[2] << ") in cell " << cell;
    throw std::domain_error(msg.str());
  }
};

}  // namespace

SparseMatrix assemble_stiffness(const FeSpace& space, Execution exec) {
  const Mesh& mesh = space.mesh();
  const Index n = space.num_free();
  std::vector<std::int64_t> offsets(n + 1, 0);

  // Pass 1: row patterns.
#pragma omp parallel for schedule(static) if (exec == Execution::Parallel)
  for (Index i = 0; i < n; ++i) {
    Index cols[kMaxRow];
    int count = 0;
    for (Index c : mesh.cells_of_vertex(space.vertex_of(i)))
      for (Index w : mesh.cell(c)) {
        const Index j = space.free_dof(w);
        if (j == kConstrained || std::find(cols, cols + count, j) != cols + count) continue;
        cols[count++] = j;
      }
    offsets[i + 1] = count;
  }
  for (Index i = 0; i < n; ++i) offsets[i + 1] += offsets[i];

  std::vector<Index> columns(offsets[n]);
  std::vector<double> values(offsets[n], 0.0);
  std::vector<char> degenerate(n, 0);

  // Pass 2: values, summed over incident cells in ascending order.
#pragma omp parallel for schedule(static) if (exec == Execution::Parallel)
  for (Index i = 0; i < n; ++i) {
    Index* cols = columns.data() + offsets[i];
    double* vals = values.data() + offsets[i];
    const int len = static_cast<int>(offsets[i + 1] - offsets[i]);
    int count = 0;
    const Index v = space.vertex_of(i);
    for (Index c : mesh.cells_of_vertex(v))
      for (Index w : mesh.cell(c)) {
        const Index j = space.free_dof(w);
        if (j != kConstrained && std::find(cols, cols + count, j) == cols + count) cols[count++] = j;
      }
    std::sort(cols, cols + len);
    for (Index c : mesh.cells_of_vertex(v)) {
      CellGeometry g;
      try {
        g = cell_geometry(mesh, c);
      } catch (const std::domain_error&) {
        degenerate[i] = 1;
        continue;
      }
      const auto vs = mesh.cell(c);
      const int a = static_cast<int>(std::find(vs.begin(), vs.end(), v) - vs.begin());
      for (std::size_t b = 0; b < vs.size(); ++b) {
        const Index j = space.free_dof(vs[b]);
        if (j == kConstrained) continue;
        const int pos = static_cast<int>(std::lower_bound(cols, cols + len, j) - cols);
        vals[pos] += detail::stiffness_entry(g, a, static_cast<int>(b));
      }
    }
  }
  if (std::any_of(degenerate.begin(), degenerate.end(), [](char d) { return d != 0; }))
    throw std::domain_error("assemble_stiffness: degenerate cell in mesh");

  return SparseMatrix::from_csr(n, n, std::move(offsets), std::move(columns), std::move(values));
}

std::vector<double> assemble_vertex_load(const Mesh& mesh, const ScalarField& f,
                                         const QuadratureRule& quad, Execution exec) {
  if (quad.dim != mesh.dim()) throw std::invalid_argument("assemble_load: quadrature dimension mismatch");
  const Index nc = mesh.num_cells();
  const int nvc = mesh.vertices_per_cell();
  std::vector<double> local(static_cast<std::size_t>(nc) * nvc, 0.0);
  FirstFailure failure;
  int degenerate = 0;

#pragma omp parallel for schedule(static) if (exec == Execution::Parallel)
  for (Index c = 0; c < nc; ++c) {
    CellGeometry g;
    try {
      g = cell_geometry(mesh, c);
    } catch (const std::domain_error&) {
#pragma omp atomic write
      degenerate = 1;
      continue;
    }
    double* out = local.data() + static_cast<std::size_t>(c) * nvc;
    for (std::size_t q = 0; q < quad.size(); ++q) {
      const Point x = g.map(quad.points[q]);
      const double fx = f(x);
      if (!std::isfinite(fx)) {
        failure.record(c, x, fx);
        break;
      }
      const double wf = g.det * quad.weights[q] * fx;
      for (int a = 0; a < nvc; ++a) out[a] += wf * quad.points[q][a];
    }
  }
  if (degenerate) throw std::domain_error("assemble_load: degenerate cell in mesh");
  failure.throw_if_failed();

  const Index nv = mesh.num_vertices();
  std::vector<double> load(nv, 0.0);
#pragma omp parallel for schedule(static) if (exec == Execution::Parallel)
  for (Index v = 0; v < nv; ++v) {
    double s = 0.0;
    for (Index c : mesh.cells_of_vertex(v)) {
      const auto vs = mesh.cell(c);
      const auto a = std::find(vs.begin(), vs.end(), v) - vs.begin();
      s += local[static_cast<std::size_t>(c) * nvc + a];
    }
    load[v] = s;
  }
  return load;
}

std::vector<double> assemble_load(const FeSpace& space, const ScalarField& f, const QuadratureRule& quad,
                                  Execution exec) {
  const std::vector<double> all = assemble_vertex_load(space.mesh(), f, quad, exec);
  std::vector<double> load(space.num_free());
  for (Index i = 0; i < space.num_free(); ++i) load[i] = all[space.vertex_of(i)];
  return load;
}

std::vector<double> assemble_local_rhs(const PatchSet& patches, const Patch& patch,
                                       const FeFunction& u_fine, const ScalarField& f,
                                       const QuadratureRule& load_quad) {
  const FeSpace& space = patches.fine_space();
  if (&u_fine.space() != &space)
    throw std::invalid_argument("assemble_local_rhs: function is not on the patch set's fine space");
  if (patch.vertex < 0 || static_cast<std::size_t>(patch.vertex) >= patches.size() ||
      &patches[patch.vertex] != &patch)
    throw std::invalid_argument("assemble_local_rhs: patch does not belong to this patch set");

  const Mesh& mesh = space.mesh();
  const int dim = mesh.dim();
  const int nvc = dim + 1;
  const QuadratureRule& form_quad = QuadratureRule::get(dim, 2);
  const auto& l2g = patch.local_to_global;
  std::vector<double> rhs(l2g.size(), 0.0);
  std::vector<double> fq(load_quad.size());

  for (Index c : patches.support_fine_cells(patch)) {
    const CellGeometry g = cell_geometry(mesh, c);
    const auto vs = mesh.cell(c);
    double phi[4] = {0.0, 0.0, 0.0, 0.0};
    Gradient grad_phi{0.0, 0.0, 0.0};
    for (int k = 0; k < nvc; ++k) {
      phi[k] = patches.phi_at_vertex(patch, vs[k]);
      for (int a = 0; a < 3; ++a) grad_phi[a] += phi[k] * g.grad_lambda[k][a];
    }
    const Gradient grad_u = gradient_on_cell(u_fine, g, c);
    const double gu_gphi = detail::dot3(grad_u, grad_phi);

    for (std::size_t q = 0; q < load_quad.size(); ++q) {
      const Point x = g.map(load_quad.points[q]);
      fq[q] = f(x);
      if (!std::isfinite(fq[q])) {
        std::ostringstream msg;
        msg << "source term is not finite at point (" << x[0] << ", " << x[1] << ", " << x[2] << ")";
        throw std::domain_error(msg.str());
      }
    }

    for (int a = 0; a < nvc; ++a) {
      const Index dof = space.free_dof(vs[a]);
      if (dof == kConstrained) continue;
      const auto it = std::lower_bound(l2g.begin(), l2g.end(), dof);
      if (it == l2g.end() || *it != dof)
        throw std::logic_error("assemble_local_rhs: support dof outside the patch interior");

      double load = 0.0;
      for (std::size_t q = 0; q < load_quad.size(); ++q) {
        const auto& lam = load_quad.points[q];
        double phi_q = 0.0;
        for (int k = 0; k < nvc; ++k) phi_q += lam[k] * phi[k];
        load += load_quad.weights[q] * fq[q] * phi_q * lam[a];
      }

      const double gu_gv = detail::dot3(grad_u, g.grad_lambda[a]);
      double form = 0.0;
      for (std::size_t q = 0; q < form_quad.size(); ++q) {
        const auto& lam = form_quad.points[q];
        double phi_q = 0.0;
        for (int k = 0; k < nvc; ++k) phi_q += lam[k] * phi[k];
        form += form_quad.weights[q] * (gu_gv * phi_q + gu_gphi * lam[a]);
      }
      rhs[it - l2g.begin()] += g.det * (load - form);
    }
  }
  return rhs;
}

std::vector<double> assemble_local_rhs_interpolated(const PatchSet& patches, const Patch& patch,
                                                    std::span<const double> fine_residual) {
  const FeSpace& space = patches.fine_space();
  if (fine_residual.size() != static_cast<std::size_t>(space.num_free()))
    throw std::invalid_argument("assemble_local_rhs_interpolated: residual has the wrong length");
  if (patch.vertex < 0 || static_cast<std::size_t>(patch.vertex) >= patches.size() ||
      &patches[patch.vertex] != &patch)
    throw std::invalid_argument("assemble_local_rhs_interpolated: patch does not belong to this patch set");
  const auto& l2g = patch.local_to_global;
  std::vector<double> rhs(l2g.size());
  for (std::size_t l = 0; l < l2g.size(); ++l)
    rhs[l] = patches.phi_at_vertex(patch, space.vertex_of(l2g[l])) * fine_residual[l2g[l]];
  return rhs;
}

std::vector<double> restrict_residual(const SparseMatrix& fine_stiffness, const FeFunction& w,
                                      std::span<const double> fine_load, const Prolongation& p,
                                      Execution exec) {
  const std::size_t n = static_cast<std::size_t>(fine_stiffness.rows());
  if (w.coefficients().size() != n || fine_load.size() != n ||
      static_cast<std::size_t>(p.matrix().rows()) != n)
    throw std::invalid_argument("restrict_residual: dimension mismatch");
  std::vector<double> r = spmv(fine_stiffness, w.coefficients(), exec);
  for (std::size_t i = 0; i < n; ++i) r[i] = fine_load[i] - r[i];
  return p.restrict_vector(r, exec);
}

}  // namespace tgfem
