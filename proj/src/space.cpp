#include "tgfem/space.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace tgfem {

Point CellGeometry::map(std::span<const double> barycentric) const {
  Point p{0.0, 0.0, 0.0};
  for (int k = 0; k <= dim; ++k)
    for (int a = 0; a < 3; ++a) p[a] += barycentric[k] * corners[k][a];
  return p;
}

CellGeometry cell_geometry(const Mesh& mesh, Index cell) {
  if (cell < 0 || cell >= mesh.num_cells())
    throw std::out_of_range("cell index " + std::to_string(cell) + " out of range");
  CellGeometry g;
  g.dim = mesh.dim();
  const auto vs = mesh.cell(cell);
  for (int k = 0; k <= g.dim; ++k) g.corners[k] = mesh.vertex(vs[k]);

  // Rows of J are the edge vectors from vertex 0.
  double j[3][3] = {};
  for (int k = 0; k < g.dim; ++k)
    for (int a = 0; a < g.dim; ++a) j[k][a] = g.corners[k + 1][a] - g.corners[0][a];

  double det = 0.0;
  double inv[3][3] = {};
  if (g.dim == 2) {
    det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    inv[0][0] = j[1][1] / det;
    inv[0][1] = -j[0][1] / det;
    inv[1][0] = -j[1][0] / det;
    inv[1][1] = j[0][0] / det;
  } else {
    const double c00 = j[1][1] * j[2][2] - j[1][2] * j[2][1];
    const double c01 = j[1][2] * j[2][0] - j[1][0] * j[2][2];
    const double c02 = j[1][0] * j[2][1] - j[1][1] * j[2][0];
    det = j[0][0] * c00 + j[0][1] * c01 + j[0][2] * c02;
    inv[0][0] = c00 / det;
    inv[1][0] = c01 / det;
    inv[2][0] = c02 / det;
    inv[0][1] = (j[0][2] * j[2][1] - j[0][1] * j[2][2]) / det;
    inv[1][1] = (j[0][0] * j[2][2] - j[0][2] * j[2][0]) / det;
    inv[2][1] = (j[0][1] * j[2][0] - j[0][0] * j[2][1]) / det;
    inv[0][2] = (j[0][1] * j[1][2] - j[0][2] * j[1][1]) / det;
    inv[1][2] = (j[0][2] * j[1][0] - j[0][0] * j[1][2]) / det;
    inv[2][2] = (j[0][0] * j[1][1] - j[0][1] * j[1][0]) / det;
  }
  if (!(std::abs(det) > 0.0) || !std::isfinite(det))
    throw std::domain_error("degenerate cell " + std::to_string(cell));

  // x - x0 = J^T (lambda_1..lambda_d), so grad(lambda_k) is column k of J^{-1}.
  for (int k = 0; k < g.dim; ++k) {
    Gradient gk{0.0, 0.0, 0.0};
    for (int a = 0; a < g.dim; ++a) gk[a] = inv[a][k];
    g.grad_lambda[k + 1] = gk;
  }
  Gradient g0{0.0, 0.0, 0.0};
  for (int k = 1; k <= g.dim; ++k)
    for (int a = 0; a < 3; ++a) g0[a] -= g.grad_lambda[k][a];
  g.grad_lambda[0] = g0;

  g.det = std::abs(det);
  g.volume = g.det / (g.dim == 2 ? 2.0 : 6.0);
  return g;
}

FeSpace::FeSpace(const Mesh& mesh) : mesh_(&mesh) {
  const Index nv = mesh.num_vertices();
  free_of_vertex_.assign(nv, kConstrained);
  for (Index v = 0; v < nv; ++v)
    if (!mesh.is_boundary(v)) {
      free_of_vertex_[v] = static_cast<Index>(vertex_of_free_.size());
      vertex_of_free_.push_back(v);
    }
}

FeFunction::FeFunction(const FeSpace& space) : space_(&space), coefficients_(space.num_free(), 0.0) {}

FeFunction::FeFunction(const FeSpace& space, std::vector<double> coefficients)
    : space_(&space), coefficients_(std::move(coefficients)) {
  if (coefficients_.size() != static_cast<std::size_t>(space.num_free()))
    throw std::invalid_argument("FeFunction: coefficient count " + std::to_string(coefficients_.size()) +
                                " differs from free dof count " + std::to_string(space.num_free()));
}

double evaluate(const FeFunction& f, Index cell, std::span<const double> barycentric) {
  const Mesh& mesh = f.space().mesh();
  if (cell < 0 || cell >= mesh.num_cells())
    throw std::out_of_range("evaluate: cell index " + std::to_string(cell) + " out of range");
  const auto vs = mesh.cell(cell);
  double value = 0.0;
  for (std::size_t k = 0; k < vs.size(); ++k) value += barycentric[k] * f.vertex_value(vs[k]);
  return value;
}

Gradient gradient_on_cell(const FeFunction& f, const CellGeometry& geometry, Index cell) {
  const auto vs = f.space().mesh().cell(cell);
  Gradient g{0.0, 0.0, 0.0};
  for (std::size_t k = 0; k < vs.size(); ++k) {
    const double u = f.vertex_value(vs[k]);
    for (int a = 0; a < 3; ++a) g[a] += u * geometry.grad_lambda[k][a];
  }
  return g;
}

Gradient gradient_on_cell(const FeFunction& f, Index cell) {
  return gradient_on_cell(f, cell_geometry(f.space().mesh(), cell), cell);
}

Prolongation::Prolongation(const FeSpace& coarse, const FeSpace& fine, const RefinementMap& map)
    : coarse_(&coarse), fine_(&fine) {
  const Mesh& cm = coarse.mesh();
  const Mesh& fm = fine.mesh();
  if (!map.links(cm, fm)) throw std::invalid_argument("Prolongation: mesh pair does not match map");

  const Index nf = fine.num_free();
  std::vector<std::int64_t> offsets(nf + 1, 0);
  std::vector<Index> columns;
  std::vector<double> values;
  columns.reserve(static_cast<std::size_t>(nf) * (map.dim + 1));
  values.reserve(columns.capacity());
  for (Index d = 0; d < nf; ++d) {
    const Index v = fine.vertex_of(d);
    const auto hosts = cm.cell(map.host_cell[v]);
    const auto w = map.weights(v);
    std::array<std::pair<Index, double>, 4> entries{};
    int count = 0;
    for (int k = 0; k <= map.dim; ++k) {
      const Index cd = coarse.free_dof(hosts[k]);
      if (cd != kConstrained && w[k] != 0.0) entries[count++] = {cd, w[k]};
    }
    std::sort(entries.begin(), entries.begin() + count);
    for (int k = 0; k < count; ++k) {
      columns.push_back(entries[k].first);
      values.push_back(entries[k].second);
    }
    offsets[d + 1] = static_cast<std::int64_t>(columns.size());
  }
  p_ = SparseMatrix::from_csr(nf, coarse.num_free(), std::move(offsets), std::move(columns),
                              std::move(values));
  pt_ = p_.transpose();
}

FeFunction Prolongation::apply(const FeFunction& coarse_f, Execution exec) const {
  if (&coarse_f.space() != coarse_)
    throw std::invalid_argument("Prolongation::apply: function is not on the coarse space");
  return FeFunction(*fine_, spmv(p_, coarse_f.coefficients(), exec));
}

std::vector<double> Prolongation::restrict_vector(std::span<const double> fine, Execution exec) const {
  return spmv(pt_, fine, exec);
}

FeFunction prolongate(const FeFunction& coarse_f, const RefinementMap& map, const FeSpace& fine_space) {
  const Prolongation p(coarse_f.space(), fine_space, map);
  return p.apply(coarse_f);
}

}  // namespace tgfem
