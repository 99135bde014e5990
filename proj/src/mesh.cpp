#include "tgfem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace tgfem {

namespace {

// Axis permutations, lexicographic.  Odd ones get their last two vertices
// swapped so every stored cell is positively oriented.
constexpr std::array<std::array<int, 3>, 2> kPerms2{{{0, 1, 0}, {1, 0, 0}}};
constexpr std::array<bool, 2> kOdd2{false, true};
constexpr std::array<std::array<int, 3>, 6> kPerms3{
    {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
constexpr std::array<bool, 6> kOdd3{false, true, true, false, false, true};

int num_perms(int dim) { return dim == 2 ? 2 : 6; }

const std::array<int, 3>& perm(int dim, int p) { return dim == 2 ? kPerms2[p] : kPerms3[p]; }

bool perm_is_odd(int dim, int p) { return dim == 2 ? kOdd2[p] : kOdd3[p]; }

int perm_index(int dim, const std::array<int, 3>& axes) {
  for (int p = 0; p < num_perms(dim); ++p) {
    bool same = true;
    for (int k = 0; k < dim; ++k) same = same && perm(dim, p)[k] == axes[k];
    if (same) return p;
  }
  throw std::logic_error("perm_index: not a permutation");
}

Index vertex_id(int dim, int n, const std::array<int, 3>& ijk) {
  const Index m = n + 1;
  return dim == 2 ? ijk[0] + m * ijk[1] : ijk[0] + m * (ijk[1] + m * ijk[2]);
}

Index cube_id(int dim, int n, const std::array<int, 3>& c) {
  return dim == 2 ? c[0] + n * c[1] : c[0] + n * (c[1] + n * c[2]);
}

// Axes sorted by descending remainder, ties by ascending axis.
std::array<int, 3> descending_axes(int dim, const std::array<long long, 3>& rem) {
  std::array<int, 3> axes{0, 1, 2};
  std::stable_sort(axes.begin(), axes.begin() + dim, [&](int a, int b) { return rem[a] > rem[b]; });
  return axes;
}

double det3(const Point& a, const Point& b, const Point& c) {
  return a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) +
         a[2] * (b[0] * c[1] - b[1] * c[0]);
}

}  // namespace

Mesh::Mesh(int dim, int subdivisions, std::vector<Point> vertices, std::vector<Index> cells,
           std::vector<char> boundary)
    : dim_(dim),
      n_(subdivisions),
      vertices_(std::move(vertices)),
      cells_(std::move(cells)),
      boundary_(std::move(boundary)) {
  if (dim_ != 2 && dim_ != 3) throw std::invalid_argument("Mesh: dim must be 2 or 3");
  if (cells_.size() % static_cast<std::size_t>(dim_ + 1) != 0)
    throw std::invalid_argument("Mesh: cell array length is not a multiple of dim+1");
  if (boundary_.size() != vertices_.size())
    throw std::invalid_argument("Mesh: boundary flag count differs from vertex count");
  for (Index v : cells_)
    if (v < 0 || v >= num_vertices()) throw std::invalid_argument("Mesh: cell vertex out of range");
  build_incidence();
}

Mesh Mesh::structured(int dim, int n) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("build_structured: dim must be 2 or 3");
  if (n < 2) throw std::invalid_argument("build_structured: n must be >= 2");

  const int m = n + 1;
  const Index nv = dim == 2 ? m * m : m * m * m;
  std::vector<Point> vertices(nv);
  std::vector<char> boundary(nv, 0);
  const int zmax = dim == 2 ? 1 : m;
  for (int k = 0; k < zmax; ++k)
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < m; ++i) {
        const Index v = vertex_id(dim, n, {i, j, k});
        vertices[v] = {static_cast<double>(i) / n, static_cast<double>(j) / n,
                       dim == 3 ? static_cast<double>(k) / n : 0.0};
        bool on_boundary = i == 0 || i == n || j == 0 || j == n;
        if (dim == 3) on_boundary = on_boundary || k == 0 || k == n;
        boundary[v] = on_boundary ? 1 : 0;
      }

  const int np = num_perms(dim);
  const Index ncubes = dim == 2 ? n * n : n * n * n;
  std::vector<Index> cells(static_cast<std::size_t>(ncubes) * np * (dim + 1));
  const int czmax = dim == 2 ? 1 : n;
  for (int ck = 0; ck < czmax; ++ck)
    for (int cj = 0; cj < n; ++cj)
      for (int ci = 0; ci < n; ++ci) {
        const Index cube = cube_id(dim, n, {ci, cj, ck});
        for (int p = 0; p < np; ++p) {
          std::array<int, 3> ijk{ci, cj, ck};
          Index* out = cells.data() + (static_cast<std::size_t>(cube) * np + p) * (dim + 1);
          out[0] = vertex_id(dim, n, ijk);
          for (int s = 0; s < dim; ++s) {
            ++ijk[perm(dim, p)[s]];
            out[s + 1] = vertex_id(dim, n, ijk);
          }
          if (perm_is_odd(dim, p)) std::swap(out[dim - 1], out[dim]);
        }
      }

  Mesh mesh(dim, n, std::move(vertices), std::move(cells), std::move(boundary));
  mesh.structured_ = true;
  return mesh;
}

void Mesh::build_incidence() {
  const Index nv = num_vertices();
  vertex_cell_offsets_.assign(nv + 1, 0);
  for (Index v : cells_) ++vertex_cell_offsets_[v + 1];
  for (Index v = 0; v < nv; ++v) vertex_cell_offsets_[v + 1] += vertex_cell_offsets_[v];
  vertex_cells_.resize(cells_.size());
  std::vector<Index> fill(vertex_cell_offsets_.begin(), vertex_cell_offsets_.end() - 1);
  const Index nc = num_cells();
  for (Index c = 0; c < nc; ++c)
    for (Index v : cell(c)) vertex_cells_[fill[v]++] = c;
}

Index Mesh::num_boundary_vertices() const {
  return static_cast<Index>(std::count(boundary_.begin(), boundary_.end(), 1));
}

double Mesh::signed_volume(Index c) const {
  const auto vs = cell(c);
  const Point& p0 = vertices_[vs[0]];
  std::array<Point, 3> e{};
  for (int k = 0; k < dim_; ++k)
    for (int a = 0; a < 3; ++a) e[k][a] = vertices_[vs[k + 1]][a] - p0[a];
  if (dim_ == 2) return 0.5 * (e[0][0] * e[1][1] - e[0][1] * e[1][0]);
  return det3(e[0], e[1], e[2]) / 6.0;
}

Point Mesh::centroid(Index c) const {
  Point p{0.0, 0.0, 0.0};
  for (Index v : cell(c))
    for (int a = 0; a < 3; ++a) p[a] += vertices_[v][a];
  for (double& x : p) x /= (dim_ + 1);
  return p;
}

double Mesh::cell_diameter(Index c) const {
  const auto vs = cell(c);
  double best = 0.0;
  for (std::size_t a = 0; a < vs.size(); ++a)
    for (std::size_t b = a + 1; b < vs.size(); ++b) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) {
        const double d = vertices_[vs[a]][k] - vertices_[vs[b]][k];
        s += d * d;
      }
      best = std::max(best, std::sqrt(s));
    }
  return best;
}

bool RefinementMap::links(const Mesh& coarse, const Mesh& fine) const {
  return coarse.dim() == dim && fine.dim() == dim && coarse.num_vertices() == num_coarse_vertices &&
         fine.num_vertices() == num_fine_vertices &&
         fine.subdivisions() == coarse.subdivisions() * ratio &&
         static_cast<std::size_t>(fine.num_cells()) == coarse_cell_of_fine_cell.size();
}

std::pair<Mesh, RefinementMap> refine_uniform(const Mesh& coarse, int ratio) {
  if (ratio < 1) throw std::invalid_argument("refine_uniform: ratio must be >= 1");
  if (!coarse.is_structured())
    throw std::invalid_argument("refine_uniform: coarse mesh must be structured");
  const int dim = coarse.dim();
  const int n = coarse.subdivisions();
  const int nf = n * ratio;
  Mesh fine = Mesh::structured(dim, nf);

  RefinementMap map;
  map.dim = dim;
  map.ratio = ratio;
  map.num_coarse_vertices = coarse.num_vertices();
  map.num_fine_vertices = fine.num_vertices();

  const int mc = n + 1;
  const int zc = dim == 2 ? 1 : mc;
  map.fine_vertex_of_coarse_vertex.resize(coarse.num_vertices());
  for (int k = 0; k < zc; ++k)
    for (int j = 0; j < mc; ++j)
      for (int i = 0; i < mc; ++i)
        map.fine_vertex_of_coarse_vertex[vertex_id(dim, n, {i, j, k})] =
            vertex_id(dim, nf, {i * ratio, j * ratio, k * ratio});

  const int np = num_perms(dim);

  // Fine vertices: locate a containing coarse cell with exact integer arithmetic.
  const int mf = nf + 1;
  const int zf = dim == 2 ? 1 : mf;
  map.host_cell.resize(fine.num_vertices());
  map.barycentric.resize(static_cast<std::size_t>(fine.num_vertices()) * (dim + 1));
  for (int k = 0; k < zf; ++k)
    for (int j = 0; j < mf; ++j)
      for (int i = 0; i < mf; ++i) {
        const std::array<int, 3> fijk{i, j, k};
        std::array<int, 3> cube{0, 0, 0};
        std::array<long long, 3> rem{0, 0, 0};
        for (int a = 0; a < dim; ++a) {
          cube[a] = std::min(fijk[a] / ratio, n - 1);
          rem[a] = fijk[a] - static_cast<long long>(cube[a]) * ratio;
        }
        const auto axes = descending_axes(dim, rem);
        const int p = perm_index(dim, axes);
        const Index v = vertex_id(dim, nf, fijk);
        map.host_cell[v] = cube_id(dim, n, cube) * np + p;
        double* lam = map.barycentric.data() + static_cast<std::size_t>(v) * (dim + 1);
        long long prev = ratio;
        for (int s = 0; s < dim; ++s) {
          lam[s] = static_cast<double>(prev - rem[axes[s]]) / ratio;
          prev = rem[axes[s]];
        }
        lam[dim] = static_cast<double>(prev) / ratio;
        if (perm_is_odd(dim, p)) std::swap(lam[dim - 1], lam[dim]);
      }

  // Fine cells: the centroid, scaled by (dim+1), has integer coordinates and
  // never lies on a coarse cutting hyperplane.
  const Index nfc = fine.num_cells();
  map.coarse_cell_of_fine_cell.resize(nfc);
  const long long scale = static_cast<long long>(dim + 1) * ratio;
  const int fcz = dim == 2 ? 1 : nf;
  for (int k = 0; k < fcz; ++k)
    for (int j = 0; j < nf; ++j)
      for (int i = 0; i < nf; ++i) {
        const std::array<int, 3> fcube{i, j, k};
        for (int pf = 0; pf < np; ++pf) {
          std::array<long long, 3> scaled{0, 0, 0};
          for (int a = 0; a < dim; ++a) scaled[a] = static_cast<long long>(dim + 1) * fcube[a];
          for (int s = 0; s < dim; ++s) scaled[perm(dim, pf)[s]] += dim - s;
          std::array<int, 3> cube{0, 0, 0};
          std::array<long long, 3> rem{0, 0, 0};
          for (int a = 0; a < dim; ++a) {
            cube[a] = static_cast<int>(scaled[a] / scale);
            rem[a] = scaled[a] % scale;
          }
          const int p = perm_index(dim, descending_axes(dim, rem));
          map.coarse_cell_of_fine_cell[cube_id(dim, nf, fcube) * np + pf] =
              cube_id(dim, n, cube) * np + p;
        }
      }

  const Index ncc = coarse.num_cells();
  map.child_offsets.assign(ncc + 1, 0);
  for (Index parent : map.coarse_cell_of_fine_cell) ++map.child_offsets[parent + 1];
  for (Index c = 0; c < ncc; ++c) map.child_offsets[c + 1] += map.child_offsets[c];
  map.children.resize(nfc);
  std::vector<Index> fill(map.child_offsets.begin(), map.child_offsets.end() - 1);
  for (Index f = 0; f < nfc; ++f) map.children[fill[map.coarse_cell_of_fine_cell[f]]++] = f;

  return {std::move(fine), std::move(map)};
}

Submesh extract_submesh(const Mesh& mesh, std::span<const Index> cell_ids) {
  if (cell_ids.empty()) throw std::invalid_argument("extract_submesh: empty cell selection");
  const int dim = mesh.dim();
  const int nvc = dim + 1;

  std::vector<Index> selected(cell_ids.begin(), cell_ids.end());
  std::sort(selected.begin(), selected.end());
  selected.erase(std::unique(selected.begin(), selected.end()), selected.end());
  for (Index c : selected)
    if (c < 0 || c >= mesh.num_cells())
      throw std::invalid_argument("extract_submesh: cell id " + std::to_string(c) + " out of range");

  Submesh sub;
  sub.global_to_local.assign(mesh.num_vertices(), -1);
  for (Index c : selected)
    for (Index v : mesh.cell(c)) sub.global_to_local[v] = 0;
  for (Index v = 0; v < mesh.num_vertices(); ++v)
    if (sub.global_to_local[v] == 0) {
      sub.global_to_local[v] = static_cast<Index>(sub.local_to_global.size());
      sub.local_to_global.push_back(v);
    }

  // Facets used by exactly one selected cell form the topological boundary.
  std::vector<std::array<Index, 3>> facets;
  facets.reserve(selected.size() * nvc);
  for (Index c : selected) {
    const auto vs = mesh.cell(c);
    for (int skip = 0; skip < nvc; ++skip) {
      std::array<Index, 3> f{-1, -1, -1};
      int w = 0;
      for (int k = 0; k < nvc; ++k)
        if (k != skip) f[w++] = vs[k];
      std::sort(f.begin(), f.begin() + dim);
      facets.push_back(f);
    }
  }
  std::sort(facets.begin(), facets.end());

  const Index nl = static_cast<Index>(sub.local_to_global.size());
  std::vector<Point> vertices(nl);
  std::vector<char> boundary(nl, 0);
  for (Index l = 0; l < nl; ++l) {
    vertices[l] = mesh.vertex(sub.local_to_global[l]);
    boundary[l] = mesh.is_boundary(sub.local_to_global[l]) ? 1 : 0;
  }
  for (std::size_t i = 0; i < facets.size();) {
    std::size_t j = i;
    while (j < facets.size() && facets[j] == facets[i]) ++j;
    if (j - i == 1)
      for (int k = 0; k < dim; ++k) boundary[sub.global_to_local[facets[i][k]]] = 1;
    i = j;
  }

  std::vector<Index> cells;
  cells.reserve(selected.size() * nvc);
  for (Index c : selected)
    for (Index v : mesh.cell(c)) cells.push_back(sub.global_to_local[v]);

  sub.mesh = Mesh(dim, mesh.subdivisions(), std::move(vertices), std::move(cells), std::move(boundary));
  return sub;
}

}  // namespace tgfem
