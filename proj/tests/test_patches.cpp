#include <doctest.h>

#include <map>
#include <set>

#include "helpers.hpp"
#include "tgfem/patches.hpp"

using namespace tgfem;

namespace {

struct Setup {
  Mesh coarse;
  std::pair<Mesh, RefinementMap> refined;
  FeSpace fine_space;
  PatchSet patches;

  Setup(int dim, int n, int ratio)
      : coarse(Mesh::structured(dim, n)),
        refined(refine_uniform(coarse, ratio)),
        fine_space(refined.first),
        patches(coarse, fine_space, refined.second) {}
};

using Segment = std::array<Point, 2>;

// Boundary edges of a union of triangles, excluding edges on the unit square's boundary.
std::vector<Segment> inner_boundary(const Mesh& m, const std::vector<Index>& cells) {
  std::map<std::pair<Index, Index>, int> count;
  for (Index c : cells) {
    const auto vs = m.cell(c);
    for (int a = 0; a < 3; ++a) {
      Index p = vs[a], q = vs[(a + 1) % 3];
      if (p > q) std::swap(p, q);
      ++count[{p, q}];
    }
  }
  std::vector<Segment> out;
  for (const auto& [e, k] : count) {
    if (k != 1) continue;
    const Point& p = m.vertex(e.first);
    const Point& q = m.vertex(e.second);
    bool on_domain_boundary = false;
    for (int i = 0; i < 2; ++i)
      for (double side : {0.0, 1.0}) on_domain_boundary |= (p[i] == side && q[i] == side);
    if (!on_domain_boundary) out.push_back({p, q});
  }
  return out;
}

double point_segment(const Point& x, const Segment& s) {
  const double dx = s[1][0] - s[0][0], dy = s[1][1] - s[0][1];
  double t = ((x[0] - s[0][0]) * dx + (x[1] - s[0][1]) * dy) / (dx * dx + dy * dy);
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(x[0] - s[0][0] - t * dx, x[1] - s[0][1] - t * dy);
}

// Distance between two disjoint polygonal chains; attained at an endpoint.
double chain_distance(const std::vector<Segment>& a, const std::vector<Segment>& b) {
  double d = 1e300;
  for (const Segment& s : a)
    for (const Segment& t : b)
      for (int k = 0; k < 2; ++k) d = std::min({d, point_segment(s[k], t), point_segment(t[k], s)});
  return d;
}

}  // namespace

TEST_CASE("2x2 mesh: interior patch covers the whole mesh") {
  const Setup s(2, 2, 2);
  REQUIRE(s.patches.size() == 9);
  const Patch& p = s.patches[4];
  CHECK(p.support_cells.size() == 6);
  CHECK(p.domain_cells.size() == 8);
  // Only the centre and the two corners on the cell diagonals reach every
  // cell.  Each off-diagonal corner triangle is missed by the patches on the
  // far side, so no cell lies in all 9.
  int whole = 0;
  for (const Patch& q : s.patches.patches()) whole += q.domain_cells.size() == 8;
  CHECK(whole == 3);
  CHECK(overlap_count(s.patches) == 8);
}

TEST_CASE("interior patch sizes on the 8x8 mesh") {
  const Setup s(2, 8, 1);
  for (const Patch& p : s.patches.patches()) {
    const Point& x = s.coarse.vertex(p.vertex);
    const bool away = x[0] > 0.2 && x[0] < 0.8 && x[1] > 0.2 && x[1] < 0.8;
    if (!away) continue;
    CHECK(p.support_cells.size() == 6);
    CHECK(p.domain_cells.size() == 24);
  }
}

TEST_CASE("patch containment, interior dofs and coverage") {
  for (int dim : {2, 3}) {
    CAPTURE(dim);
    const Setup s(dim, dim == 2 ? 5 : 3, 2);
    const Mesh& fine = s.fine_space.mesh();
    const auto& map = s.patches.map();
    std::vector<int> covered(s.fine_space.num_free(), 0);
    for (const Patch& p : s.patches.patches()) {
      CHECK(std::includes(p.domain_cells.begin(), p.domain_cells.end(), p.support_cells.begin(),
                          p.support_cells.end()));
      CHECK(std::is_sorted(p.local_to_global.begin(), p.local_to_global.end()));
      const std::set<Index> omega(p.domain_cells.begin(), p.domain_cells.end());
      for (Index dof : p.local_to_global) {
        ++covered[dof];
        const Index v = s.fine_space.vertex_of(dof);
        CHECK_FALSE(fine.is_boundary(v));
        for (Index c : fine.cells_of_vertex(v)) CHECK(omega.count(map.coarse_cell_of_fine_cell[c]) == 1);
      }
      // fine cells are exactly the children of Omega_j
      const auto cells = s.patches.fine_cells(p);
      CHECK(cells.size() == p.domain_cells.size() * static_cast<std::size_t>(std::pow(2, dim)));
      for (Index c : cells) CHECK(omega.count(map.coarse_cell_of_fine_cell[c]) == 1);
    }
    for (int c : covered) CHECK(c >= 1);
  }
}

TEST_CASE("zero extension vanishes on the patch boundary") {
  const Setup s(2, 4, 3);
  const Mesh& fine = s.fine_space.mesh();
  for (const Patch& p : s.patches.patches()) {
    std::vector<char> local(s.fine_space.num_free(), 0);
    for (Index dof : p.local_to_global) local[dof] = 1;
    const auto cells = s.patches.fine_cells(p);
    std::map<std::pair<Index, Index>, int> edges;
    for (Index c : cells) {
      const auto vs = fine.cell(c);
      for (int a = 0; a < 3; ++a) ++edges[std::minmax(vs[a], vs[(a + 1) % 3])];
    }
    // vertices on boundary edges of Omega_j carry no local dof
    for (const auto& [e, k] : edges) {
      if (k != 1) continue;
      for (Index v : {e.first, e.second}) {
        const Index dof = s.fine_space.free_dof(v);
        if (dof != kConstrained) CHECK(local[dof] == 0);
      }
    }
  }
}

TEST_CASE("phi values") {
  const Setup s(2, 4, 2);
  const Mesh& fine = s.fine_space.mesh();
  const Patch& p = s.patches[12];
  const Index centre = s.patches.map().fine_vertex_of_coarse_vertex[12];
  CHECK(s.patches.phi_at_vertex(p, centre) == 1.0);
  const auto support = s.patches.support_fine_cells(p);
  const std::set<Index> in_support(support.begin(), support.end());
  const std::array<double, 3> mid{1.0 / 3, 1.0 / 3, 1.0 / 3};
  for (Index c = 0; c < fine.num_cells(); ++c)
    if (!in_support.count(c)) CHECK(s.patches.phi_value(p, c, mid) == 0.0);
}

TEST_CASE("phi_j sum to one at random points") {
  for (int dim : {2, 3}) {
    const Setup s(dim, 3, 2);
    const Mesh& fine = s.fine_space.mesh();
    std::mt19937_64 rng(123 + dim);
    for (int trial = 0; trial < 100; ++trial) {
      const Point x = testing::random_point(rng, dim);
      const auto [cell, lam] = testing::locate(fine, x);
      double sum = 0.0;
      for (const Patch& p : s.patches.patches()) sum += s.patches.phi_value(p, cell, lam);
      CHECK(std::abs(sum - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("overlap count is independent of the mesh size") {
  const int k8 = overlap_count(Setup(2, 8, 1).patches);
  const int k16 = overlap_count(Setup(2, 16, 1).patches);
  const int k32 = overlap_count(Setup(2, 32, 1).patches);
  CHECK(k8 == k16);
  CHECK(k16 == k32);
  const int k3a = overlap_count(Setup(3, 8, 1).patches);
  const int k3b = overlap_count(Setup(3, 10, 1).patches);
  CHECK(k3a == k3b);
}

TEST_CASE("overlap count matches a brute-force point count") {
  const Setup s(2, 16, 2);
  const Mesh& fine = s.fine_space.mesh();
  const Mesh& coarse = s.coarse;
  int brute = 0;
  for (Index c = 0; c < fine.num_cells(); ++c) {
    const Point x = fine.centroid(c);
    int count = 0;
    for (const Patch& p : s.patches.patches()) {
      bool inside = false;
      for (Index k : p.domain_cells) {
        const auto lam = testing::barycentric_in(coarse, k, x);
        if (lam[0] > 0 && lam[1] > 0 && lam[2] > 0) inside = true;
      }
      count += inside;
    }
    brute = std::max(brute, count);
  }
  CHECK(overlap_count(s.patches) == brute);
}

TEST_CASE("patch size and separation scale with H") {
  // On this mesh diam(D_j) <= 2 sqrt(2) H and dist(dD_j, dOmega_j) >= H / sqrt(2), H = 1/n,
  // with equality away from the boundary.
  for (int n : {4, 8, 16}) {
    const Setup s(2, n, 1);
    const double h = 1.0 / n;
    for (const Patch& p : s.patches.patches()) {
      double diam = 0.0;
      std::set<Index> verts;
      for (Index c : p.support_cells)
        for (Index v : s.coarse.cell(c)) verts.insert(v);
      for (Index a : verts)
        for (Index b : verts) {
          const Point& x = s.coarse.vertex(a);
          const Point& y = s.coarse.vertex(b);
          diam = std::max(diam, std::hypot(x[0] - y[0], x[1] - y[1]));
        }
      CHECK(diam <= 2 * std::sqrt(2.0) * h * (1 + 1e-12));

      const auto inner = inner_boundary(s.coarse, p.support_cells);
      const auto outer = inner_boundary(s.coarse, p.domain_cells);
      if (inner.empty() || outer.empty()) continue;
      const double dist = chain_distance(inner, outer);
      CHECK(dist >= h / std::sqrt(2.0) * (1 - 1e-12));
      const Point& x = s.coarse.vertex(p.vertex);
      if (std::min({x[0], x[1], 1 - x[0], 1 - x[1]}) > 2.5 * h)
        CHECK(dist == doctest::Approx(h / std::sqrt(2.0)).epsilon(1e-12));
    }
  }
}

TEST_CASE("mismatched meshes are rejected") {
  const Mesh coarse = Mesh::structured(2, 2);
  const auto [fine, map] = refine_uniform(coarse, 2);
  const Mesh other = Mesh::structured(2, 3);
  const FeSpace fs(fine);
  CHECK_THROWS_AS(PatchSet(other, fs, map), std::invalid_argument);
}
