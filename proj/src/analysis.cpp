#include "tgfem/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "tgfem/assembly.hpp"

namespace tgfem {

namespace {

void check_quadrature(const QuadratureRule& quad, const Mesh& mesh, const char* who) {
  if (quad.dim != mesh.dim()) throw std::invalid_argument(std::string(who) + ": quadrature dimension mismatch");
  if (quad.degree < 5) throw std::invalid_argument(std::string(who) + ": quadrature degree must be at least 5");
}

[[noreturn]] void not_finite(const char* who, const Point& x) {
  std::ostringstream msg;
  msg << who << ": exact field is not finite at (" << x[0] << ", " << x[1] << ", " << x[2] << ")";
  throw std::domain_error(msg.str());
}

// Per-cell integrals reduced in cell order.  `cell_integral` returns false on
// a non-finite field value and reports the offending point.
template <class F>
double integrate_cells(const Mesh& mesh, Execution exec, const char* who, F cell_integral) {
  const Index nc = mesh.num_cells();
  std::vector<double> per_cell(nc, 0.0);
  Index bad_cell = -1;
  Point bad_point{};
  int degenerate = 0;
#pragma omp parallel for schedule(static) if (exec == Execution::Parallel)
  for (Index c = 0; c < nc; ++c) {
    Point where{};
    bool ok = true;
    try {
      ok = cell_integral(c, per_cell[c], where);
    } catch (const std::domain_error&) {
#pragma omp atomic write
      degenerate = 1;
    }
    if (!ok) {
#pragma omp critical(tgfem_integrate_cells)
      if (bad_cell < 0 || c < bad_cell) {
        bad_cell = c;
        bad_point = where;
      }
    }
  }
  if (degenerate) throw std::domain_error(std::string(who) + ": degenerate cell in mesh");
  if (bad_cell >= 0) not_finite(who, bad_point);
  return std::sqrt(std::max(0.0, chunked_sum(per_cell, exec)));
}

void check_same_space(const FeFunction& a, const FeFunction& b, const char* who) {
  if (&a.space() != &b.space()) throw std::invalid_argument(std::string(who) + ": functions live on different spaces");
}

void check_order_inputs(double e0, double e1, double h) {
  if (!(e0 > 0.0) || !(e1 > 0.0)) throw std::domain_error("convergence order: errors must be positive");
  if (!(h > 0.0 && h < 1.0)) throw std::domain_error("convergence order: H must lie in (0, 1)");
}

}  // namespace

double h1_seminorm_error(const FeFunction& approx, const VectorField& exact_gradient,
                         const QuadratureRule& quad, Execution exec) {
  const Mesh& mesh = approx.space().mesh();
  check_quadrature(quad, mesh, "h1_seminorm_error");
  return integrate_cells(mesh, exec, "h1_seminorm_error", [&](Index c, double& out, Point& where) {
    const CellGeometry g = cell_geometry(mesh, c);
    const Gradient gh = gradient_on_cell(approx, g, c);
    double s = 0.0;
    for (std::size_t q = 0; q < quad.size(); ++q) {
      const Point x = g.map(quad.points[q]);
      const Gradient gu = exact_gradient(x);
      double e2 = 0.0;
      for (int a = 0; a < 3; ++a) e2 += (gu[a] - gh[a]) * (gu[a] - gh[a]);
      if (!std::isfinite(e2)) {
        where = x;
        return false;
      }
      s += quad.weights[q] * e2;
    }
    out = g.det * s;
    return true;
  });
}

double l2_error(const FeFunction& approx, const ScalarField& exact, const QuadratureRule& quad, Execution exec) {
  const Mesh& mesh = approx.space().mesh();
  check_quadrature(quad, mesh, "l2_error");
  return integrate_cells(mesh, exec, "l2_error", [&](Index c, double& out, Point& where) {
    const CellGeometry g = cell_geometry(mesh, c);
    const auto vs = mesh.cell(c);
    double nodal[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t k = 0; k < vs.size(); ++k) nodal[k] = approx.vertex_value(vs[k]);
    double s = 0.0;
    for (std::size_t q = 0; q < quad.size(); ++q) {
      const Point x = g.map(quad.points[q]);
      double uh = 0.0;
      for (std::size_t k = 0; k < vs.size(); ++k) uh += quad.points[q][k] * nodal[k];
      const double e = exact(x) - uh;
      if (!std::isfinite(e)) {
        where = x;
        return false;
      }
      s += quad.weights[q] * e * e;
    }
    out = g.det * s;
    return true;
  });
}

double h1_seminorm_distance(const FeFunction& a, const FeFunction& b, Execution exec) {
  check_same_space(a, b, "h1_seminorm_distance");
  const Mesh& mesh = a.space().mesh();
  return integrate_cells(mesh, exec, "h1_seminorm_distance", [&](Index c, double& out, Point&) {
    const CellGeometry g = cell_geometry(mesh, c);
    const Gradient ga = gradient_on_cell(a, g, c);
    const Gradient gb = gradient_on_cell(b, g, c);
    double e2 = 0.0;
    for (int k = 0; k < 3; ++k) e2 += (ga[k] - gb[k]) * (ga[k] - gb[k]);
    out = g.volume * e2;
    return true;
  });
}

double l2_distance(const FeFunction& a, const FeFunction& b, Execution exec) {
  check_same_space(a, b, "l2_distance");
  const Mesh& mesh = a.space().mesh();
  const QuadratureRule& quad = QuadratureRule::get(mesh.dim(), 2);
  return integrate_cells(mesh, exec, "l2_distance", [&](Index c, double& out, Point&) {
    const CellGeometry g = cell_geometry(mesh, c);
    const auto vs = mesh.cell(c);
    double d[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t k = 0; k < vs.size(); ++k) d[k] = a.vertex_value(vs[k]) - b.vertex_value(vs[k]);
    double s = 0.0;
    for (std::size_t q = 0; q < quad.size(); ++q) {
      double e = 0.0;
      for (std::size_t k = 0; k < vs.size(); ++k) e += quad.points[q][k] * d[k];
      s += quad.weights[q] * e * e;
    }
    out = g.det * s;
    return true;
  });
}

double distance(const FeFunction& a, const FeFunction& b, NormKind norm, Execution exec) {
  return norm == NormKind::H1 ? h1_seminorm_distance(a, b, exec) : l2_distance(a, b, exec);
}

double order1(double err_coarse, double err_final, double coarse_h, NormKind norm) {
  check_order_inputs(err_coarse, err_final, coarse_h);
  const double base = norm == NormKind::H1 ? 1.0 : 2.0;
  return base + std::log(err_coarse / err_final) / std::abs(std::log(coarse_h));
}

double order2(double err_ref_coarse, double err_ref_final, double coarse_h, NormKind norm) {
  const double cap = norm == NormKind::H1 ? 2.0 : 3.0;
  return std::min(cap, order1(err_ref_coarse, err_ref_final, coarse_h, norm));
}

FeFunction solve_fine_reference(const Problem& problem, const FeSpace& fine_space, int load_degree,
                                double rel_tol, Execution exec) {
  const SparseMatrix a = assemble_stiffness(fine_space, exec);
  const std::vector<double> b =
      assemble_load(fine_space, problem.f, QuadratureRule::get(fine_space.mesh().dim(), load_degree), exec);
  SolveResult r = solve_spd(a, b, {rel_tol, 0, exec});
  return FeFunction(fine_space, std::move(r.x));
}

FeFunction solve_fine_reference(const Discretization& disc) {
  SolveResult r = solve_spd(disc.fine_stiffness(), disc.fine_load(), disc.solver_options(disc.options().exec));
  return FeFunction(disc.fine_space(), std::move(r.x));
}

}  // namespace tgfem
