#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "tgfem/assembly.hpp"
#include "tgfem/linalg.hpp"
#include "tgfem/mesh.hpp"
#include "tgfem/patches.hpp"
#include "tgfem/problems.hpp"
#include "tgfem/space.hpp"

namespace tgfem {

struct DiscretizationOptions {
  /// Quadrature degree for (f, v) and (f, phi_j v).
  int load_degree = 4;
  /// Relative residual tolerance for every linear solve.
  double solver_rel_tol = 1e-12;
  LocalRhs local_rhs = LocalRhs::Interpolated;
  Execution exec = Execution::Parallel;
};

/// Everything the two-grid scheme needs for one (H, h) pair: nested meshes and
/// spaces, assembled coarse and fine operators, fine load, and the patches.
/// Holds internal references, so it is neither copyable nor movable.
class Discretization {
 public:
  Discretization(Problem problem, int coarse_n, int ratio, DiscretizationOptions options = {});
  Discretization(const Discretization&) = delete;
  Discretization& operator=(const Discretization&) = delete;

  const Problem& problem() const { return problem_; }
  const DiscretizationOptions& options() const { return options_; }
  int dim() const { return problem_.dim; }
  int coarse_n() const { return coarse_mesh_.subdivisions(); }
  int ratio() const { return refined_.second.ratio; }
  /// Coarse mesh size H = 1/coarse_n.
  double coarse_h() const { return 1.0 / coarse_n(); }

  const Mesh& coarse_mesh() const { return coarse_mesh_; }
  const Mesh& fine_mesh() const { return refined_.first; }
  const RefinementMap& map() const { return refined_.second; }
  const FeSpace& coarse_space() const { return coarse_space_; }
  const FeSpace& fine_space() const { return fine_space_; }
  const Prolongation& prolongation() const { return prolongation_; }
  const SparseMatrix& coarse_stiffness() const { return coarse_stiffness_; }
  const SparseMatrix& fine_stiffness() const { return fine_stiffness_; }
  std::span<const double> coarse_load() const { return coarse_load_; }
  std::span<const double> fine_load() const { return fine_load_; }
  const PatchSet& patches() const { return patches_; }
  const QuadratureRule& load_quadrature() const { return *load_quad_; }

  SolverOptions solver_options(Execution exec) const { return {options_.solver_rel_tol, 0, exec}; }

 private:
  Problem problem_;
  DiscretizationOptions options_;
  const QuadratureRule* load_quad_;
  Mesh coarse_mesh_;
  std::pair<Mesh, RefinementMap> refined_;
  FeSpace coarse_space_;
  FeSpace fine_space_;
  Prolongation prolongation_;
  SparseMatrix coarse_stiffness_;
  SparseMatrix fine_stiffness_;
  std::vector<double> coarse_load_;
  std::vector<double> fine_load_;
  PatchSet patches_;
};

struct IterationConfig {
  int max_iterations = 5;
  /// Stop once ||grad(u^{k+1} - u^k)|| / ||grad u^{k+1}|| falls below this.
  double stop_rel_change = 1e-10;
  /// Derive the iteration count from K = [1/alpha_d + 0.5] with
  /// alpha_2 = c/|ln H|^2 and alpha_3 = c/|ln H|, running K+1 sweeps.
  bool k_formula = false;
  double k_constant = 1.0;
  Execution exec = Execution::Parallel;

  int resolved_max_iterations(int dim, double coarse_h) const;
};

struct IterationRecord {
  int iteration = 0;
  /// ||grad w_hat|| of the superposed local corrections.
  double local_correction_h1 = 0.0;
  /// ||grad E_H|| of the coarse correction.
  double coarse_correction_h1 = 0.0;
  double relative_change = 0.0;
  double step1_seconds = 0.0;
  double step2_seconds = 0.0;
  /// Filled by an observer, e.g. the H1 distance to the fine reference.
  double observed = 0.0;
};

struct TwoGridState {
  /// Step 0 coarse Galerkin solution u_H.
  FeFunction coarse_solution;
  /// Iterate fed into the last sweep (on the fine space).
  FeFunction iterate_in;
  FeFunction w_hat;
  FeFunction coarse_correction;
  /// u_{H,h} = iterate_in + w_hat of the last sweep.
  FeFunction intermediate;
  /// u_{H,h} of the first sweep.
  FeFunction first_intermediate;
  /// u_H^h = intermediate + P E_H.
  FeFunction final_solution;
  std::vector<IterationRecord> history;

  int iterations() const { return static_cast<int>(history.size()); }
};

/// Called after each sweep with the new iterate; may fill record.observed.
using IterationObserver = std::function<void(IterationRecord&, const FeFunction&)>;

/// Step 0: coarse Galerkin solution.
FeFunction solve_coarse(const Discretization& disc);

/// Step 1: solve every local residual problem and superpose the zero-extended
/// corrections in ascending patch order.  Patch solves run concurrently under
/// Execution::Parallel; the result is bit-identical to the serial run.
FeFunction local_solve_all(const Discretization& disc, const FeFunction& iterate,
                           Execution exec = Execution::Parallel);

/// Step 2: coarse correction E_H with a(E_H, v) = (f, v) - a(u_HH, v).
FeFunction coarse_correction(const Discretization& disc, const FeFunction& u_hh);

/// Steps 0-2, repeated until the iteration budget or the relative-change stop.
TwoGridState iterate(const Discretization& disc, const IterationConfig& config,
                     const IterationObserver& observer = {});

/// ||grad v|| for a fine-space function via the assembled fine stiffness.
double energy_norm(const Discretization& disc, std::span<const double> fine_coefficients);

}  // namespace tgfem
