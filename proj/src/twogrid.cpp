#include "tgfem/twogrid.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace tgfem {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Patches solved between two ordered reductions.
constexpr Index kPatchBatch = 256;

std::vector<double> add(std::span<const double> a, std::span<const double> b) {
  std::vector<double> c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] + b[i];
  return c;
}

}  // namespace

Discretization::Discretization(Problem problem, int coarse_n, int ratio, DiscretizationOptions options)
    : problem_(std::move(problem)),
      options_(options),
      load_quad_(&QuadratureRule::get(problem_.dim, options.load_degree)),
      coarse_mesh_(Mesh::structured(problem_.dim, coarse_n)),
      refined_(refine_uniform(coarse_mesh_, ratio)),
      coarse_space_(coarse_mesh_),
      fine_space_(refined_.first),
      prolongation_(coarse_space_, fine_space_, refined_.second),
      coarse_stiffness_(assemble_stiffness(coarse_space_, options.exec)),
      fine_stiffness_(assemble_stiffness(fine_space_, options.exec)),
      coarse_load_(assemble_load(coarse_space_, problem_.f, *load_quad_, options.exec)),
      fine_load_(assemble_load(fine_space_, problem_.f, *load_quad_, options.exec)),
      patches_(coarse_mesh_, fine_space_, refined_.second, options.exec) {}

int IterationConfig::resolved_max_iterations(int dim, double coarse_h) const {
  if (!k_formula) {
    if (max_iterations < 1) throw std::invalid_argument("IterationConfig: max_iterations must be >= 1");
    return max_iterations;
  }
  if (!(k_constant > 0.0)) throw std::invalid_argument("IterationConfig: k_constant must be positive");
  const double log_h = std::abs(std::log(coarse_h));
  const double alpha = dim == 2 ? k_constant / (log_h * log_h) : k_constant / log_h;
  const int k = static_cast<int>(std::floor(1.0 / alpha + 0.5));
  // The sweep stops once k+1 > K, i.e. after K+1 sweeps.
  return std::max(k + 1, 1);
}

double energy_norm(const Discretization& disc, std::span<const double> fine_coefficients) {
  const std::vector<double> av = spmv(disc.fine_stiffness(), fine_coefficients, disc.options().exec);
  return std::sqrt(std::max(0.0, dot(fine_coefficients, av, disc.options().exec)));
}

FeFunction solve_coarse(const Discretization& disc) {
  SolveResult r = solve_spd(disc.coarse_stiffness(), disc.coarse_load(),
                            disc.solver_options(disc.options().exec));
  return FeFunction(disc.coarse_space(), std::move(r.x));
}

FeFunction local_solve_all(const Discretization& disc, const FeFunction& iterate, Execution exec) {
  const FeSpace& fine = disc.fine_space();
  if (&iterate.space() != &fine)
    throw std::invalid_argument("local_solve_all: iterate is not on the fine space");

  const PatchSet& patches = disc.patches();
  const SparseMatrix& a = disc.fine_stiffness();
  const Problem& problem = disc.problem();
  const QuadratureRule& quad = disc.load_quadrature();
  const SolverOptions local_opts = disc.solver_options(Execution::Serial);
  const Index n_patches = static_cast<Index>(patches.size());
  const bool parallel = exec == Execution::Parallel;
  const int n_threads = parallel ? omp_get_max_threads() : 1;

  const bool interpolated = disc.options().local_rhs == LocalRhs::Interpolated;
  std::vector<double> residual;
  if (interpolated) {
    residual = spmv(a, iterate.coefficients(), exec);
    for (std::size_t i = 0; i < residual.size(); ++i) residual[i] = disc.fine_load()[i] - residual[i];
  }

  std::vector<std::vector<Index>> scratch(n_threads);
  std::vector<std::vector<double>> solutions(std::min(kPatchBatch, n_patches));
  FeFunction w(fine);
  auto& wv = w.values();

  for (Index start = 0; start < n_patches; start += kPatchBatch) {
    const Index stop = std::min(n_patches, start + kPatchBatch);
    Index failed = -1;
    std::string failure;

#pragma omp parallel for schedule(dynamic, 1) num_threads(n_threads) if (parallel)
    for (Index j = start; j < stop; ++j) {
      auto& map = scratch[omp_get_thread_num()];
      if (map.empty()) map.assign(fine.num_free(), -1);
      const Patch& patch = patches[j];
      try {
        const std::vector<double> rhs = interpolated
                                            ? assemble_local_rhs_interpolated(patches, patch, residual)
                                            : assemble_local_rhs(patches, patch, iterate, problem.f, quad);
        const SparseMatrix local = a.principal_submatrix(patch.local_to_global, map);
        solutions[j - start] = solve_spd(local, rhs, local_opts).x;
      } catch (const std::exception& e) {
#pragma omp critical(tgfem_patch_failure)
        if (failed < 0 || j < failed) {
          failed = j;
          failure = e.what();
        }
      }
    }
    if (failed >= 0)
      throw SolverError("local solve failed on patch " + std::to_string(failed) + ": " + failure, 0,
                        std::numeric_limits<double>::quiet_NaN());

    // Superposition in ascending patch order.
    for (Index j = start; j < stop; ++j) {
      const auto& l2g = patches[j].local_to_global;
      const auto& x = solutions[j - start];
      for (std::size_t l = 0; l < l2g.size(); ++l) wv[l2g[l]] += x[l];
    }
  }
  return w;
}

FeFunction coarse_correction(const Discretization& disc, const FeFunction& u_hh) {
  if (&u_hh.space() != &disc.fine_space())
    throw std::invalid_argument("coarse_correction: u_HH is not on the fine space");
  const Execution exec = disc.options().exec;
  const std::vector<double> rhs =
      restrict_residual(disc.fine_stiffness(), u_hh, disc.fine_load(), disc.prolongation(), exec);
  SolveResult r = solve_spd(disc.coarse_stiffness(), rhs, disc.solver_options(exec));
  return FeFunction(disc.coarse_space(), std::move(r.x));
}

TwoGridState iterate(const Discretization& disc, const IterationConfig& config,
                     const IterationObserver& observer) {
  const int max_iter = config.resolved_max_iterations(disc.dim(), disc.coarse_h());
  const FeSpace& fine = disc.fine_space();
  const Prolongation& p = disc.prolongation();

  FeFunction u_coarse = solve_coarse(disc);
  FeFunction current = p.apply(u_coarse);
  TwoGridState state{u_coarse,     current,      FeFunction(fine), FeFunction(disc.coarse_space()),
                     current,      current,      current,          {}};

  for (int k = 0; k < max_iter; ++k) {
    IterationRecord record;
    record.iteration = k + 1;

    auto t0 = Clock::now();
    FeFunction w = local_solve_all(disc, current, config.exec);
    record.step1_seconds = seconds_since(t0);
    FeFunction intermediate(fine, add(current.coefficients(), w.coefficients()));

    t0 = Clock::now();
    FeFunction e = coarse_correction(disc, intermediate);
    record.step2_seconds = seconds_since(t0);
    const FeFunction pe = p.apply(e);
    FeFunction next(fine, add(intermediate.coefficients(), pe.coefficients()));

    record.local_correction_h1 = energy_norm(disc, w.coefficients());
    record.coarse_correction_h1 = energy_norm(disc, pe.coefficients());
    std::vector<double> diff(next.coefficients().size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = next.coefficients()[i] - current.coefficients()[i];
    const double change = energy_norm(disc, diff);
    const double size = energy_norm(disc, next.coefficients());
    record.relative_change = size > 0.0 ? change / size : (change > 0.0 ? INFINITY : 0.0);
    if (!std::isfinite(record.local_correction_h1) || !std::isfinite(record.coarse_correction_h1) ||
        std::isnan(record.relative_change))
      throw SolverError("two-grid iteration produced non-finite norms", k + 1, NAN);

    if (k == 0) state.first_intermediate = intermediate;
    state.iterate_in = std::move(current);
    state.w_hat = std::move(w);
    state.coarse_correction = std::move(e);
    state.intermediate = std::move(intermediate);
    state.final_solution = next;
    if (observer) observer(record, next);
    state.history.push_back(record);
    current = std::move(next);

    if (record.relative_change < config.stop_rel_change) break;
  }
  return state;
}

}  // namespace tgfem
