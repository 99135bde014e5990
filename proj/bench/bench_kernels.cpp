// Production kernels (serial and OpenMP) against the single-threaded reference
// versions.  Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <map>
#include <memory>
#include <random>

#include "tgfem/assembly.hpp"
#include "tgfem/reference.hpp"
#include "tgfem/twogrid.hpp"

using namespace tgfem;

namespace {

std::vector<double> random_vector(std::size_t n) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> x(n);
  for (double& v : x) v = u(rng);
  return x;
}

// Fine space of a 2-D mesh with n subdivisions per side.
struct Grid {
  Mesh mesh;
  FeSpace space;
  SparseMatrix a;
  std::vector<double> x;

  explicit Grid(int n)
      : mesh(Mesh::structured(2, n)), space(mesh), a(assemble_stiffness(space)), x(random_vector(space.num_free())) {}
};

const Grid& grid(int n) {
  static std::map<int, std::unique_ptr<Grid>> cache;
  auto& g = cache[n];
  if (!g) g = std::make_unique<Grid>(n);
  return *g;
}

const Discretization& discretization() {
  static const Discretization disc(problems::get("example1", 2), 8, 16);
  return disc;
}

void BM_SpmvReference(benchmark::State& state) {
  const Grid& g = grid(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(reference::spmv(g.a, g.x));
}

void BM_Spmv(benchmark::State& state, Execution exec) {
  const Grid& g = grid(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(spmv(g.a, g.x, exec));
}

void BM_DotReference(benchmark::State& state) {
  const Grid& g = grid(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(reference::dot(g.x, g.x));
}

void BM_Dot(benchmark::State& state, Execution exec) {
  const Grid& g = grid(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(dot(g.x, g.x, exec));
}

void BM_AssembleReference(benchmark::State& state) {
  const Grid& g = grid(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(reference::assemble_stiffness(g.space));
}

void BM_Assemble(benchmark::State& state, Execution exec) {
  const Grid& g = grid(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_stiffness(g.space, exec));
}

void BM_LocalSolvesReference(benchmark::State& state) {
  const Discretization& disc = discretization();
  const FeFunction u = disc.prolongation().apply(solve_coarse(disc));
  for (auto _ : state) benchmark::DoNotOptimize(reference::local_solve_all(disc, u));
}

void BM_LocalSolves(benchmark::State& state, Execution exec) {
  const Discretization& disc = discretization();
  const FeFunction u = disc.prolongation().apply(solve_coarse(disc));
  for (auto _ : state) benchmark::DoNotOptimize(local_solve_all(disc, u, exec));
}

}  // namespace

BENCHMARK(BM_SpmvReference)->Arg(256)->Arg(1024);
BENCHMARK_CAPTURE(BM_Spmv, serial, Execution::Serial)->Arg(256)->Arg(1024);
BENCHMARK_CAPTURE(BM_Spmv, parallel, Execution::Parallel)->Arg(256)->Arg(1024);
BENCHMARK(BM_DotReference)->Arg(1024);
BENCHMARK_CAPTURE(BM_Dot, serial, Execution::Serial)->Arg(1024);
BENCHMARK_CAPTURE(BM_Dot, parallel, Execution::Parallel)->Arg(1024);
BENCHMARK(BM_AssembleReference)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Assemble, serial, Execution::Serial)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Assemble, parallel, Execution::Parallel)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LocalSolvesReference)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_LocalSolves, serial, Execution::Serial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_LocalSolves, parallel, Execution::Parallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
