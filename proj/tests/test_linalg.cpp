#include <doctest.h>
#include <omp.h>

#include <cstring>

#include "helpers.hpp"
#include "tgfem/assembly.hpp"
#include "tgfem/linalg.hpp"
#include "tgfem/reference.hpp"

using namespace tgfem;

namespace {

bool bitwise_equal(std::span<const double> a, std::span<const double> b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

SparseMatrix laplacian_1d(Index n) {
  std::vector<Index> r, c;
  std::vector<double> v;
  for (Index i = 0; i < n; ++i) {
    r.push_back(i), c.push_back(i), v.push_back(2.0);
    if (i > 0) r.push_back(i), c.push_back(i - 1), v.push_back(-1.0);
    if (i + 1 < n) r.push_back(i), c.push_back(i + 1), v.push_back(-1.0);
  }
  return SparseMatrix::from_triplets(n, n, r, c, v);
}

}  // namespace

TEST_CASE("CSR construction validates and drops zeros") {
  const SparseMatrix a = SparseMatrix::from_csr(2, 2, {0, 2, 3}, {0, 1, 1}, {4.0, 0.0, 5.0});
  CHECK(a.nnz() == 2);
  CHECK(a.at(0, 0) == 4.0);
  CHECK(a.at(0, 1) == 0.0);
  CHECK(a.at(1, 1) == 5.0);
  CHECK_THROWS_AS(SparseMatrix::from_csr(2, 2, {0, 2, 1}, {0, 1, 1}, {1.0, 1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(SparseMatrix::from_csr(2, 2, {0, 2, 3}, {1, 0, 1}, {1.0, 1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(SparseMatrix::from_csr(2, 2, {0, 1, 2}, {0, 2}, {1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("triplets sum duplicates; transpose and identity") {
  const SparseMatrix a = SparseMatrix::from_triplets(2, 3, {0, 0, 1, 0}, {2, 0, 1, 2}, {1.0, 2.0, 3.0, 4.0});
  CHECK(a.at(0, 2) == 5.0);
  CHECK(a.at(0, 0) == 2.0);
  const SparseMatrix t = a.transpose();
  CHECK(t.rows() == 3);
  CHECK(t.at(2, 0) == 5.0);
  CHECK(t.at(1, 1) == 3.0);
  const SparseMatrix i = SparseMatrix::identity(3);
  const std::vector<double> x{1.0, 2.0, 3.0};
  CHECK(spmv(i, x) == x);
}

TEST_CASE("spmv and dot agree with textbook versions") {
  std::mt19937_64 rng(7);
  const SparseMatrix a = laplacian_1d(10000);
  const auto x = testing::random_vector(rng, 10000);
  const auto y = spmv(a, x);
  const auto y_ref = reference::spmv(a, x);
  CHECK(bitwise_equal(y, y_ref));
  const double d = dot(x, y);
  CHECK(d == doctest::Approx(reference::dot(x, y)).epsilon(1e-12));
  CHECK_THROWS_AS(dot(x, std::vector<double>(3)), std::invalid_argument);
}

TEST_CASE("reductions are independent of the thread count") {
  std::mt19937_64 rng(11);
  const auto x = testing::random_vector(rng, 100003);
  const auto y = testing::random_vector(rng, 100003);
  omp_set_num_threads(1);
  const double d1 = dot(x, y, Execution::Parallel);
  const double s1 = chunked_sum(x, Execution::Parallel);
  omp_set_num_threads(8);
  const double d8 = dot(x, y, Execution::Parallel);
  const double s8 = chunked_sum(x, Execution::Parallel);
  const double ds = dot(x, y, Execution::Serial);
  CHECK(std::memcmp(&d1, &d8, sizeof d1) == 0);
  CHECK(std::memcmp(&d1, &ds, sizeof d1) == 0);
  CHECK(std::memcmp(&s1, &s8, sizeof s1) == 0);
}

TEST_CASE("CG solves an SPD system") {
  const Index n = 200;
  const SparseMatrix a = laplacian_1d(n);
  std::mt19937_64 rng(3);
  const auto x_true = testing::random_vector(rng, n);
  const auto b = spmv(a, x_true);
  const SolveResult r = solve_spd(a, b);
  CHECK(r.relative_residual <= 1e-12);
  CHECK(r.iterations > 0);
  double err = 0.0;
  for (Index i = 0; i < n; ++i) err = std::max(err, std::abs(r.x[i] - x_true[i]));
  CHECK(err < 1e-8);
}

TEST_CASE("CG edge cases") {
  const SparseMatrix a = laplacian_1d(5);
  const SolveResult zero = solve_spd(a, std::vector<double>(5, 0.0));
  CHECK(zero.x == std::vector<double>(5, 0.0));
  CHECK(zero.iterations == 0);

  const SparseMatrix indefinite = SparseMatrix::from_triplets(2, 2, {0, 1}, {0, 1}, {1.0, -1.0});
  CHECK_THROWS_AS(solve_spd(indefinite, std::vector<double>{1.0, 1.0}), SolverError);

  const SparseMatrix singular = SparseMatrix::from_triplets(2, 2, {0}, {0}, {1.0});
  CHECK_THROWS(solve_spd(singular, std::vector<double>{1.0, 1.0}));

  CHECK_THROWS_AS(solve_spd(a, std::vector<double>(4, 1.0)), std::invalid_argument);

  // budget too small to converge
  CHECK_THROWS_AS(solve_spd(laplacian_1d(500), std::vector<double>(500, 1.0), {1e-12, 3, Execution::Serial}),
                  SolverError);
}

TEST_CASE("CG stops at the rounding floor when the tolerance is out of reach") {
  const Index n = 2000;
  const SparseMatrix a = laplacian_1d(n);
  std::mt19937_64 rng(9);
  const auto b = testing::random_vector(rng, n);
  const SolveResult r = solve_spd(a, b, {1e-17, 0, Execution::Serial});
  const auto ax = spmv(a, r.x);
  double res = 0.0;
  for (Index i = 0; i < n; ++i) res += (b[i] - ax[i]) * (b[i] - ax[i]);
  // ||A||_inf = 4
  const double floor = 256 * std::numeric_limits<double>::epsilon() * (4 * norm2(r.x) + norm2(b));
  CHECK(std::sqrt(res) <= floor);
  CHECK(r.relative_residual == doctest::Approx(std::sqrt(res) / norm2(b)));
}

TEST_CASE("CG is bit-identical across execution modes and thread counts") {
  const Mesh m = Mesh::structured(2, 80);
  const FeSpace s(m);
  const SparseMatrix a = assemble_stiffness(s);
  std::vector<double> b(s.num_free(), 1.0);
  omp_set_num_threads(1);
  const auto x1 = solve_spd(a, b, {1e-12, 0, Execution::Parallel}).x;
  omp_set_num_threads(8);
  const auto x8 = solve_spd(a, b, {1e-12, 0, Execution::Parallel}).x;
  const auto xs = solve_spd(a, b, {1e-12, 0, Execution::Serial}).x;
  CHECK(bitwise_equal(x1, x8));
  CHECK(bitwise_equal(x1, xs));
}

TEST_CASE("principal submatrix") {
  const SparseMatrix a = laplacian_1d(6);
  std::vector<Index> scratch(6, -1);
  const std::vector<Index> idx{1, 2, 4};
  const SparseMatrix sub = a.principal_submatrix(idx, scratch);
  CHECK(sub.rows() == 3);
  CHECK(sub.at(0, 0) == 2.0);
  CHECK(sub.at(0, 1) == -1.0);
  CHECK(sub.at(1, 2) == 0.0);
  CHECK(sub.at(2, 2) == 2.0);
  CHECK(std::all_of(scratch.begin(), scratch.end(), [](Index v) { return v == -1; }));
}
