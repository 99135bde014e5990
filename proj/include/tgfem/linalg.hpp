#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tgfem/mesh.hpp"

namespace tgfem {

/// Whether a kernel may fan out over OpenMP threads.  Both settings produce
/// bit-identical results: reductions always use the same fixed chunking.
enum class Execution { Serial, Parallel };

/// Compressed sparse row matrix.  Column indices are strictly increasing in
/// every row and no explicit zeros are stored.
class SparseMatrix {
 public:
  SparseMatrix() = default;

  /// Validates the CSR invariants and drops stored zeros.
  static SparseMatrix from_csr(Index rows, Index cols, std::vector<std::int64_t> offsets,
                               std::vector<Index> columns, std::vector<double> values);
  static SparseMatrix identity(Index n);
  /// Builds from (row, col, value) triplets; duplicates are summed.
  static SparseMatrix from_triplets(Index rows, Index cols, std::vector<Index> r,
                                    std::vector<Index> c, std::vector<double> v);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  std::int64_t nnz() const { return static_cast<std::int64_t>(values_.size()); }

  std::span<const std::int64_t> offsets() const { return offsets_; }
  std::span<const Index> columns() const { return columns_; }
  std::span<const double> values() const { return values_; }

  std::span<const Index> row_columns(Index i) const {
    return {columns_.data() + offsets_[i], static_cast<std::size_t>(offsets_[i + 1] - offsets_[i])};
  }
  std::span<const double> row_values(Index i) const {
    return {values_.data() + offsets_[i], static_cast<std::size_t>(offsets_[i + 1] - offsets_[i])};
  }

  /// Entry (i, j), zero when not stored.
  double at(Index i, Index j) const;
  std::vector<double> diagonal() const;
  SparseMatrix transpose() const;

  /// Principal submatrix on `indices` (ascending).  `scratch` must have
  /// length cols() and be filled with -1; it is restored before returning.
  SparseMatrix principal_submatrix(std::span<const Index> indices, std::span<Index> scratch) const;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<std::int64_t> offsets_{0};
  std::vector<Index> columns_;
  std::vector<double> values_;
};

void spmv(const SparseMatrix& a, std::span<const double> x, std::span<double> y,
          Execution exec = Execution::Parallel);
std::vector<double> spmv(const SparseMatrix& a, std::span<const double> x,
                         Execution exec = Execution::Parallel);

/// Chunked dot product: partial sums over fixed 4096-entry blocks, combined in
/// block order.  Independent of the thread count.
double dot(std::span<const double> x, std::span<const double> y,
           Execution exec = Execution::Parallel);
double norm2(std::span<const double> x, Execution exec = Execution::Parallel);

/// Sum with the same fixed chunking as dot().
double chunked_sum(std::span<const double> x, Execution exec = Execution::Parallel);

struct SolverOptions {
  double rel_tol = 1e-12;
  /// 0 selects 20 * n.
  int max_iterations = 0;
  Execution exec = Execution::Parallel;
};

struct SolveResult {
  std::vector<double> x;
  int iterations = 0;
  /// ||b - A x|| / ||b|| evaluated with the true residual (0 when b = 0).
  double relative_residual = 0.0;
};

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, int iterations, double residual)
      : std::runtime_error(what), iterations_(iterations), residual_(residual) {}
  int iterations() const { return iterations_; }
  double relative_residual() const { return residual_; }

 private:
  int iterations_;
  double residual_;
};

/// Jacobi-preconditioned conjugate gradients for SPD systems.
///
/// Returns once the true residual satisfies ||b - A x|| <= rel_tol ||b||, or
/// once it reaches the rounding floor 256 eps (||A||_inf ||x|| + ||b||), below
/// which no iterate can be resolved in double precision.  When the recursively
/// updated residual converges but the true one does not, the iteration
/// restarts from the current iterate.
SolveResult solve_spd(const SparseMatrix& a, std::span<const double> b,
                      const SolverOptions& options = {});

}  // namespace tgfem
