#include "tgfem/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace tgfem {

namespace {

constexpr std::size_t kDotChunk = 4096;
// Below this many rows the OpenMP fork costs more than it saves.
constexpr Index kParallelRows = 2048;

bool go_parallel(Execution exec, std::size_t n) {
  return exec == Execution::Parallel && n >= static_cast<std::size_t>(kParallelRows);
}

void check_dims(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

}  // namespace

SparseMatrix SparseMatrix::from_csr(Index rows, Index cols, std::vector<std::int64_t> offsets,
                                    std::vector<Index> columns, std::vector<double> values) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("SparseMatrix: negative size");
  if (offsets.size() != static_cast<std::size_t>(rows) + 1 || offsets.front() != 0 ||
      offsets.back() != static_cast<std::int64_t>(columns.size()) || columns.size() != values.size())
    throw std::invalid_argument("SparseMatrix: inconsistent CSR arrays");
  for (Index i = 0; i < rows; ++i) {
    if (offsets[i + 1] < offsets[i]) throw std::invalid_argument("SparseMatrix: offsets not monotone");
    for (std::int64_t k = offsets[i]; k < offsets[i + 1]; ++k) {
      if (columns[k] < 0 || columns[k] >= cols)
        throw std::invalid_argument("SparseMatrix: column index out of range");
      if (k > offsets[i] && columns[k] <= columns[k - 1])
        throw std::invalid_argument("SparseMatrix: columns not strictly increasing in row " +
                                    std::to_string(i));
    }
  }

  SparseMatrix m;
  m.rows_ = rows;
  m.cols_ = cols;
  const bool has_zero = std::any_of(values.begin(), values.end(), [](double v) { return v == 0.0; });
  if (!has_zero) {
    m.offsets_ = std::move(offsets);
    m.columns_ = std::move(columns);
    m.values_ = std::move(values);
    return m;
  }
  m.offsets_.assign(rows + 1, 0);
  m.columns_.reserve(columns.size());
  m.values_.reserve(values.size());
  for (Index i = 0; i < rows; ++i) {
    for (std::int64_t k = offsets[i]; k < offsets[i + 1]; ++k)
      if (values[k] != 0.0) {
        m.columns_.push_back(columns[k]);
        m.values_.push_back(values[k]);
      }
    m.offsets_[i + 1] = static_cast<std::int64_t>(m.values_.size());
  }
  return m;
}

SparseMatrix SparseMatrix::identity(Index n) {
  std::vector<std::int64_t> offsets(n + 1);
  std::iota(offsets.begin(), offsets.end(), 0);
  std::vector<Index> columns(n);
  std::iota(columns.begin(), columns.end(), 0);
  return from_csr(n, n, std::move(offsets), std::move(columns), std::vector<double>(n, 1.0));
}

SparseMatrix SparseMatrix::from_triplets(Index rows, Index cols, std::vector<Index> r,
                                         std::vector<Index> c, std::vector<double> v) {
  if (r.size() != c.size() || r.size() != v.size())
    throw std::invalid_argument("SparseMatrix::from_triplets: array lengths differ");
  std::vector<std::size_t> order(r.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return r[a] != r[b] ? r[a] < r[b] : c[a] < c[b];
  });
  std::vector<std::int64_t> offsets(rows + 1, 0);
  std::vector<Index> columns;
  std::vector<double> values;
  for (std::size_t k = 0; k < order.size();) {
    const std::size_t i = order[k];
    if (r[i] < 0 || r[i] >= rows) throw std::invalid_argument("from_triplets: row out of range");
    double sum = 0.0;
    std::size_t j = k;
    while (j < order.size() && r[order[j]] == r[i] && c[order[j]] == c[i]) sum += v[order[j++]];
    columns.push_back(c[i]);
    values.push_back(sum);
    ++offsets[r[i] + 1];
    k = j;
  }
  for (Index i = 0; i < rows; ++i) offsets[i + 1] += offsets[i];
  return from_csr(rows, cols, std::move(offsets), std::move(columns), std::move(values));
}

double SparseMatrix::at(Index i, Index j) const {
  const auto cs = row_columns(i);
  const auto it = std::lower_bound(cs.begin(), cs.end(), j);
  if (it == cs.end() || *it != j) return 0.0;
  return values_[offsets_[i] + (it - cs.begin())];
}

std::vector<double> SparseMatrix::diagonal() const {
  std::vector<double> d(std::min(rows_, cols_), 0.0);
  for (Index i = 0; i < static_cast<Index>(d.size()); ++i) d[i] = at(i, i);
  return d;
}

SparseMatrix SparseMatrix::transpose() const {
  std::vector<std::int64_t> offsets(cols_ + 1, 0);
  for (Index c : columns_) ++offsets[c + 1];
  for (Index j = 0; j < cols_; ++j) offsets[j + 1] += offsets[j];
  std::vector<Index> columns(columns_.size());
  std::vector<double> values(values_.size());
  std::vector<std::int64_t> fill(offsets.begin(), offsets.end() - 1);
  for (Index i = 0; i < rows_; ++i)
    for (std::int64_t k = offsets_[i]; k < offsets_[i + 1]; ++k) {
      const std::int64_t dst = fill[columns_[k]]++;
      columns[dst] = i;
      values[dst] = values_[k];
    }
  return from_csr(cols_, rows_, std::move(offsets), std::move(columns), std::move(values));
}

SparseMatrix SparseMatrix::principal_submatrix(std::span<const Index> indices,
                                               std::span<Index> scratch) const {
  check_dims(scratch.size() == static_cast<std::size_t>(cols_), "principal_submatrix");
  const Index n = static_cast<Index>(indices.size());
  for (Index l = 0; l < n; ++l) scratch[indices[l]] = l;
  std::vector<std::int64_t> offsets(n + 1, 0);
  std::vector<Index> columns;
  std::vector<double> values;
  for (Index l = 0; l < n; ++l) {
    const Index g = indices[l];
    for (std::int64_t k = offsets_[g]; k < offsets_[g + 1]; ++k) {
      const Index lc = scratch[columns_[k]];
      if (lc >= 0) {
        columns.push_back(lc);
        values.push_back(values_[k]);
      }
    }
    offsets[l + 1] = static_cast<std::int64_t>(columns.size());
  }
  for (Index g : indices) scratch[g] = -1;
  return from_csr(n, n, std::move(offsets), std::move(columns), std::move(values));
}

void spmv(const SparseMatrix& a, std::span<const double> x, std::span<double> y, Execution exec) {
  check_dims(x.size() == static_cast<std::size_t>(a.cols()) &&
                 y.size() == static_cast<std::size_t>(a.rows()),
             "spmv");
  const auto off = a.offsets();
  const auto col = a.columns();
  const auto val = a.values();
  const Index n = a.rows();
#pragma omp parallel for schedule(static) if (go_parallel(exec, n))
  for (Index i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::int64_t k = off[i]; k < off[i + 1]; ++k) s += val[k] * x[col[k]];
    y[i] = s;
  }
}

std::vector<double> spmv(const SparseMatrix& a, std::span<const double> x, Execution exec) {
  std::vector<double> y(a.rows());
  spmv(a, x, y, exec);
  return y;
}

double dot(std::span<const double> x, std::span<const double> y, Execution exec) {
  check_dims(x.size() == y.size(), "dot");
  const std::size_t n = x.size();
  const std::size_t chunks = (n + kDotChunk - 1) / kDotChunk;
  if (chunks <= 1) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
  }
  std::vector<double> partial(chunks);
  const auto nchunks = static_cast<std::int64_t>(chunks);
#pragma omp parallel for schedule(static) if (exec == Execution::Parallel)
  for (std::int64_t c = 0; c < nchunks; ++c) {
    const std::size_t lo = static_cast<std::size_t>(c) * kDotChunk;
    const std::size_t hi = std::min(n, lo + kDotChunk);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += x[i] * y[i];
    partial[c] = s;
  }
  double s = 0.0;
  for (double p : partial) s += p;
  return s;
}

double norm2(std::span<const double> x, Execution exec) { return std::sqrt(dot(x, x, exec)); }

double chunked_sum(std::span<const double> x, Execution exec) {
  const std::size_t n = x.size();
  const std::size_t chunks = (n + kDotChunk - 1) / kDotChunk;
  std::vector<double> partial(chunks);
  const auto nchunks = static_cast<std::int64_t>(chunks);
#pragma omp parallel for schedule(static) if (exec == Execution::Parallel && chunks > 1)
  for (std::int64_t c = 0; c < nchunks; ++c) {
    const std::size_t lo = static_cast<std::size_t>(c) * kDotChunk;
    const std::size_t hi = std::min(n, lo + kDotChunk);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += x[i];
    partial[c] = s;
  }
  double s = 0.0;
  for (double p : partial) s += p;
  return s;
}

constexpr double kRoundingFloor = 256 * std::numeric_limits<double>::epsilon();

SolveResult solve_spd(const SparseMatrix& a, std::span<const double> b, const SolverOptions& options) {
  const Index n = a.rows();
  check_dims(a.cols() == n && b.size() == static_cast<std::size_t>(n), "solve_spd");
  if (!(options.rel_tol > 0.0 && options.rel_tol < 1.0))
    throw std::invalid_argument("solve_spd: rel_tol must lie in (0,1)");
  const Execution exec = options.exec;
  const bool par = go_parallel(exec, static_cast<std::size_t>(n));
  const int max_iter = options.max_iterations > 0 ? options.max_iterations : std::max(20 * n, 1);

  SolveResult result;
  result.x.assign(n, 0.0);
  const double bnorm = norm2(b, exec);
  if (bnorm == 0.0) return result;

  double norm_a = 0.0;
  for (Index i = 0; i < n; ++i) {
    double row = 0.0;
    for (double v : a.row_values(i)) row += std::abs(v);
    norm_a = std::max(norm_a, row);
  }

  std::vector<double> inv_diag = a.diagonal();
  for (Index i = 0; i < n; ++i) {
    if (inv_diag[i] == 0.0)
      throw SolverError("solve_spd: zero diagonal entry in row " + std::to_string(i), 0, 1.0);
    inv_diag[i] = 1.0 / inv_diag[i];
  }

  std::vector<double>& x = result.x;
  std::vector<double> r(b.begin(), b.end());
  std::vector<double> z(n), p(n), q(n);
  const double target = options.rel_tol * bnorm;
  int it = 0;
  double true_res = bnorm;

  // Outer loop restarts CG when the recursive residual drifts from the true one.
  for (int restart = 0; restart < 5; ++restart) {
#pragma omp parallel for schedule(static) if (par)
    for (Index i = 0; i < n; ++i) {
      z[i] = inv_diag[i] * r[i];
      p[i] = z[i];
    }
    double rz = dot(r, z, exec);
    double rnorm = norm2(r, exec);
    while (rnorm > target && it < max_iter) {
      spmv(a, p, q, exec);
      const double pq = dot(p, q, exec);
      if (!(pq > 0.0))
        throw SolverError("solve_spd: matrix is not positive definite", it, rnorm / bnorm);
      const double alpha = rz / pq;
#pragma omp parallel for schedule(static) if (par)
      for (Index i = 0; i < n; ++i) {
        x[i] += alpha * p[i];
        r[i] -= alpha * q[i];
        z[i] = inv_diag[i] * r[i];
      }
      const double rz_next = dot(r, z, exec);
      const double beta = rz_next / rz;
      rz = rz_next;
#pragma omp parallel for schedule(static) if (par)
      for (Index i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
      rnorm = norm2(r, exec);
      ++it;
    }

    spmv(a, x, q, exec);
#pragma omp parallel for schedule(static) if (par)
    for (Index i = 0; i < n; ++i) r[i] = b[i] - q[i];
    true_res = norm2(r, exec);
    const double floor = kRoundingFloor * (norm_a * norm2(x, exec) + bnorm);
    if (true_res <= target || true_res <= floor) {
      result.iterations = it;
      result.relative_residual = true_res / bnorm;
      return result;
    }
    if (it >= max_iter) break;
  }
  throw SolverError("solve_spd: no convergence after " + std::to_string(it) +
                        " iterations (relative residual " + std::to_string(true_res / bnorm) + ")",
                    it, true_res / bnorm);
}

}  // namespace tgfem
