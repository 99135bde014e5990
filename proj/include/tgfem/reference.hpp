#pragma once

#include <span>
#include <vector>

#include "tgfem/linalg.hpp"
#include "tgfem/space.hpp"
#include "tgfem/twogrid.hpp"

// Plain single-threaded kernels.  They favour the obvious formulation over
// speed and serve as the baseline for tests and benchmarks.
namespace tgfem::reference {

std::vector<double> spmv(const SparseMatrix& a, std::span<const double> x);

/// Left-to-right sum, no chunking.
double dot(std::span<const double> x, std::span<const double> y);

/// Cell-by-cell scatter of element matrices into triplets.
SparseMatrix assemble_stiffness(const FeSpace& space);

/// One patch at a time, accumulating each correction as soon as it is solved.
FeFunction local_solve_all(const Discretization& disc, const FeFunction& iterate);

}  // namespace tgfem::reference
