#pragma once

#include <span>
#include <vector>

#include "cbx/banded.hpp"
#include "cbx/cyclic.hpp"
#include "cbx/exec.hpp"

namespace cbx {

/// Fully assembled n*m by n*m matrix, row-major. Block (k, j) of a source
/// operator occupies rows k*m..k*m+m-1 and columns j*m..j*m+m-1.
struct DenseSystem {
    int dim = 0;
    std::vector<double> a;

    DenseSystem() = default;
    explicit DenseSystem(int dim_)
        : dim(dim_), a(static_cast<std::size_t>(dim_) * dim_, 0.0) {}

    double& at(int i, int j) noexcept { return a[static_cast<std::size_t>(i) * dim + j]; }
    double at(int i, int j) const noexcept { return a[static_cast<std::size_t>(i) * dim + j]; }
};

/// Exact block placement; extraction of any placed block is bitwise equal to
/// the source.
DenseSystem assemble_dense(const CyclicBlockTri& sys);
DenseSystem assemble_dense(const CyclicBlockPenta& sys);
DenseSystem assemble_dense(const BlockTriMatrix& a);
DenseSystem assemble_dense(const BlockPentaMatrix& a);

/// Brute-force Gaussian elimination with partial pivoting. This is the
/// reference path for every cyclic and banded solve in the test suites; it
/// shares no factorization code with the block kernels. Throws
/// SingularDenseError on a failed pivot.
std::vector<double> dense_solve(const DenseSystem& d, std::span<const double> f,
                                Exec exec = default_exec);

std::vector<double> dense_matvec(const DenseSystem& d, std::span<const double> x,
                                 Exec exec = default_exec);

double norm_inf(const DenseSystem& d);

}  // namespace cbx
