#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cbx/errors.hpp"

namespace cbx {

/// A single m-vector, the right-hand-side / solution unit attached to one
/// block row.
using SmallVec = std::vector<double>;

/// Dense m-by-m real block, stored row-major. The atomic arithmetic unit:
/// all scalar floating-point matrix math in the library lives in the
/// operations on this type.
class Block {
public:
    Block() = default;

    /// Zero block of order m.
    explicit Block(int m);

    /// Block from row-major entries. Validates the entry count and rejects
    /// non-finite values.
    Block(int m, std::vector<double> entries);

    static Block identity(int m);

    int order() const noexcept { return m_; }

    double& operator()(int i, int j) noexcept { return a_[static_cast<std::size_t>(i) * m_ + j]; }
    double operator()(int i, int j) const noexcept { return a_[static_cast<std::size_t>(i) * m_ + j]; }

    std::span<double> data() noexcept { return a_; }
    std::span<const double> data() const noexcept { return a_; }

    /// Max absolute row sum.
    double norm_inf() const noexcept;

    /// Largest absolute entry.
    double max_abs() const noexcept;

    bool operator==(const Block&) const = default;

private:
    int m_ = 0;
    std::vector<double> a_;
};

/// a * b. Throws DimensionError on order mismatch.
Block matmul(const Block& a, const Block& b);

/// alpha * a + b, entrywise. Throws DimensionError on order mismatch.
Block axpy(double alpha, const Block& a, const Block& b);

/// s * a, entrywise.
Block scaled(const Block& a, double s);

/// s * I of order m.
Block scaled_identity(int m, double s);

Block transpose(const Block& a);

/// y = a * x for a contiguous m-vector.
SmallVec matvec(const Block& a, std::span<const double> x);

/// y -= a * x over strided columns; the workhorse of banded substitution.
void matvec_sub_strided(const Block& a, const double* x, std::ptrdiff_t xs, double* y,
                        std::ptrdiff_t ys) noexcept;

/// y += a * x over strided columns.
void matvec_add_strided(const Block& a, const double* x, std::ptrdiff_t xs, double* y,
                        std::ptrdiff_t ys) noexcept;

/// LU factorization of one block with partial (row) pivoting. Pivoting never
/// crosses block rows in the banded algorithms, so intra-block pivoting is
/// the only stability lever; a pivot p fails when |p| <= m * eps * ||block||_inf.
class BlockLU {
public:
    int order() const noexcept { return m_; }

    /// perm[i] = source row of the i-th pivoted row, i.e. (P*A)[i,:] = A[perm[i],:].
    const std::vector<int>& pivots() const noexcept { return perm_; }

    /// Packed factors: unit-lower L strictly below the diagonal, U on and above.
    std::span<const double> packed() const noexcept { return lu_; }

    /// x = A^-1 b for one contiguous m-vector.
    SmallVec solve(std::span<const double> b) const;

    /// X = A^-1 B column by column; B is m-by-k packed in a Block when k == m.
    Block solve(const Block& b) const;

    /// One strided column: x = A^-1 b. `b` and `x` must not alias.
    void solve_col(const double* b, std::ptrdiff_t bs, double* x, std::ptrdiff_t xs) const;

    /// x = A^-T b for one contiguous m-vector (b and x may alias).
    void solve_transpose(std::span<const double> b, std::span<double> x) const;

    friend BlockLU lu_factor(const Block& a);

private:
    int m_ = 0;
    std::vector<double> lu_;
    std::vector<int> perm_;
};

/// Factor a block; throws SingularBlockError carrying the failing column.
BlockLU lu_factor(const Block& a);

/// num * den^-1, the right division used to form elimination multipliers.
Block right_divide(const Block& num, const BlockLU& den);

/// Stacked vector of n block rows of order m, stored contiguously.
struct BlockVector {
    int n = 0;
    int m = 0;
    std::vector<double> data;

    BlockVector() = default;
    BlockVector(int n_, int m_) : n(n_), m(m_), data(static_cast<std::size_t>(n_) * m_, 0.0) {}
    BlockVector(int n_, int m_, std::vector<double> d);

    std::span<double> block(int k) noexcept {
        return {data.data() + static_cast<std::size_t>(k) * m, static_cast<std::size_t>(m)};
    }
    std::span<const double> block(int k) const noexcept {
        return {data.data() + static_cast<std::size_t>(k) * m, static_cast<std::size_t>(m)};
    }

    double norm_inf() const noexcept;

    bool operator==(const BlockVector&) const = default;
};

/// n block rows of an m-by-cols panel, row-major within each block row.
/// Multi-column right-hand sides (the U, P, Z, W stacks) live here.
struct BlockPanel {
    int n = 0;
    int m = 0;
    int cols = 0;
    std::vector<double> data;

    BlockPanel() = default;
    BlockPanel(int n_, int m_, int cols_)
        : n(n_), m(m_), cols(cols_),
          data(static_cast<std::size_t>(n_) * m_ * cols_, 0.0) {}

    double* block(int k) noexcept { return data.data() + static_cast<std::size_t>(k) * m * cols; }
    const double* block(int k) const noexcept {
        return data.data() + static_cast<std::size_t>(k) * m * cols;
    }

    /// Copy an m-by-m block into block row k starting at column j0.
    void place(int k, int j0, const Block& b);

    /// Extract block row k columns [j0, j0+m) as a Block.
    Block extract(int k, int j0) const;

    bool operator==(const BlockPanel&) const = default;
};

/// Block-operation counters carried through a solve. Units: `matmuls` counts
/// block-times-column products (an m-by-m times m-by-m product counts m),
/// `lus` counts small-matrix factorizations, `solves` counts single-column
/// applications of a factorization. Counts are independent of the execution
/// policy.
struct OpCounters {
    std::uint64_t matmuls = 0;
    std::uint64_t lus = 0;
    std::uint64_t solves = 0;

    bool operator==(const OpCounters&) const = default;
};

}  // namespace cbx
