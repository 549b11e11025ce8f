#pragma once

#include <vector>

#include "cbx/block.hpp"
#include "cbx/exec.hpp"

namespace cbx {

/// Non-cyclic block tridiagonal matrix (n = 4 sketch, each letter an
/// m-by-m block):
///
///   [ B0 C0       ]        diag[r] at (r, r)
///   [ A1 B1 C1    ]        sub[r-1]  at (r, r-1), r = 1..n-1
///   [    A2 B2 C2 ]        sup[r]  at (r, r+1), r = 0..n-2
///   [       A3 B3 ]
struct BlockTriMatrix {
    int n = 0;
    int m = 0;
    std::vector<Block> sub;   // n-1 blocks
    std::vector<Block> diag;  // n blocks
    std::vector<Block> sup;   // n-1 blocks

    BlockTriMatrix() = default;
    BlockTriMatrix(int n, int m, std::vector<Block> sub, std::vector<Block> diag,
                   std::vector<Block> sup);
};

/// Non-cyclic block pentadiagonal matrix (n = 5 sketch):
///
///   [ B0 C0 D0       ]     subsub[r-2] at (r, r-2), r = 2..n-1
///   [ A1 B1 C1 D1    ]     sub[r-1]    at (r, r-1), r = 1..n-1
///   [ E2 A2 B2 C2 D2 ]     diag[r]     at (r, r)
///   [    E3 A3 B3 C3 ]     sup[r]      at (r, r+1), r = 0..n-2
///   [       E4 A4 B4 ]     supsup[r]   at (r, r+2), r = 0..n-3
struct BlockPentaMatrix {
    int n = 0;
    int m = 0;
    std::vector<Block> subsub;  // n-2 blocks
    std::vector<Block> sub;     // n-1 blocks
    std::vector<Block> diag;    // n blocks
    std::vector<Block> sup;     // n-1 blocks
    std::vector<Block> supsup;  // n-2 blocks

    BlockPentaMatrix() = default;
    BlockPentaMatrix(int n, int m, std::vector<Block> subsub, std::vector<Block> sub,
                     std::vector<Block> diag, std::vector<Block> sup, std::vector<Block> supsup);
};

enum class BandKind { tri, penta };

/// Factor-once / solve-many block forward elimination, top to bottom, no
/// block-row pivoting (pivoting stays inside each block). Stores for each
/// block row the LU of its pivot block, the multipliers that eliminated the
/// sub-band blocks, and the (possibly fill-updated) super-band blocks. The
/// source operator is copied, never mutated.
class BandedFactorization {
public:
    BandKind kind() const noexcept { return kind_; }
    int rows() const noexcept { return n_; }
    int order() const noexcept { return m_; }

    const BlockLU& pivot_lu(int k) const { return pivot_lus_[static_cast<std::size_t>(k)]; }
    /// Multiplier that eliminated the first sub-diagonal block of row k (k >= 1).
    const Block& sub_multiplier(int k) const { return sub_mult_[static_cast<std::size_t>(k - 1)]; }
    /// Multiplier that eliminated the second sub-diagonal block of row k (penta, k >= 2).
    const Block& subsub_multiplier(int k) const {
        return subsub_mult_[static_cast<std::size_t>(k - 2)];
    }
    /// Updated first super-diagonal block of row k (k <= n-2).
    const Block& sup_block(int k) const { return sup_[static_cast<std::size_t>(k)]; }
    /// Second super-diagonal block of row k (penta, k <= n-3; unchanged by elimination).
    const Block& supsup_block(int k) const { return supsup_[static_cast<std::size_t>(k)]; }

    friend BandedFactorization factor_banded(const BlockTriMatrix&, OpCounters*);
    friend BandedFactorization factor_banded(const BlockPentaMatrix&, OpCounters*);
    friend class BandedColumnSolver;

private:
    BandKind kind_ = BandKind::tri;
    int n_ = 0;
    int m_ = 0;
    std::vector<BlockLU> pivot_lus_;
    std::vector<Block> sub_mult_;
    std::vector<Block> subsub_mult_;
    std::vector<Block> sup_;
    std::vector<Block> supsup_;
};

/// Throws SingularPivotError(k) when the pivot block of row k fails to factor.
BandedFactorization factor_banded(const BlockTriMatrix& a, OpCounters* counters = nullptr);
BandedFactorization factor_banded(const BlockPentaMatrix& a, OpCounters* counters = nullptr);

/// Solve for one stacked right-hand side.
BlockVector solve_banded(const BandedFactorization& f, const BlockVector& rhs,
                         OpCounters* counters = nullptr, Exec exec = default_exec);

/// Solve for a k-column right-hand side. Column j of the result is
/// bit-identical to a single solve of column j; columns run in parallel
/// under Exec::openmp.
BlockPanel solve_banded(const BandedFactorization& f, const BlockPanel& rhs,
                        OpCounters* counters = nullptr, Exec exec = default_exec);

BlockVector apply_banded(const BlockTriMatrix& a, const BlockVector& x, Exec exec = default_exec);
BlockVector apply_banded(const BlockPentaMatrix& a, const BlockVector& x, Exec exec = default_exec);

/// Exact infinity norm (max absolute dense row sum) from the band layout.
double norm_inf(const BlockTriMatrix& a);
double norm_inf(const BlockPentaMatrix& a);

}  // namespace cbx
