#include "cbx/banded.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>

namespace cbx {

namespace {

void check_band(int n, int m, int n_min, const char* kind, std::size_t got_sub,
                std::size_t got_diag, std::size_t got_sup) {
    if (n < n_min)
        throw DimensionError(std::string(kind) + " matrix needs n >= " + std::to_string(n_min) +
                             ", got " + std::to_string(n));
    if (m < 1) throw DimensionError("block order must be >= 1");
    if (got_diag != static_cast<std::size_t>(n) || got_sub != static_cast<std::size_t>(n - 1) ||
        got_sup != static_cast<std::size_t>(n - 1))
        throw DimensionError(std::string(kind) + " matrix: band lengths must be n-1, n, n-1");
}

void check_orders(const std::vector<Block>& blocks, int m, const char* kind) {
    for (const Block& b : blocks)
        if (b.order() != m)
            throw DimensionError(std::string(kind) + " matrix: mixed block orders");
}

void check_rhs(const BandedFactorization& f, int rn, int rm) {
    if (rn != f.rows() || rm != f.order())
        throw DimensionError("banded solve: rhs shape (" + std::to_string(rn) + ", " +
                             std::to_string(rm) + ") does not match factorization (" +
                             std::to_string(f.rows()) + ", " + std::to_string(f.order()) + ")");
}

}  // namespace

BlockTriMatrix::BlockTriMatrix(int n_, int m_, std::vector<Block> sub_, std::vector<Block> diag_,
                               std::vector<Block> sup_)
    : n(n_), m(m_), sub(std::move(sub_)), diag(std::move(diag_)), sup(std::move(sup_)) {
    check_band(n, m, 2, "tri", sub.size(), diag.size(), sup.size());
    check_orders(sub, m, "tri");
    check_orders(diag, m, "tri");
    check_orders(sup, m, "tri");
}

BlockPentaMatrix::BlockPentaMatrix(int n_, int m_, std::vector<Block> subsub_,
                                   std::vector<Block> sub_, std::vector<Block> diag_,
                                   std::vector<Block> sup_, std::vector<Block> supsup_)
    : n(n_), m(m_), subsub(std::move(subsub_)), sub(std::move(sub_)), diag(std::move(diag_)),
      sup(std::move(sup_)), supsup(std::move(supsup_)) {
    check_band(n, m, 3, "penta", sub.size(), diag.size(), sup.size());
    if (subsub.size() != static_cast<std::size_t>(n - 2) ||
        supsup.size() != static_cast<std::size_t>(n - 2))
        throw DimensionError("penta matrix: outer band lengths must be n-2");
    check_orders(subsub, m, "penta");
    check_orders(sub, m, "penta");
    check_orders(diag, m, "penta");
    check_orders(sup, m, "penta");
    check_orders(supsup, m, "penta");
}

BandedFactorization factor_banded(const BlockTriMatrix& a, OpCounters* counters) {
    const int n = a.n;
    const int m = a.m;
    BandedFactorization f;
    f.kind_ = BandKind::tri;
    f.n_ = n;
    f.m_ = m;
    f.pivot_lus_.reserve(static_cast<std::size_t>(n));
    f.sub_mult_.reserve(static_cast<std::size_t>(n - 1));
    f.sup_ = a.sup;

    auto factor_pivot = [&](const Block& p, int row) {
        try {
            f.pivot_lus_.push_back(lu_factor(p));
        } catch (const SingularBlockError& e) {
            throw SingularPivotError(row, "singular pivot at block row " + std::to_string(row) +
                                              ": " + e.what());
        }
        if (counters) counters->lus += 1;
    };

    factor_pivot(a.diag[0], 0);
    for (int k = 1; k < n; ++k) {
        // L_k = A_k * P_{k-1}^-1 eliminates the sub-diagonal block of row k.
        Block lk = right_divide(a.sub[static_cast<std::size_t>(k - 1)], f.pivot_lus_.back());
        if (counters) counters->solves += static_cast<std::uint64_t>(m);
        Block pk = axpy(-1.0, matmul(lk, f.sup_[static_cast<std::size_t>(k - 1)]),
                        a.diag[static_cast<std::size_t>(k)]);
        if (counters) counters->matmuls += static_cast<std::uint64_t>(m);
        f.sub_mult_.push_back(std::move(lk));
        factor_pivot(pk, k);
    }
    return f;
}

BandedFactorization factor_banded(const BlockPentaMatrix& a, OpCounters* counters) {
    const int n = a.n;
    const int m = a.m;
    BandedFactorization f;
    f.kind_ = BandKind::penta;
    f.n_ = n;
    f.m_ = m;
    f.pivot_lus_.reserve(static_cast<std::size_t>(n));
    f.sub_mult_.reserve(static_cast<std::size_t>(n - 1));
    f.subsub_mult_.reserve(static_cast<std::size_t>(n - 2));
    f.sup_ = a.sup;
    f.supsup_ = a.supsup;

    auto factor_pivot = [&](const Block& p, int row) {
        try {
            f.pivot_lus_.push_back(lu_factor(p));
        } catch (const SingularBlockError& e) {
            throw SingularPivotError(row, "singular pivot at block row " + std::to_string(row) +
                                              ": " + e.what());
        }
        if (counters) counters->lus += 1;
    };

    auto mm = [&](const Block& x, const Block& y) {
        if (counters) counters->matmuls += static_cast<std::uint64_t>(m);
        return matmul(x, y);
    };
    auto rdiv = [&](const Block& num, const BlockLU& den) {
        if (counters) counters->solves += static_cast<std::uint64_t>(m);
        return right_divide(num, den);
    };

    factor_pivot(a.diag[0], 0);
    for (int k = 1; k < n; ++k) {
        Block bk = a.diag[static_cast<std::size_t>(k)];
        Block ak = a.sub[static_cast<std::size_t>(k - 1)];
        if (k >= 2) {
            // First eliminate the (k, k-2) block with row k-2, which fills
            // into the sub and diagonal positions of row k.
            Block l1 = rdiv(a.subsub[static_cast<std::size_t>(k - 2)],
                            f.pivot_lus_[static_cast<std::size_t>(k - 2)]);
            ak = axpy(-1.0, mm(l1, f.sup_[static_cast<std::size_t>(k - 2)]), ak);
            bk = axpy(-1.0, mm(l1, f.supsup_[static_cast<std::size_t>(k - 2)]), bk);
            f.subsub_mult_.push_back(std::move(l1));
        }
        // Then eliminate the updated (k, k-1) block with row k-1.
        Block l2 = rdiv(ak, f.pivot_lus_[static_cast<std::size_t>(k - 1)]);
        bk = axpy(-1.0, mm(l2, f.sup_[static_cast<std::size_t>(k - 1)]), bk);
        if (k <= n - 2)
            f.sup_[static_cast<std::size_t>(k)] =
                axpy(-1.0, mm(l2, f.supsup_[static_cast<std::size_t>(k - 1)]),
                     a.sup[static_cast<std::size_t>(k)]);
        f.sub_mult_.push_back(std::move(l2));
        factor_pivot(bk, k);
    }
    return f;
}

// Forward/back substitution for one strided column. Identical arithmetic for
// every column regardless of panel width or execution policy.
class BandedColumnSolver {
public:
    static void run(const BandedFactorization& f, const double* rhs, std::ptrdiff_t stride_rows,
                    std::ptrdiff_t stride, double* x, OpCounters* counters) {
        const int n = f.n_;
        const int m = f.m_;
        const bool penta = f.kind_ == BandKind::penta;
        auto rhs_at = [&](int k) { return rhs + k * stride_rows; };
        auto x_at = [&](int k) { return x + k * stride_rows; };

        // Forward: g_k = f_k - L2_k g_{k-1} - L1_k g_{k-2}, done in place in x.
        for (int i = 0; i < m; ++i) x_at(0)[i * stride] = rhs_at(0)[i * stride];
        std::uint64_t matmuls = 0;
        for (int k = 1; k < n; ++k) {
            for (int i = 0; i < m; ++i) x_at(k)[i * stride] = rhs_at(k)[i * stride];
            matvec_sub_strided(f.sub_mult_[static_cast<std::size_t>(k - 1)], x_at(k - 1), stride,
                               x_at(k), stride);
            ++matmuls;
            if (penta && k >= 2) {
                matvec_sub_strided(f.subsub_mult_[static_cast<std::size_t>(k - 2)], x_at(k - 2),
                                   stride, x_at(k), stride);
                ++matmuls;
            }
        }
        // Back: x_k = P_k^-1 (g_k - C'_k x_{k+1} - D_k x_{k+2}).
        std::vector<double> tmp(static_cast<std::size_t>(m));
        for (int k = n - 1; k >= 0; --k) {
            for (int i = 0; i < m; ++i) tmp[static_cast<std::size_t>(i)] = x_at(k)[i * stride];
            if (k <= n - 2) {
                matvec_sub_strided(f.sup_[static_cast<std::size_t>(k)], x_at(k + 1), stride,
                                   tmp.data(), 1);
                ++matmuls;
            }
            if (penta && k <= n - 3) {
                matvec_sub_strided(f.supsup_[static_cast<std::size_t>(k)], x_at(k + 2), stride,
                                   tmp.data(), 1);
                ++matmuls;
            }
            f.pivot_lus_[static_cast<std::size_t>(k)].solve_col(tmp.data(), 1, x_at(k), stride);
        }
        if (counters) {
            counters->matmuls += matmuls;
            counters->solves += static_cast<std::uint64_t>(n);
        }
    }
};

BlockVector solve_banded(const BandedFactorization& f, const BlockVector& rhs,
                         OpCounters* counters, Exec /*exec*/) {
    check_rhs(f, rhs.n, rhs.m);
    BlockVector x(rhs.n, rhs.m);
    BandedColumnSolver::run(f, rhs.data.data(), f.order(), 1, x.data.data(), counters);
    return x;
}

BlockPanel solve_banded(const BandedFactorization& f, const BlockPanel& rhs, OpCounters* counters,
                        Exec exec) {
    check_rhs(f, rhs.n, rhs.m);
    const int cols = rhs.cols;
    BlockPanel x(rhs.n, rhs.m, cols);
    const std::ptrdiff_t row_stride = static_cast<std::ptrdiff_t>(f.order()) * cols;

    std::uint64_t matmuls = 0;
    std::uint64_t solves = 0;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(+ : matmuls, solves) \
    if (exec == Exec::openmp && cols > 1)
#endif
    for (int j = 0; j < cols; ++j) {
        OpCounters local;
        BandedColumnSolver::run(f, rhs.data.data() + j, row_stride, cols, x.data.data() + j,
                                &local);
        matmuls += local.matmuls;
        solves += local.solves;
    }
    (void)exec;
    if (counters) {
        counters->matmuls += matmuls;
        counters->solves += solves;
    }
    return x;
}

namespace {

// One running sum per scalar row, blocks visited in dense column order, so
// the result matches a dense-assembled matvec term for term.
template <typename Band>
BlockVector apply_band_rows(const Band& a, const BlockVector& x, Exec exec) {
    constexpr bool penta = requires { a.subsub; };
    if (x.n != a.n || x.m != a.m)
        throw DimensionError("apply: vector shape does not match operator");
    const int n = a.n;
    const int m = a.m;
    BlockVector y(n, a.m);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (exec == Exec::openmp && n > 8)
#endif
    for (int r = 0; r < n; ++r) {
        const Block* blocks[5];
        int cols[5];
        int nb = 0;
        auto push = [&](const Block& blk, int col) {
            blocks[nb] = &blk;
            cols[nb] = col;
            ++nb;
        };
        if constexpr (penta) {
            if (r >= 2) push(a.subsub[static_cast<std::size_t>(r - 2)], r - 2);
        }
        if (r >= 1) push(a.sub[static_cast<std::size_t>(r - 1)], r - 1);
        push(a.diag[static_cast<std::size_t>(r)], r);
        if (r <= n - 2) push(a.sup[static_cast<std::size_t>(r)], r + 1);
        if constexpr (penta) {
            if (r <= n - 3) push(a.supsup[static_cast<std::size_t>(r)], r + 2);
        }
        double* yr = y.block(r).data();
        for (int i = 0; i < m; ++i) {
            double s = 0.0;
            for (int t = 0; t < nb; ++t) {
                const Block& blk = *blocks[t];
                const double* xc = x.block(cols[t]).data();
                for (int j = 0; j < m; ++j) s += blk(i, j) * xc[j];
            }
            yr[i] = s;
        }
    }
    (void)exec;
    return y;
}

template <typename Band>
double band_norm_inf(const Band& a) {
    constexpr bool penta = requires { a.subsub; };
    double best = 0.0;
    const int n = a.n;
    const int m = a.m;
    for (int r = 0; r < n; ++r) {
        for (int i = 0; i < m; ++i) {
            double s = 0.0;
            auto add = [&](const Block& blk) {
                for (int j = 0; j < m; ++j) s += std::abs(blk(i, j));
            };
            if constexpr (penta) {
                if (r >= 2) add(a.subsub[static_cast<std::size_t>(r - 2)]);
            }
            if (r >= 1) add(a.sub[static_cast<std::size_t>(r - 1)]);
            add(a.diag[static_cast<std::size_t>(r)]);
            if (r <= n - 2) add(a.sup[static_cast<std::size_t>(r)]);
            if constexpr (penta) {
                if (r <= n - 3) add(a.supsup[static_cast<std::size_t>(r)]);
            }
            best = std::max(best, s);
        }
    }
    return best;
}

}  // namespace

BlockVector apply_banded(const BlockTriMatrix& a, const BlockVector& x, Exec exec) {
    return apply_band_rows(a, x, exec);
}

BlockVector apply_banded(const BlockPentaMatrix& a, const BlockVector& x, Exec exec) {
    return apply_band_rows(a, x, exec);
}

double norm_inf(const BlockTriMatrix& a) { return band_norm_inf(a); }

double norm_inf(const BlockPentaMatrix& a) { return band_norm_inf(a); }

}  // namespace cbx
