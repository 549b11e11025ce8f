#include "cbx/cyclic.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

namespace cbx {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void check_cyclic(int n, int m, int n_min, const char* kind) {
    if (n < n_min)
        throw DimensionError(std::string(kind) + " operator needs n >= " + std::to_string(n_min) +
                             " so that corner blocks occupy their own columns; got n = " +
                             std::to_string(n));
    if (m < 1) throw DimensionError("block order must be >= 1");
}

void check_bands(const std::vector<Block>& blocks, int n, int m, const char* kind) {
    if (blocks.size() != static_cast<std::size_t>(n))
        throw DimensionError(std::string(kind) + " operator: every band must hold n blocks");
    for (const Block& blk : blocks)
        if (blk.order() != m) throw DimensionError(std::string(kind) + " operator: mixed block orders");
}

void check_vec(const BlockVector& v, int n, int m, const char* what) {
    if (v.n != n || v.m != m)
        throw DimensionError(std::string(what) + ": vector shape (" + std::to_string(v.n) + ", " +
                             std::to_string(v.m) + ") does not match operator (" +
                             std::to_string(n) + ", " + std::to_string(m) + ")");
}

/// Confirm one defining condition lhs_a * lhs_b = target of the decomposition,
/// entrywise within 2 eps ||target||_inf.
void verify_condition(const Block& lhs_a, const Block& lhs_b, const Block& target,
                      const char* label) {
    const Block prod = matmul(lhs_a, lhs_b);
    const double bound = 2.0 * kEps * target.norm_inf();
    for (std::size_t i = 0; i < prod.data().size(); ++i) {
        const double diff = std::abs(prod.data()[i] - target.data()[i]);
        if (!(diff <= bound))
            throw std::logic_error(std::string("decomposition condition violated: ") + label);
    }
}

double residual_norm(const BlockVector& ax, const BlockVector& f) {
    double best = 0.0;
    for (std::size_t i = 0; i < ax.data.size(); ++i)
        best = std::max(best, std::abs(ax.data[i] - f.data[i]));
    return best;
}

double scaled_residual(double rnorm, double anorm, const BlockVector& x, const BlockVector& f) {
    const double denom = anorm * x.norm_inf() + f.norm_inf();
    return denom > 0.0 ? rnorm / denom : 0.0;
}

/// x_k = y_k - Z_k u [- W_k v], one fused pass per block row.
void combine_corrections(BlockVector& x, const BlockVector& y, const BlockPanel& z,
                         const SmallVec& u, const BlockPanel* w, const SmallVec* v, Exec exec) {
    const int n = y.n;
    const int m = y.m;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (exec == Exec::openmp && n > 8)
#endif
    for (int k = 0; k < n; ++k) {
        const double* zk = z.block(k);
        const double* wk = w ? w->block(k) : nullptr;
        const double* yk = y.block(k).data();
        double* xk = x.block(k).data();
        for (int i = 0; i < m; ++i) {
            double s = 0.0;
            for (int j = 0; j < m; ++j) s += zk[static_cast<std::size_t>(i) * m + j] * u[static_cast<std::size_t>(j)];
            double t = yk[i] - s;
            if (wk) {
                double sw = 0.0;
                for (int j = 0; j < m; ++j)
                    sw += wk[static_cast<std::size_t>(i) * m + j] * (*v)[static_cast<std::size_t>(j)];
                t -= sw;
            }
            xk[i] = t;
        }
    }
    (void)exec;
}

BlockLU factor_capacitance(const Block& cap) {
    try {
        return lu_factor(cap);
    } catch (const SingularBlockError& e) {
        throw SingularCapacitanceError(std::string("singular capacitance matrix: ") + e.what());
    }
}

/// Write an m-by-m quadrant of a 2m-by-2m matrix.
void place_quadrant(Block& big, int i0, int j0, const Block& q) {
    for (int i = 0; i < q.order(); ++i)
        for (int j = 0; j < q.order(); ++j) big(i0 + i, j0 + j) = q(i, j);
}

}  // namespace

CyclicBlockTri::CyclicBlockTri(int n_, int m_, std::vector<Block> a_, std::vector<Block> b_,
                               std::vector<Block> c_)
    : n(n_), m(m_), a(std::move(a_)), b(std::move(b_)), c(std::move(c_)) {
    check_cyclic(n, m, 3, "cyclic tridiagonal");
    check_bands(a, n, m, "cyclic tridiagonal");
    check_bands(b, n, m, "cyclic tridiagonal");
    check_bands(c, n, m, "cyclic tridiagonal");
}

CyclicBlockPenta::CyclicBlockPenta(int n_, int m_, std::vector<Block> a_, std::vector<Block> b_,
                                   std::vector<Block> c_, std::vector<Block> d_,
                                   std::vector<Block> e_)
    : n(n_), m(m_), a(std::move(a_)), b(std::move(b_)), c(std::move(c_)), d(std::move(d_)),
      e(std::move(e_)) {
    check_cyclic(n, m, 5, "cyclic pentadiagonal");
    check_bands(a, n, m, "cyclic pentadiagonal");
    check_bands(b, n, m, "cyclic pentadiagonal");
    check_bands(c, n, m, "cyclic pentadiagonal");
    check_bands(d, n, m, "cyclic pentadiagonal");
    check_bands(e, n, m, "cyclic pentadiagonal");
}

void WoodburyParams::validate() const {
    for (double s : {alpha, beta, gamma, delta})
        if (s == 0.0 || !std::isfinite(s))
            throw DimensionError("woodbury parameters must be nonzero finite scalars");
}

CbtsDecomposition decompose_cbts(const CyclicBlockTri& sys, const WoodburyParams& p) {
    p.validate();
    const int n = sys.n;
    const int m = sys.m;
    const Block& corner_a1 = sys.a[0];
    const Block& corner_cn = sys.c[static_cast<std::size_t>(n - 1)];

    CbtsDecomposition dec;
    dec.u1 = scaled_identity(m, 1.0 / p.alpha);
    dec.un = scaled_identity(m, 1.0 / p.gamma);
    dec.v1 = scaled(corner_cn, p.gamma);
    dec.vn = scaled(corner_a1, p.alpha);
    // The corrections are the exact products of the chosen factors, so the
    // defining conditions hold to the last bit.
    dec.x1 = matmul(dec.u1, dec.v1);
    dec.xn = matmul(dec.un, dec.vn);

    std::vector<Block> sub(sys.a.begin() + 1, sys.a.end());
    std::vector<Block> diag = sys.b;
    diag[0] = axpy(-1.0, dec.x1, diag[0]);
    diag[static_cast<std::size_t>(n - 1)] = axpy(-1.0, dec.xn, diag[static_cast<std::size_t>(n - 1)]);
    std::vector<Block> sup(sys.c.begin(), sys.c.end() - 1);
    dec.a_tilde = BlockTriMatrix(n, m, std::move(sub), std::move(diag), std::move(sup));

    verify_condition(dec.u1, dec.vn, corner_a1, "u1*vn = top-right corner");
    verify_condition(dec.un, dec.v1, corner_cn, "un*v1 = bottom-left corner");
    verify_condition(dec.u1, dec.v1, dec.x1, "u1*v1 = x1");
    verify_condition(dec.un, dec.vn, dec.xn, "un*vn = xn");
    return dec;
}

CbpsDecomposition decompose_cbps(const CyclicBlockPenta& sys, const WoodburyParams& p) {
    p.validate();
    const int n = sys.n;
    const int m = sys.m;
    const Block& corner_a1 = sys.a[0];
    const Block& corner_e1 = sys.e[0];
    const Block& corner_e2 = sys.e[1];
    const Block& corner_dnm1 = sys.d[static_cast<std::size_t>(n - 2)];
    const Block& corner_cn = sys.c[static_cast<std::size_t>(n - 1)];
    const Block& corner_dn = sys.d[static_cast<std::size_t>(n - 1)];

    CbpsDecomposition dec;
    dec.u1 = scaled_identity(m, 1.0 / p.alpha);
    dec.un = scaled_identity(m, 1.0 / p.gamma);
    dec.v1 = scaled(corner_cn, p.gamma);
    dec.v2 = scaled(corner_dn, p.gamma);
    dec.v_nm1 = scaled(corner_e1, p.alpha);
    dec.vn = scaled(corner_a1, p.alpha);
    dec.p2 = scaled_identity(m, 1.0 / p.beta);
    dec.p_nm1 = scaled_identity(m, 1.0 / p.delta);
    dec.q1 = scaled(corner_dnm1, p.delta);
    dec.qn = scaled(corner_e2, p.beta);

    dec.x1 = matmul(dec.u1, dec.v1);
    dec.y1 = matmul(dec.u1, dec.v2);
    dec.yn = matmul(dec.un, dec.v_nm1);
    dec.xn = matmul(dec.un, dec.vn);
    dec.x2 = matmul(dec.p2, dec.q1);
    dec.x_nm1 = matmul(dec.p_nm1, dec.qn);

    std::vector<Block> subsub(sys.e.begin() + 2, sys.e.end());
    std::vector<Block> sub(sys.a.begin() + 1, sys.a.end());
    std::vector<Block> diag = sys.b;
    std::vector<Block> sup(sys.c.begin(), sys.c.end() - 1);
    std::vector<Block> supsup(sys.d.begin(), sys.d.end() - 2);
    diag[0] = axpy(-1.0, dec.x1, diag[0]);
    diag[static_cast<std::size_t>(n - 1)] = axpy(-1.0, dec.xn, diag[static_cast<std::size_t>(n - 1)]);
    sup[0] = axpy(-1.0, dec.y1, sup[0]);
    sup[static_cast<std::size_t>(n - 2)] = axpy(-1.0, dec.x_nm1, sup[static_cast<std::size_t>(n - 2)]);
    sub[0] = axpy(-1.0, dec.x2, sub[0]);
    sub[static_cast<std::size_t>(n - 2)] = axpy(-1.0, dec.yn, sub[static_cast<std::size_t>(n - 2)]);
    dec.a_tilde = BlockPentaMatrix(n, m, std::move(subsub), std::move(sub), std::move(diag),
                                   std::move(sup), std::move(supsup));

    verify_condition(dec.u1, dec.vn, corner_a1, "u1*vn = a corner");
    verify_condition(dec.un, dec.v1, corner_cn, "un*v1 = c corner");
    verify_condition(dec.u1, dec.v_nm1, corner_e1, "u1*v_nm1 = e1 corner");
    verify_condition(dec.un, dec.v2, corner_dn, "un*v2 = dn corner");
    verify_condition(dec.u1, dec.v1, dec.x1, "u1*v1 = x1");
    verify_condition(dec.u1, dec.v2, dec.y1, "u1*v2 = y1");
    verify_condition(dec.un, dec.v_nm1, dec.yn, "un*v_nm1 = yn");
    verify_condition(dec.un, dec.vn, dec.xn, "un*vn = xn");
    verify_condition(dec.p2, dec.qn, corner_e2, "p2*qn = e2 corner");
    verify_condition(dec.p_nm1, dec.q1, corner_dnm1, "p_nm1*q1 = d corner");
    verify_condition(dec.p2, dec.q1, dec.x2, "p2*q1 = x2");
    verify_condition(dec.p_nm1, dec.qn, dec.x_nm1, "p_nm1*qn = x_nm1");
    return dec;
}

SolveReport solve_cbts(const CyclicBlockTri& sys, const BlockVector& f, const WoodburyParams& p,
                       Exec exec) {
    check_vec(f, sys.n, sys.m, "solve_cbts");
    const int n = sys.n;
    const int m = sys.m;
    CbtsDecomposition dec = decompose_cbts(sys, p);

    SolveReport rep;
    rep.params = p;
    rep.capacitance_order = m;
    OpCounters& ctr = rep.counters;

    BandedFactorization fact = factor_banded(dec.a_tilde, &ctr);

    BlockPanel u_stack(n, m, m);
    u_stack.place(0, 0, dec.u1);
    u_stack.place(n - 1, 0, dec.un);
    BlockPanel z = solve_banded(fact, u_stack, &ctr, exec);
    BlockVector y = solve_banded(fact, f, &ctr, exec);

    // M = I + v1 Z_0 + vn Z_{n-1}, the m-by-m capacitance matrix.
    Block cap = Block::identity(m);
    cap = axpy(1.0, matmul(dec.v1, z.extract(0, 0)), cap);
    cap = axpy(1.0, matmul(dec.vn, z.extract(n - 1, 0)), cap);
    ctr.matmuls += 2 * static_cast<std::uint64_t>(m);

    SmallVec rhs(static_cast<std::size_t>(m), 0.0);
    matvec_add_strided(dec.v1, y.block(0).data(), 1, rhs.data(), 1);
    matvec_add_strided(dec.vn, y.block(n - 1).data(), 1, rhs.data(), 1);
    ctr.matmuls += 2;

    BlockLU cap_lu = factor_capacitance(cap);
    ctr.lus += 1;
    SmallVec u = cap_lu.solve(rhs);
    ctr.solves += 1;

    rep.x = BlockVector(n, m);
    combine_corrections(rep.x, y, z, u, nullptr, nullptr, exec);
    ctr.matmuls += static_cast<std::uint64_t>(n);

    BlockVector ax = apply_cyclic(sys, rep.x, exec);
    rep.residual_inf = scaled_residual(residual_norm(ax, f), norm_inf(sys), rep.x, f);
    return rep;
}

SolveReport solve_cbps(const CyclicBlockPenta& sys, const BlockVector& f, const WoodburyParams& p,
                       Exec exec) {
    check_vec(f, sys.n, sys.m, "solve_cbps");
    const int n = sys.n;
    const int m = sys.m;
    CbpsDecomposition dec = decompose_cbps(sys, p);

    SolveReport rep;
    rep.params = p;
    rep.capacitance_order = 2 * m;
    OpCounters& ctr = rep.counters;

    BandedFactorization fact = factor_banded(dec.a_tilde, &ctr);

    BlockPanel u_stack(n, m, m);
    u_stack.place(0, 0, dec.u1);
    u_stack.place(n - 1, 0, dec.un);
    BlockPanel p_stack(n, m, m);
    p_stack.place(1, 0, dec.p2);
    p_stack.place(n - 2, 0, dec.p_nm1);

    BlockPanel z = solve_banded(fact, u_stack, &ctr, exec);
    BlockPanel w = solve_banded(fact, p_stack, &ctr, exec);
    BlockVector y = solve_banded(fact, f, &ctr, exec);

    // V^T T = v1 T_0 + v2 T_1 + v_nm1 T_{n-2} + vn T_{n-1};
    // Q^T T = q1 T_0 + qn T_{n-1}.
    auto vt_panel = [&](const BlockPanel& t) {
        Block s = matmul(dec.v1, t.extract(0, 0));
        s = axpy(1.0, matmul(dec.v2, t.extract(1, 0)), s);
        s = axpy(1.0, matmul(dec.v_nm1, t.extract(n - 2, 0)), s);
        s = axpy(1.0, matmul(dec.vn, t.extract(n - 1, 0)), s);
        ctr.matmuls += 4 * static_cast<std::uint64_t>(m);
        return s;
    };
    auto qt_panel = [&](const BlockPanel& t) {
        Block s = matmul(dec.q1, t.extract(0, 0));
        s = axpy(1.0, matmul(dec.qn, t.extract(n - 1, 0)), s);
        ctr.matmuls += 2 * static_cast<std::uint64_t>(m);
        return s;
    };

    const Block vz = vt_panel(z);
    const Block vw = vt_panel(w);
    const Block qz = qt_panel(z);
    const Block qw = qt_panel(w);

    // The 2m-by-2m capacitance matrix [[I + V^T Z, V^T W], [Q^T Z, I + Q^T W]].
    Block cap = Block::identity(2 * m);
    place_quadrant(cap, 0, 0, axpy(1.0, vz, Block::identity(m)));
    place_quadrant(cap, 0, m, vw);
    place_quadrant(cap, m, 0, qz);
    place_quadrant(cap, m, m, axpy(1.0, qw, Block::identity(m)));

    // Stacked right-hand side [V^T y; Q^T y].
    SmallVec rhs(static_cast<std::size_t>(2 * m), 0.0);
    matvec_add_strided(dec.v1, y.block(0).data(), 1, rhs.data(), 1);
    matvec_add_strided(dec.v2, y.block(1).data(), 1, rhs.data(), 1);
    matvec_add_strided(dec.v_nm1, y.block(n - 2).data(), 1, rhs.data(), 1);
    matvec_add_strided(dec.vn, y.block(n - 1).data(), 1, rhs.data(), 1);
    matvec_add_strided(dec.q1, y.block(0).data(), 1, rhs.data() + m, 1);
    matvec_add_strided(dec.qn, y.block(n - 1).data(), 1, rhs.data() + m, 1);
    ctr.matmuls += 6;

    BlockLU cap_lu = factor_capacitance(cap);
    ctr.lus += 1;
    SmallVec uv = cap_lu.solve(rhs);
    ctr.solves += 1;
    SmallVec u(uv.begin(), uv.begin() + m);
    SmallVec v(uv.begin() + m, uv.end());

    rep.x = BlockVector(n, m);
    combine_corrections(rep.x, y, z, u, &w, &v, exec);
    ctr.matmuls += 2 * static_cast<std::uint64_t>(n);

    BlockVector ax = apply_cyclic(sys, rep.x, exec);
    rep.residual_inf = scaled_residual(residual_norm(ax, f), norm_inf(sys), rep.x, f);
    return rep;
}

namespace {

// Blocks are visited in dense column order with one running sum per scalar
// row, so the result matches a dense-assembled matvec term for term.
template <typename Sys>
BlockVector apply_wrapped(const Sys& sys, const BlockVector& x, Exec exec) {
    constexpr bool penta = requires { sys.e; };
    check_vec(x, sys.n, sys.m, "apply_cyclic");
    const int n = sys.n;
    const int m = sys.m;
    BlockVector y(n, sys.m);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (exec == Exec::openmp && n > 8)
#endif
    for (int r = 0; r < n; ++r) {
        const Block* blocks[5];
        int cols[5];
        int nb = 0;
        auto push = [&](const Block& blk, int off) {
            blocks[nb] = &blk;
            cols[nb] = ((r + off) % n + n) % n;
            ++nb;
        };
        if constexpr (penta) push(sys.e[static_cast<std::size_t>(r)], -2);
        push(sys.a[static_cast<std::size_t>(r)], -1);
        push(sys.b[static_cast<std::size_t>(r)], 0);
        push(sys.c[static_cast<std::size_t>(r)], +1);
        if constexpr (penta) push(sys.d[static_cast<std::size_t>(r)], +2);
        // The wrapped columns are distinct (n minimums guarantee it); sort
        // the handful of bands by column.
        for (int i = 1; i < nb; ++i)
            for (int j = i; j > 0 && cols[j] < cols[j - 1]; --j) {
                std::swap(cols[j], cols[j - 1]);
                std::swap(blocks[j], blocks[j - 1]);
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

template <typename Sys>
double cyclic_norm_inf(const Sys& sys) {
    constexpr bool penta = requires { sys.e; };
    const int n = sys.n;
    const int m = sys.m;
    double best = 0.0;
    for (int r = 0; r < n; ++r) {
        for (int i = 0; i < m; ++i) {
            double s = 0.0;
            auto add = [&](const Block& blk) {
                for (int j = 0; j < m; ++j) s += std::abs(blk(i, j));
            };
            if constexpr (penta) add(sys.e[static_cast<std::size_t>(r)]);
            add(sys.a[static_cast<std::size_t>(r)]);
            add(sys.b[static_cast<std::size_t>(r)]);
            add(sys.c[static_cast<std::size_t>(r)]);
            if constexpr (penta) add(sys.d[static_cast<std::size_t>(r)]);
            best = std::max(best, s);
        }
    }
    return best;
}

}  // namespace

BlockVector apply_cyclic(const CyclicBlockTri& sys, const BlockVector& x, Exec exec) {
    return apply_wrapped(sys, x, exec);
}

BlockVector apply_cyclic(const CyclicBlockPenta& sys, const BlockVector& x, Exec exec) {
    return apply_wrapped(sys, x, exec);
}

double norm_inf(const CyclicBlockTri& sys) { return cyclic_norm_inf(sys); }

double norm_inf(const CyclicBlockPenta& sys) { return cyclic_norm_inf(sys); }

}  // namespace cbx
