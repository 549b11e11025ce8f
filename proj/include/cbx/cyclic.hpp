#pragma once

#include <vector>

#include "cbx/banded.hpp"
#include "cbx/block.hpp"
#include "cbx/exec.hpp"

namespace cbx {

/// Cyclic block tridiagonal operator. Every band wraps around: block k of
/// band `off` sits at column (k + off) mod n, so a[0] is the top-right
/// corner and c[n-1] the bottom-left one (n = 4 sketch):
///
///   [ b0 c0    a0 ]
///   [ a1 b1 c1    ]
///   [    a2 b2 c2 ]
///   [ c3    a3 b3 ]
struct CyclicBlockTri {
    int n = 0;
    int m = 0;
    std::vector<Block> a;  // sub band + top-right corner a[0]
    std::vector<Block> b;  // diagonal
    std::vector<Block> c;  // super band + bottom-left corner c[n-1]

    CyclicBlockTri() = default;
    CyclicBlockTri(int n, int m, std::vector<Block> a, std::vector<Block> b,
                   std::vector<Block> c);
};

/// Cyclic block pentadiagonal operator; same wrap-around rule with offsets
/// -2..+2, so the corners are e0, a0 (row 0), e1 (row 1), d[n-2] (row n-2)
/// and c[n-1], d[n-1] (row n-1). Requires n >= 5: at n = 4 the wrapped
/// outer band would collide with the inner bands.
///
///   [ b0 c0 d0 e0 a0 ]
///   [ a1 b1 c1 d1 e1 ]
///   [ e2 a2 b2 c2 d2 ]
///   [ d3 e3 a3 b3 c3 ]
///   [ c4 d4 e4 a4 b4 ]
struct CyclicBlockPenta {
    int n = 0;
    int m = 0;
    std::vector<Block> a;
    std::vector<Block> b;
    std::vector<Block> c;
    std::vector<Block> d;
    std::vector<Block> e;

    CyclicBlockPenta() = default;
    CyclicBlockPenta(int n, int m, std::vector<Block> a, std::vector<Block> b,
                     std::vector<Block> c, std::vector<Block> d, std::vector<Block> e);
};

/// The free scalars of the rank-m corner corrections. The solution does not
/// depend on them, only the arithmetic path does; all four must be nonzero
/// and finite. beta/delta are ignored on the tridiagonal path.
struct WoodburyParams {
    double alpha = 1.0;
    double beta = 1.0;
    double gamma = 1.0;
    double delta = 1.0;

    void validate() const;
};

/// A = A~ + U V^T for a cyclic tridiagonal operator: U carries u1 = I/alpha
/// and un = I/gamma at block rows 0 and n-1, V^T carries v1 = gamma*c[n-1]
/// and vn = alpha*a[0] at block columns 0 and n-1. The corrections
/// x1 = (gamma/alpha) c[n-1] and xn = (alpha/gamma) a[0] are subtracted from
/// the first and last diagonal blocks of A~.
struct CbtsDecomposition {
    BlockTriMatrix a_tilde;
    Block u1, un;
    Block v1, vn;
    Block x1, xn;
};

/// A = A~ + U V^T + P Q^T for a cyclic pentadiagonal operator. U rows 0 and
/// n-1 hold u1 = I/alpha, un = I/gamma; V columns 0, 1, n-2, n-1 hold
/// v1 = gamma*c[n-1], v2 = gamma*d[n-1], v_nm1 = alpha*e[0], vn = alpha*a[0].
/// P rows 1 and n-2 hold p2 = I/beta, p_nm1 = I/delta; Q columns 0 and n-1
/// hold q1 = delta*d[n-2], qn = beta*e[1]. Six band blocks of A~ are
/// corrected: diag 0 by x1, diag n-1 by xn, sup 0 by y1, sup n-2 by x_nm1,
/// sub 1 by x2, sub n-1 by yn.
struct CbpsDecomposition {
    BlockPentaMatrix a_tilde;
    Block u1, un;
    Block v1, v2, v_nm1, vn;
    Block p2, p_nm1;
    Block q1, qn;
    Block x1, y1, x2, x_nm1, yn, xn;
};

/// Solver output: solution, scale-free residual
/// ||Ax-f||_inf / (||A||_inf ||x||_inf + ||f||_inf), the parameters used,
/// the block-operation counters, and the order of the capacitance matrix
/// that was factored (m for CBTS, 2m for CBPS).
struct SolveReport {
    BlockVector x;
    double residual_inf = 0.0;
    WoodburyParams params;
    OpCounters counters;
    int capacitance_order = 0;
};

CbtsDecomposition decompose_cbts(const CyclicBlockTri& sys, const WoodburyParams& p);
CbpsDecomposition decompose_cbps(const CyclicBlockPenta& sys, const WoodburyParams& p);

/// Factor A~ once, solve Z = A~^-1 U and y = A~^-1 f, form the m-by-m
/// capacitance matrix M = I + gamma c[n-1] Z_0 + alpha a[0] Z_{n-1}, solve
/// M u = gamma c[n-1] y_0 + alpha a[0] y_{n-1}, and return x_k = y_k - Z_k u.
/// Throws SingularPivotError if A~ fails to factor and
/// SingularCapacitanceError if M does.
SolveReport solve_cbts(const CyclicBlockTri& sys, const BlockVector& f,
                       const WoodburyParams& p = {}, Exec exec = default_exec);

/// Pentadiagonal path: additionally solves W = A~^-1 P and uses the 2m-by-2m
/// capacitance matrix [[I + V^T Z, V^T W], [Q^T Z, I + Q^T W]]; u and v come
/// from one stacked 2m solve and x_k = y_k - Z_k u - W_k v.
SolveReport solve_cbps(const CyclicBlockPenta& sys, const BlockVector& f,
                       const WoodburyParams& p = {}, Exec exec = default_exec);

BlockVector apply_cyclic(const CyclicBlockTri& sys, const BlockVector& x,
                         Exec exec = default_exec);
BlockVector apply_cyclic(const CyclicBlockPenta& sys, const BlockVector& x,
                         Exec exec = default_exec);

/// Exact infinity norm from the band layout.
double norm_inf(const CyclicBlockTri& sys);
double norm_inf(const CyclicBlockPenta& sys);

}  // namespace cbx
