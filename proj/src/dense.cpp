#include "cbx/dense.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

namespace cbx {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void place_block(DenseSystem& d, int m, int row_blk, int col_blk, const Block& b) {
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) d.at(row_blk * m + i, col_blk * m + j) = b(i, j);
}

}  // namespace

DenseSystem assemble_dense(const CyclicBlockTri& sys) {
    const int n = sys.n;
    const int m = sys.m;
    DenseSystem d(n * m);
    for (int r = 0; r < n; ++r) {
        place_block(d, m, r, (r - 1 + n) % n, sys.a[static_cast<std::size_t>(r)]);
        place_block(d, m, r, r, sys.b[static_cast<std::size_t>(r)]);
        place_block(d, m, r, (r + 1) % n, sys.c[static_cast<std::size_t>(r)]);
    }
    return d;
}

DenseSystem assemble_dense(const CyclicBlockPenta& sys) {
    const int n = sys.n;
    const int m = sys.m;
    DenseSystem d(n * m);
    for (int r = 0; r < n; ++r) {
        place_block(d, m, r, (r - 2 + n) % n, sys.e[static_cast<std::size_t>(r)]);
        place_block(d, m, r, (r - 1 + n) % n, sys.a[static_cast<std::size_t>(r)]);
        place_block(d, m, r, r, sys.b[static_cast<std::size_t>(r)]);
        place_block(d, m, r, (r + 1) % n, sys.c[static_cast<std::size_t>(r)]);
        place_block(d, m, r, (r + 2) % n, sys.d[static_cast<std::size_t>(r)]);
    }
    return d;
}

DenseSystem assemble_dense(const BlockTriMatrix& a) {
    const int n = a.n;
    const int m = a.m;
    DenseSystem d(n * m);
    for (int r = 0; r < n; ++r) {
        if (r >= 1) place_block(d, m, r, r - 1, a.sub[static_cast<std::size_t>(r - 1)]);
        place_block(d, m, r, r, a.diag[static_cast<std::size_t>(r)]);
        if (r <= n - 2) place_block(d, m, r, r + 1, a.sup[static_cast<std::size_t>(r)]);
    }
    return d;
}

DenseSystem assemble_dense(const BlockPentaMatrix& a) {
    const int n = a.n;
    const int m = a.m;
    DenseSystem d(n * m);
    for (int r = 0; r < n; ++r) {
        if (r >= 2) place_block(d, m, r, r - 2, a.subsub[static_cast<std::size_t>(r - 2)]);
        if (r >= 1) place_block(d, m, r, r - 1, a.sub[static_cast<std::size_t>(r - 1)]);
        place_block(d, m, r, r, a.diag[static_cast<std::size_t>(r)]);
        if (r <= n - 2) place_block(d, m, r, r + 1, a.sup[static_cast<std::size_t>(r)]);
        if (r <= n - 3) place_block(d, m, r, r + 2, a.supsup[static_cast<std::size_t>(r)]);
    }
    return d;
}

std::vector<double> dense_solve(const DenseSystem& d, std::span<const double> f, Exec exec) {
    const int dim = d.dim;
    if (f.size() != static_cast<std::size_t>(dim))
        throw DimensionError("dense solve: rhs length " + std::to_string(f.size()) +
                             " does not match dimension " + std::to_string(dim));

    std::vector<double> w = d.a;
    std::vector<double> x(f.begin(), f.end());
    auto at = [&](int i, int j) -> double& { return w[static_cast<std::size_t>(i) * dim + j]; };

    double max_abs = 0.0;
    for (double v : w) max_abs = std::max(max_abs, std::abs(v));
    const double threshold = dim * kEps * max_abs;

    for (int k = 0; k < dim; ++k) {
        int p = k;
        double best = std::abs(at(k, k));
        for (int i = k + 1; i < dim; ++i) {
            const double v = std::abs(at(i, k));
            if (v > best) {
                best = v;
                p = i;
            }
        }
        if (best <= threshold)
            throw SingularDenseError(k, "dense elimination: pivot " + std::to_string(best) +
                                             " at column " + std::to_string(k) +
                                             " is at or below threshold " +
                                             std::to_string(threshold));
        if (p != k) {
            for (int j = k; j < dim; ++j) std::swap(at(k, j), at(p, j));
            std::swap(x[static_cast<std::size_t>(k)], x[static_cast<std::size_t>(p)]);
        }
        const double piv = at(k, k);
        // Rank-one update of the trailing rows; each row is owned by one
        // iteration, so the result is bit-identical in both execution modes.
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (exec == Exec::openmp && dim - k > 128)
#endif
        for (int i = k + 1; i < dim; ++i) {
            const double l = at(i, k) / piv;
            if (l != 0.0) {
                for (int j = k + 1; j < dim; ++j) at(i, j) -= l * at(k, j);
                x[static_cast<std::size_t>(i)] -= l * x[static_cast<std::size_t>(k)];
            }
            at(i, k) = 0.0;
        }
    }
    for (int i = dim - 1; i >= 0; --i) {
        double s = x[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < dim; ++j) s -= at(i, j) * x[static_cast<std::size_t>(j)];
        x[static_cast<std::size_t>(i)] = s / at(i, i);
    }
    (void)exec;
    return x;
}

std::vector<double> dense_matvec(const DenseSystem& d, std::span<const double> v, Exec exec) {
    const int dim = d.dim;
    if (v.size() != static_cast<std::size_t>(dim))
        throw DimensionError("dense matvec: length mismatch");
    std::vector<double> y(static_cast<std::size_t>(dim), 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (exec == Exec::openmp && dim > 256)
#endif
    for (int i = 0; i < dim; ++i) {
        double s = 0.0;
        for (int j = 0; j < dim; ++j) s += d.at(i, j) * v[static_cast<std::size_t>(j)];
        y[static_cast<std::size_t>(i)] = s;
    }
    (void)exec;
    return y;
}

double norm_inf(const DenseSystem& d) {
    double best = 0.0;
    for (int i = 0; i < d.dim; ++i) {
        double s = 0.0;
        for (int j = 0; j < d.dim; ++j) s += std::abs(d.at(i, j));
        best = std::max(best, s);
    }
    return best;
}

}  // namespace cbx
