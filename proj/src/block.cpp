#include "cbx/block.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

namespace cbx {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void require_order(int m) {
    if (m < 1) throw DimensionError("block order must be >= 1, got " + std::to_string(m));
}

void require_same_order(const Block& a, const Block& b, const char* op) {
    if (a.order() != b.order())
        throw DimensionError(std::string(op) + ": block orders differ (" +
                             std::to_string(a.order()) + " vs " + std::to_string(b.order()) + ")");
}

}  // namespace

Block::Block(int m) {
    require_order(m);
    m_ = m;
    a_.assign(static_cast<std::size_t>(m) * m, 0.0);
}

Block::Block(int m, std::vector<double> entries) {
    require_order(m);
    if (entries.size() != static_cast<std::size_t>(m) * m)
        throw DimensionError("block of order " + std::to_string(m) + " needs " +
                             std::to_string(static_cast<std::size_t>(m) * m) + " entries, got " +
                             std::to_string(entries.size()));
    for (double v : entries)
        if (!std::isfinite(v)) throw NonFiniteError("non-finite entry in block");
    m_ = m;
    a_ = std::move(entries);
}

Block Block::identity(int m) {
    Block b(m);
    for (int i = 0; i < m; ++i) b(i, i) = 1.0;
    return b;
}

double Block::norm_inf() const noexcept {
    double best = 0.0;
    for (int i = 0; i < m_; ++i) {
        double s = 0.0;
        for (int j = 0; j < m_; ++j) s += std::abs((*this)(i, j));
        best = std::max(best, s);
    }
    return best;
}

double Block::max_abs() const noexcept {
    double best = 0.0;
    for (double v : a_) best = std::max(best, std::abs(v));
    return best;
}

Block matmul(const Block& a, const Block& b) {
    require_same_order(a, b, "matmul");
    const int m = a.order();
    Block c(m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            double s = 0.0;
            for (int k = 0; k < m; ++k) s += a(i, k) * b(k, j);
            c(i, j) = s;
        }
    return c;
}

Block axpy(double alpha, const Block& a, const Block& b) {
    require_same_order(a, b, "axpy");
    Block c = b;
    for (std::size_t i = 0; i < c.data().size(); ++i) c.data()[i] = alpha * a.data()[i] + b.data()[i];
    return c;
}

Block scaled(const Block& a, double s) {
    Block c = a;
    for (double& v : c.data()) v *= s;
    return c;
}

Block scaled_identity(int m, double s) {
    Block b(m);
    for (int i = 0; i < m; ++i) b(i, i) = s;
    return b;
}

Block transpose(const Block& a) {
    const int m = a.order();
    Block t(m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) t(j, i) = a(i, j);
    return t;
}

SmallVec matvec(const Block& a, std::span<const double> x) {
    const int m = a.order();
    if (x.size() != static_cast<std::size_t>(m))
        throw DimensionError("matvec: vector length " + std::to_string(x.size()) +
                             " does not match block order " + std::to_string(m));
    SmallVec y(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        double s = 0.0;
        for (int k = 0; k < m; ++k) s += a(i, k) * x[static_cast<std::size_t>(k)];
        y[static_cast<std::size_t>(i)] = s;
    }
    return y;
}

void matvec_sub_strided(const Block& a, const double* x, std::ptrdiff_t xs, double* y,
                        std::ptrdiff_t ys) noexcept {
    const int m = a.order();
    for (int i = 0; i < m; ++i) {
        double s = 0.0;
        for (int k = 0; k < m; ++k) s += a(i, k) * x[k * xs];
        y[i * ys] -= s;
    }
}

void matvec_add_strided(const Block& a, const double* x, std::ptrdiff_t xs, double* y,
                        std::ptrdiff_t ys) noexcept {
    const int m = a.order();
    for (int i = 0; i < m; ++i) {
        double s = 0.0;
        for (int k = 0; k < m; ++k) s += a(i, k) * x[k * xs];
        y[i * ys] += s;
    }
}

BlockLU lu_factor(const Block& a) {
    const int m = a.order();
    require_order(m);
    const double threshold = m * kEps * a.norm_inf();

    BlockLU f;
    f.m_ = m;
    f.lu_.assign(a.data().begin(), a.data().end());
    f.perm_.resize(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) f.perm_[static_cast<std::size_t>(i)] = i;

    auto at = [&](int i, int j) -> double& { return f.lu_[static_cast<std::size_t>(i) * m + j]; };

    for (int k = 0; k < m; ++k) {
        int p = k;
        double best = std::abs(at(k, k));
        for (int i = k + 1; i < m; ++i) {
            const double v = std::abs(at(i, k));
            if (v > best) {
                best = v;
                p = i;
            }
        }
        if (best <= threshold)
            throw SingularBlockError(k, "singular block: pivot " + std::to_string(best) +
                                            " at column " + std::to_string(k) +
                                            " is at or below threshold " + std::to_string(threshold));
        if (p != k) {
            for (int j = 0; j < m; ++j) std::swap(at(k, j), at(p, j));
            std::swap(f.perm_[static_cast<std::size_t>(k)], f.perm_[static_cast<std::size_t>(p)]);
        }
        const double piv = at(k, k);
        for (int i = k + 1; i < m; ++i) {
            const double l = at(i, k) / piv;
            at(i, k) = l;
            for (int j = k + 1; j < m; ++j) at(i, j) -= l * at(k, j);
        }
    }
    return f;
}

void BlockLU::solve_col(const double* b, std::ptrdiff_t bs, double* x, std::ptrdiff_t xs) const {
    const int m = m_;
    auto at = [&](int i, int j) { return lu_[static_cast<std::size_t>(i) * m + j]; };

    for (int i = 0; i < m; ++i) x[i * xs] = b[perm_[static_cast<std::size_t>(i)] * bs];
    for (int i = 1; i < m; ++i) {
        double s = x[i * xs];
        for (int k = 0; k < i; ++k) s -= at(i, k) * x[k * xs];
        x[i * xs] = s;
    }
    for (int i = m - 1; i >= 0; --i) {
        double s = x[i * xs];
        for (int k = i + 1; k < m; ++k) s -= at(i, k) * x[k * xs];
        x[i * xs] = s / at(i, i);
    }
}

SmallVec BlockLU::solve(std::span<const double> b) const {
    if (b.size() != static_cast<std::size_t>(m_))
        throw DimensionError("lu solve: rhs length " + std::to_string(b.size()) +
                             " does not match block order " + std::to_string(m_));
    SmallVec x(static_cast<std::size_t>(m_));
    solve_col(b.data(), 1, x.data(), 1);
    return x;
}

Block BlockLU::solve(const Block& b) const {
    if (b.order() != m_)
        throw DimensionError("lu solve: rhs order " + std::to_string(b.order()) +
                             " does not match block order " + std::to_string(m_));
    Block x(m_);
    for (int j = 0; j < m_; ++j)
        solve_col(b.data().data() + j, m_, x.data().data() + j, m_);
    return x;
}

void BlockLU::solve_transpose(std::span<const double> b, std::span<double> x) const {
    const int m = m_;
    if (b.size() != static_cast<std::size_t>(m) || x.size() != static_cast<std::size_t>(m))
        throw DimensionError("transpose solve: length mismatch");
    auto at = [&](int i, int j) { return lu_[static_cast<std::size_t>(i) * m + j]; };

    // A = P^T L U, so A^T x = b splits into U^T w = b, L^T v = w, x = P^T v.
    SmallVec w(b.begin(), b.end());
    for (int i = 0; i < m; ++i) {
        double s = w[static_cast<std::size_t>(i)];
        for (int k = 0; k < i; ++k) s -= at(k, i) * w[static_cast<std::size_t>(k)];
        w[static_cast<std::size_t>(i)] = s / at(i, i);
    }
    for (int i = m - 1; i >= 0; --i) {
        double s = w[static_cast<std::size_t>(i)];
        for (int k = i + 1; k < m; ++k) s -= at(k, i) * w[static_cast<std::size_t>(k)];
        w[static_cast<std::size_t>(i)] = s;
    }
    for (int i = 0; i < m; ++i) x[static_cast<std::size_t>(perm_[static_cast<std::size_t>(i)])] = w[static_cast<std::size_t>(i)];
}

Block right_divide(const Block& num, const BlockLU& den) {
    if (num.order() != den.order())
        throw DimensionError("right divide: orders differ");
    const int m = num.order();
    // Row r of num * den^-1 is den^-T applied to row r of num.
    Block q(m);
    for (int r = 0; r < m; ++r) {
        std::span<const double> row(num.data().data() + static_cast<std::size_t>(r) * m,
                                    static_cast<std::size_t>(m));
        std::span<double> out(q.data().data() + static_cast<std::size_t>(r) * m,
                              static_cast<std::size_t>(m));
        den.solve_transpose(row, out);
    }
    return q;
}

BlockVector::BlockVector(int n_, int m_, std::vector<double> d) : n(n_), m(m_), data(std::move(d)) {
    if (n < 1 || m < 1 || data.size() != static_cast<std::size_t>(n) * m)
        throw DimensionError("block vector: entry count does not match n*m");
    for (double v : data)
        if (!std::isfinite(v)) throw NonFiniteError("non-finite entry in block vector");
}

double BlockVector::norm_inf() const noexcept {
    double best = 0.0;
    for (double v : data) best = std::max(best, std::abs(v));
    return best;
}

void BlockPanel::place(int k, int j0, const Block& b) {
    for (int i = 0; i < b.order(); ++i)
        for (int j = 0; j < b.order(); ++j)
            block(k)[static_cast<std::size_t>(i) * cols + j0 + j] = b(i, j);
}

Block BlockPanel::extract(int k, int j0) const {
    Block b(m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            b(i, j) = block(k)[static_cast<std::size_t>(i) * cols + j0 + j];
    return b;
}

}  // namespace cbx
