#include <doctest.h>

#include <limits>

#include "cbx/banded.hpp"
#include "cbx/dense.hpp"
#include "cbx/io.hpp"
#include "test_util.hpp"

using namespace cbx;
using namespace cbx_test;

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

BlockTriMatrix scalar_tri(std::vector<double> sub, std::vector<double> diag,
                          std::vector<double> sup) {
    auto to_blocks = [](const std::vector<double>& v) {
        std::vector<Block> out;
        for (double x : v) out.push_back(Block(1, {x}));
        return out;
    };
    return BlockTriMatrix(static_cast<int>(diag.size()), 1, to_blocks(sub), to_blocks(diag),
                          to_blocks(sup));
}

BlockTriMatrix identity_tri(int n, int m) {
    return BlockTriMatrix(n, m, std::vector<Block>(static_cast<std::size_t>(n - 1), Block(m)),
                          std::vector<Block>(static_cast<std::size_t>(n), Block::identity(m)),
                          std::vector<Block>(static_cast<std::size_t>(n - 1), Block(m)));
}

template <typename Band>
double dense_oracle_gap(const Band& band, const BlockVector& rhs, const BlockVector& got) {
    const DenseSystem d = assemble_dense(band);
    const std::vector<double> ref = dense_solve(d, rhs.data);
    return rel_inf_diff(got.data, ref);
}

}  // namespace

TEST_CASE("band containers validate their shape") {
    CHECK_THROWS_AS(BlockTriMatrix(1, 1, {}, {Block(1)}, {}), DimensionError);
    CHECK_THROWS_AS(BlockTriMatrix(3, 1, {Block(1)}, {Block(1), Block(1), Block(1)}, {Block(1)}),
                    DimensionError);
    CHECK_THROWS_AS(BlockPentaMatrix(2, 1, {}, {Block(1)}, {Block(1), Block(1)}, {Block(1)}, {}),
                    DimensionError);
    // mixed block orders
    CHECK_THROWS_AS(BlockTriMatrix(2, 1, {Block(2)}, {Block(1), Block(1)}, {Block(1)}),
                    DimensionError);
}

TEST_CASE("factoring the identity operator gives identity pivots and zero multipliers") {
    const BandedFactorization f = factor_banded(identity_tri(4, 2));
    for (int k = 0; k < 4; ++k) {
        const Block p = reconstruct_from_lu(f.pivot_lu(k));
        CHECK(p == Block::identity(2));
    }
    for (int k = 1; k < 4; ++k)
        for (double v : f.sub_multiplier(k).data()) CHECK(v == 0.0);
}

TEST_CASE("hand-eliminated n=3 scalar system: pivots 2, 1.5, 4/3") {
    // Gaussian elimination by hand: p0 = 2, l1 = 1/2, p1 = 2 - 1/2 = 3/2,
    // l2 = 2/3, p2 = 2 - 2/3 = 4/3.
    const BlockTriMatrix a = scalar_tri({1, 1}, {2, 2, 2}, {1, 1});
    OpCounters ctr;
    const BandedFactorization f = factor_banded(a, &ctr);
    CHECK(f.pivot_lu(0).packed()[0] == 2.0);
    CHECK(f.pivot_lu(1).packed()[0] == 1.5);
    CHECK(f.pivot_lu(2).packed()[0] == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
    CHECK(f.sub_multiplier(1)(0, 0) == 0.5);
    CHECK(f.sub_multiplier(2)(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(ctr.lus == 3);

    // Substitution check: x = (1, 2, 3) satisfies the three equations
    // 2*1 + 1*2 = 4, 1 + 4 + 3 = 8, 2 + 6 = 8.
    const BlockVector rhs(3, 1, {4, 8, 8});
    const BlockVector x = solve_banded(f, rhs);
    CHECK(rel_inf_diff(x.data, std::vector<double>{1, 2, 3}) <= 1e-14);
}

TEST_CASE("zero diagonal fails at the first block row") {
    const BlockTriMatrix a(3, 1, {Block(1), Block(1)}, {Block(1), Block(1), Block(1)},
                           {Block(1), Block(1)});
    try {
        factor_banded(a);
        FAIL("expected SingularPivotError");
    } catch (const SingularPivotError& e) {
        CHECK(e.block_row() == 0);
    }
}

TEST_CASE("identity operator solves and applies to the input unchanged") {
    std::mt19937_64 gen(4);
    const BlockVector rhs = random_block_vector(gen, 5, 3);
    const BandedFactorization f = factor_banded(identity_tri(5, 3));
    CHECK(solve_banded(f, rhs) == rhs);
    CHECK(apply_banded(identity_tri(5, 3), rhs) == rhs);

    const BlockVector zero(5, 3);
    CHECK(apply_banded(identity_tri(5, 3), zero) == zero);
}

TEST_CASE("random n=20 m=3 penta system matches the dense oracle") {
    const CbxFile file = generate({SystemKind::penta, 20, 3, 11, 1.0});
    const auto& band = std::get<BlockPentaMatrix>(file.op);
    const BandedFactorization f = factor_banded(band);
    const BlockVector x = solve_banded(f, *file.rhs);
    CHECK(dense_oracle_gap(band, *file.rhs, x) <= 1e-10);
}

TEST_CASE("apply_banded matches the dense-assembled matvec exactly") {
    std::mt19937_64 seeds(8);
    for (const SystemKind kind : {SystemKind::tri, SystemKind::penta}) {
        const CbxFile file = generate({kind, 9, 2, seeds(), 0.75});
        std::mt19937_64 gen(seeds());
        const BlockVector x = random_block_vector(gen, 9, 2);
        std::visit(
            [&](const auto& band) {
                if constexpr (requires { apply_banded(band, x); }) {
                    const std::vector<double> ref = dense_matvec(assemble_dense(band), x.data);
                    CHECK(apply_banded(band, x).data == ref);
                }
            },
            file.op);
    }
}

TEST_CASE("property: oracle equivalence across the size grid") {
    std::mt19937_64 seeds(1234);
    for (int n = 3; n <= 30; n += 3) {
        for (int m = 1; m <= 5; ++m) {
            for (int rep = 0; rep < 5; ++rep) {
                const std::uint64_t seed = seeds();
                for (const SystemKind kind : {SystemKind::tri, SystemKind::penta}) {
                    const CbxFile file = generate({kind, n, m, seed, 1.0});
                    std::visit(
                        [&](const auto& band) {
                            if constexpr (requires { factor_banded(band); }) {
                                const BandedFactorization f = factor_banded(band);
                                const BlockVector x = solve_banded(f, *file.rhs);
                                CHECK(dense_oracle_gap(band, *file.rhs, x) <= 1e-9);
                            }
                        },
                        file.op);
                }
            }
        }
    }
}

TEST_CASE("property: factor reuse is bit-for-bit equal to fresh factorizations") {
    const CbxFile file = generate({SystemKind::penta, 12, 2, 77, 1.0});
    const auto& band = std::get<BlockPentaMatrix>(file.op);
    const BandedFactorization once = factor_banded(band);
    std::mt19937_64 gen(5);
    for (int k = 0; k < 4; ++k) {
        const BlockVector rhs = random_block_vector(gen, 12, 2);
        const BandedFactorization fresh = factor_banded(band);
        CHECK(solve_banded(once, rhs) == solve_banded(fresh, rhs));
    }
}

TEST_CASE("property: solves are linear in the right-hand side") {
    const CbxFile file = generate({SystemKind::tri, 15, 3, 31, 1.0});
    const auto& band = std::get<BlockTriMatrix>(file.op);
    const BandedFactorization f = factor_banded(band);
    std::mt19937_64 gen(6);
    for (int rep = 0; rep < 5; ++rep) {
        const BlockVector r1 = random_block_vector(gen, 15, 3);
        const BlockVector r2 = random_block_vector(gen, 15, 3);
        const double a = sym_real(gen) * 3.0;
        BlockVector mix(15, 3);
        for (std::size_t i = 0; i < mix.data.size(); ++i) mix.data[i] = a * r1.data[i] + r2.data[i];

        const BlockVector xmix = solve_banded(f, mix);
        const BlockVector x1 = solve_banded(f, r1);
        const BlockVector x2 = solve_banded(f, r2);
        std::vector<double> combo(xmix.data.size());
        for (std::size_t i = 0; i < combo.size(); ++i) combo[i] = a * x1.data[i] + x2.data[i];
        CHECK(rel_inf_diff(xmix.data, combo) <= 1e-12);
    }
}

TEST_CASE("property: multi-column solve equals repeated single solves bit for bit") {
    const CbxFile file = generate({SystemKind::penta, 10, 3, 41, 1.0});
    const auto& band = std::get<BlockPentaMatrix>(file.op);
    const BandedFactorization f = factor_banded(band);

    std::mt19937_64 gen(7);
    const int cols = 5;
    BlockPanel rhs(10, 3, cols);
    for (double& v : rhs.data) v = sym_real(gen);

    OpCounters panel_ctr;
    const BlockPanel x = solve_banded(f, rhs, &panel_ctr);
    OpCounters single_ctr;
    for (int j = 0; j < cols; ++j) {
        BlockVector col(10, 3);
        for (int k = 0; k < 10; ++k)
            for (int i = 0; i < 3; ++i)
                col.block(k)[static_cast<std::size_t>(i)] =
                    rhs.block(k)[static_cast<std::size_t>(i) * cols + j];
        const BlockVector xj = solve_banded(f, col, &single_ctr);
        for (int k = 0; k < 10; ++k)
            for (int i = 0; i < 3; ++i)
                CHECK(x.block(k)[static_cast<std::size_t>(i) * cols + j] ==
                      xj.block(k)[static_cast<std::size_t>(i)]);
    }
    CHECK(panel_ctr == single_ctr);
}

TEST_CASE("property: the factorization symbolically reconstructs the source") {
    std::mt19937_64 seeds(55);
    SUBCASE("tridiagonal") {
        const CbxFile file = generate({SystemKind::tri, 6, 3, seeds(), 1.0});
        const auto& a = std::get<BlockTriMatrix>(file.op);
        const BandedFactorization f = factor_banded(a);
        const double bound = 32.0 * kEps * a.n * a.m * norm_inf(a);

        std::vector<Block> pivots;
        for (int k = 0; k < a.n; ++k) pivots.push_back(reconstruct_from_lu(f.pivot_lu(k)));

        CHECK(max_abs_diff(pivots[0].data(), a.diag[0].data()) <= bound);
        for (int k = 1; k < a.n; ++k) {
            const Block sub_k = matmul(f.sub_multiplier(k), pivots[static_cast<std::size_t>(k - 1)]);
            const Block diag_k =
                axpy(1.0, matmul(f.sub_multiplier(k), f.sup_block(k - 1)), pivots[static_cast<std::size_t>(k)]);
            CHECK(max_abs_diff(sub_k.data(), a.sub[static_cast<std::size_t>(k - 1)].data()) <= bound);
            CHECK(max_abs_diff(diag_k.data(), a.diag[static_cast<std::size_t>(k)].data()) <= bound);
        }
        for (int k = 0; k < a.n - 1; ++k) CHECK(f.sup_block(k) == a.sup[static_cast<std::size_t>(k)]);
    }
    SUBCASE("pentadiagonal") {
        const CbxFile file = generate({SystemKind::penta, 7, 2, seeds(), 1.0});
        const auto& a = std::get<BlockPentaMatrix>(file.op);
        const BandedFactorization f = factor_banded(a);
        const double bound = 32.0 * kEps * a.n * a.m * norm_inf(a);

        std::vector<Block> pivots;
        for (int k = 0; k < a.n; ++k) pivots.push_back(reconstruct_from_lu(f.pivot_lu(k)));

        CHECK(max_abs_diff(pivots[0].data(), a.diag[0].data()) <= bound);
        for (int k = 1; k < a.n; ++k) {
            Block sub_k = matmul(f.sub_multiplier(k), pivots[static_cast<std::size_t>(k - 1)]);
            Block diag_k =
                axpy(1.0, matmul(f.sub_multiplier(k), f.sup_block(k - 1)), pivots[static_cast<std::size_t>(k)]);
            if (k >= 2) {
                const Block subsub_k = matmul(f.subsub_multiplier(k), pivots[static_cast<std::size_t>(k - 2)]);
                CHECK(max_abs_diff(subsub_k.data(), a.subsub[static_cast<std::size_t>(k - 2)].data()) <= bound);
                sub_k = axpy(1.0, matmul(f.subsub_multiplier(k), f.sup_block(k - 2)), sub_k);
                diag_k = axpy(1.0, matmul(f.subsub_multiplier(k), f.supsup_block(k - 2)), diag_k);
            }
            CHECK(max_abs_diff(sub_k.data(), a.sub[static_cast<std::size_t>(k - 1)].data()) <= bound);
            CHECK(max_abs_diff(diag_k.data(), a.diag[static_cast<std::size_t>(k)].data()) <= bound);
        }
        for (int k = 0; k < a.n - 1; ++k) {
            Block sup_k = f.sup_block(k);
            if (k >= 1) sup_k = axpy(1.0, matmul(f.sub_multiplier(k), f.supsup_block(k - 1)), sup_k);
            CHECK(max_abs_diff(sup_k.data(), a.sup[static_cast<std::size_t>(k)].data()) <= bound);
        }
        for (int k = 0; k < a.n - 2; ++k) CHECK(f.supsup_block(k) == a.supsup[static_cast<std::size_t>(k)]);
    }
}

TEST_CASE("solve_banded rejects mismatched shapes") {
    const BandedFactorization f = factor_banded(identity_tri(4, 2));
    CHECK_THROWS_AS(solve_banded(f, BlockVector(3, 2)), DimensionError);
    CHECK_THROWS_AS(solve_banded(f, BlockVector(4, 3)), DimensionError);
    CHECK_THROWS_AS(apply_banded(identity_tri(4, 2), BlockVector(4, 3)), DimensionError);
}
