// Compares the serial reference kernels against their OpenMP versions:
// dense elimination (the cubic kernel), the multi-column banded solve, the
// cyclic matvec, and the full structured solve. Both modes produce
// bit-identical results, so the table reports wall time and speedup only.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "cbx/dense.hpp"
#include "cbx/io.hpp"

namespace {

template <typename Fn>
double best_seconds(Fn&& fn, int repeats) {
    double best = 1e300;
    for (int r = 0; r < repeats; ++r) {
        const auto start = std::chrono::steady_clock::now();
        fn();
        const auto stop = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double>(stop - start).count());
    }
    return best;
}

void row(const char* name, const std::string& size, double serial_s, double openmp_s) {
    std::printf("%-26s %-14s %12.6f %12.6f %8.2fx\n", name, size.c_str(), serial_s, openmp_s,
                serial_s / openmp_s);
}

}  // namespace

int main(int argc, char** argv) {
    int scale = 1;
    if (argc > 1) scale = std::max(1, std::atoi(argv[1]));

#ifdef _OPENMP
    std::printf("openmp threads: %d\n", omp_get_max_threads());
#else
    std::printf("built without openmp; both columns run the serial kernel\n");
#endif
    std::printf("%-26s %-14s %12s %12s %9s\n", "kernel", "size", "serial(s)", "openmp(s)",
                "speedup");

    using cbx::Exec;

    // Dense elimination, the cubic oracle kernel.
    for (int dim : {256 * scale, 512 * scale}) {
        const cbx::GenSpec spec{cbx::SystemKind::cbps, dim / 4, 4, 42, 1.5};
        const cbx::CbxFile file = cbx::generate(spec);
        const auto& sys = std::get<cbx::CyclicBlockPenta>(file.op);
        const cbx::DenseSystem d = cbx::assemble_dense(sys);
        const double ts = best_seconds([&] { (void)cbx::dense_solve(d, file.rhs->data, Exec::serial); }, 3);
        const double tp = best_seconds([&] { (void)cbx::dense_solve(d, file.rhs->data, Exec::openmp); }, 3);
        row("dense_solve", std::to_string(dim) + "x" + std::to_string(dim), ts, tp);
    }

    // Multi-column banded substitution (columns run in parallel).
    {
        const int n = 20000 * scale, m = 16;
        const cbx::GenSpec spec{cbx::SystemKind::penta, n, m, 7, 1.5};
        const cbx::CbxFile file = cbx::generate(spec);
        const auto& band = std::get<cbx::BlockPentaMatrix>(file.op);
        const cbx::BandedFactorization fact = cbx::factor_banded(band);
        cbx::BlockPanel rhs(n, m, m);
        for (int k = 0; k < n; ++k)
            rhs.place(k, 0, cbx::Block::identity(m));
        const double ts = best_seconds([&] { (void)cbx::solve_banded(fact, rhs, nullptr, Exec::serial); }, 3);
        const double tp = best_seconds([&] { (void)cbx::solve_banded(fact, rhs, nullptr, Exec::openmp); }, 3);
        row("solve_banded (16 cols)", "n=" + std::to_string(n) + " m=" + std::to_string(m), ts, tp);
    }

    // Cyclic matvec over block rows.
    {
        const int n = 200000 * scale, m = 8;
        const cbx::GenSpec spec{cbx::SystemKind::cbps, n, m, 11, 1.5};
        const cbx::CbxFile file = cbx::generate(spec);
        const auto& sys = std::get<cbx::CyclicBlockPenta>(file.op);
        const cbx::BlockVector& f = *file.rhs;
        const double ts = best_seconds([&] { (void)cbx::apply_cyclic(sys, f, Exec::serial); }, 5);
        const double tp = best_seconds([&] { (void)cbx::apply_cyclic(sys, f, Exec::openmp); }, 5);
        row("apply_cyclic", "n=" + std::to_string(n) + " m=" + std::to_string(m), ts, tp);
    }

    // Full structured solve (factorization itself is sequential in n; the
    // panel solves and the correction combine are the parallel parts).
    {
        const int n = 50000 * scale, m = 8;
        const cbx::GenSpec spec{cbx::SystemKind::cbps, n, m, 13, 1.5};
        const cbx::CbxFile file = cbx::generate(spec);
        const auto& sys = std::get<cbx::CyclicBlockPenta>(file.op);
        const cbx::BlockVector& f = *file.rhs;
        const double ts = best_seconds([&] { (void)cbx::solve_cbps(sys, f, {}, Exec::serial); }, 3);
        const double tp = best_seconds([&] { (void)cbx::solve_cbps(sys, f, {}, Exec::openmp); }, 3);
        row("solve_cbps", "n=" + std::to_string(n) + " m=" + std::to_string(m), ts, tp);
    }
    return 0;
}
