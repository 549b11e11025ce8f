#pragma once

namespace cbx {

/// Execution policy for the data-parallel kernels (dense elimination rows,
/// multi-RHS substitution columns, block-row matvecs). Results are
/// bit-identical between the two modes: every output element is produced by
/// exactly one iteration with the same arithmetic order, so `openmp` differs
/// from `serial` only in wall time.
enum class Exec {
    serial,
    openmp,
};

#ifdef _OPENMP
inline constexpr Exec default_exec = Exec::openmp;
#else
inline constexpr Exec default_exec = Exec::serial;
#endif

}  // namespace cbx
