#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "cbx/banded.hpp"
#include "cbx/cyclic.hpp"

namespace cbx {

enum class SystemKind { cbts, cbps, tri, penta };

const char* to_string(SystemKind kind);
std::optional<SystemKind> kind_from_string(std::string_view s);

using AnyOperator = std::variant<CyclicBlockTri, CyclicBlockPenta, BlockTriMatrix, BlockPentaMatrix>;

/// One parsed or generated CBX1 document: an operator plus optional
/// right-hand side and solution sections.
///
/// Grammar (tokens separated by ASCII whitespace, `#` comments to EOL):
///
///   CBX1 <kind> <n> <m>
///   <blocks...>          kind cbts:  per k = 1..n:  A_k B_k C_k, row-major
///                        kind cbps:  per k = 1..n:  A_k B_k C_k D_k E_k
///                        kinds tri/penta: same layout; the corner slots
///                        (A_1, C_n, and for penta E_1, E_2, D_{n-1}, D_n)
///                        must hold zeros
///   [RHS <n*m reals>]
///   [SOL <n*m reals>]
///
/// Reals are written with 17 significant digits, so a write/parse round
/// trip is value-exact for finite doubles.
struct CbxFile {
    SystemKind kind = SystemKind::cbts;
    AnyOperator op;
    std::optional<BlockVector> rhs;
    std::optional<BlockVector> sol;
};

/// Throws FormatError (carrying the 1-based token index), DimensionError,
/// or NonFiniteError.
CbxFile parse_cbx(std::string_view text);

std::string write_cbx(const CbxFile& file);

/// Deterministic test-system generator. Off-diagonal blocks and the RHS are
/// drawn uniformly from [-1, 1); each diagonal block is then lifted,
/// B_k = R_k + dominance * rowsum_k * I, which makes the assembled system
/// strictly row diagonally dominant whenever dominance >= 1. dominance = 0
/// leaves the raw blocks (no conditioning guarantee).
struct GenSpec {
    SystemKind kind = SystemKind::cbts;
    int n = 0;
    int m = 0;
    std::uint64_t seed = 0;
    double dominance = 1.5;
};

/// Operator plus RHS; bitwise reproducible for a fixed spec.
CbxFile generate(const GenSpec& spec);

}  // namespace cbx
