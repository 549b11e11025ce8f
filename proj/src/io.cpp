#include "cbx/io.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <random>
#include <string>
#include <utility>

namespace cbx {

namespace {

constexpr std::string_view kMagic = "CBX1";

struct Tokenizer {
    std::string_view text;
    std::size_t pos = 0;
    std::size_t count = 0;  // 1-based index of the last token handed out

    std::optional<std::string_view> next() {
        while (pos < text.size()) {
            const char ch = text[pos];
            if (ch == '#') {
                while (pos < text.size() && text[pos] != '\n') ++pos;
            } else if (std::isspace(static_cast<unsigned char>(ch))) {
                ++pos;
            } else {
                break;
            }
        }
        if (pos >= text.size()) return std::nullopt;
        const std::size_t start = pos;
        while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos])) &&
               text[pos] != '#')
            ++pos;
        ++count;
        return text.substr(start, pos - start);
    }

    std::string_view require(const char* what) {
        auto tok = next();
        if (!tok) throw FormatError(count + 1, std::string("expected ") + what + ", found end of input");
        return *tok;
    }

    int require_positive_int(const char* what) {
        const std::string_view tok = require(what);
        int value = 0;
        const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
        if (ec != std::errc{} || ptr != tok.data() + tok.size() || value < 1)
            throw FormatError(count, std::string("expected positive integer for ") + what);
        return value;
    }

    double require_real(const char* what) {
        const std::string_view tok = require(what);
        double value = 0.0;
        const auto [ptr, ec] =
            std::from_chars(tok.data(), tok.data() + tok.size(), value, std::chars_format::general);
        if (ec != std::errc{} || ptr != tok.data() + tok.size())
            throw FormatError(count, std::string("expected real number for ") + what);
        if (!std::isfinite(value))
            throw NonFiniteError("non-finite value at token " + std::to_string(count));
        return value;
    }
};

Block read_block(Tokenizer& tz, int m, const char* what) {
    std::vector<double> entries(static_cast<std::size_t>(m) * m);
    for (double& v : entries) v = tz.require_real(what);
    return Block(m, std::move(entries));
}

void require_zero_block(const Block& blk, std::size_t first_token, const char* what) {
    for (std::size_t i = 0; i < blk.data().size(); ++i)
        if (blk.data()[i] != 0.0)
            throw FormatError(first_token + i, std::string(what) +
                                                   " is structurally absent for this kind and must "
                                                   "be serialized as zeros");
}

BlockVector read_section(Tokenizer& tz, int n, int m, const char* what) {
    std::vector<double> entries(static_cast<std::size_t>(n) * m);
    for (double& v : entries) v = tz.require_real(what);
    return BlockVector(n, m, std::move(entries));
}

int bands_per_row(SystemKind kind) {
    return (kind == SystemKind::cbps || kind == SystemKind::penta) ? 5 : 3;
}

void append_real(std::string& out, double v) {
    std::array<char, 40> buf{};
    const auto [ptr, ec] =
        std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
    out.append(buf.data(), static_cast<std::size_t>(ptr - buf.data()));
}

void append_block(std::string& out, const Block& blk) {
    for (std::size_t i = 0; i < blk.data().size(); ++i) {
        if (i) out.push_back(' ');
        append_real(out, blk.data()[i]);
    }
    out.push_back('\n');
}

void append_section(std::string& out, const char* name, const BlockVector& v) {
    out.append(name);
    out.push_back('\n');
    for (int k = 0; k < v.n; ++k) {
        for (int i = 0; i < v.m; ++i) {
            if (i) out.push_back(' ');
            append_real(out, v.block(k)[static_cast<std::size_t>(i)]);
        }
        out.push_back('\n');
    }
}

double unit_real(std::mt19937_64& gen) {
    // 53 uniform bits, an exact double in [0, 1); identical on every platform.
    return std::ldexp(static_cast<double>(gen() >> 11), -53);
}

double sym_real(std::mt19937_64& gen) { return 2.0 * unit_real(gen) - 1.0; }

Block random_block(std::mt19937_64& gen, int m) {
    std::vector<double> entries(static_cast<std::size_t>(m) * m);
    for (double& v : entries) v = sym_real(gen);
    return Block(m, std::move(entries));
}

}  // namespace

const char* to_string(SystemKind kind) {
    switch (kind) {
        case SystemKind::cbts: return "cbts";
        case SystemKind::cbps: return "cbps";
        case SystemKind::tri: return "tri";
        case SystemKind::penta: return "penta";
    }
    return "?";
}

std::optional<SystemKind> kind_from_string(std::string_view s) {
    if (s == "cbts") return SystemKind::cbts;
    if (s == "cbps") return SystemKind::cbps;
    if (s == "tri") return SystemKind::tri;
    if (s == "penta") return SystemKind::penta;
    return std::nullopt;
}

CbxFile parse_cbx(std::string_view text) {
    Tokenizer tz{text};

    const std::string_view magic = tz.require("magic token");
    if (magic != kMagic)
        throw FormatError(tz.count, "bad magic '" + std::string(magic) + "', expected CBX1");

    const std::string_view kind_tok = tz.require("kind");
    const auto kind = kind_from_string(kind_tok);
    if (!kind)
        throw FormatError(tz.count, "unknown kind '" + std::string(kind_tok) +
                                        "', expected cbts, cbps, tri, or penta");

    const int n = tz.require_positive_int("n");
    const int m = tz.require_positive_int("m");
    const bool penta_layout = bands_per_row(*kind) == 5;

    // Per k: A_k, B_k, C_k [, D_k, E_k], all m*m row-major.
    std::vector<Block> a, b, c, d, e;
    for (int k = 0; k < n; ++k) {
        const std::size_t tok_a = tz.count + 1;
        a.push_back(read_block(tz, m, "block A entry"));
        b.push_back(read_block(tz, m, "block B entry"));
        const std::size_t tok_c = tz.count + 1;
        c.push_back(read_block(tz, m, "block C entry"));
        std::size_t tok_d = 0, tok_e = 0;
        if (penta_layout) {
            tok_d = tz.count + 1;
            d.push_back(read_block(tz, m, "block D entry"));
            tok_e = tz.count + 1;
            e.push_back(read_block(tz, m, "block E entry"));
        }
        if (*kind == SystemKind::tri || *kind == SystemKind::penta) {
            if (k == 0) require_zero_block(a[0], tok_a, "corner block A_1");
            if (k == n - 1) require_zero_block(c.back(), tok_c, "corner block C_n");
        }
        if (*kind == SystemKind::penta) {
            if (k == 0) require_zero_block(e[0], tok_e, "corner block E_1");
            if (k == 1) require_zero_block(e[1], tok_e, "corner block E_2");
            if (k == n - 2) require_zero_block(d[static_cast<std::size_t>(k)], tok_d, "corner block D_{n-1}");
            if (k == n - 1) require_zero_block(d.back(), tok_d, "corner block D_n");
        }
    }

    CbxFile file;
    file.kind = *kind;
    switch (*kind) {
        case SystemKind::cbts:
            file.op = CyclicBlockTri(n, m, std::move(a), std::move(b), std::move(c));
            break;
        case SystemKind::cbps:
            file.op = CyclicBlockPenta(n, m, std::move(a), std::move(b), std::move(c), std::move(d),
                                       std::move(e));
            break;
        case SystemKind::tri:
            file.op = BlockTriMatrix(n, m, {a.begin() + 1, a.end()}, std::move(b),
                                     {c.begin(), c.end() - 1});
            break;
        case SystemKind::penta:
            file.op = BlockPentaMatrix(n, m, {e.begin() + 2, e.end()}, {a.begin() + 1, a.end()},
                                       std::move(b), {c.begin(), c.end() - 1},
                                       {d.begin(), d.end() - 2});
            break;
    }

    auto section = tz.next();
    if (section && *section == "RHS") {
        file.rhs = read_section(tz, n, m, "RHS entry");
        section = tz.next();
    }
    if (section && *section == "SOL") {
        file.sol = read_section(tz, n, m, "SOL entry");
        section = tz.next();
    }
    if (section)
        throw FormatError(tz.count, "unexpected token '" + std::string(*section) +
                                        "' after the last section");
    return file;
}

std::string write_cbx(const CbxFile& file) {
    std::string out;
    out.reserve(1024);

    const int nb = bands_per_row(file.kind);
    int n = 0, m = 0;
    std::visit(
        [&](const auto& op) {
            n = op.n;
            m = op.m;
        },
        file.op);

    out.append(kMagic);
    out.push_back(' ');
    out.append(to_string(file.kind));
    out.push_back(' ');
    out.append(std::to_string(n));
    out.push_back(' ');
    out.append(std::to_string(m));
    out.push_back('\n');

    const Block zero(m);
    auto band_block = [&](int k, int band) -> const Block& {
        switch (file.kind) {
            case SystemKind::cbts: {
                const auto& op = std::get<CyclicBlockTri>(file.op);
                const std::size_t uk = static_cast<std::size_t>(k);
                return band == 0 ? op.a[uk] : band == 1 ? op.b[uk] : op.c[uk];
            }
            case SystemKind::cbps: {
                const auto& op = std::get<CyclicBlockPenta>(file.op);
                const std::size_t uk = static_cast<std::size_t>(k);
                switch (band) {
                    case 0: return op.a[uk];
                    case 1: return op.b[uk];
                    case 2: return op.c[uk];
                    case 3: return op.d[uk];
                    default: return op.e[uk];
                }
            }
            case SystemKind::tri: {
                const auto& op = std::get<BlockTriMatrix>(file.op);
                if (band == 0) return k >= 1 ? op.sub[static_cast<std::size_t>(k - 1)] : zero;
                if (band == 1) return op.diag[static_cast<std::size_t>(k)];
                return k <= n - 2 ? op.sup[static_cast<std::size_t>(k)] : zero;
            }
            default: {
                const auto& op = std::get<BlockPentaMatrix>(file.op);
                switch (band) {
                    case 0: return k >= 1 ? op.sub[static_cast<std::size_t>(k - 1)] : zero;
                    case 1: return op.diag[static_cast<std::size_t>(k)];
                    case 2: return k <= n - 2 ? op.sup[static_cast<std::size_t>(k)] : zero;
                    case 3: return k <= n - 3 ? op.supsup[static_cast<std::size_t>(k)] : zero;
                    default: return k >= 2 ? op.subsub[static_cast<std::size_t>(k - 2)] : zero;
                }
            }
        }
    };

    for (int k = 0; k < n; ++k)
        for (int band = 0; band < nb; ++band) append_block(out, band_block(k, band));

    if (file.rhs) append_section(out, "RHS", *file.rhs);
    if (file.sol) append_section(out, "SOL", *file.sol);
    return out;
}

CbxFile generate(const GenSpec& spec) {
    const int n = spec.n;
    const int m = spec.m;
    const bool penta_layout = bands_per_row(spec.kind) == 5;
    const int n_min = spec.kind == SystemKind::cbps    ? 5
                      : spec.kind == SystemKind::cbts  ? 3
                      : spec.kind == SystemKind::penta ? 3
                                                       : 2;
    if (n < n_min)
        throw DimensionError(std::string(to_string(spec.kind)) + " generation needs n >= " +
                             std::to_string(n_min) + ", got " + std::to_string(n));
    if (m < 1) throw DimensionError("block order must be >= 1");
    if (!(spec.dominance >= 0.0) || !std::isfinite(spec.dominance))
        throw DimensionError("dominance must be a finite value >= 0");

    std::mt19937_64 gen(spec.seed);

    // Draw order is fixed: per k the bands A, B, C (, D, E) row-major, then
    // the RHS; banded kinds zero their corner slots after drawing.
    std::vector<Block> a, b, c, d, e;
    for (int k = 0; k < n; ++k) {
        a.push_back(random_block(gen, m));
        b.push_back(random_block(gen, m));
        c.push_back(random_block(gen, m));
        if (penta_layout) {
            d.push_back(random_block(gen, m));
            e.push_back(random_block(gen, m));
        }
    }
    if (spec.kind == SystemKind::tri || spec.kind == SystemKind::penta) {
        a[0] = Block(m);
        c[static_cast<std::size_t>(n - 1)] = Block(m);
    }
    if (spec.kind == SystemKind::penta) {
        e[0] = Block(m);
        e[1] = Block(m);
        d[static_cast<std::size_t>(n - 2)] = Block(m);
        d[static_cast<std::size_t>(n - 1)] = Block(m);
    }

    // Lift each diagonal block far enough that every scalar row of the
    // assembled matrix is strictly dominant for dominance >= 1.
    for (int k = 0; k < n; ++k) {
        const std::size_t uk = static_cast<std::size_t>(k);
        double rowmass = 0.0;
        for (int i = 0; i < m; ++i) {
            double s = 0.0;
            auto add = [&](const Block& blk) {
                for (int j = 0; j < m; ++j) s += std::abs(blk(i, j));
            };
            add(a[uk]);
            add(b[uk]);
            add(c[uk]);
            if (penta_layout) {
                add(d[uk]);
                add(e[uk]);
            }
            rowmass = std::max(rowmass, s);
        }
        const double boost = spec.dominance * (2.0 + rowmass);
        for (int i = 0; i < m; ++i) b[uk](i, i) += boost;
    }

    std::vector<double> rhs(static_cast<std::size_t>(n) * m);
    for (double& v : rhs) v = sym_real(gen);

    CbxFile file;
    file.kind = spec.kind;
    switch (spec.kind) {
        case SystemKind::cbts:
            file.op = CyclicBlockTri(n, m, std::move(a), std::move(b), std::move(c));
            break;
        case SystemKind::cbps:
            file.op = CyclicBlockPenta(n, m, std::move(a), std::move(b), std::move(c), std::move(d),
                                       std::move(e));
            break;
        case SystemKind::tri:
            file.op = BlockTriMatrix(n, m, {a.begin() + 1, a.end()}, std::move(b),
                                     {c.begin(), c.end() - 1});
            break;
        case SystemKind::penta:
            file.op = BlockPentaMatrix(n, m, {e.begin() + 2, e.end()}, {a.begin() + 1, a.end()},
                                       std::move(b), {c.begin(), c.end() - 1},
                                       {d.begin(), d.end() - 2});
            break;
    }
    file.rhs = BlockVector(n, m, std::move(rhs));
    return file;
}

}  // namespace cbx
