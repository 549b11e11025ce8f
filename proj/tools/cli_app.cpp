#include "cli_app.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <variant>

#include <CLI11.hpp>

#include "cbx/dense.hpp"
#include "cbx/io.hpp"

namespace cbx {

namespace {

std::string format_real(double v) {
    std::array<char, 40> buf{};
    const auto [ptr, ec] =
        std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
    return std::string(buf.data(), static_cast<std::size_t>(ptr - buf.data()));
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open input file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open output file '" + path + "'");
    out << text;
}

int op_rows(const AnyOperator& op) {
    return std::visit([](const auto& o) { return o.n; }, op);
}

int op_order(const AnyOperator& op) {
    return std::visit([](const auto& o) { return o.m; }, op);
}

BlockVector apply_operator(const AnyOperator& op, const BlockVector& x) {
    return std::visit(
        [&](const auto& o) {
            if constexpr (requires { apply_cyclic(o, x); })
                return apply_cyclic(o, x);
            else
                return apply_banded(o, x);
        },
        op);
}

double operator_norm_inf(const AnyOperator& op) {
    return std::visit([](const auto& o) { return norm_inf(o); }, op);
}

double scaled_residual(const AnyOperator& op, const BlockVector& x, const BlockVector& f) {
    const BlockVector ax = apply_operator(op, x);
    double num = 0.0;
    for (std::size_t i = 0; i < ax.data.size(); ++i)
        num = std::max(num, std::abs(ax.data[i] - f.data[i]));
    const double denom = operator_norm_inf(op) * x.norm_inf() + f.norm_inf();
    return denom > 0.0 ? num / denom : 0.0;
}

struct SolveOutcome {
    BlockVector x;
    double residual_inf = 0.0;
    OpCounters counters;
};

SolveOutcome solve_woodbury(const AnyOperator& op, const BlockVector& f, const WoodburyParams& p) {
    SolveOutcome res;
    if (const auto* sys = std::get_if<CyclicBlockTri>(&op)) {
        SolveReport rep = solve_cbts(*sys, f, p);
        return {std::move(rep.x), rep.residual_inf, rep.counters};
    }
    if (const auto* sys = std::get_if<CyclicBlockPenta>(&op)) {
        SolveReport rep = solve_cbps(*sys, f, p);
        return {std::move(rep.x), rep.residual_inf, rep.counters};
    }
    // Non-cyclic kinds have no corner correction; the structured path is a
    // plain banded factor + solve.
    OpCounters ctr;
    BlockVector x;
    if (const auto* tri = std::get_if<BlockTriMatrix>(&op)) {
        BandedFactorization fact = factor_banded(*tri, &ctr);
        x = solve_banded(fact, f, &ctr);
    } else {
        BandedFactorization fact = factor_banded(std::get<BlockPentaMatrix>(op), &ctr);
        x = solve_banded(fact, f, &ctr);
    }
    res.residual_inf = scaled_residual(op, x, f);
    res.x = std::move(x);
    res.counters = ctr;
    return res;
}

SolveOutcome solve_dense_method(const AnyOperator& op, const BlockVector& f) {
    const DenseSystem d = std::visit([](const auto& o) { return assemble_dense(o); }, op);
    std::vector<double> x = dense_solve(d, f.data);
    SolveOutcome res;
    res.x = BlockVector(f.n, f.m, std::move(x));
    res.residual_inf = scaled_residual(op, res.x, f);
    return res;
}

double median_seconds(std::vector<double> samples) {
    std::sort(samples.begin(), samples.end());
    return samples[samples.size() / 2];
}

template <typename Fn>
double time_once(Fn&& fn) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    const auto stop = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(stop - start).count();
}

int cmd_solve(const std::string& input, const std::string& output, const WoodburyParams& params,
              const std::string& method, std::ostream& out) {
    CbxFile file = parse_cbx(read_file(input));
    if (!file.rhs) throw FormatError(1, "solve requires an RHS section in the input file");

    const SolveOutcome res = method == "dense" ? solve_dense_method(file.op, *file.rhs)
                                               : solve_woodbury(file.op, *file.rhs, params);

    out << "kind " << to_string(file.kind) << "\n";
    out << "n " << op_rows(file.op) << "\n";
    out << "m " << op_order(file.op) << "\n";
    out << "method " << method << "\n";
    out << "residual_inf " << format_real(res.residual_inf) << "\n";
    out << "matmuls " << res.counters.matmuls << "\n";
    out << "lus " << res.counters.lus << "\n";
    out << "solves " << res.counters.solves << "\n";

    if (!output.empty()) {
        file.sol = res.x;
        write_file(output, write_cbx(file));
    }
    return exit_ok;
}

int cmd_gen(const GenSpec& spec, const std::string& output) {
    write_file(output, write_cbx(generate(spec)));
    return exit_ok;
}

int cmd_verify(const std::string& input, std::ostream& out) {
    const CbxFile file = parse_cbx(read_file(input));
    if (!file.rhs || !file.sol)
        throw FormatError(1, "verify requires both RHS and SOL sections in the input file");

    const double residual = scaled_residual(file.op, *file.sol, *file.rhs);
    out << "residual_inf " << format_real(residual) << "\n";

    const int dim = op_rows(file.op) * op_order(file.op);
    if (dim <= 600) {
        const SolveOutcome oracle = solve_dense_method(file.op, *file.rhs);
        double dev = 0.0;
        for (std::size_t i = 0; i < oracle.x.data.size(); ++i)
            dev = std::max(dev, std::abs(oracle.x.data[i] - file.sol->data[i]));
        const double scale = oracle.x.norm_inf();
        out << "dense_deviation " << format_real(scale > 0.0 ? dev / scale : dev) << "\n";
    }
    return residual <= 1e-8 ? exit_ok : exit_singular;
}

int cmd_bench(SystemKind kind, int m, const std::vector<int>& n_list, int repeat,
              std::ostream& out) {
    out << "n,m,method,seconds,matmuls,lus,solves\n";
    for (const int n : n_list) {
        const GenSpec spec{kind, n, m, 9000 + static_cast<std::uint64_t>(n), 1.5};
        const CbxFile file = generate(spec);
        const BlockVector& f = *file.rhs;

        OpCounters counters;
        std::vector<double> times;
        for (int r = 0; r < repeat; ++r) {
            SolveOutcome res;
            times.push_back(time_once([&] { res = solve_woodbury(file.op, f, {}); }));
            counters = res.counters;
        }
        char sec[32];
        std::snprintf(sec, sizeof sec, "%.6e", median_seconds(times));
        out << n << ',' << m << ",woodbury," << sec << ',' << counters.matmuls << ','
            << counters.lus << ',' << counters.solves << "\n";

        if (n * m <= 600) {
            const DenseSystem d = std::visit([](const auto& o) { return assemble_dense(o); },
                                             file.op);
            std::vector<double> dense_times;
            for (int r = 0; r < repeat; ++r)
                dense_times.push_back(time_once([&] { (void)dense_solve(d, f.data); }));
            std::snprintf(sec, sizeof sec, "%.6e", median_seconds(dense_times));
            out << n << ',' << m << ",dense," << sec << ",0,0,0\n";
        }
    }
    return exit_ok;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"cyclic block tri/penta-diagonal linear system toolkit"};
    app.require_subcommand(1);

    const auto kind_check = CLI::IsMember({"cbts", "cbps", "tri", "penta"});

    // solve
    auto* solve = app.add_subcommand("solve", "solve the system stored in a CBX file");
    std::string in_path, out_path;
    std::string method = "woodbury";
    WoodburyParams params;
    solve->add_option("--input", in_path, "input CBX file with an RHS section")->required();
    solve->add_option("--output", out_path, "write input plus a SOL section here");
    solve->add_option("--alpha", params.alpha, "corner correction scalar");
    solve->add_option("--beta", params.beta, "corner correction scalar");
    solve->add_option("--gamma", params.gamma, "corner correction scalar");
    solve->add_option("--delta", params.delta, "corner correction scalar");
    solve->add_option("--method", method, "woodbury (structured) or dense (reference)")
        ->check(CLI::IsMember({"woodbury", "dense"}));

    // gen
    auto* gen = app.add_subcommand("gen", "generate a random system");
    GenSpec spec;
    std::string kind_str = "cbts", gen_out;
    std::uint64_t seed = 0;
    gen->add_option("--kind", kind_str, "cbts, cbps, tri, or penta")->required()->check(kind_check);
    gen->add_option("--n", spec.n, "number of block rows")->required();
    gen->add_option("--m", spec.m, "block order")->required();
    gen->add_option("--seed", seed, "generator seed")->required();
    gen->add_option("--dominance", spec.dominance,
                    "diagonal boost factor; >= 1 gives strict diagonal dominance");
    gen->add_option("--output", gen_out, "output CBX file")->required();

    // verify
    auto* verify = app.add_subcommand("verify", "check the SOL section of a CBX file");
    std::string verify_in;
    verify->add_option("--input", verify_in, "CBX file with RHS and SOL sections")->required();

    // bench
    auto* bench = app.add_subcommand("bench", "time structured vs dense solves (CSV)");
    std::string bench_kind = "cbps";
    int bench_m = 1;
    int repeat = 3;
    std::vector<int> n_list;
    bench->add_option("--kind", bench_kind, "system kind")->required()->check(kind_check);
    bench->add_option("--m", bench_m, "block order (bench harness caps at 64)")
        ->required()
        ->check(CLI::Range(1, 64));
    bench->add_option("--n-list", n_list, "comma separated block row counts")
        ->required()
        ->delimiter(',');
    bench->add_option("--repeat", repeat, "timing repeats per row")->check(CLI::Range(1, 1000));

    std::vector<std::string> argv_storage;
    argv_storage.reserve(args.size() + 1);
    argv_storage.push_back("cbx");
    for (const std::string& a : args) argv_storage.push_back(a);
    std::vector<const char*> argv;
    for (const std::string& a : argv_storage) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n\n" << app.help();
        return exit_usage;
    }

    try {
        if (solve->parsed()) return cmd_solve(in_path, out_path, params, method, out);
        if (gen->parsed()) {
            spec.kind = *kind_from_string(kind_str);
            spec.seed = seed;
            return cmd_gen(spec, gen_out);
        }
        if (verify->parsed()) return cmd_verify(verify_in, out);
        if (bench->parsed()) return cmd_bench(*kind_from_string(bench_kind), bench_m, n_list,
                                              repeat, out);
    } catch (const SingularPivotError& e) {
        err << "error: " << e.what() << "\n";
        return exit_singular;
    } catch (const SingularCapacitanceError& e) {
        err << "error: " << e.what() << "\n";
        return exit_singular;
    } catch (const SingularBlockError& e) {
        err << "error: " << e.what() << "\n";
        return exit_singular;
    } catch (const SingularDenseError& e) {
        err << "error: " << e.what() << "\n";
        return exit_singular;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_format;
    }
    return exit_usage;
}

}  // namespace cbx
