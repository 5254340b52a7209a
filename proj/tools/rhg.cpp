// Command-line front end: generate / verify / stats / bench.

#include <CLI11.hpp>

#include <rhg/generator.hpp>
#include <rhg/io.hpp>
#include <rhg/oracle.hpp>
#include <rhg/stats.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

namespace {

struct CliConfig {
    std::uint64_t n       = 0;
    double        gamma   = 0.0;
    double        alpha   = 0.0;
    double        dbar    = 0.0;
    double        C       = 0.0;
    bool          has_gamma = false, has_alpha = false, has_dbar = false, has_C = false;
    std::uint64_t seed        = 1;
    std::uint32_t chunks      = 0; // 0: default to workers
    std::uint32_t workers     = 0; // 0: hardware parallelism
    std::uint32_t cell_target = 8;
    std::string   format      = "text";
    std::string   output;
    std::uint32_t trials       = 1;
    bool          inject_fault = false;
};

void add_model_options(CLI::App* cmd, CliConfig& cfg) {
    cmd->add_option("-n,--nodes", cfg.n, "number of vertices")->required()->check(CLI::PositiveNumber);
    auto* g = cmd->add_option("--gamma", cfg.gamma, "power-law exponent (> 2)");
    auto* a = cmd->add_option("--alpha", cfg.alpha, "radial dispersion (> 1/2)");
    g->excludes(a);
    a->excludes(g);
    auto* d = cmd->add_option("--avg-degree", cfg.dbar, "target average degree");
    auto* c = cmd->add_option("--radial-const", cfg.C, "radial constant C in R = 2 ln n + C");
    d->excludes(c);
    c->excludes(d);
    cmd->add_option("--seed", cfg.seed, "root seed; the only entropy source");
    cmd->add_option("--chunks", cfg.chunks, "angular chunks P, part of the graph identity (default: workers)");
    cmd->add_option("--workers", cfg.workers, "worker threads (default: hardware parallelism)");
    cmd->add_option("--cell-target", cfg.cell_target, "target points per cell")->check(CLI::PositiveNumber);
    cmd->callback([&cfg, g, a, d, c] {
        cfg.has_gamma = g->count() > 0;
        cfg.has_alpha = a->count() > 0;
        cfg.has_dbar  = d->count() > 0;
        cfg.has_C     = c->count() > 0;
    });
}

rhg::ModelParams resolve_params(const CliConfig& cfg, std::uint64_t seed) {
    if (cfg.has_gamma == cfg.has_alpha)
        throw CLI::ValidationError("exactly one of --gamma / --alpha is required");
    if (cfg.has_dbar == cfg.has_C)
        throw CLI::ValidationError("exactly one of --avg-degree / --radial-const is required");
    const double alpha = cfg.has_alpha ? cfg.alpha : rhg::alpha_from_gamma(cfg.gamma);
    const double C     = cfg.has_C ? cfg.C : rhg::radial_const_from_avg_degree(cfg.dbar, alpha);

    std::uint32_t workers = cfg.workers ? cfg.workers : std::max(1u, std::thread::hardware_concurrency());
    std::uint32_t chunks  = cfg.chunks ? cfg.chunks : workers;
    return rhg::ModelParams(cfg.n, alpha, C, seed, chunks);
}

rhg::GenOptions resolve_options(const CliConfig& cfg) {
    rhg::GenOptions opts;
    opts.workers                = cfg.workers;
    opts.cell_target            = cfg.cell_target;
    opts.inject_adjacency_fault = cfg.inject_fault;
    return opts;
}

struct OutputStream {
    std::ostream* os = &std::cout;
    std::ofstream file;

    explicit OutputStream(const std::string& path, bool binary) {
        if (!path.empty() && path != "-") {
            file.open(path, binary ? std::ios::binary | std::ios::out : std::ios::out);
            if (!file)
                throw std::runtime_error("cannot open output file: " + path);
            os = &file;
        }
    }
};

int cmd_generate(const CliConfig& cfg) {
    const auto params = resolve_params(cfg, cfg.seed);
    const auto opts   = resolve_options(cfg);

    rhg::RunStats stats;
    if (cfg.format == "text" || cfg.format == "binary") {
        OutputStream out(cfg.output, cfg.format == "binary");
        if (cfg.format == "text") {
            rhg::TextEdgeWriter writer(*out.os);
            stats = rhg::generate(params, opts, [&](std::uint64_t u, std::uint64_t v) { writer.edge(u, v); });
        } else {
            rhg::BinaryEdgeWriter writer(*out.os);
            stats = rhg::generate(params, opts, [&](std::uint64_t u, std::uint64_t v) { writer.edge(u, v); });
        }
        out.os->flush();
        if (!*out.os)
            throw std::runtime_error("edge output failed");
    } else if (cfg.format == "fingerprint") {
        stats = rhg::generate_stats(params, opts);
        OutputStream out(cfg.output, false);
        *out.os << stats.total.fingerprint << "\n";
        out.os->flush();
    } else if (cfg.format == "none") {
        stats = rhg::generate_stats(params, opts);
    } else {
        throw CLI::ValidationError("unknown --format (text|binary|fingerprint|none)");
    }

    rhg::RunReport::from_stats(params, stats).write_text(std::cerr);
    return 0;
}

int cmd_verify(const CliConfig& cfg) {
    if (cfg.n > rhg::naive_oracle_guard) {
        std::cerr << "verify: n = " << cfg.n << " exceeds the oracle guard of " << rhg::naive_oracle_guard
                  << " (quadratic reference)\n";
        return 2;
    }
    const auto opts = resolve_options(cfg);
    bool       ok   = true;
    for (std::uint32_t t = 0; t < cfg.trials; ++t) {
        const auto params = resolve_params(cfg, cfg.seed + t);
        const auto report = rhg::verify_against_oracle(params, opts);
        std::cout << "seed=" << params.seed << " missing=" << report.missing << " extra=" << report.extra
                  << " duplicates=" << report.duplicates << " boundary_band=" << report.boundary_band << "\n";
        ok = ok && report.clean();
    }
    std::cout << (ok ? "verify: PASS" : "verify: FAIL") << "\n";
    return ok ? 0 : 1;
}

int cmd_stats(const CliConfig& cfg) {
    const auto params = resolve_params(cfg, cfg.seed);
    const auto opts   = resolve_options(cfg);

    std::vector<std::uint32_t> degrees;
    const auto                 stats  = rhg::generate_stats(params, opts, &degrees);
    auto                       report = rhg::RunReport::from_stats(params, stats);
    const auto d_min = static_cast<std::uint32_t>(std::max(10.0, std::llround(report.expected_avg_degree) * 1.0));
    try {
        report.gamma_hat = rhg::powerlaw_mle(degrees, d_min);
    } catch (const std::invalid_argument&) {
        // not enough tail; gamma_hat stays NaN
    }

    OutputStream out(cfg.output, false);
    *out.os << rhg::RunReport::csv_header() << "\n";
    report.write_csv_row(*out.os);
    out.os->flush();
    report.write_text(std::cerr);
    return 0;
}

int cmd_bench(const CliConfig& cfg) {
    const auto opts = resolve_options(cfg);

    OutputStream out(cfg.output, false);
    *out.os << "n,avg_degree_target,gamma,chunks,workers,seconds,edges_per_sec,overestimation_ratio\n";
    for (double gamma: {2.2, 3.0}) {
        for (double dbar: {4.0, 16.0, 64.0, 256.0}) {
            const double        alpha   = rhg::alpha_from_gamma(gamma);
            const std::uint32_t workers = cfg.workers ? cfg.workers : std::max(1u, std::thread::hardware_concurrency());
            const std::uint32_t chunks  = cfg.chunks ? cfg.chunks : workers;
            const auto params = rhg::ModelParams::from_avg_degree(cfg.n, alpha, dbar, cfg.seed, chunks);
            const auto stats  = rhg::generate_stats(params, opts);
            *out.os << cfg.n << ',' << dbar << ',' << gamma << ',' << chunks << ',' << workers << ','
                    << stats.seconds << ',' << (stats.seconds > 0 ? stats.total.edges / stats.seconds : 0.0) << ','
                    << stats.overestimation_ratio() << "\n";
            out.os->flush();
        }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"threshold random hyperbolic graph generator (streaming sweep-line)"};
    app.require_subcommand(1);

    CliConfig cfg;

    auto* gen = app.add_subcommand("generate", "generate a graph and stream its edges");
    add_model_options(gen, cfg);
    gen->add_option("--format", cfg.format, "text|binary|fingerprint|none")->capture_default_str();
    gen->add_option("-o,--output", cfg.output, "output path (default: standard output)");

    auto* ver = app.add_subcommand("verify", "diff the generator against the brute-force oracle");
    add_model_options(ver, cfg);
    ver->add_option("--trials", cfg.trials, "number of consecutive seeds to verify")->check(CLI::PositiveNumber);
    ver->add_flag("--inject-fault", cfg.inject_fault, "negative control: flip the adjacency comparison")
        ->group(""); // hidden; test plumbing

    auto* st = app.add_subcommand("stats", "generate and emit the run report as CSV");
    add_model_options(st, cfg);
    st->add_option("-o,--output", cfg.output, "output path (default: standard output)");

    auto* be = app.add_subcommand("bench", "run the degree/exponent grid and emit timing CSV");
    be->add_option("-n,--nodes", cfg.n, "number of vertices")->required()->check(CLI::PositiveNumber);
    be->add_option("--seed", cfg.seed, "root seed");
    be->add_option("--chunks", cfg.chunks, "angular chunks P (default: workers)");
    be->add_option("--workers", cfg.workers, "worker threads (default: hardware parallelism)");
    be->add_option("--cell-target", cfg.cell_target, "target points per cell");
    be->add_option("-o,--output", cfg.output, "output path (default: standard output)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed())
            return cmd_generate(cfg);
        if (ver->parsed())
            return cmd_verify(cfg);
        if (st->parsed())
            return cmd_stats(cfg);
        if (be->parsed())
            return cmd_bench(cfg);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
