#pragma once

// Communication-free multi-worker driver.
//
// Work splits into P + 1 units: unit 0 emits the clique/global subgraph by
// all-pairs tests (and reports the global vertices), units 1..P run the
// streaming sweep of one chunk each. Every unit is a pure function of
// (params, chunk id), so workers share nothing and any worker count produces
// the same graph. Consumers see units in a fixed order; per-unit output order
// is the deterministic sweep order.

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include "partition.hpp"
#include "sweep.hpp"

namespace rhg {

struct GenOptions {
    std::uint32_t workers     = 0; // 0: hardware concurrency
    std::uint32_t cell_target = 8;
    Schedule      schedule    = Schedule::RoundRobin;
    bool          inject_adjacency_fault = false; // negative control for verification tests
};

struct RunStats {
    std::uint64_t              n = 0;
    std::uint64_t              global_vertices = 0;
    double                     r_G             = 0.0;
    ChunkStats                 total;
    std::vector<std::uint64_t> unit_edges, unit_comps, unit_vertices; // index 0 = global unit
    double                     seconds = 0.0;

    double avg_degree() const { return n ? 2.0 * static_cast<double>(total.edges) / static_cast<double>(n) : 0.0; }
    double overestimation_ratio() const {
        return static_cast<double>(total.comps) / static_cast<double>(std::max<std::uint64_t>(total.edges, 1));
    }
};

/// All clique/global points plus their request half-widths per streaming
/// annulus; regenerated identically by anyone who asks.
struct GlobalRequestSet {
    std::vector<PointDraw> points;
    std::vector<double>    half_widths; // [point * streaming_count + pos]
    std::size_t            streaming_count = 0;

    const double* widths_of(std::size_t point) const { return half_widths.data() + point * streaming_count; }
};

inline GlobalRequestSet build_global_points(const AnnulusLayout& layout, std::uint64_t seed) {
    GlobalRequestSet g;
    g.streaming_count = layout.count - layout.first_streaming;
    for (std::uint32_t i = 0; i < layout.first_streaming; ++i)
        for (std::uint32_t c = 0; c < layout.chunks; ++c) {
            ChunkPointSource src(layout, i, c, seed);
            while (!src.exhausted()) {
                const PointDraw p = src.next();
                for (std::uint32_t s = layout.first_streaming; s < layout.count; ++s)
                    g.half_widths.push_back(point_half_width(layout, p, s));
                g.points.push_back(p);
            }
        }
    return g;
}

namespace detail {

// Unit 0: the complete clique/global subgraph by pairwise precomputed tests.
template <typename Sink>
ChunkStats run_global_unit(const AnnulusLayout& layout, const GlobalRequestSet& globals, Sink& sink) {
    ChunkStats stats(layout.count);
    for (const auto& g: globals.points) {
        sink.vertex(g.id, g.r, g.theta);
        ++stats.vertices_by_annulus[g.annulus];
    }
    for (std::size_t i = 0; i < globals.points.size(); ++i) {
        const auto& p = globals.points[i];
        for (std::size_t j = i + 1; j < globals.points.size(); ++j) {
            const auto& q = globals.points[j];
            ++stats.comps;
            const std::uint32_t annulus = std::max(p.annulus, q.annulus);
            ++stats.comps_by_annulus[annulus];
            const double lhs = p.cos_theta * q.cos_theta + p.sin_theta * q.sin_theta;
            const double rhs = p.coth_r * q.coth_r - layout.cosh_R * p.inv_sinh_r * q.inv_sinh_r;
            if (lhs > rhs) {
                const std::uint64_t u = std::min(p.id, q.id);
                const std::uint64_t v = std::max(p.id, q.id);
                sink.edge(u, v);
                ++stats.edges;
                ++stats.edges_by_annulus[annulus];
                stats.fingerprint += u + v;
            }
        }
    }
    return stats;
}

template <typename Sink>
ChunkStats run_chunk_unit(const AnnulusLayout& layout, const GlobalRequestSet& globals, std::uint64_t seed,
                          std::uint32_t chunk, const GenOptions& opts, Sink& sink) {
    ChunkEngine<Sink> engine(layout, seed, chunk, opts.schedule, sink, opts.inject_adjacency_fault);
    for (std::size_t i = 0; i < globals.points.size(); ++i)
        engine.seed_global_request(globals.points[i], globals.widths_of(i));
    engine.run();
    return engine.stats();
}

struct BufferSink {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> edges;
    std::vector<std::tuple<std::uint64_t, double, double>> vertices;
    void edge(std::uint64_t u, std::uint64_t v) { edges.emplace_back(u, v); }
    void vertex(std::uint64_t id, double r, double theta) { vertices.emplace_back(id, r, theta); }
};

struct NullSink {
    void edge(std::uint64_t, std::uint64_t) {}
    void vertex(std::uint64_t, double, double) {}
};

} // namespace detail

/// Generate the graph of `params` and feed every unit's buffered output to
/// the consumer in unit order (global unit first, then chunks ascending).
/// Consumer: edge(u, v) with u < v; vertex(id, r, theta) for all n vertices.
/// The edge multiset and the consumption order are independent of the worker
/// count; re-running is byte-stable.
template <typename EdgeFn, typename VertexFn>
RunStats generate(const ModelParams& params, const GenOptions& opts, EdgeFn&& on_edge, VertexFn&& on_vertex) {
    const auto t0     = std::chrono::steady_clock::now();
    const auto layout = make_layout(params, opts.cell_target);
    const auto globals = build_global_points(layout, params.seed);

    const std::uint32_t workers =
        std::max<std::uint32_t>(1, opts.workers ? opts.workers : std::thread::hardware_concurrency());
    const std::uint32_t units = layout.chunks + 1;

    std::vector<detail::BufferSink> sinks(units);
    std::vector<ChunkStats>         stats(units, ChunkStats(layout.count));
    std::vector<std::uint8_t>       ready(units, 0);
    std::exception_ptr              failure;
    std::mutex                      mtx;
    std::condition_variable         cv;

    auto work = [&](std::uint32_t w) {
        try {
            for (std::uint32_t u = w; u < units; u += workers) {
                detail::BufferSink sink;
                ChunkStats         st = u == 0 ? detail::run_global_unit(layout, globals, sink)
                                               : detail::run_chunk_unit(layout, globals, params.seed, u - 1, opts, sink);
                std::lock_guard lock(mtx);
                sinks[u] = std::move(sink);
                stats[u] = std::move(st);
                ready[u] = 1;
                cv.notify_all();
            }
        } catch (...) {
            std::lock_guard lock(mtx);
            if (!failure)
                failure = std::current_exception();
            cv.notify_all();
        }
    };

    std::vector<std::thread> pool;
    for (std::uint32_t w = 0; w < workers; ++w)
        pool.emplace_back(work, w);

    RunStats run;
    run.n               = params.n;
    run.global_vertices = layout.global_vertices();
    run.r_G             = layout.r_G;
    run.total           = ChunkStats(layout.count);

    try {
        for (std::uint32_t u = 0; u < units; ++u) {
            {
                std::unique_lock lock(mtx);
                cv.wait(lock, [&] { return ready[u] || failure; });
                if (failure)
                    std::rethrow_exception(failure);
            }
            for (const auto& [id, r, theta]: sinks[u].vertices)
                on_vertex(id, r, theta);
            for (const auto& [eu, ev]: sinks[u].edges)
                on_edge(eu, ev);
            sinks[u] = detail::BufferSink{}; // free progressively
            run.total.merge(stats[u]);
            run.unit_edges.push_back(stats[u].edges);
            run.unit_comps.push_back(stats[u].comps);
            run.unit_vertices.push_back(u == 0 ? run.global_vertices : stats[u].streaming_vertices);
        }
    } catch (...) {
        for (auto& t: pool)
            t.join();
        throw;
    }
    for (auto& t: pool)
        t.join();

    run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return run;
}

template <typename EdgeFn>
RunStats generate(const ModelParams& params, const GenOptions& opts, EdgeFn&& on_edge) {
    return generate(params, opts, std::forward<EdgeFn>(on_edge), [](std::uint64_t, double, double) {});
}

/// Stats-only run: no edge materialization, per-worker accumulation. With a
/// non-null `degrees`, fills the exact degree of every vertex.
inline RunStats generate_stats(const ModelParams& params, const GenOptions& opts,
                               std::vector<std::uint32_t>* degrees = nullptr) {
    const auto t0      = std::chrono::steady_clock::now();
    const auto layout  = make_layout(params, opts.cell_target);
    const auto globals = build_global_points(layout, params.seed);

    const std::uint32_t workers =
        std::max<std::uint32_t>(1, opts.workers ? opts.workers : std::thread::hardware_concurrency());
    const std::uint32_t units = layout.chunks + 1;

    struct DegreeSink {
        std::vector<std::uint32_t>* deg = nullptr;
        void edge(std::uint64_t u, std::uint64_t v) {
            if (deg) {
                ++(*deg)[u];
                ++(*deg)[v];
            }
        }
        void vertex(std::uint64_t, double, double) {}
    };

    std::vector<std::vector<std::uint32_t>> worker_degrees(degrees ? workers : 0);
    std::vector<ChunkStats>                 stats(units, ChunkStats(layout.count));
    std::exception_ptr                      failure;
    std::mutex                              mtx;

    auto work = [&](std::uint32_t w) {
        try {
            DegreeSink sink;
            if (degrees) {
                worker_degrees[w].assign(params.n, 0);
                sink.deg = &worker_degrees[w];
            }
            for (std::uint32_t u = w; u < units; u += workers) {
                ChunkStats st = u == 0 ? detail::run_global_unit(layout, globals, sink)
                                       : detail::run_chunk_unit(layout, globals, params.seed, u - 1, opts, sink);
                stats[u]      = std::move(st);
            }
        } catch (...) {
            std::lock_guard lock(mtx);
            if (!failure)
                failure = std::current_exception();
        }
    };

    std::vector<std::thread> pool;
    for (std::uint32_t w = 0; w < workers; ++w)
        pool.emplace_back(work, w);
    for (auto& t: pool)
        t.join();
    if (failure)
        std::rethrow_exception(failure);

    RunStats run;
    run.n               = params.n;
    run.global_vertices = layout.global_vertices();
    run.r_G             = layout.r_G;
    run.total           = ChunkStats(layout.count);
    for (std::uint32_t u = 0; u < units; ++u) {
        run.total.merge(stats[u]);
        run.unit_edges.push_back(stats[u].edges);
        run.unit_comps.push_back(stats[u].comps);
        run.unit_vertices.push_back(u == 0 ? run.global_vertices : stats[u].streaming_vertices);
    }
    if (degrees) {
        degrees->assign(params.n, 0);
        for (const auto& wd: worker_degrees)
            for (std::size_t i = 0; i < wd.size(); ++i)
                (*degrees)[i] += wd[i];
    }
    run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return run;
}

} // namespace rhg
