#pragma once

// Brute-force reference for correctness testing: the same point positions the
// generator draws, all-pairs edges by the direct distance formula, and an
// exact stream comparator. Definitionally correct and deliberately
// independent of the sweep and of the precomputed adjacency test.

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "generator.hpp"
#include "geometry.hpp"
#include "partition.hpp"
#include "sweep.hpp"

namespace rhg {

struct PointTrace {
    std::vector<PolarPoint> points; // index == vertex id
};

/// All n vertex positions in id order, via the generator's own sampling path
/// (annulus-major, chunk-minor streams).
inline PointTrace materialize_points(const ModelParams& params, std::uint32_t cell_target = 8) {
    const auto layout = make_layout(params, cell_target);
    PointTrace trace;
    trace.points.resize(params.n);
    for (std::uint32_t i = 0; i < layout.count; ++i)
        for (std::uint32_t c = 0; c < layout.chunks; ++c) {
            ChunkPointSource src(layout, i, c, params.seed);
            while (!src.exhausted()) {
                const PointDraw p  = src.next();
                trace.points[p.id] = {p.r, p.theta};
            }
        }
    return trace;
}

inline constexpr std::uint64_t naive_oracle_guard = 100000;

/// All canonical pairs with hyperbolic distance < R, by the direct formula.
inline std::vector<std::pair<std::uint64_t, std::uint64_t>> naive_edges(const PointTrace& trace, double R) {
    const std::uint64_t n = trace.points.size();
    if (n > naive_oracle_guard)
        throw std::invalid_argument("naive_edges: refusing quadratic work above n = 100000");
    std::vector<std::pair<std::uint64_t, std::uint64_t>> edges;
    for (std::uint64_t u = 0; u < n; ++u)
        for (std::uint64_t v = u + 1; v < n; ++v)
            if (hyperbolic_distance(trace.points[u], trace.points[v]) < R)
                edges.emplace_back(u, v);
    return edges;
}

/// Exact multiset diff of two edge streams. Mismatches whose distance lies
/// within 1e-9 R of the threshold are tallied separately so floating-point
/// disagreement between the precomputed and direct tests cannot fail a run;
/// anything else is a hard error.
struct CompareReport {
    std::uint64_t missing = 0, extra = 0, duplicates = 0, boundary_band = 0;
    bool          clean() const { return missing == 0 && extra == 0 && duplicates == 0; }
};

inline CompareReport compare(std::vector<std::pair<std::uint64_t, std::uint64_t>> generated,
                             std::vector<std::pair<std::uint64_t, std::uint64_t>> oracle,
                             const PointTrace* trace = nullptr, double R = 0.0) {
    CompareReport report;
    std::sort(generated.begin(), generated.end());
    std::sort(oracle.begin(), oracle.end());

    for (std::size_t i = 1; i < generated.size(); ++i)
        if (generated[i] == generated[i - 1])
            ++report.duplicates;
    generated.erase(std::unique(generated.begin(), generated.end()), generated.end());

    auto in_band = [&](const std::pair<std::uint64_t, std::uint64_t>& e) {
        if (!trace || R <= 0.0)
            return false;
        const double d = hyperbolic_distance(trace->points[e.first], trace->points[e.second]);
        return std::abs(d - R) < 1e-9 * R;
    };

    std::size_t i = 0, j = 0;
    while (i < generated.size() || j < oracle.size()) {
        if (j >= oracle.size() || (i < generated.size() && generated[i] < oracle[j])) {
            in_band(generated[i]) ? ++report.boundary_band : ++report.extra;
            ++i;
        } else if (i >= generated.size() || oracle[j] < generated[i]) {
            in_band(oracle[j]) ? ++report.boundary_band : ++report.missing;
            ++j;
        } else {
            ++i;
            ++j;
        }
    }
    return report;
}

/// Generate with `params` and diff against the naive oracle.
inline CompareReport verify_against_oracle(const ModelParams& params, const GenOptions& opts) {
    if (params.n > naive_oracle_guard)
        throw std::invalid_argument("verify_against_oracle: refusing quadratic work above n = 100000");
    std::vector<std::pair<std::uint64_t, std::uint64_t>> edges;
    PointTrace                                           trace;
    trace.points.resize(params.n);
    generate(
        params, opts, [&](std::uint64_t u, std::uint64_t v) { edges.emplace_back(u, v); },
        [&](std::uint64_t id, double r, double theta) { trace.points[id] = {r, theta}; });
    return compare(std::move(edges), naive_edges(trace, params.R), &trace, params.R);
}

} // namespace rhg
