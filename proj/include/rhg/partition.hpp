#pragma once

#include <algorithm>
#include <bit>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "geometry.hpp"
#include "rng.hpp"

namespace rhg {

enum class AnnulusClass : std::uint8_t { Clique, Global, Streaming };

/// Radial decomposition of the disk: equal-height annuli with the innermost
/// ones (upper boundary <= R/2) merged into a clique annulus, per-annulus
/// point counts, per-chunk counts, angular cell grids, and the per-annulus
/// constants used by the trig-free request-width computation.
struct AnnulusLayout {
    std::uint64_t n      = 0;
    std::uint32_t chunks = 1;
    double        alpha  = 1.0;
    double        R      = 0.0;
    double        cosh_R = 1.0;
    std::uint32_t cell_target = 8;

    std::uint32_t       count = 0;     // number of annuli after the clique merge
    bool                has_clique = false;
    std::vector<double> lower, upper; // lower[0] = 0, upper[count-1] = R

    std::vector<double>        probs;
    std::vector<std::uint64_t> counts;                    // n_i
    std::vector<std::vector<std::uint64_t>> chunk_counts; // [annulus][chunk]
    std::vector<std::vector<std::uint64_t>> id_base;      // [annulus][chunk]

    std::vector<std::uint64_t> cells;      // c_i, power of two
    std::vector<double>        cell_width; // 2 pi / c_i

    // cosh(alpha l_i), cosh(alpha u_i) for restricted radius inversion
    std::vector<double> cosh_alpha_lower, cosh_alpha_upper;
    // coth(l_i), cosh(R)/sinh(l_i); unused (inf) where l_i = 0
    std::vector<double> coth_lower, coshR_inv_sinh_lower;

    std::vector<AnnulusClass> classes;
    std::uint32_t             first_streaming = 0; // == count when no streaming annulus
    double                    r_G             = 0.0;

    std::uint32_t annulus_of(double r) const {
        auto it = std::upper_bound(upper.begin(), upper.end(), r);
        return static_cast<std::uint32_t>(std::min<std::ptrdiff_t>(it - upper.begin(), count - 1));
    }

    /// Maximum request half-width of a point at radius r in annulus i.
    double request_half_width(const PrecomputedPoint& p, std::uint32_t i) const {
        if (lower[i] <= 0.0)
            return M_PI;
        return angular_deviation_precomputed(p, coth_lower[i], coshR_inv_sinh_lower[i]);
    }

    /// Inverse of the radial cdf restricted to annulus i.
    double radius_from_uniform(std::uint32_t i, double u) const {
        const double c   = cosh_alpha_lower[i] + u * (cosh_alpha_upper[i] - cosh_alpha_lower[i]);
        const double r   = detail::acosh_clamped(c) / alpha;
        // u = 0 in the innermost annulus maps to r = 0, which the precomputed
        // fields cannot represent; nudge into the open interval.
        return r > 1e-12 ? r : 1e-12;
    }

    std::uint64_t cell_of(std::uint32_t i, double angle) const {
        return static_cast<std::uint64_t>(angle / cell_width[i]);
    }

    std::uint64_t global_vertices() const {
        std::uint64_t s = 0;
        for (std::uint32_t i = 0; i < first_streaming; ++i)
            s += counts[i];
        return s;
    }
};

/// Equal-height annuli spanning [0, R] with height at most ln(2)/alpha, so
/// the expected point mass of successive annuli grows by at most 2; all
/// annuli with upper boundary <= R/2 merge into the clique annulus.
/// Probabilities come from the exact cdf and telescope to 1.
inline AnnulusLayout build_annuli(const ModelParams& params, std::uint32_t cell_target = 8) {
    AnnulusLayout layout;
    layout.n           = params.n;
    layout.chunks      = params.chunks;
    layout.alpha       = params.alpha;
    layout.R           = params.R;
    layout.cosh_R      = std::cosh(params.R);
    layout.cell_target = cell_target;

    const auto k_equal = std::max<std::uint64_t>(
        1, static_cast<std::uint64_t>(std::ceil(params.alpha * params.R / std::log(2.0))));
    const double height = params.R / static_cast<double>(k_equal);

    std::vector<double> bounds(k_equal + 1);
    for (std::uint64_t j = 0; j <= k_equal; ++j)
        bounds[j] = static_cast<double>(j) * height;
    bounds[k_equal] = params.R;

    std::uint64_t merged = 0;
    while (merged + 1 < k_equal && bounds[merged + 1] <= params.R / 2.0)
        ++merged;
    // merged annuli 0..merged-1 collapse into the clique [0, bounds[merged]).
    layout.has_clique = merged >= 1;

    layout.lower.push_back(0.0);
    const std::uint64_t first_upper = std::max<std::uint64_t>(merged, 1);
    for (std::uint64_t j = first_upper; j <= k_equal; ++j) {
        layout.upper.push_back(bounds[j]);
        if (j < k_equal)
            layout.lower.push_back(bounds[j]);
    }
    layout.count = static_cast<std::uint32_t>(layout.upper.size());

    const double denom = std::cosh(params.alpha * params.R) - 1.0;
    for (std::uint32_t i = 0; i < layout.count; ++i) {
        const double cl = std::cosh(params.alpha * layout.lower[i]);
        const double cu = std::cosh(params.alpha * layout.upper[i]);
        layout.cosh_alpha_lower.push_back(cl);
        layout.cosh_alpha_upper.push_back(cu);
        layout.probs.push_back((cu - cl) / denom);
        if (layout.lower[i] > 0.0) {
            const double ex  = std::exp(layout.lower[i]);
            const double sh  = 0.5 * (ex - 1.0 / ex);
            layout.coth_lower.push_back(0.5 * (ex + 1.0 / ex) / sh);
            layout.coshR_inv_sinh_lower.push_back(layout.cosh_R / sh);
        } else {
            layout.coth_lower.push_back(std::numeric_limits<double>::infinity());
            layout.coshR_inv_sinh_lower.push_back(std::numeric_limits<double>::infinity());
        }
    }
    return layout;
}

namespace detail {
inline void split_chunk_range(const AnnulusLayout& layout, std::uint64_t seed, std::uint32_t annulus,
                              std::uint64_t total, std::uint32_t lo, std::uint32_t hi, std::uint64_t node,
                              std::vector<std::uint64_t>& out) {
    if (hi - lo == 1) {
        out[lo] = total;
        return;
    }
    const std::uint32_t mid = lo + (hi - lo + 1) / 2;
    const auto [left, right] =
        split_count(total, static_cast<double>(mid - lo), static_cast<double>(hi - mid),
                    SeedPath(seed, {seed_phase_chunks, annulus, node}));
    split_chunk_range(layout, seed, annulus, left, lo, mid, 2 * node, out);
    split_chunk_range(layout, seed, annulus, right, mid, hi, 2 * node + 1, out);
}
} // namespace detail

/// Per-annulus counts by one multinomial draw, then per-chunk counts by the
/// divide-and-conquer binomial scheme keyed on the recursion subtree. Every
/// worker recomputes identical tables.
inline void assign_counts(AnnulusLayout& layout, const ModelParams& params) {
    layout.counts = multinomial_counts(params.n, layout.probs, SeedPath(params.seed, {seed_phase_annuli}));
    layout.chunk_counts.assign(layout.count, {});
    for (std::uint32_t i = 0; i < layout.count; ++i) {
        layout.chunk_counts[i].assign(layout.chunks, 0);
        detail::split_chunk_range(layout, params.seed, i, layout.counts[i], 0, layout.chunks, 1,
                                  layout.chunk_counts[i]);
    }
}

/// Largest power of two c with points/c >= target (so the per-cell occupancy
/// lands in [target, 2 target)); 1 for sparse annuli.
inline std::uint64_t cell_count_for(std::uint64_t points, std::uint32_t target) {
    if (points < target)
        return 1;
    return std::bit_floor(points / target);
}

/// Power-of-two cell counts per annulus targeting `cell_target` points per
/// cell; powers of two nest the cell boundaries across annuli.
inline void build_cell_grid(AnnulusLayout& layout) {
    layout.cells.clear();
    layout.cell_width.clear();
    for (std::uint32_t i = 0; i < layout.count; ++i) {
        const std::uint64_t c = cell_count_for(layout.counts[i], layout.cell_target);
        layout.cells.push_back(c);
        layout.cell_width.push_back(two_pi / static_cast<double>(c));
    }
}

/// An annulus is Streaming iff the widest possible request of its points
/// (one at the lower boundary) fits within a single chunk. The clique annulus
/// is always processed globally. r_G is the lower boundary of the first
/// streaming annulus.
inline void classify(AnnulusLayout& layout) {
    layout.classes.assign(layout.count, AnnulusClass::Global);
    layout.first_streaming = layout.count;
    const double chunk_width = two_pi / static_cast<double>(layout.chunks);
    for (std::uint32_t i = 0; i < layout.count; ++i) {
        if (i == 0 && layout.has_clique) {
            layout.classes[i] = AnnulusClass::Clique;
            continue;
        }
        const double l = layout.lower[i];
        const double width = l > 0.0 ? 2.0 * angular_deviation(l, l, layout.R) : two_pi;
        if (width <= chunk_width) {
            layout.classes[i] = AnnulusClass::Streaming;
            if (layout.first_streaming == layout.count)
                layout.first_streaming = i;
        }
    }
    // Classes are contiguous because the maximal width is nonincreasing in the
    // lower boundary.
    for (std::uint32_t i = layout.first_streaming; i < layout.count; ++i)
        assert(layout.classes[i] == AnnulusClass::Streaming);
    layout.r_G = layout.first_streaming < layout.count ? layout.lower[layout.first_streaming] : layout.R;
}

/// Dense ids 0..n-1 in (annulus-major, chunk-minor, emission-order) order.
inline void assign_vertex_ids(AnnulusLayout& layout) {
    layout.id_base.assign(layout.count, {});
    std::uint64_t next = 0;
    for (std::uint32_t i = 0; i < layout.count; ++i) {
        layout.id_base[i].assign(layout.chunks, 0);
        for (std::uint32_t c = 0; c < layout.chunks; ++c) {
            layout.id_base[i][c] = next;
            next += layout.chunk_counts[i][c];
        }
    }
    assert(next == layout.n);
}

inline AnnulusLayout make_layout(const ModelParams& params, std::uint32_t cell_target = 8) {
    AnnulusLayout layout = build_annuli(params, cell_target);
    assign_counts(layout, params);
    build_cell_grid(layout);
    classify(layout);
    assign_vertex_ids(layout);
    return layout;
}

} // namespace rhg
