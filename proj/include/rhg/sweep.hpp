#pragma once

// Streaming sweep-line engine over one angular chunk.
//
// The engine owns one sweep state per streaming annulus and advances them in
// whole cells, lowest annulus first or round-robin, never letting an annulus
// overtake the one below it. Event tokens:
//   begin-of-request  activates a request and propagates a narrower request
//                     for the same point into the next annulus up,
//   node              matches one point against all active requests,
//   end-of-request    retires a request (lazily, at cell granularity).
//
// Causality is inverted: the sorted uniform stream draws the *begin* angle of
// a point's own request; the point itself sits half a request width later.
// Points and requests drawn from this chunk's configuration are Local; the
// final phase continues the sweep into a replica of the next chunk whose
// tokens are Foreign. A candidate pair is emitted unless both sides are
// Foreign, which is exactly the pairs the next chunk emits itself.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "geometry.hpp"
#include "partition.hpp"
#include "rng.hpp"

namespace rhg {

enum class Origin : std::uint8_t { Local, Foreign };

enum class Schedule : std::uint8_t { RoundRobin, LowestFirst };

struct AngleRange {
    double begin, end;
};

/// Reduce a request interval [a, b) to ranges inside [0, 2pi), splitting at
/// the wrap. Width >= 2pi collapses to the full circle.
inline int split_wraparound(double a, double b, AngleRange out[2]) {
    if (b - a >= two_pi) {
        out[0] = {0.0, two_pi};
        return 1;
    }
    if (a < 0.0) {
        out[0] = {a + two_pi, two_pi};
        out[1] = {0.0, b};
        return 2;
    }
    if (b > two_pi) {
        out[0] = {a, two_pi};
        out[1] = {0.0, b - two_pi};
        return 2;
    }
    out[0] = {a, b};
    return 1;
}

inline double request_half_width_raw(double coth_r, double inv_sinh_r, double coth_b, double coshR_inv_sinh_b) {
    const double arg = coth_r * coth_b - coshR_inv_sinh_b * inv_sinh_r;
    if (arg <= -1.0)
        return M_PI;
    if (arg >= 1.0)
        return 0.0;
    return std::acos(arg);
}

/// Request half-width of a drawn point against the lower boundary of
/// `annulus`; pi whenever the boundary circle lies inside the query circle.
template <typename P>
double point_half_width(const AnnulusLayout& layout, const P& p, std::uint32_t annulus) {
    if (layout.lower[annulus] <= 0.0)
        return M_PI;
    return request_half_width_raw(p.coth_r, p.inv_sinh_r, layout.coth_lower[annulus],
                                  layout.coshR_inv_sinh_lower[annulus]);
}

/// Angular bounds of chunk c. The last chunk closes the circle exactly.
inline double chunk_lower_bound(std::uint32_t c, std::uint32_t P) {
    return static_cast<double>(c) * (two_pi / static_cast<double>(P));
}
inline double chunk_upper_bound(std::uint32_t c, std::uint32_t P) {
    return c + 1 == P ? two_pi : static_cast<double>(c + 1) * (two_pi / static_cast<double>(P));
}

/// One generated point: begin angle from the sorted stream, radius from the
/// restricted cdf, node angle begin + half_width, cached adjacency fields.
struct PointDraw {
    std::uint64_t id;
    std::uint32_t annulus;    // generating annulus
    double        beta;       // begin angle, raw in [0, 2pi)
    double        r;
    double        theta;      // node angle, raw in [0, 2pi)
    double        half_width; // request half-width in the home annulus
    double        coth_r, inv_sinh_r, cos_theta, sin_theta;
};

/// The point stream of one (annulus, chunk) pair; the single code path that
/// decides vertex positions, shared by the sweep, the global phase and the
/// oracle trace.
class ChunkPointSource {
public:
    ChunkPointSource(const AnnulusLayout& layout, std::uint32_t annulus, std::uint32_t chunk, std::uint64_t seed)
        : layout_(layout),
          annulus_(annulus),
          count_(layout.chunk_counts[annulus][chunk]),
          next_id_(layout.id_base[annulus][chunk]),
          angles_(count_, chunk_lower_bound(chunk, layout.chunks), chunk_upper_bound(chunk, layout.chunks),
                  SeedPath(seed, {seed_phase_angles, annulus, chunk})),
          radii_(SeedPath(seed, {seed_phase_radii, annulus, chunk})) {}

    bool exhausted() const { return drawn_ == count_; }

    double peek_begin() { return angles_.peek(); }

    PointDraw next() {
        PointDraw p;
        p.annulus = annulus_;
        p.beta = angles_.next();
        p.r    = layout_.radius_from_uniform(annulus_, radii_.next());
        p.id   = next_id_++;
        ++drawn_;

        const double ex  = std::exp(p.r);
        const double mex = 1.0 / ex;
        const double sh  = 0.5 * (ex - mex);
        p.coth_r     = 0.5 * (ex + mex) / sh;
        p.inv_sinh_r = 1.0 / sh;

        p.half_width = layout_.lower[annulus_] > 0.0
                           ? request_half_width_raw(p.coth_r, p.inv_sinh_r, layout_.coth_lower[annulus_],
                                                    layout_.coshR_inv_sinh_lower[annulus_])
                           : M_PI;
        p.theta = p.beta + p.half_width;
        if (p.theta >= two_pi)
            p.theta -= two_pi;
        p.cos_theta = std::cos(p.theta);
        p.sin_theta = std::sin(p.theta);
        return p;
    }

private:
    const AnnulusLayout& layout_;
    std::uint32_t        annulus_;
    std::uint64_t        count_;
    std::uint64_t        next_id_;
    std::uint64_t        drawn_ = 0;
    SortedUniformStream  angles_;
    UniformStream        radii_;
};

/// Per-chunk instrumentation, merged across units into the run totals.
struct ChunkStats {
    std::uint64_t              edges = 0;
    std::uint64_t              comps = 0; // distance computations
    std::uint64_t              streaming_vertices = 0;
    std::uint64_t              fingerprint        = 0; // wrapping sum of endpoint ids
    std::uint64_t              max_insertion_bucket = 0;
    std::vector<std::uint64_t> edges_by_annulus, comps_by_annulus, vertices_by_annulus;

    explicit ChunkStats(std::size_t annuli = 0)
        : edges_by_annulus(annuli, 0), comps_by_annulus(annuli, 0), vertices_by_annulus(annuli, 0) {}

    void merge(const ChunkStats& o) {
        edges += o.edges;
        comps += o.comps;
        streaming_vertices += o.streaming_vertices;
        fingerprint += o.fingerprint;
        max_insertion_bucket = std::max(max_insertion_bucket, o.max_insertion_bucket);
        for (std::size_t i = 0; i < edges_by_annulus.size(); ++i) {
            edges_by_annulus[i] += o.edges_by_annulus[i];
            comps_by_annulus[i] += o.comps_by_annulus[i];
            vertices_by_annulus[i] += o.vertices_by_annulus[i];
        }
    }
};

namespace detail {

struct BeginToken {
    double        begin, end;    // engine-frame (linear) request interval
    double        lambda_theta;  // engine-frame node angle of the source
    double        theta_raw;     // node angle mod 2pi, dedup key
    double        coth_r, inv_sinh_r, cos_theta, sin_theta;
    std::uint64_t id;
    std::uint32_t home_annulus;
    Origin        origin;
    bool          global_clipped; // propagates window-clipped
};

struct NodeToken {
    double        lambda; // engine-frame node angle
    double        theta_raw;
    double        coth_r, inv_sinh_r, cos_theta, sin_theta;
    std::uint64_t id;
    std::uint32_t annulus;
    Origin        origin;
};

// Active requests in a structure-of-arrays layout; retired slots are
// overwritten before the array grows.
struct ActiveRequests {
    std::vector<double>        begin, end, theta_raw, coth_r, inv_sinh_r, cos_theta, sin_theta;
    std::vector<std::uint64_t> id;
    std::vector<std::int64_t>  end_cell; // -1 marks a free slot
    std::vector<std::uint32_t> home;
    std::vector<std::uint8_t>  local;
    std::vector<std::uint32_t> free_slots;

    std::size_t slots() const { return begin.size(); }

    std::uint32_t allocate() {
        if (!free_slots.empty()) {
            const std::uint32_t s = free_slots.back();
            free_slots.pop_back();
            return s;
        }
        begin.push_back(0);
        end.push_back(0);
        theta_raw.push_back(0);
        coth_r.push_back(0);
        inv_sinh_r.push_back(0);
        cos_theta.push_back(0);
        sin_theta.push_back(0);
        id.push_back(0);
        end_cell.push_back(-1);
        home.push_back(0);
        local.push_back(0);
        return static_cast<std::uint32_t>(begin.size() - 1);
    }
};

} // namespace detail

/// Sweep engine for one chunk: main phase over the owned interval, final
/// phase over a Foreign replica of the next chunk. `Sink` receives canonical
/// edges (u < v) and Local vertices.
template <typename Sink>
class ChunkEngine {
public:
    ChunkEngine(const AnnulusLayout& layout, std::uint64_t seed, std::uint32_t chunk, Schedule schedule, Sink& sink,
                bool inject_adjacency_fault = false)
        : layout_(layout),
          seed_(seed),
          chunk_(chunk),
          next_chunk_((chunk + 1) % layout.chunks),
          schedule_(schedule),
          sink_(sink),
          stats_(layout.count),
          fault_(inject_adjacency_fault) {
        lift_      = chunk_ + 1 == layout_.chunks ? two_pi : 0.0;
        begin_a_   = chunk_lower_bound(chunk_, layout_.chunks);
        end_linear_ = lift_ + chunk_upper_bound(next_chunk_, layout_.chunks);

        for (std::uint32_t i = layout_.first_streaming; i < layout_.count; ++i) {
            annuli_.emplace_back(*this, i);
            local_draws_left_ += layout_.chunk_counts[i][chunk_];
        }
    }

    /// Seed every streaming annulus with the window-clipped request pieces of
    /// one redundantly generated clique/global point. `half_widths[pos]` is
    /// the request half-width in streaming annulus `pos`.
    void seed_global_request(const PointDraw& g, const double* half_widths) {
        for (std::size_t pos = 0; pos < annuli_.size(); ++pos) {
            enqueue_clipped(annuli_[pos], g.theta, half_widths[pos], g, Origin::Local);
            enqueue_clipped(annuli_[pos], g.theta, half_widths[pos], g, Origin::Foreign);
        }
    }

    void run() {
        if (annuli_.empty())
            return;
        if (schedule_ == Schedule::LowestFirst) {
            for (auto& a: annuli_)
                while (!done(a) && !stop_)
                    process_cell(a);
        } else {
            while (!stop_) {
                bool progress = false;
                for (std::size_t pos = 0; pos < annuli_.size() && !stop_; ++pos) {
                    auto& a = annuli_[pos];
                    if (done(a))
                        continue;
                    if (pos == 0) {
                        process_cell(a);
                        progress = true;
                        continue;
                    }
                    while (!done(a) && !stop_ && allowed(pos)) {
                        process_cell(a);
                        progress = true;
                    }
                }
                if (!progress)
                    break;
            }
        }
        if (!stop_ && local_active_requests_ > 0)
            throw std::logic_error("sweep: a local request survived past the replicated chunk");
    }

    const ChunkStats& stats() const { return stats_; }

private:
    struct AnnulusSweep {
        std::uint32_t annulus;
        double        cell_width;
        std::int64_t  first_cell, last_cell, cur_cell;
        ChunkPointSource main_src, replica_src;
        std::vector<std::vector<detail::BeginToken>> begin_buckets;
        std::vector<std::vector<detail::NodeToken>>  node_buckets;
        detail::ActiveRequests                        active;

        AnnulusSweep(ChunkEngine& e, std::uint32_t i)
            : annulus(i),
              cell_width(e.layout_.cell_width[i]),
              main_src(e.layout_, i, e.chunk_, e.seed_),
              replica_src(e.layout_, i, e.next_chunk_, e.seed_) {
            first_cell = static_cast<std::int64_t>(e.begin_a_ / cell_width);
            last_cell  = static_cast<std::int64_t>(e.end_linear_ / cell_width) + 1;
            cur_cell   = first_cell;
            begin_buckets.resize(static_cast<std::size_t>(last_cell - first_cell + 1));
            node_buckets.resize(static_cast<std::size_t>(last_cell - first_cell + 1));
        }
    };

    const AnnulusLayout& layout_;
    std::uint64_t        seed_;
    std::uint32_t        chunk_, next_chunk_;
    Schedule             schedule_;
    Sink&                sink_;
    ChunkStats           stats_;
    bool                 fault_;

    double begin_a_ = 0.0;    // start of the owned interval
    double lift_ = 0.0;       // 2pi when the replica wraps
    double end_linear_ = 0.0; // hard end of the final phase

    std::vector<AnnulusSweep> annuli_;
    std::uint64_t             local_pending_begins_  = 0;
    std::uint64_t             local_pending_nodes_   = 0;
    std::uint64_t             local_active_requests_ = 0;
    std::uint64_t             local_draws_left_      = 0;
    bool                      stop_                  = false;

    bool done(const AnnulusSweep& a) const { return a.cur_cell > a.last_cell; }

    // No sweep may overtake the one below it: annulus at `pos` may process its
    // next cell only once the annulus below has processed past that cell's
    // end. Cell grids are powers of two, so the comparison is exact in
    // integers.
    bool allowed(std::size_t pos) const {
        const auto& a     = annuli_[pos];
        const auto& below = annuli_[pos - 1];
        if (done(below))
            return true;
        const std::uint64_t ca = layout_.cells[a.annulus], cb = layout_.cells[below.annulus];
        if (ca >= cb)
            return below.cur_cell * static_cast<std::int64_t>(ca / cb) >= a.cur_cell + 1;
        return below.cur_cell >= (a.cur_cell + 1) * static_cast<std::int64_t>(cb / ca);
    }

    double half_width_in(double coth_r, double inv_sinh_r, std::uint32_t annulus) const {
        if (layout_.lower[annulus] <= 0.0)
            return M_PI;
        return request_half_width_raw(coth_r, inv_sinh_r, layout_.coth_lower[annulus],
                                      layout_.coshR_inv_sinh_lower[annulus]);
    }

    void enqueue_begin(AnnulusSweep& a, const detail::BeginToken& tok) {
        std::int64_t cell = static_cast<std::int64_t>(tok.begin / a.cell_width);
        if (cell > a.last_cell) {
            if (tok.origin == Origin::Local)
                throw std::logic_error("sweep: local request begins past the replicated chunk");
            return; // Foreign work beyond the final phase belongs to other chunks
        }
        assert(cell >= a.cur_cell);
        cell = std::max(cell, a.cur_cell); // acos rounding can land one ulp early
        auto& bucket = a.begin_buckets[static_cast<std::size_t>(cell - a.first_cell)];
        bucket.push_back(tok);
        stats_.max_insertion_bucket = std::max<std::uint64_t>(stats_.max_insertion_bucket, bucket.size());
        if (tok.origin == Origin::Local)
            ++local_pending_begins_;
    }

    void enqueue_node(AnnulusSweep& a, const detail::NodeToken& tok) {
        std::int64_t cell = static_cast<std::int64_t>(tok.lambda / a.cell_width);
        if (cell > a.last_cell) {
            if (tok.origin == Origin::Local)
                throw std::logic_error("sweep: local node lies past the replicated chunk");
            return;
        }
        cell = std::max(cell, a.cur_cell);
        a.node_buckets[static_cast<std::size_t>(cell - a.first_cell)].push_back(tok);
        if (tok.origin == Origin::Local)
            ++local_pending_nodes_;
    }

    // Window-clip the raw interval theta +- hw of a clique/global request and
    // enqueue the surviving pieces (Local window = own chunk, Foreign window =
    // replicated chunk).
    void enqueue_clipped(AnnulusSweep& a, double theta_raw, double hw, const PointDraw& g, Origin origin) {
        const std::uint32_t wc = origin == Origin::Local ? chunk_ : next_chunk_;
        const double        w0 = chunk_lower_bound(wc, layout_.chunks);
        const double        w1 = chunk_upper_bound(wc, layout_.chunks);
        const double        lift = origin == Origin::Local ? 0.0 : lift_;

        AngleRange ranges[2];
        const int  nr = split_wraparound(theta_raw - hw, theta_raw + hw, ranges);
        for (int i = 0; i < nr; ++i) {
            const double lo = std::max(ranges[i].begin, w0);
            const double hi = std::min(ranges[i].end, w1);
            if (lo >= hi)
                continue;
            detail::BeginToken tok;
            tok.begin          = lo + lift;
            tok.end            = hi + lift;
            tok.lambda_theta   = theta_raw + lift; // engine-frame center (only used for propagation of unclipped)
            tok.theta_raw      = theta_raw;
            tok.coth_r         = g.coth_r;
            tok.inv_sinh_r     = g.inv_sinh_r;
            tok.cos_theta      = g.cos_theta;
            tok.sin_theta      = g.sin_theta;
            tok.id             = g.id;
            tok.home_annulus   = g.annulus; // never a streaming annulus
            tok.origin         = origin;
            tok.global_clipped = true;
            enqueue_begin(a, tok);
        }
    }

    // Activate a request token and propagate the source into the next annulus.
    void activate(AnnulusSweep& a, const detail::BeginToken& tok) {
        auto&               act = a.active;
        const std::uint32_t s   = act.allocate();
        act.begin[s]      = tok.begin;
        act.end[s]        = tok.end;
        act.theta_raw[s]  = tok.theta_raw;
        act.coth_r[s]     = tok.coth_r;
        act.inv_sinh_r[s] = tok.inv_sinh_r;
        act.cos_theta[s]  = tok.cos_theta;
        act.sin_theta[s]  = tok.sin_theta;
        act.id[s]         = tok.id;
        act.home[s]       = tok.home_annulus;
        act.local[s]      = tok.origin == Origin::Local;
        act.end_cell[s]   = static_cast<std::int64_t>(tok.end / a.cell_width);
        if (tok.origin == Origin::Local)
            ++local_active_requests_;

        // Streaming-origin requests propagate a narrower copy one annulus up;
        // clique/global requests were seeded into every annulus upfront.
        const std::size_t pos = static_cast<std::size_t>(a.annulus - layout_.first_streaming);
        if (!tok.global_clipped && pos + 1 < annuli_.size()) {
            AnnulusSweep&      up = annuli_[pos + 1];
            const double       hw = half_width_in(tok.coth_r, tok.inv_sinh_r, up.annulus);
            detail::BeginToken t2 = tok;
            t2.begin              = tok.lambda_theta - hw;
            t2.end                = tok.lambda_theta + hw;
            enqueue_begin(up, t2);
        }
    }

    void draw_point(AnnulusSweep& a, ChunkPointSource& src, Origin origin) {
        const PointDraw p    = src.next();
        const double    lift = origin == Origin::Local ? 0.0 : lift_;

        if (origin == Origin::Local) {
            sink_.vertex(p.id, p.r, p.theta);
            ++stats_.streaming_vertices;
            ++stats_.vertices_by_annulus[a.annulus];
            assert(local_draws_left_ > 0);
            --local_draws_left_;
        }

        detail::BeginToken tok;
        tok.begin          = p.beta + lift;
        tok.end            = tok.begin + 2.0 * p.half_width;
        tok.lambda_theta   = tok.begin + p.half_width;
        tok.theta_raw      = p.theta;
        tok.coth_r         = p.coth_r;
        tok.inv_sinh_r     = p.inv_sinh_r;
        tok.cos_theta      = p.cos_theta;
        tok.sin_theta      = p.sin_theta;
        tok.id             = p.id;
        tok.home_annulus   = a.annulus;
        tok.origin         = origin;
        tok.global_clipped = false;

        if (tok.origin == Origin::Local && tok.end > end_linear_ + 1e-9)
            throw std::logic_error("sweep: local request wider than the replication window");

        detail::NodeToken node;
        node.lambda     = tok.lambda_theta;
        node.theta_raw  = p.theta;
        node.coth_r     = p.coth_r;
        node.inv_sinh_r = p.inv_sinh_r;
        node.cos_theta  = p.cos_theta;
        node.sin_theta  = p.sin_theta;
        node.id         = p.id;
        node.annulus    = a.annulus;
        node.origin     = origin;

        activate(a, tok);
        enqueue_node(a, node);
    }

    void match_node(AnnulusSweep& a, const detail::NodeToken& node) {
        auto&             act   = a.active;
        const std::size_t slots = act.slots();
        for (std::size_t i = 0; i < slots; ++i) {
            if (act.end_cell[i] < 0)
                continue;
            if (node.lambda < act.begin[i] || node.lambda >= act.end[i])
                continue;
            if (act.id[i] == node.id)
                continue;
            if (act.home[i] == node.annulus) {
                // same-annulus pairs meet twice; the request with the smaller
                // (node angle, id) emits
                if (act.theta_raw[i] > node.theta_raw)
                    continue;
                if (act.theta_raw[i] == node.theta_raw && act.id[i] > node.id)
                    continue;
            }
            if (!act.local[i] && node.origin == Origin::Foreign)
                continue; // the pair belongs to the chunk that owns both
            ++stats_.comps;
            ++stats_.comps_by_annulus[a.annulus];
            const double lhs = act.cos_theta[i] * node.cos_theta + act.sin_theta[i] * node.sin_theta;
            const double rhs = act.coth_r[i] * node.coth_r - layout_.cosh_R * act.inv_sinh_r[i] * node.inv_sinh_r;
            const bool   adj = fault_ ? (lhs < rhs) : (lhs > rhs);
            if (adj) {
                const std::uint64_t u = std::min(act.id[i], node.id);
                const std::uint64_t v = std::max(act.id[i], node.id);
                sink_.edge(u, v);
                ++stats_.edges;
                ++stats_.edges_by_annulus[a.annulus];
                stats_.fingerprint += u + v;
            }
        }
    }

    void reclaim(AnnulusSweep& a) {
        auto& act = a.active;
        for (std::size_t i = 0; i < act.slots(); ++i) {
            if (act.end_cell[i] >= 0 && act.end_cell[i] < a.cur_cell) {
                act.end_cell[i] = -1;
                act.free_slots.push_back(static_cast<std::uint32_t>(i));
                if (act.local[i]) {
                    assert(local_active_requests_ > 0);
                    --local_active_requests_;
                }
            }
        }
    }

    void process_cell(AnnulusSweep& a) {
        const double cell_end = static_cast<double>(a.cur_cell + 1) * a.cell_width;

        reclaim(a);

        while (!a.main_src.exhausted() && a.main_src.peek_begin() < cell_end)
            draw_point(a, a.main_src, Origin::Local);
        while (!a.replica_src.exhausted() && a.replica_src.peek_begin() + lift_ < cell_end)
            draw_point(a, a.replica_src, Origin::Foreign);

        auto& bbucket = a.begin_buckets[static_cast<std::size_t>(a.cur_cell - a.first_cell)];
        for (const auto& tok: bbucket) {
            if (tok.origin == Origin::Local) {
                assert(local_pending_begins_ > 0);
                --local_pending_begins_;
            }
            activate(a, tok);
        }
        bbucket.clear();
        bbucket.shrink_to_fit();

        auto& nbucket = a.node_buckets[static_cast<std::size_t>(a.cur_cell - a.first_cell)];
        for (const auto& node: nbucket) {
            if (node.origin == Origin::Local) {
                assert(local_pending_nodes_ > 0);
                --local_pending_nodes_;
            }
            match_node(a, node);
        }
        nbucket.clear();
        nbucket.shrink_to_fit();

        ++a.cur_cell;

        // Final-phase early stop: once nothing Local remains anywhere, every
        // further pair would be Foreign x Foreign.
        if (local_draws_left_ == 0 && local_pending_begins_ == 0 && local_pending_nodes_ == 0
            && local_active_requests_ == 0)
            stop_ = true;
    }
};

} // namespace rhg
