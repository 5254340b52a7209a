#pragma once

// Verification analytics: degree statistics, power-law fit, the approximation
// cross-checks and the run report emitted by the CLI.

#include <cmath>
#include <cstdint>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "generator.hpp"
#include "geometry.hpp"

namespace rhg {

/// Order-independent 64-bit fingerprint: wrapping sum of all endpoint ids.
class EdgeFingerprint {
public:
    void edge(std::uint64_t u, std::uint64_t v) { sum_ += u + v; }
    std::uint64_t value() const { return sum_; }

private:
    std::uint64_t sum_ = 0;
};

template <typename EdgeRange>
std::uint64_t fingerprint(const EdgeRange& edges) {
    EdgeFingerprint fp;
    for (const auto& [u, v]: edges)
        fp.edge(u, v);
    return fp.value();
}

template <typename EdgeRange>
std::vector<std::uint32_t> degrees_from_edges(const EdgeRange& edges, std::uint64_t n) {
    std::vector<std::uint32_t> deg(n, 0);
    for (const auto& [u, v]: edges) {
        if (u >= n || v >= n)
            throw std::out_of_range("degrees_from_edges: vertex id out of range");
        ++deg[u];
        ++deg[v];
    }
    return deg;
}

/// Exact histogram: hist[d] = number of vertices with degree d.
inline std::vector<std::uint64_t> degree_histogram(const std::vector<std::uint32_t>& degrees) {
    std::uint32_t max_deg = 0;
    for (auto d: degrees)
        max_deg = std::max(max_deg, d);
    std::vector<std::uint64_t> hist(static_cast<std::size_t>(max_deg) + 1, 0);
    for (auto d: degrees)
        ++hist[d];
    return hist;
}

/// Continuous-MLE power-law exponent with the -0.5 discreteness correction,
/// over all degrees >= d_min. Requires at least 100 tail samples.
inline double powerlaw_mle(const std::vector<std::uint32_t>& degrees, std::uint32_t d_min) {
    double        log_sum = 0.0;
    std::uint64_t k       = 0;
    const double  x_min   = static_cast<double>(d_min) - 0.5;
    for (auto d: degrees) {
        if (d >= d_min) {
            log_sum += std::log(static_cast<double>(d) / x_min);
            ++k;
        }
    }
    if (k < 100)
        throw std::invalid_argument("powerlaw_mle: fewer than 100 degrees above d_min");
    return 1.0 + static_cast<double>(k) / log_sum;
}

/// Exact-vs-approximate comparison of the angular deviation and radial cdf.
/// The approximations sharpen as R - r - b grows; generation never uses them.
struct ApproximationReport {
    double max_dtheta_rel_err_far   = 0.0; // r + b >= R + 8
    double max_dtheta_rel_err_near  = 0.0; // r + b in [R + 1, R + 3)
    double max_cdf_rel_err_far      = 0.0; // r >= R - 2
    bool   dtheta_error_shrinks     = true;
    bool   cdf_error_shrinks        = true;
};

inline ApproximationReport approximation_cross_checks(double alpha, double R) {
    ApproximationReport rep;

    auto dtheta_rel_err = [&](double r, double b) {
        const double exact  = angular_deviation(r, b, R);
        const double approx = 2.0 * std::exp((R - r - b) / 2.0);
        return std::abs(exact / approx - 1.0);
    };

    double prev_err = -1.0;
    for (double excess = 1.0; excess <= 10.0; excess += 1.0) {
        double worst = 0.0;
        for (double r = excess / 2.0 + 0.5; r < R; r += 0.5) {
            const double b = R - r + excess; // hold r + b - R = excess
            if (b <= 0.0 || b >= R)
                continue;
            worst = std::max(worst, dtheta_rel_err(r, b));
        }
        if (excess >= 8.0)
            rep.max_dtheta_rel_err_far = std::max(rep.max_dtheta_rel_err_far, worst);
        if (excess >= 1.0 && excess < 3.0)
            rep.max_dtheta_rel_err_near = std::max(rep.max_dtheta_rel_err_near, worst);
        if (prev_err >= 0.0 && worst > prev_err)
            rep.dtheta_error_shrinks = false;
        prev_err = worst;
    }

    prev_err = -1.0;
    for (double depth = 8.0; depth >= 0.0; depth -= 1.0) { // depth = R - r
        const double r      = R - depth;
        const double exact  = radial_cdf(r, alpha, R);
        const double approx = std::exp(alpha * (r - R));
        const double err    = std::abs(exact / approx - 1.0);
        if (depth <= 2.0)
            rep.max_cdf_rel_err_far = std::max(rep.max_cdf_rel_err_far, err);
        if (prev_err >= 0.0 && err > prev_err)
            rep.cdf_error_shrinks = false;
        prev_err = err;
    }
    return rep;
}

/// Flat run summary; `gamma_hat` is NaN unless degrees were tracked.
struct RunReport {
    std::uint64_t n = 0, m = 0;
    double        avg_degree = 0.0, expected_avg_degree = 0.0;
    double        gamma_hat = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t distance_computations = 0;
    double        overestimation_ratio  = 0.0;
    std::uint64_t fingerprint           = 0;
    std::uint64_t global_vertices       = 0;
    double        r_G                   = 0.0;
    double        seconds               = 0.0;
    double        edges_per_sec         = 0.0;

    std::vector<std::uint64_t> annulus_edges, annulus_comps, annulus_vertices;
    std::vector<std::uint64_t> unit_edges, unit_comps, unit_vertices;

    static RunReport from_stats(const ModelParams& params, const RunStats& stats) {
        RunReport r;
        r.n                     = params.n;
        r.m                     = stats.total.edges;
        r.avg_degree            = stats.avg_degree();
        r.expected_avg_degree   = rhg::expected_avg_degree(params.C, params.alpha);
        r.distance_computations = stats.total.comps;
        r.overestimation_ratio  = stats.overestimation_ratio();
        r.fingerprint           = stats.total.fingerprint;
        r.global_vertices       = stats.global_vertices;
        r.r_G                   = stats.r_G;
        r.seconds               = stats.seconds;
        r.edges_per_sec = stats.seconds > 0.0 ? static_cast<double>(stats.total.edges) / stats.seconds : 0.0;
        r.annulus_edges         = stats.total.edges_by_annulus;
        r.annulus_comps         = stats.total.comps_by_annulus;
        r.annulus_vertices      = stats.total.vertices_by_annulus;
        r.unit_edges            = stats.unit_edges;
        r.unit_comps            = stats.unit_comps;
        r.unit_vertices         = stats.unit_vertices;
        return r;
    }

    void write_text(std::ostream& os) const {
        os << "n=" << n << "\n"
           << "m=" << m << "\n"
           << "avg_degree=" << avg_degree << "\n"
           << "expected_avg_degree=" << expected_avg_degree << "\n"
           << "gamma_hat=" << gamma_hat << "\n"
           << "distance_computations=" << distance_computations << "\n"
           << "overestimation_ratio=" << overestimation_ratio << "\n"
           << "fingerprint=" << fingerprint << "\n"
           << "global_vertices=" << global_vertices << "\n"
           << "r_G=" << r_G << "\n"
           << "seconds=" << seconds << "\n"
           << "edges_per_sec=" << edges_per_sec << "\n";
        os << "annulus_vertices=";
        for (std::size_t i = 0; i < annulus_vertices.size(); ++i)
            os << (i ? "," : "") << annulus_vertices[i];
        os << "\nannulus_comps=";
        for (std::size_t i = 0; i < annulus_comps.size(); ++i)
            os << (i ? "," : "") << annulus_comps[i];
        os << "\nannulus_edges=";
        for (std::size_t i = 0; i < annulus_edges.size(); ++i)
            os << (i ? "," : "") << annulus_edges[i];
        os << "\nunit_edges="; // unit 0 = clique/global phase, then chunks
        for (std::size_t i = 0; i < unit_edges.size(); ++i)
            os << (i ? "," : "") << unit_edges[i];
        os << "\nunit_comps=";
        for (std::size_t i = 0; i < unit_comps.size(); ++i)
            os << (i ? "," : "") << unit_comps[i];
        os << "\n";
    }

    static const char* csv_header() {
        return "n,m,avg_degree,expected_avg_degree,gamma_hat,distance_computations,overestimation_ratio,"
               "fingerprint,global_vertices,r_G,seconds,edges_per_sec";
    }

    void write_csv_row(std::ostream& os) const {
        os << n << ',' << m << ',' << avg_degree << ',' << expected_avg_degree << ',' << gamma_hat << ','
           << distance_computations << ',' << overestimation_ratio << ',' << fingerprint << ',' << global_vertices
           << ',' << r_G << ',' << seconds << ',' << edges_per_sec << "\n";
    }
};

} // namespace rhg
