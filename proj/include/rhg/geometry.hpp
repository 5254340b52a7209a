#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace rhg {

inline constexpr double two_pi = 6.283185307179586476925286766559;

/// Disk radius for n vertices: R = 2 ln(n) + C.
inline double radius_from_size(double n, double C) {
    assert(n >= 1);
    return 2.0 * std::log(n) + C;
}

/// Leading-order expected average degree for a given radial constant C.
inline double expected_avg_degree(double C, double alpha) {
    const double q = alpha / (alpha - 0.5);
    return 2.0 / M_PI * q * q * std::exp(-C / 2.0);
}

/// Inverse of expected_avg_degree: the C that yields average degree d_bar.
inline double radial_const_from_avg_degree(double d_bar, double alpha) {
    if (!(alpha > 0.5))
        throw std::invalid_argument("radial_const_from_avg_degree: alpha must be > 1/2");
    if (!(d_bar > 0.0))
        throw std::invalid_argument("radial_const_from_avg_degree: average degree must be positive");
    const double q = (alpha - 0.5) / alpha;
    return -2.0 * std::log(d_bar * M_PI / 2.0 * q * q);
}

inline double alpha_from_gamma(double gamma) {
    if (!(gamma > 2.0))
        throw std::invalid_argument("alpha_from_gamma: gamma must be > 2");
    return (gamma - 1.0) / 2.0;
}

inline double gamma_from_alpha(double alpha) {
    if (!(alpha > 0.5))
        throw std::invalid_argument("gamma_from_alpha: alpha must be > 1/2");
    return 2.0 * alpha + 1.0;
}

/// Model parameters pinned at construction; (n, alpha, C, seed, chunks) fully
/// determine the generated graph.
struct ModelParams {
    std::uint64_t n;
    double        alpha;
    double        C;
    double        R;
    std::uint64_t seed;
    std::uint32_t chunks;

    ModelParams(std::uint64_t n_, double alpha_, double C_, std::uint64_t seed_, std::uint32_t chunks_)
        : n(n_), alpha(alpha_), C(C_), R(radius_from_size(static_cast<double>(n_), C_)), seed(seed_), chunks(chunks_) {
        if (n < 1)
            throw std::invalid_argument("ModelParams: n must be >= 1");
        if (!(alpha > 0.5))
            throw std::invalid_argument("ModelParams: alpha must be > 1/2");
        if (!(R > 0.0))
            throw std::invalid_argument("ModelParams: R = 2 ln n + C must be positive");
        if (chunks < 1)
            throw std::invalid_argument("ModelParams: chunk count must be >= 1");
    }

    static ModelParams from_avg_degree(std::uint64_t n, double alpha, double d_bar, std::uint64_t seed,
                                       std::uint32_t chunks) {
        return ModelParams(n, alpha, radial_const_from_avg_degree(d_bar, alpha), seed, chunks);
    }
};

struct PolarPoint {
    double r;
    double theta;
};

/// Radial density f(r) = alpha sinh(alpha r) / (cosh(alpha R) - 1).
inline double radial_density(double r, double alpha, double R) {
    assert(r >= 0.0 && r <= R);
    return alpha * std::sinh(alpha * r) / (std::cosh(alpha * R) - 1.0);
}

/// Exact radial cdf mu(B_r(0)) = (cosh(alpha r) - 1) / (cosh(alpha R) - 1).
inline double radial_cdf(double r, double alpha, double R) {
    assert(r >= 0.0 && r <= R);
    return (std::cosh(alpha * r) - 1.0) / (std::cosh(alpha * R) - 1.0);
}

namespace detail {
// acos with the argument clamped to [-1, 1]; excursions beyond the domain are
// floating-point noise near the branch points and must stay tiny.
inline double acos_clamped(double x) {
#ifndef NDEBUG
    assert(x < 1.0 + 1e-9 && x > -1.0 - 1e-9);
#endif
    if (x >= 1.0)
        return 0.0;
    if (x <= -1.0)
        return M_PI;
    return std::acos(x);
}

inline double acosh_clamped(double x) {
#ifndef NDEBUG
    assert(x > 1.0 - 1e-9);
#endif
    return std::acosh(x < 1.0 ? 1.0 : x);
}
} // namespace detail

/// Hyperbolic distance between two points in native polar coordinates.
/// cosh(r_p)cosh(r_q) - sinh(r_p)sinh(r_q)cos(dtheta), rearranged so that
/// coincident points give exactly 1 under the acosh.
inline double hyperbolic_distance(const PolarPoint& p, const PolarPoint& q) {
    // canonical operand order makes the result exactly symmetric in p and q
    const double r1  = std::min(p.r, q.r);
    const double r2  = std::max(p.r, q.r);
    const double arg = std::cosh(r2 - r1) + (1.0 - std::cos(std::abs(p.theta - q.theta))) * std::sinh(r1) * std::sinh(r2);
    return detail::acosh_clamped(arg);
}

/// Largest angular difference at which a point at radius r can be adjacent to
/// a point at radius b: pi if r + b <= R (diametral opposition reaches the
/// threshold exactly at r + b = R), else the arccos branch.
inline double angular_deviation(double r, double b, double R) {
    assert(r > 0.0);
    if (r + b <= R)
        return M_PI;
    const double arg = (std::cosh(r) * std::cosh(b) - std::cosh(R)) / (std::sinh(r) * std::sinh(b));
    return detail::acos_clamped(arg);
}

/// Point with cached values for trig-free adjacency tests and request widths.
struct PrecomputedPoint {
    std::uint64_t id;
    double        r;
    double        theta;
    double        coth_r;
    double        inv_sinh_r;
    double        cos_theta;
    double        sin_theta;

    PrecomputedPoint() = default;

    PrecomputedPoint(std::uint64_t id_, double r_, double theta_) : id(id_), r(r_), theta(theta_) {
        if (!(r_ > 0.0))
            throw std::invalid_argument("PrecomputedPoint: r must be positive");
        const double ex  = std::exp(r_);
        const double mex = 1.0 / ex;
        const double sh  = 0.5 * (ex - mex);
        coth_r     = (0.5 * (ex + mex)) / sh;
        inv_sinh_r = 1.0 / sh;
        cos_theta  = std::cos(theta_);
        sin_theta  = std::sin(theta_);
    }
};

/// Threshold test d(p, q) < R using only cached values; cosh_R = cosh(R).
/// Expansion of cos(theta_p - theta_q) against the rearranged distance formula.
inline bool is_adjacent_precomputed(const PrecomputedPoint& p, const PrecomputedPoint& q, double cosh_R) {
    const double lhs = p.cos_theta * q.cos_theta + p.sin_theta * q.sin_theta;
    const double rhs = p.coth_r * q.coth_r - cosh_R * p.inv_sinh_r * q.inv_sinh_r;
    return lhs > rhs;
}

/// Request width Delta-theta(r_p, l) from cached point values and the annulus
/// constants coth(l) and cosh(R)/sinh(l). The argument encodes the branch:
/// <= -1 means r + l < R, i.e. the full half-circle pi.
inline double angular_deviation_precomputed(const PrecomputedPoint& p, double coth_b, double cosh_R_inv_sinh_b) {
    const double arg = p.coth_r * coth_b - cosh_R_inv_sinh_b * p.inv_sinh_r;
    if (arg <= -1.0)
        return M_PI;
    if (arg >= 1.0)
        return 0.0;
    return std::acos(arg);
}

/// Candidate-mass overestimation factor of a height-x annulus.
inline double overestimation_factor(double x, double alpha) {
    assert(x > 0.0 && alpha > 0.5);
    return (alpha - 0.5) / alpha * (1.0 - std::exp(alpha * x)) / (1.0 - std::exp((alpha - 0.5) * x));
}

} // namespace rhg
