#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace rhg {

namespace detail {
inline std::uint64_t splitmix_mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}
inline constexpr std::uint64_t golden_gamma = 0x9E3779B97F4A7C15ull;
} // namespace detail

// Seed-path phase tags. Any change here changes every generated graph.
inline constexpr std::uint64_t seed_phase_annuli = 1;
inline constexpr std::uint64_t seed_phase_chunks = 2;
inline constexpr std::uint64_t seed_phase_angles = 3;
inline constexpr std::uint64_t seed_phase_radii  = 4;

/// Hierarchical seed identity: a root seed plus the path of the computation
/// that owns the stream (phase tag, annulus, chunk, recursion node, ...).
/// Equal paths yield equal seeds on every worker; any component change gives
/// an unrelated seed.
struct SeedPath {
    std::uint64_t              root;
    std::vector<std::uint64_t> components;

    SeedPath(std::uint64_t root_, std::initializer_list<std::uint64_t> comps = {})
        : root(root_), components(comps) {}
};

inline std::uint64_t derive_seed(std::uint64_t root, std::span<const std::uint64_t> components) {
    std::uint64_t h = detail::splitmix_mix(root + detail::golden_gamma);
    for (std::uint64_t c: components)
        h = detail::splitmix_mix((h + detail::golden_gamma) ^ c);
    return h;
}

inline std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> components) {
    return derive_seed(root, std::span<const std::uint64_t>(components.begin(), components.size()));
}

inline std::uint64_t derive_seed(const SeedPath& path) {
    return derive_seed(path.root, std::span<const std::uint64_t>(path.components));
}

/// Reproducible uniform stream on [0, 1): 64-bit Mersenne Twister, doubles
/// from the top 53 bits. Single-owner; never shared between threads.
class UniformStream {
public:
    explicit UniformStream(std::uint64_t seed) : gen_(seed) {}
    explicit UniformStream(const SeedPath& path) : gen_(derive_seed(path)) {}

    double next() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    std::uint64_t next_bits() { return gen_(); }

private:
    std::mt19937_64 gen_;
};

namespace detail {

inline constexpr double two_pi_rng = 6.283185307179586476925286766559;

inline double standard_normal(UniformStream& stream) {
    const double u1 = 1.0 - stream.next(); // (0, 1]
    const double u2 = stream.next();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi_rng * u2);
}

// Marsaglia-Tsang squeeze; exact rejection sampler, requires a >= 1.
inline double gamma_variate(double a, UniformStream& stream) {
    assert(a >= 1.0);
    const double d = a - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        const double x = standard_normal(stream);
        const double t = 1.0 + c * x;
        if (t <= 0.0)
            continue;
        const double v = t * t * t;
        const double u = 1.0 - stream.next(); // (0, 1], log-safe
        if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v))
            return d * v;
    }
}

inline double beta_variate(double a, double b, UniformStream& stream) {
    const double x = gamma_variate(a, stream);
    const double y = gamma_variate(b, stream);
    const double s = x + y;
    return s > 0.0 ? x / s : 0.5;
}

// Sequential inversion from 0 with incrementally updated pmf; requires
// p <= 1/2. The pmf walk starts in log space while below double range.
inline std::uint64_t binomial_inversion(std::uint64_t n, double p, UniformStream& stream) {
    const double u          = stream.next();
    const double ratio_base = p / (1.0 - p);
    const double lpmf0      = static_cast<double>(n) * std::log1p(-p);

    std::uint64_t k    = 0;
    double        lpmf = lpmf0;
    while (lpmf <= -700.0 && k < n) {
        lpmf += std::log(static_cast<double>(n - k) / static_cast<double>(k + 1) * ratio_base);
        ++k;
    }
    double pmf = std::exp(lpmf);
    double cum = 0.0;
    for (;; ++k) {
        cum += pmf;
        if (u < cum || k >= n)
            return k;
        pmf *= static_cast<double>(n - k) / static_cast<double>(k + 1) * ratio_base;
    }
}

} // namespace detail

/// Exact Binomial(trials, p) variate. Small expectations run plain inversion;
/// large ones are reduced by median order-statistic splits (the m-th smallest
/// of n uniforms is Beta(m, n+1-m); conditioning on it halves the trials).
inline std::uint64_t binomial(std::uint64_t trials, double p, UniformStream& stream) {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("binomial: p must lie in [0, 1]");
    std::int64_t base = 0;
    std::int64_t sign = 1;
    for (;;) {
        if (trials == 0 || p <= 0.0)
            return static_cast<std::uint64_t>(base);
        if (p >= 1.0)
            return static_cast<std::uint64_t>(base + sign * static_cast<std::int64_t>(trials));
        if (p > 0.5) {
            // B(n, p) = n - B(n, 1-p)
            base += sign * static_cast<std::int64_t>(trials);
            sign = -sign;
            p    = 1.0 - p;
            continue;
        }
        if (static_cast<double>(trials) * p <= 1000.0)
            return static_cast<std::uint64_t>(
                base + sign * static_cast<std::int64_t>(detail::binomial_inversion(trials, p, stream)));
        const std::uint64_t m = (trials + 1) / 2;
        const double        v = detail::beta_variate(static_cast<double>(m), static_cast<double>(trials + 1 - m), stream);
        if (v <= p) {
            base += sign * static_cast<std::int64_t>(m);
            trials -= m;
            p = (p - v) / (1.0 - v);
        } else {
            trials = m - 1;
            p      = p / v;
        }
    }
}

/// Multinomial counts via the chain of conditional binomials; conserves the
/// total exactly.
inline std::vector<std::uint64_t> multinomial_counts(std::uint64_t total, std::span<const double> probs,
                                                     const SeedPath& path) {
    double sum = 0.0;
    for (double p: probs) {
        if (p < 0.0)
            throw std::invalid_argument("multinomial_counts: negative probability");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("multinomial_counts: probabilities must sum to 1");

    UniformStream              stream(path);
    std::vector<std::uint64_t> counts(probs.size(), 0);
    std::uint64_t              remaining = total;
    double                     mass      = 1.0;
    for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
        const double q = mass > 0.0 ? std::min(1.0, std::max(0.0, probs[i] / mass)) : 1.0;
        counts[i]      = binomial(remaining, q, stream);
        remaining -= counts[i];
        mass -= probs[i];
    }
    if (!probs.empty())
        counts.back() = remaining;
    return counts;
}

/// One node of the divide-and-conquer count distribution: splits `total`
/// between two mass shares, seeded purely by the recursion path so that any
/// worker recomputes the identical split.
inline std::pair<std::uint64_t, std::uint64_t> split_count(std::uint64_t total, double mass_left, double mass_right,
                                                           const SeedPath& path) {
    if (mass_left < 0.0 || mass_right < 0.0 || mass_left + mass_right <= 0.0)
        throw std::invalid_argument("split_count: invalid masses");
    UniformStream       stream(path);
    const std::uint64_t left = binomial(total, mass_left / (mass_left + mass_right), stream);
    return {left, total - left};
}

/// Streaming ascending order statistics of `count` i.i.d. uniforms on [a, b)
/// in O(1) state: the descending maxima recurrence y_k = y_{k+1} * U^(1/k),
/// emitted through the reflection a + (b-a)(1 - y).
class SortedUniformStream {
public:
    SortedUniformStream(std::uint64_t count, double a, double b, const SeedPath& path)
        : stream_(path), remaining_(count), a_(a), b_(b), width_(b - a) {
        assert(a < b);
    }

    bool exhausted() const { return remaining_ == 0 && !primed_; }

    double peek() {
        assert(!exhausted());
        if (!primed_) {
            cur_max_ *= std::pow(stream_.next(), 1.0 / static_cast<double>(remaining_));
            --remaining_;
            next_ = a_ + width_ * (1.0 - cur_max_);
            if (next_ >= b_)
                next_ = std::nextafter(b_, a_);
            primed_ = true;
        }
        return next_;
    }

    double next() {
        const double v = peek();
        primed_        = false;
        return v;
    }

private:
    UniformStream stream_;
    std::uint64_t remaining_;
    double        a_, b_, width_;
    double        cur_max_ = 1.0;
    double        next_    = 0.0;
    bool          primed_  = false;
};

} // namespace rhg
