#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <rhg/geometry.hpp>

#include <cmath>
#include <random>

#include "support/statistics.hpp"

using namespace rhg;

TEST_CASE("radius_from_size") {
    CHECK(radius_from_size(1, 5.0) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(radius_from_size(std::exp(1.0), 0.0) == doctest::Approx(2.0).epsilon(1e-14));
    // 2 ln(1e6) - 1.124, high-precision reference
    CHECK(radius_from_size(1e6, -1.124) == doctest::Approx(26.507021115928548208).epsilon(1e-14));
}

TEST_CASE("radial_const_from_avg_degree") {
    SUBCASE("zero C at the pivot degree") {
        for (double alpha: {0.6, 1.0, 2.5}) {
            const double q     = alpha / (alpha - 0.5);
            const double d_bar = 2.0 / M_PI * q * q;
            CHECK(radial_const_from_avg_degree(d_bar, alpha) == doctest::Approx(0.0).epsilon(1e-12));
        }
    }
    SUBCASE("reference value d=16, alpha=1") {
        CHECK(radial_const_from_avg_degree(16.0, 1.0) == doctest::Approx(-3.6757541328186910).epsilon(1e-14));
    }
    SUBCASE("round trip with expected_avg_degree") {
        for (double alpha: {0.55, 0.8, 1.0, 3.0})
            for (double x: {1.0, 10.0, 100.0})
                CHECK(expected_avg_degree(radial_const_from_avg_degree(x, alpha), alpha)
                      == doctest::Approx(x).epsilon(1e-9));
    }
    SUBCASE("rejects alpha <= 1/2") {
        CHECK_THROWS_AS(radial_const_from_avg_degree(10.0, 0.5), std::invalid_argument);
        CHECK_THROWS_AS(radial_const_from_avg_degree(-1.0, 1.0), std::invalid_argument);
    }
}

TEST_CASE("radial_density") {
    CHECK(radial_density(0.0, 1.0, 10.0) == 0.0);
    CHECK(radial_density(5.0, 1.0, 10.0) == doctest::Approx(0.0067382529152945433).epsilon(1e-13));

    SUBCASE("normalizes to 1") {
        for (auto [alpha, R]: {std::pair{0.55, 9.0}, {1.0, 14.0}, {2.0, 25.0}}) {
            const double integral = testsup::simpson([&](double r) { return radial_density(r, alpha, R); }, 0.0, R);
            CHECK(integral == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("radial_cdf") {
    const double alpha = 0.8, R = 12.0;
    CHECK(radial_cdf(0.0, alpha, R) == 0.0);
    CHECK(radial_cdf(R, alpha, R) == 1.0);

    SUBCASE("antiderivative of the density") {
        std::mt19937_64 gen(7);
        std::uniform_real_distribution<double> dist(0.01, R - 0.01);
        for (int i = 0; i < 100; ++i) {
            const double r  = dist(gen);
            const double h  = 1e-5;
            const double fd = (radial_cdf(r + h, alpha, R) - radial_cdf(r - h, alpha, R)) / (2.0 * h);
            CHECK(std::abs(fd - radial_density(r, alpha, R)) <= 1e-6);
        }
    }
    SUBCASE("monotone") {
        double prev = 0.0;
        for (double r = 0.0; r <= R; r += R / 512.0) {
            const double v = radial_cdf(r, alpha, R);
            CHECK(v >= prev);
            prev = v;
        }
    }
    SUBCASE("matches the exponential approximation away from the center") {
        // mu(B_r) = e^{alpha (r - R)} (1 + o(1)); at alpha=1, R=20, r=R-2 the
        // relative error is ~2.6e-8, well inside the 5% slack.
        const double exact = radial_cdf(18.0, 1.0, 20.0);
        CHECK(std::abs(exact / std::exp(-2.0) - 1.0) < 0.05);
    }
}

TEST_CASE("hyperbolic_distance") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> rdist(1e-3, 12.0), tdist(0.0, two_pi);

    SUBCASE("identity") {
        for (int i = 0; i < 100; ++i) {
            PolarPoint p{rdist(gen), tdist(gen)};
            CHECK(hyperbolic_distance(p, p) == 0.0);
        }
    }
    SUBCASE("symmetry") {
        for (int i = 0; i < 1000; ++i) {
            PolarPoint p{rdist(gen), tdist(gen)}, q{rdist(gen), tdist(gen)};
            CHECK(hyperbolic_distance(p, q) == hyperbolic_distance(q, p));
        }
    }
    SUBCASE("diametral points at equal radius") {
        // acosh(cosh^2 3 + sinh^2 3) = acosh(cosh 6) = 6
        CHECK(hyperbolic_distance({3.0, 0.0}, {3.0, M_PI}) == doctest::Approx(6.0).epsilon(1e-12));
    }
}

TEST_CASE("angular_deviation") {
    CHECK(angular_deviation(1.0, 1.0, 3.0) == M_PI);

    SUBCASE("continuous at r + b = R") {
        for (auto [r, b]: {std::pair{3.0, 5.0}, {6.0, 6.0}, {2.0, 9.5}}) {
            const double R = r + b;
            CHECK(angular_deviation(r, b, R) == doctest::Approx(M_PI).epsilon(1e-9));
            CHECK(angular_deviation(r, b, R * (1.0 + 1e-12)) == doctest::Approx(M_PI).epsilon(1e-5));
        }
    }
    SUBCASE("reference value (8, 6, 12)") {
        CHECK(angular_deviation(8.0, 6.0, 12.0) == doctest::Approx(0.75343920098019858).epsilon(1e-13));
    }
    SUBCASE("bisection on the distance equation agrees") {
        // Delta-theta solves d((r,0), (b,x)) = R in x.
        const double r = 8.0, b = 6.0, R = 12.0;
        double lo = 0.0, hi = M_PI;
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            (hyperbolic_distance({r, 0.0}, {b, mid}) < R ? lo : hi) = mid;
        }
        CHECK(angular_deviation(r, b, R) == doctest::Approx(lo).epsilon(1e-10));
    }
    SUBCASE("range and monotonicity") {
        const double R = 14.0;
        for (double b: {2.0, 5.0, 9.0}) {
            double prev = M_PI + 1e-12;
            for (double r = 0.05; r < R; r += 0.05) {
                const double v = angular_deviation(r, b, R);
                CHECK(v >= 0.0);
                CHECK(v <= M_PI);
                CHECK(v <= prev + 1e-12); // nonincreasing in r
                prev = v;
            }
        }
    }
    SUBCASE("pi branch exactly when r + b < R, continuous at the boundary") {
        const double R = 10.0;
        for (double r = 0.25; r < R; r += 0.25)
            for (double b = 0.25; b < R; b += 0.25) {
                const double v = angular_deviation(r, b, R);
                if (r + b < R)
                    CHECK(v == M_PI);
                else if (r + b == R)
                    CHECK(v == doctest::Approx(M_PI).epsilon(1e-6)); // arccos near -1
                else if (r + b > R + 0.01)
                    CHECK(v < M_PI);
            }
    }
}

TEST_CASE("precomputed points and adjacency") {
    const double R = 16.0, cosh_R = std::cosh(R);
    std::mt19937_64 gen(23);
    std::uniform_real_distribution<double> rdist(1e-3, R), tdist(0.0, two_pi), u01(0.0, 1.0);

    SUBCASE("cached values match direct evaluation") {
        for (int i = 0; i < 1000; ++i) {
            const double     r = rdist(gen), t = tdist(gen);
            PrecomputedPoint p(0, r, t);
            CHECK(p.coth_r == doctest::Approx(std::cosh(r) / std::sinh(r)).epsilon(1e-12));
            CHECK(p.inv_sinh_r == doctest::Approx(1.0 / std::sinh(r)).epsilon(1e-12));
            CHECK(p.cos_theta * p.cos_theta + p.sin_theta * p.sin_theta == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
    SUBCASE("rejects r = 0") {
        CHECK_THROWS_AS(PrecomputedPoint(0, 0.0, 1.0), std::invalid_argument);
    }
    SUBCASE("agrees with the direct distance outside the boundary band") {
        int checked = 0;
        for (int i = 0; i < 100000; ++i) {
            PolarPoint a{rdist(gen), tdist(gen)}, b{rdist(gen), tdist(gen)};
            const double d = hyperbolic_distance(a, b);
            if (std::abs(d - R) < 1e-9 * R)
                continue;
            PrecomputedPoint pa(0, a.r, a.theta), pb(1, b.r, b.theta);
            CHECK(is_adjacent_precomputed(pa, pb, cosh_R) == (d < R));
            ++checked;
        }
        CHECK(checked > 99000);
    }
    SUBCASE("same coordinates are adjacent") {
        PrecomputedPoint a(0, 3.0, 1.0), b(1, 3.0, 1.0);
        CHECK(is_adjacent_precomputed(a, b, cosh_R));
    }
    SUBCASE("antipodal rim points are not adjacent") {
        PrecomputedPoint a(0, R, 0.0), b(1, R, M_PI);
        CHECK_FALSE(is_adjacent_precomputed(a, b, cosh_R));
    }
    SUBCASE("clique: any two points with r <= R/2 are adjacent") {
        std::uniform_real_distribution<double> cd(1e-3, R / 2.0);
        for (int i = 0; i < 10000; ++i) {
            PrecomputedPoint a(0, cd(gen), tdist(gen)), b(1, cd(gen), tdist(gen));
            CHECK(is_adjacent_precomputed(a, b, cosh_R));
        }
    }
}

TEST_CASE("overestimation_factor") {
    // OE(ln2/alpha, alpha) <= sqrt(e) for every alpha > 1/2
    const double sqrt_e = 1.6487212707001281;
    for (double alpha = 0.501; alpha <= 4.0; alpha += 0.001)
        CHECK(overestimation_factor(std::log(2.0) / alpha, alpha) <= sqrt_e);

    // x -> 0 limit is 1 (no overestimation for a zero-height annulus).
    CHECK(overestimation_factor(1e-8, 0.75) == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(overestimation_factor(1.0, 1.0) == doctest::Approx(1.3243606353500641).epsilon(1e-13));
}

TEST_CASE("alpha and gamma conversions") {
    CHECK(alpha_from_gamma(3.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(alpha_from_gamma(2.2) == doctest::Approx(0.6).epsilon(1e-13));
    CHECK(gamma_from_alpha(1.0) == doctest::Approx(3.0).epsilon(1e-15));

    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> gd(2.0 + 1e-6, 10.0);
    for (int i = 0; i < 100; ++i) {
        const double g = gd(gen);
        CHECK(gamma_from_alpha(alpha_from_gamma(g)) == doctest::Approx(g).epsilon(1e-12));
    }
    CHECK_THROWS_AS(alpha_from_gamma(2.0), std::invalid_argument);
    CHECK_THROWS_AS(gamma_from_alpha(0.5), std::invalid_argument);
}

TEST_CASE("model params validation") {
    CHECK_THROWS_AS(ModelParams(0, 1.0, 0.0, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(ModelParams(100, 0.5, 0.0, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(ModelParams(100, 1.0, -100.0, 1, 1), std::invalid_argument); // R <= 0
    CHECK_THROWS_AS(ModelParams(100, 1.0, 0.0, 1, 0), std::invalid_argument);
    const ModelParams p = ModelParams::from_avg_degree(1000, 1.0, 16.0, 42, 4);
    CHECK(p.R == doctest::Approx(2.0 * std::log(1000.0) - 3.6757541328186910).epsilon(1e-12));
}
