#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <rhg/partition.hpp>

#include <cmath>
#include <random>
#include <set>

#include "support/statistics.hpp"

using namespace rhg;

namespace {
ModelParams random_params(std::mt19937_64& gen) {
    const std::uint64_t n      = 1 + gen() % 100000;
    const double        alpha  = 0.55 + (gen() >> 11) * 0x1.0p-53 * 2.0;
    const double        d_bar  = 2.0 + (gen() >> 11) * 0x1.0p-53 * 30.0;
    const std::uint32_t chunks = 1u << (gen() % 6);
    return ModelParams::from_avg_degree(n, alpha, d_bar, gen(), chunks);
}
} // namespace

TEST_CASE("build_annuli geometry") {
    SUBCASE("k = floor(alpha R / ln 2) equal heights before the merge") {
        // alpha = 1, R = 10 ln 2: k = 10 annuli of height ln 2; the five with
        // upper boundary <= R/2 merge into the clique.
        const double      R = 10.0 * std::log(2.0);
        const ModelParams params(1000, 1.0, R - 2.0 * std::log(1000.0), 1, 1);
        REQUIRE(params.R == doctest::Approx(R).epsilon(1e-12));
        const auto layout = build_annuli(params);
        CHECK(layout.count == 6); // clique + 5
        CHECK(layout.has_clique);
        CHECK(layout.upper[0] == doctest::Approx(R / 2.0).epsilon(1e-12));
        for (std::uint32_t i = 1; i < layout.count; ++i)
            CHECK(layout.upper[i] - layout.lower[i] == doctest::Approx(std::log(2.0)).epsilon(1e-9));
        CHECK(layout.upper.back() == params.R);
        CHECK(layout.lower.front() == 0.0);
    }
    SUBCASE("probabilities sum to one") {
        std::mt19937_64 gen(42);
        for (int t = 0; t < 50; ++t) {
            const auto layout = build_annuli(random_params(gen));
            double     sum    = 0.0;
            for (double p: layout.probs)
                sum += p;
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
    SUBCASE("mass ratio of successive non-clique annuli is at most 2") {
        std::mt19937_64 gen(43);
        for (int t = 0; t < 50; ++t) {
            const auto layout = build_annuli(random_params(gen));
            for (std::uint32_t i = layout.has_clique ? 1 : 0; i + 1 < layout.count; ++i)
                CHECK(layout.probs[i + 1] / layout.probs[i] <= 2.0 + 1e-9);
        }
    }
    SUBCASE("no mergeable annulus survives") {
        std::mt19937_64 gen(44);
        for (int t = 0; t < 50; ++t) {
            const auto layout = build_annuli(random_params(gen));
            for (std::uint32_t i = layout.has_clique ? 1 : 0; i < layout.count; ++i)
                CHECK(layout.upper[i] > layout.R / 2.0);
        }
    }
}

TEST_CASE("assign_counts") {
    SUBCASE("single chunk holds everything") {
        const ModelParams params = ModelParams::from_avg_degree(5000, 0.8, 8.0, 3, 1);
        auto              layout = build_annuli(params);
        assign_counts(layout, params);
        for (std::uint32_t i = 0; i < layout.count; ++i)
            CHECK(layout.chunk_counts[i][0] == layout.counts[i]);
    }
    SUBCASE("conservation at every level") {
        std::mt19937_64 gen(45);
        for (int t = 0; t < 100; ++t) {
            const ModelParams params = random_params(gen);
            auto              layout = build_annuli(params);
            assign_counts(layout, params);
            std::uint64_t total = 0;
            for (std::uint32_t i = 0; i < layout.count; ++i) {
                std::uint64_t row = 0;
                for (auto c: layout.chunk_counts[i])
                    row += c;
                CHECK(row == layout.counts[i]);
                total += layout.counts[i];
            }
            CHECK(total == params.n);
        }
    }
    SUBCASE("bit-identical recomputation") {
        const ModelParams params = ModelParams::from_avg_degree(77777, 0.7, 12.0, 99, 16);
        auto              a      = make_layout(params);
        auto              b      = make_layout(params);
        CHECK(a.counts == b.counts);
        CHECK(a.chunk_counts == b.chunk_counts);
        CHECK(a.id_base == b.id_base);
    }
    SUBCASE("chunk counts concentrate around n_i / P") {
        const ModelParams params = ModelParams::from_avg_degree(1000000, 1.0, 16.0, 7, 8);
        auto              layout = build_annuli(params);
        assign_counts(layout, params);
        for (std::uint32_t i = 0; i < layout.count; ++i) {
            if (layout.counts[i] < 1000)
                continue;
            const double mean  = static_cast<double>(layout.counts[i]) / 8.0;
            const double sigma = std::sqrt(static_cast<double>(layout.counts[i]) * (1.0 / 8.0) * (7.0 / 8.0));
            for (auto c: layout.chunk_counts[i])
                CHECK(std::abs(static_cast<double>(c) - mean) < 4.0 * sigma);
        }
    }
}

TEST_CASE("classify") {
    SUBCASE("P = 1: every non-clique annulus is streaming") {
        const ModelParams params = ModelParams::from_avg_degree(10000, 1.0, 16.0, 5, 1);
        auto              layout = build_annuli(params);
        assign_counts(layout, params);
        classify(layout);
        for (std::uint32_t i = 0; i < layout.count; ++i) {
            if (i == 0 && layout.has_clique)
                CHECK(layout.classes[i] == AnnulusClass::Clique);
            else
                CHECK(layout.classes[i] == AnnulusClass::Streaming);
        }
        CHECK(layout.first_streaming == (layout.has_clique ? 1 : 0));
    }
    SUBCASE("classes are contiguous: clique, then global, then streaming") {
        std::mt19937_64 gen(46);
        for (int t = 0; t < 100; ++t) {
            const ModelParams params = random_params(gen);
            auto              layout = build_annuli(params);
            assign_counts(layout, params);
            classify(layout);
            int phase = 0; // 0 clique, 1 global, 2 streaming
            for (std::uint32_t i = 0; i < layout.count; ++i) {
                const auto c = layout.classes[i];
                if (c == AnnulusClass::Clique)
                    CHECK(phase == 0);
                if (c == AnnulusClass::Global) {
                    CHECK(phase <= 1);
                    phase = 1;
                }
                if (c == AnnulusClass::Streaming)
                    phase = 2;
            }
            // the streaming rule matches the classification
            const double chunk_width = two_pi / params.chunks;
            for (std::uint32_t i = layout.has_clique ? 1 : 0; i < layout.count; ++i) {
                const double w =
                    layout.lower[i] > 0.0 ? 2.0 * angular_deviation(layout.lower[i], layout.lower[i], layout.R) : two_pi;
                CHECK((layout.classes[i] == AnnulusClass::Streaming) == (w <= chunk_width));
            }
        }
    }
    SUBCASE("r_G stays within the analytic bound R/2 + ln(2P/pi) + 1") {
        for (std::uint32_t P = 2; P <= 1024; P *= 2) {
            const ModelParams params = ModelParams::from_avg_degree(1u << 20, 1.0, 16.0, 11, P);
            auto              layout = build_annuli(params);
            assign_counts(layout, params);
            classify(layout);
            if (layout.first_streaming < layout.count)
                CHECK(layout.r_G <= params.R / 2.0 + std::log(2.0 * P / M_PI) + 1.0);
        }
    }
}

TEST_CASE("vertex ids and cell grid") {
    SUBCASE("offsets strictly increasing, exhaustive and disjoint") {
        std::mt19937_64 gen(47);
        for (int t = 0; t < 100; ++t) {
            const ModelParams params = random_params(gen);
            const auto        layout = make_layout(params);
            std::uint64_t     expect = 0;
            for (std::uint32_t i = 0; i < layout.count; ++i)
                for (std::uint32_t c = 0; c < layout.chunks; ++c) {
                    CHECK(layout.id_base[i][c] == expect);
                    expect += layout.chunk_counts[i][c];
                }
            CHECK(expect == params.n);
        }
    }
    SUBCASE("P = 1 offsets are prefix sums of annulus counts") {
        const ModelParams params = ModelParams::from_avg_degree(33333, 1.2, 6.0, 8, 1);
        const auto        layout = make_layout(params);
        std::uint64_t     acc    = 0;
        for (std::uint32_t i = 0; i < layout.count; ++i) {
            CHECK(layout.id_base[i][0] == acc);
            acc += layout.counts[i];
        }
    }
    SUBCASE("cell count rule") {
        CHECK(cell_count_for(0, 8) == 1);
        CHECK(cell_count_for(7, 8) == 1);
        CHECK(cell_count_for(64, 8) == 8);   // 8 <= 64/8 < 16
        CHECK(cell_count_for(127, 8) == 8);
        CHECK(cell_count_for(128, 8) == 16);
    }
    SUBCASE("cell counts: power of two with target occupancy") {
        const ModelParams params = ModelParams::from_avg_degree(100000, 0.9, 10.0, 13, 4);
        auto              layout = build_annuli(params);
        assign_counts(layout, params);
        build_cell_grid(layout);
        for (std::uint32_t i = 0; i < layout.count; ++i) {
            const auto c = layout.cells[i];
            CHECK(std::has_single_bit(c));
            if (layout.counts[i] >= 8) {
                CHECK(layout.counts[i] / c >= 8);
                CHECK(static_cast<double>(layout.counts[i]) / c < 16.0);
            } else {
                CHECK(c == 1);
            }
        }
    }
    SUBCASE("degenerate annulus gets one cell") {
        const ModelParams params(3, 1.0, 2.0, 21, 2); // tiny n: most annuli empty
        const auto        layout = make_layout(params);
        for (std::uint32_t i = 0; i < layout.count; ++i)
            if (layout.counts[i] == 0)
                CHECK(layout.cells[i] == 1);
    }
    SUBCASE("finer grids refine coarser ones") {
        const ModelParams params = ModelParams::from_avg_degree(100000, 0.9, 10.0, 13, 4);
        const auto        layout = make_layout(params);
        for (std::uint32_t i = 0; i + 1 < layout.count; ++i) {
            const auto a = layout.cells[i], b = layout.cells[i + 1];
            CHECK((std::max(a, b) % std::min(a, b)) == 0);
        }
    }
}

TEST_CASE("chunk counts are exchangeable across chunk positions") {
    // per-position means over many seeds agree within 4 sigma of n_i / P
    const std::uint32_t P = 8;
    const int           seeds = 200;
    std::vector<double> position_sum(P, 0.0);
    double              total = 0.0;
    for (int s = 0; s < seeds; ++s) {
        const ModelParams params = ModelParams::from_avg_degree(20000, 0.9, 12.0, 1000 + s, P);
        auto              layout = build_annuli(params);
        assign_counts(layout, params);
        // a fixed outer annulus carries most of the mass
        const std::uint32_t i = layout.count - 2;
        for (std::uint32_t c = 0; c < P; ++c)
            position_sum[c] += static_cast<double>(layout.chunk_counts[i][c]);
        total += static_cast<double>(layout.counts[i]);
    }
    const double mean  = total / P / seeds;
    const double sigma = std::sqrt(mean * (1.0 - 1.0 / P)); // per-draw, binomial-ish
    for (std::uint32_t c = 0; c < P; ++c)
        CHECK(std::abs(position_sum[c] / seeds - mean) < 4.0 * sigma / std::sqrt(static_cast<double>(seeds)));
}

TEST_CASE("layout radius inversion matches the restricted cdf") {
    const ModelParams params = ModelParams::from_avg_degree(100000, 0.75, 12.0, 17, 4);
    const auto        layout = make_layout(params);
    // pick a mid streaming annulus with mass
    std::uint32_t annulus = layout.first_streaming;
    while (annulus < layout.count && layout.counts[annulus] < 1000)
        ++annulus;
    REQUIRE(annulus < layout.count);

    UniformStream       u(derive_seed(params.seed, {seed_phase_radii, annulus}));
    std::vector<double> sample;
    for (int i = 0; i < 100000; ++i)
        sample.push_back(layout.radius_from_uniform(annulus, u.next()));

    const double lo = layout.lower[annulus], hi = layout.upper[annulus];
    const double clo = std::cosh(params.alpha * lo), chi = std::cosh(params.alpha * hi);
    auto         cdf = [&](double r) { return (std::cosh(params.alpha * r) - clo) / (chi - clo); };
    CHECK(testsup::ks_test(std::move(sample), cdf, 0.001));

    for (double u01: {0.0, 0.5, 1.0 - 1e-16}) {
        const double r = layout.radius_from_uniform(annulus, u01);
        CHECK(r >= lo);
        CHECK(r <= hi + 1e-12);
    }
}
