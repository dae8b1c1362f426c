#include <gtest/gtest.h>

#include <numeric>

#include "cantordim/fixtures.hpp"
#include "cantordim/harmonic.hpp"

using namespace cantordim;

namespace {

WalkConfig small_config(std::uint64_t walkers, std::size_t depth = 4, std::size_t level = 1) {
    WalkConfig c;
    c.depth = depth;
    c.report_level = level;
    c.walkers = walkers;
    c.threads = 1;
    return c;
}

// Nine squares of side s centred on the cells of a 3x3 grid.
CantorSystem dense_grid(double s) {
    std::vector<AffineContraction> gen;
    for (int row = 0; row < 3; ++row) {
        for (int col = 0; col < 3; ++col) {
            gen.push_back(fixtures::centered_branch(s, Complex((col + 0.5) / 3, (row + 0.5) / 3)));
        }
    }
    return CantorSystem::periodic(SystemParams{9, s, s, 0.005, true}, {gen});
}

void expect_equal_masses(const HarmonicMeasureEstimate& est, std::size_t level,
                         std::initializer_list<std::uint64_t> cells, double z) {
    const std::uint64_t first = *cells.begin();
    for (std::uint64_t c : cells) {
        const double se = std::hypot(est.standard_error(level, first), est.standard_error(level, c));
        EXPECT_LE(std::abs(est.mass(level, c) - est.mass(level, first)), z * se)
            << "cells " << first << " and " << c;
    }
}

}  // namespace

TEST(Walk, DeterministicPerWalker) {
    const auto sys = fixtures::quarter_centered({1.0 / 6, 1.0 / 8});
    const auto cfg = small_config(100);
    const WalkContext ctx(sys, cfg);
    for (std::uint64_t w : {0u, 17u, 99u}) {
        const auto a = ctx.walk(w);
        const auto b = sample_harmonic_hit(sys, cfg, w);
        ASSERT_TRUE(std::holds_alternative<WalkHit>(a));
        EXPECT_EQ(std::get<WalkHit>(a).leaf, std::get<WalkHit>(b).leaf);
        EXPECT_EQ(std::get<WalkHit>(a).steps, std::get<WalkHit>(b).steps);
        EXPECT_EQ(std::get<WalkHit>(a).word.size(), 1u);
    }
    EXPECT_THROW(sample_harmonic_hit(sys, cfg, 100), InvalidArgument);
}

TEST(Walk, GeometryOfContext) {
    const WalkContext ctx(fixtures::quarter_centered({1.0 / 6}), small_config(10));
    EXPECT_NEAR(std::abs(ctx.center() - Complex(0.5, 0.5)), 0.0, 1e-15);
    EXPECT_NEAR(ctx.start_radius(), 64 * std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(ctx.reentry_radius(), 2 * std::sqrt(0.5), 1e-12);
    EXPECT_NEAR(ctx.termination_band(), 1e-3 * std::sqrt(2.0) / 1296, 1e-18);
    EXPECT_EQ(ctx.leaves_per_report_cell(), 64u);
}

TEST(Walk, LevelZeroReportsEmptyWord) {
    const auto cfg = small_config(50, 2, 0);
    const auto out = sample_harmonic_hit(fixtures::quarter_centered({1.0 / 6}), cfg, 3);
    ASSERT_TRUE(std::holds_alternative<WalkHit>(out));
    EXPECT_TRUE(std::get<WalkHit>(out).word.empty());
    const auto est = estimate_harmonic_measure(fixtures::quarter_centered({1.0 / 6}), cfg);
    EXPECT_EQ(est.mass(0, 0), 1.0);
}

TEST(Walk, ConfigValidation) {
    const auto sys = fixtures::quarter_centered({1.0 / 6});
    auto cfg = small_config(10, 4, 3);
    EXPECT_THROW(estimate_harmonic_measure(sys, cfg), InvalidArgument);
    cfg = small_config(0);
    EXPECT_THROW(estimate_harmonic_measure(sys, cfg), InvalidArgument);
    cfg = small_config(10);
    cfg.termination_rel = 0.0;
    EXPECT_THROW(estimate_harmonic_measure(sys, cfg), InvalidArgument);
    cfg = small_config(10);
    cfg.reentry_radius_factor = 1.0;
    EXPECT_THROW(estimate_harmonic_measure(sys, cfg), InvalidArgument);
}

TEST(Walk, AbortedWalksAreCounted) {
    auto cfg = small_config(200);
    cfg.max_steps = 2;
    const auto sys = fixtures::quarter_centered({1.0 / 6});
    try {
        const auto est = estimate_harmonic_measure(sys, cfg);
        EXPECT_GT(est.aborted, 0u);
        EXPECT_TRUE(est.flagged());
    } catch (const Error&) {
        SUCCEED() << "every walk aborted";
    }
}

TEST(Estimate, ThreadCountDoesNotChangeCounts) {
    const auto sys = fixtures::quarter_centered({1.0 / 6, 1.0 / 8});
    auto cfg = small_config(10000, 4, 2);
    const auto one = estimate_harmonic_measure(sys, cfg);
    cfg.threads = 4;
    const auto four = estimate_harmonic_measure(sys, cfg);
    EXPECT_EQ(one.counts, four.counts);
    EXPECT_EQ(one.total_steps, four.total_steps);
}

TEST(Estimate, RefinementIsExact) {
    const auto sys = fixtures::quarter_centered({1.0 / 6});
    const auto coarse = estimate_harmonic_measure(sys, small_config(5000, 4, 1));
    const auto fine = estimate_harmonic_measure(sys, small_config(5000, 4, 2));
    EXPECT_EQ(coarse.counts[1], fine.counts[1]);
    EXPECT_EQ(coarse.counts[0], fine.counts[0]);
}

TEST(Estimate, MassesSumToOne) {
    const auto est = estimate_harmonic_measure(fixtures::quarter_centered({1.0 / 6}), small_config(4000, 4, 2));
    const auto m = est.to_level_measure();
    ASSERT_TRUE(m.has_counts());
    for (std::size_t l = 0; l <= 2; ++l) {
        EXPECT_NEAR(std::accumulate(m.masses[l].begin(), m.masses[l].end(), 0.0), 1.0, 1e-12);
    }
    EXPECT_EQ(est.hits() + est.aborted, est.total);
}

TEST(Estimate, SymmetricTargetHasEqualQuarters) {
    const auto est = estimate_harmonic_measure(fixtures::quarter_centered({1.0 / 6}), small_config(100000));
    EXPECT_FALSE(est.flagged());
    for (std::uint64_t i = 0; i < 4; ++i) {
        EXPECT_LE(std::abs(est.mass(1, i) - 0.25), 4 * est.standard_error(1, i)) << "cell " << i;
    }
}

TEST(Estimate, SeedsAgree) {
    const auto sys = fixtures::quarter_centered({1.0 / 6, 1.0 / 8});
    auto cfg = small_config(20000, 4, 2);
    const auto a = estimate_harmonic_measure(sys, cfg);
    cfg.seed = 77;
    const auto b = estimate_harmonic_measure(sys, cfg);
    EXPECT_NE(a.counts[2], b.counts[2]);
    for (std::uint64_t i = 0; i < 16; ++i) {
        const double se = std::hypot(a.standard_error(2, i), b.standard_error(2, i));
        EXPECT_LE(std::abs(a.mass(2, i) - b.mass(2, i)), 4 * se) << "cell " << i;
    }
}

TEST(Estimate, DepthRefinementIsStable) {
    auto cfg = small_config(20000, 3, 1);
    const auto cmp = compare_depths(fixtures::quarter_centered({1.0 / 6, 1.0 / 8}), cfg);
    EXPECT_EQ(cmp.fine.config.depth, 5u);
    EXPECT_LE(cmp.max_z, 5.0);
}

TEST(Estimate, MaxMassDecays) {
    const auto est = estimate_harmonic_measure(fixtures::quarter_centered({1.0 / 6}), small_config(20000, 5, 3));
    const auto fit = mass_decay_fit(est);
    EXPECT_LT(fit.gamma, 1.0);
    EXPECT_GT(fit.gamma, 0.0);
    ASSERT_EQ(fit.log_max_mass.size(), 3u);
    EXPECT_THROW(mass_decay_fit(estimate_harmonic_measure(fixtures::quarter_centered({1.0 / 6}),
                                                          small_config(100, 4, 1))),
                 InvalidArgument);
}

TEST(Estimate, DenseGridOrbitsShareMass) {
    const auto est = estimate_harmonic_measure(dense_grid(0.2), small_config(40000, 3, 1));
    // Index = 3 * row + col: corners, edge midpoints, centre.
    expect_equal_masses(est, 1, {0, 2, 6, 8}, 4.0);
    expect_equal_masses(est, 1, {1, 3, 5, 7}, 4.0);
    EXPECT_LT(est.mass(1, 4), est.mass(1, 1));
    EXPECT_LT(est.mass(1, 1), est.mass(1, 0));
}
