#include <gtest/gtest.h>

#include "cantordim/fixtures.hpp"
#include "cantordim/regularizer.hpp"
#include "oracles.hpp"

using namespace cantordim;

namespace {

const double kRho = std::log(4.0) / std::log(6.0);
constexpr std::size_t kHorizon = 400;

void expect_segments_hold(const RegularizationResult& res) {
    ASSERT_FALSE(res.checkpoints.empty());
    for (const auto& c : res.checkpoints) {
        EXPECT_NEAR(oracle::log_product(res.modified, kRho, c.n), 0.0, 1e-10) << "n " << c.n;
    }
    for (std::size_t n = 1; n <= kHorizon; ++n) {
        EXPECT_GE(oracle::log_product(res.modified, kRho, n), -1e-9) << "n " << n;
    }
    EXPECT_TRUE(res.admissibility.admissible) << res.admissibility.failure;
}

}  // namespace

TEST(Classify, Fixtures) {
    EXPECT_EQ(classify_measure(fixtures::drifting(), kRho, kHorizon).tag, MeasureCase::zero_measure);
    EXPECT_EQ(classify_measure(fixtures::growing(), kRho, kHorizon).tag, MeasureCase::infinite_measure);
    EXPECT_EQ(classify_measure(fixtures::quarter_centered({1.0 / 6}), kRho, kHorizon).tag,
              MeasureCase::already_finite);
}

TEST(EpsilonSolver, RootOfSegmentProduct) {
    const ScaleTable scales(fixtures::drifting(), 50);
    const double eps = epsilon_solver(scales, 3, 20, kRho);
    EXPECT_GT(eps, 0.0);
    double acc = 0.0;
    for (std::size_t k = 3; k < 20; ++k) {
        double lam = 0.0;
        for (const auto& b : fixtures::drifting().generation(k).branches) {
            lam += std::pow(b.modulus(), kRho - eps);
        }
        acc += std::log(lam);
    }
    EXPECT_NEAR(acc, 0.0, 1e-12);
    EXPECT_THROW(epsilon_solver(scales, 5, 5, kRho), InvalidArgument);
    EXPECT_THROW(epsilon_solver(scales, 0, 51, kRho), HorizonExceeded);
}

TEST(EpsilonSolver, DegenerateScalesAreInfeasible) {
    // With moduli 0.6 the exponent-2 sum is 4 * 0.36 > 1, so no root exists below rho.
    auto gen = fixtures::quarter_centered_generation(0.6);
    auto sys = CantorSystem::explicit_system(fixtures::default_params(0.6, 0.6), {gen, gen});
    const ScaleTable scales(sys, 2);
    EXPECT_THROW(epsilon_solver(scales, 0, 2, kRho), Infeasible);
}

TEST(ZeroMeasure, DriftingBecomesCritical) {
    const auto sys = fixtures::drifting();
    const auto res = regularize_zero_measure(sys, kRho, kHorizon);
    EXPECT_EQ(res.case_tag, MeasureCase::zero_measure);
    expect_segments_hold(res);
    for (std::size_t i = 1; i < res.checkpoints.size(); ++i) {
        EXPECT_GT(res.checkpoints[i].n, res.checkpoints[i - 1].n);
        EXPECT_LT(res.checkpoints[i].epsilon, res.checkpoints[i - 1].epsilon);
    }
    EXPECT_GT(res.checkpoints.front().epsilon, 0.0);
    ASSERT_EQ(res.max_perturbation.size(), kHorizon);
    const std::size_t tail = res.max_perturbation.size() / 2;
    for (std::size_t k = tail + 1; k < res.max_perturbation.size(); ++k) {
        EXPECT_LE(res.max_perturbation[k], res.max_perturbation[k - 1] + 1e-15);
    }
    const auto before = hausdorff_dimension(sys, 100000, 1e-6);
    const auto after = hausdorff_dimension(res.modified, 100000, 1e-6);
    EXPECT_NEAR(after.rho, before.rho, 2e-4);
    const auto bounds = hausdorff_measure_bounds(res.modified, kRho, kHorizon);
    EXPECT_GE(bounds.upper, 0.99);
    EXPECT_LE(bounds.upper, 1.01);
    EXPECT_GT(bounds.lower, 0.0);
}

TEST(ZeroMeasure, RejectsOtherCases) {
    EXPECT_THROW(regularize_zero_measure(fixtures::quarter_centered({1.0 / 6}), kRho, kHorizon),
                 CaseMismatch);
    EXPECT_THROW(regularize_zero_measure(fixtures::growing(), kRho, kHorizon), CaseMismatch);
    const auto res = regularize(fixtures::quarter_centered({1.0 / 6}), kRho, kHorizon);
    EXPECT_EQ(res.case_tag, MeasureCase::already_finite);
    EXPECT_TRUE(res.checkpoints.empty());
    EXPECT_NEAR(res.min_running_log_product, 0.0, 1e-12);
}

TEST(InfiniteMeasure, ConvergentExcessDamping) {
    RegularizeOptions opts;
    opts.enforce_case = false;
    const auto res = regularize_infinite_measure(fixtures::convergent_excess(), kRho, kHorizon, opts);
    EXPECT_EQ(res.case_tag, MeasureCase::infinite_measure);
    ASSERT_GE(res.delta_sequence.size(), 2u);
    for (std::size_t i = 1; i < res.delta_sequence.size(); ++i) {
        EXPECT_GT(res.delta_sequence[i], res.delta_sequence[i - 1]);
        EXPECT_LT(res.delta_sequence[i], 1.0);
    }
    EXPECT_LE(res.damped_min_log_product, -std::log(2.0));
    expect_segments_hold(res);
}

TEST(InfiniteMeasure, GrowingDispatch) {
    const auto res = regularize(fixtures::growing(), kRho, kHorizon);
    EXPECT_EQ(res.case_tag, MeasureCase::infinite_measure);
    EXPECT_FALSE(res.block_boundaries.empty());
    expect_segments_hold(res);
    EXPECT_THROW(regularize_infinite_measure(fixtures::drifting(), kRho, kHorizon), CaseMismatch);
}

TEST(InfiniteMeasure, ShortHorizonHasNoBlock) {
    RegularizeOptions opts;
    opts.enforce_case = false;
    EXPECT_THROW(regularize_infinite_measure(fixtures::quarter_centered({1.0 / 6}), kRho, 1, opts), Error);
}
