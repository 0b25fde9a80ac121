#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstring>

#include "rcp/fluid_sim.hpp"
#include "rcp/hopf.hpp"

using namespace rcp;

namespace {

ValidatedParams P(double a, double beta, double kappa = 1.0) { return validate_params({a, beta, 1.0, 1.0, kappa}); }

}  // namespace

TEST(Simulate, FixedPointIsExact) {
    const auto tr = simulate(P(1.5, 0.1), {1.0, 0.0}, {50.0, 20, false, {}});
    ASSERT_FALSE(tr.empty());
    for (std::size_t i = 0; i < tr.size(); ++i) {
        ASSERT_EQ(tr.R_values[i], 1.0);
        ASSERT_EQ(tr.q_values[i], 0.0);
    }
}

TEST(Simulate, GridLayout) {
    const auto tr = simulate(P(0.5, 0.0), {1.1, 0.0}, {10.0, 20, false, {}});
    EXPECT_EQ(tr.size(), 201u);
    EXPECT_DOUBLE_EQ(tr.h, 0.05);
    EXPECT_DOUBLE_EQ(tr.times.back(), 10.0);
    EXPECT_EQ(tr.R_values.front(), 1.1);
    EXPECT_FALSE(tr.diverged);
}

TEST(Simulate, StableBelowKappaC) {
    const auto tr = simulate(P(1.5, 0.1, 0.95), {1.2, 0.0}, {300.0, 20, false, {}});
    const auto v = analyze_trajectory(tr, {1.0, 0.0}, 0.1);
    EXPECT_EQ(v.kind, Verdict::converged);
    EXPECT_LT(std::abs(tr.R_values.back() - 1.0), 1e-4);
}

TEST(Simulate, LimitCycleAboveKappaC) {
    const auto tr = simulate(P(1.5, 0.1, 1.05), {1.2, 0.0}, {600.0, 20, false, {}});
    const auto v = analyze_trajectory(tr, {1.0, 0.0}, 0.2);
    EXPECT_EQ(v.kind, Verdict::sustained_oscillation);
    EXPECT_GT(v.amplitude, 0.05);
}

TEST(Simulate, SubCriticalDivergesFromSmallPerturbation) {
    const auto tr = simulate(P(0.75, 0.518, 1.05), {1.03, 0.0}, {1000.0, 20, false, {}});
    EXPECT_TRUE(tr.diverged);
    ASSERT_TRUE(tr.divergence_time.has_value());
    EXPECT_LT(*tr.divergence_time, 1000.0);
    EXPECT_EQ(analyze_trajectory(tr, {1.0, 0.0}, 0.1).kind, Verdict::diverged);
    // the bad sample is not stored
    for (double r : tr.R_values) ASSERT_TRUE(std::isfinite(r) && std::abs(r) <= 1e6);
}

TEST(Simulate, RateOnlyAmplitudeNearPrediction) {
    const double kc = 1.0;
    const auto tr = simulate(validate_params({1.5707963267948966, 0.0, 1.0, 1.0, kc + 0.0118}), {1.1, 0.0},
                             {3000.0, 20, false, {}});
    const auto v = analyze_trajectory(tr, {1.0, 0.0}, 0.1);
    ASSERT_EQ(v.kind, Verdict::sustained_oscillation);
    EXPECT_NEAR(v.amplitude / amplitude_no_queue(kc + 0.0118, kc, 1.0), 1.0, 0.15);
}

TEST(Simulate, ClampKeepsQueueNonNegative) {
    const auto tr = simulate(P(1.3, 0.4), {0.5, 0.0}, {200.0, 20, true, {}});
    EXPECT_GE(*std::min_element(tr.q_values.begin(), tr.q_values.end()), 0.0);
    const auto free = simulate(P(1.3, 0.4), {0.5, 0.0}, {200.0, 20, false, {}});
    EXPECT_LT(*std::min_element(free.q_values.begin(), free.q_values.end()), 0.0);
}

TEST(Simulate, BitwiseDeterministic) {
    const auto a = simulate(P(1.2, 0.3, 1.1), {1.3, 0.2}, {80.0, 16, false, {}});
    const auto b = simulate(P(1.2, 0.3, 1.1), {1.3, 0.2}, {80.0, 16, false, {}});
    ASSERT_EQ(a.size(), b.size());
    EXPECT_EQ(std::memcmp(a.R_values.data(), b.R_values.data(), a.size() * sizeof(double)), 0);
    EXPECT_EQ(std::memcmp(a.q_values.data(), b.q_values.data(), a.size() * sizeof(double)), 0);
}

TEST(Simulate, FourthOrderInStep) {
    const auto p = P(1.2, 0.3);
    auto end = [&](int m) { return simulate(p, {1.1, 0.0}, {20.0, m, false, {}}).R_values.back(); };
    const double ref = end(512);
    const double ratio = std::abs(end(8) - ref) / std::abs(end(16) - ref);
    EXPECT_GT(ratio, 12.0);
    EXPECT_LT(ratio, 20.0);
}

TEST(Simulate, RejectsBadConfig) {
    const auto p = P(1.0, 0.1);
    EXPECT_THROW((void)simulate(p, {0.0, 0.0}, {}), DomainError);
    EXPECT_THROW((void)simulate(p, {1.0, NAN}, {}), DomainError);
    EXPECT_THROW((void)simulate(p, {1.0, -1.0}, {10.0, 20, true, {}}), DomainError);
    EXPECT_THROW((void)simulate(p, {1.0, 0.0}, {-1.0, 20, false, {}}), DomainError);
    EXPECT_THROW((void)simulate(p, {1.0, 0.0}, {10.0, 3, false, {}}), DomainError);
    EXPECT_THROW((void)simulate(p, {1.0, 0.0}, {10.0, 20, false, 0.5}), DomainError);
}

TEST(Simulate, CapTruncates) {
    const auto tr = simulate(P(2.0, 0.0, 1.5), {1.5, 0.0}, {500.0, 20, false, 3.0});
    EXPECT_TRUE(tr.diverged);
    EXPECT_LT(tr.times.back(), 500.0);
}

TEST(PhasePortrait, PairsWithDelayedValue) {
    const auto tr = simulate(P(1.0, 0.2), {1.2, 0.0}, {10.0, 20, false, {}});
    const auto pts = phase_portrait(tr, 1.0);
    ASSERT_EQ(pts.size(), tr.size() - 20);
    EXPECT_EQ(pts.front().first, tr.R_values[20]);
    EXPECT_EQ(pts.front().second, tr.R_values[0]);
    EXPECT_EQ(pts.back().second, tr.R_values[tr.size() - 21]);
    EXPECT_THROW((void)phase_portrait(tr, 0.33), DomainError);
}

TEST(AnalyzeTrajectory, InconclusiveWhileGrowing) {
    const auto tr = simulate(P(1.5, 0.1, 1.05), {1.001, 0.0}, {60.0, 20, false, {}});
    EXPECT_THROW((void)analyze_trajectory(tr, {1.0, 0.0}, 0.5), InconclusiveError);
}

TEST(AnalyzeTrajectory, RejectsBadTail) {
    const auto tr = simulate(P(1.0, 0.0), {1.0, 0.0}, {10.0, 20, false, {}});
    EXPECT_THROW((void)analyze_trajectory(tr, {1.0, 0.0}, 0.0), DomainError);
    EXPECT_THROW((void)analyze_trajectory(tr, {1.0, 0.0}, 1.0), DomainError);
}
