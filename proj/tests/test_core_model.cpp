#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "rcp/params.hpp"

using namespace rcp;

namespace {

std::string failing_field(const ProtocolParams& p) {
    try {
        (void)validate_params(p);
    } catch (const DomainError& e) {
        return e.field();
    }
    return "";
}

}  // namespace

TEST(ValidateParams, AcceptsReferenceConfigurations) {
    const auto p = validate_params({1.5, 0.1, 1.0, 1.0, 1.0});
    EXPECT_EQ(p.a(), 1.5);
    EXPECT_EQ(p.beta(), 0.1);
    EXPECT_EQ(p.C(), 1.0);
    EXPECT_EQ(p.tau(), 1.0);
    EXPECT_EQ(p.kappa(), 1.0);
    EXPECT_TRUE(p.has_queue_feedback());

    const auto q = validate_params({0.5, 0.0, 1.0, 100.0, 1.0});
    EXPECT_FALSE(q.has_queue_feedback());
    EXPECT_EQ(q.tau(), 100.0);
}

TEST(ValidateParams, NamesTheOffendingField) {
    EXPECT_EQ(failing_field({0.0, 0.1, 1, 1, 1}), "a");
    EXPECT_EQ(failing_field({-1.0, 0.1, 1, 1, 1}), "a");
    EXPECT_EQ(failing_field({1.0, -0.1, 1, 1, 1}), "beta");
    EXPECT_EQ(failing_field({1.0, 0.1, 0, 1, 1}), "C");
    EXPECT_EQ(failing_field({1.0, 0.1, 1, 0, 1}), "tau");
    EXPECT_EQ(failing_field({1.0, 0.1, 1, 1, 0}), "kappa");
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double inf = std::numeric_limits<double>::infinity();
    EXPECT_EQ(failing_field({nan, 0.1, 1, 1, 1}), "a");
    EXPECT_EQ(failing_field({1.0, inf, 1, 1, 1}), "beta");
    EXPECT_EQ(failing_field({1.0, 0.1, 1, inf, 1}), "tau");
    EXPECT_EQ(failing_field({1.0, 0.0, 1, 1, 1}), "");
}

TEST(ValidateParams, WithKappaRevalidates) {
    const auto p = validate_params({1.0, 0.2, 1, 1, 1});
    EXPECT_EQ(p.with_kappa(2.0).kappa(), 2.0);
    EXPECT_EQ(p.with_kappa(2.0).a(), 1.0);
    EXPECT_THROW((void)p.with_kappa(0.0), DomainError);
}

TEST(Equilibrium, RateEqualsCapacityQueueEmpty) {
    const auto e1 = equilibrium(validate_params({1, 0.1, 1, 1, 1}));
    EXPECT_EQ(e1.R_star, 1.0);
    EXPECT_EQ(e1.q_star, 0.0);
    const auto e10 = equilibrium(validate_params({1, 0.1, 10, 1, 1}));
    EXPECT_EQ(e10.R_star, 10.0);
    EXPECT_EQ(e10.q_star, 0.0);
}

TEST(Equilibrium, IndependentOfKappa) {
    const auto lo = equilibrium(validate_params({0.8, 0.55, 3, 2, 0.5}));
    const auto hi = equilibrium(validate_params({0.8, 0.55, 3, 2, 2.0}));
    EXPECT_EQ(lo.R_star, hi.R_star);
    EXPECT_EQ(lo.q_star, hi.q_star);
}

TEST(EquilibriumProperty, ExactForRandomParameters) {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(1e-3, 1e3);
    for (int i = 0; i < 2000; ++i) {
        const ProtocolParams p{u(gen), u(gen) * (i % 3 == 0 ? 0.0 : 1.0), u(gen), u(gen), u(gen)};
        const auto e = equilibrium(validate_params(p));
        ASSERT_EQ(e.R_star, p.C);
        ASSERT_EQ(e.q_star, 0.0);
    }
}
