#include <birkhoff/birkhoff.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace birkhoff;

TEST(Systems, DrivenLogisticStep)
{
    const auto t = driven_logistic(0.1, 0.3, 0.2, 3);
    const double x1 = 3.5 * (1 + 0.1 * std::cos(2 * std::numbers::pi * 0.2)) * 0.3 * 0.7;
    EXPECT_NEAR(t.states(0, 1), x1, 1e-15);
    EXPECT_NEAR(t.states(1, 1), std::fmod(0.2 + std::numbers::sqrt2, 1.0), 1e-15);
    EXPECT_THROW(driven_logistic(-1.0, 0.3, 0, 3), ConfigError);
}

TEST(Systems, StandardMapStep)
{
    const double p0 = 1.0, th0 = 2.0, lam = 0.25;
    const auto t = standard_map(LambdaMode::fixed(lam), p0, th0, 2, RngStream(1));
    const double p1 = std::fmod(p0 + lam * std::sin(th0), 2 * std::numbers::pi);
    EXPECT_NEAR(t.states(0, 1), p1, 1e-14);
    EXPECT_NEAR(t.states(1, 1), std::fmod(th0 + p1, 2 * std::numbers::pi), 1e-14);
    EXPECT_THROW(standard_map(LambdaMode::fixed(-1), 0, 0, 2, RngStream(1)), ConfigError);
}

TEST(Systems, StandardMapResampleDeterministic)
{
    const auto a = standard_map(LambdaMode::uniform_resample(), 1, 2, 500, RngStream(9));
    const auto b = standard_map(LambdaMode::uniform_resample(), 1, 2, 500, RngStream(9));
    const auto c = standard_map(LambdaMode::uniform_resample(), 1, 2, 500, RngStream(10));
    EXPECT_EQ(a.states, b.states);
    EXPECT_NE(a.states, c.states);
}

TEST(Systems, RotationStaysOnCircle)
{
    const auto t = circle_rotation(0.7, 0.1, 100);
    for (Eigen::Index i = 0; i < 100; ++i) {
        EXPECT_GE(t.states(0, i), 0.0);
        EXPECT_LT(t.states(0, i), 2 * std::numbers::pi);
    }
    EXPECT_NEAR(std::remainder(t.states(0, 99) - 0.1 - 99 * 0.7, 2 * std::numbers::pi), 0.0, 1e-11);
}

TEST(Systems, RngDerivedStreamsIndependent)
{
    RngStream root(42);
    auto a = root.derive("a"), a2 = root.derive("a"), b = root.derive("b");
    const auto va = a.next();
    EXPECT_EQ(va, a2.next());
    EXPECT_NE(va, b.next());
    EXPECT_NE(root.derive(0).next(), root.derive(1).next());
}

TEST(Systems, HarmonicSecondDifferenceOracle)
{
    const double amp = 2.0, k = 0.05;
    const auto h = harmonic_series(amp, 0.3, k, 200, 0.0, RngStream(0));
    ASSERT_EQ(h.interior.size(), 200);
    const double factor = -(2 - 2 * std::cos(k)) / (k * k);
    for (Eigen::Index i = 0; i < 200; ++i)
        EXPECT_NEAR(h.second_derivative(i), factor * h.interior(i), 1e-9);
}

TEST(Systems, OuMomentsMatchStationaryLaw)
{
    const auto t = ou_sample(1.0, std::numbers::sqrt2, 0.0, 0.1, 200000, 10, RngStream(3));
    const Eigen::RowVectorXd x = t.states.row(0);
    const double mean = x.mean();
    const double var = (x.array() - mean).square().mean();
    EXPECT_NEAR(mean, 0.0, 0.05);
    EXPECT_NEAR(var, 1.0, 0.05);
    const Eigen::Index n = x.size() - 1;
    const double lag1 = (x.head(n).array() * x.tail(n).array()).mean() / var;
    EXPECT_NEAR(lag1, std::exp(-0.1), 0.02);
}

TEST(Systems, LinearMapPowers)
{
    Eigen::MatrixXd a(2, 2);
    a << 0, -1, 1, 0;
    const auto t = linear_map(a, Eigen::Vector2d(1, 0), 5);
    EXPECT_NEAR(t.states(0, 4), 1.0, 1e-15);
    EXPECT_NEAR(t.states(1, 1), 1.0, 1e-15);
}

TEST(Systems, QuasiperiodicFieldShape)
{
    FieldParams p;
    const auto t = quasiperiodic_field(p, 50);
    EXPECT_EQ(t.dim(), 20);
    EXPECT_EQ(t.length(), 50u);
    EXPECT_NO_THROW(t.validate());
}
