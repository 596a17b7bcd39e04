#include <birkhoff/birkhoff.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <numeric>

using namespace birkhoff;

TEST(Weights, BumpClosedForm)
{
    const auto w = WeightFunction::bump();
    EXPECT_EQ(w(0.0), 0.0);
    EXPECT_EQ(w(1.0), 0.0);
    EXPECT_NEAR(w(0.5), std::exp(-4.0), 1e-15);
    const double x = 0.2;
    EXPECT_NEAR(w(x), std::exp(-1.0 / (x * (1 - x))), 1e-15);
    EXPECT_THROW(w(1.5), DomainError);
}

TEST(Weights, NormalizationAndMirror)
{
    for (std::size_t n : {2u, 7u, 100u, 1001u}) {
        const auto wv = make_weight_vector(n, WeightFunction::bump());
        const auto nw = wv.normalized();
        long double s = 0;
        for (double v : nw)
            s += v;
        EXPECT_NEAR(static_cast<double>(s), 1.0, 1e-14);
        for (std::size_t i = 1; i < n; ++i)
            EXPECT_EQ(nw[i], nw[n - i]) << i;
    }
}

TEST(Weights, DegenerateAndCustom)
{
    EXPECT_THROW(make_weight_vector(8, WeightFunction::custom([](double) { return 0.0; })), DegenerateWeightError);
    EXPECT_THROW(make_weight_vector(1, WeightFunction::uniform()), SizeError);
    EXPECT_THROW(WeightFunction::custom({}), ConfigError);
    const auto neg = WeightFunction::custom([](double) { return -1.0; });
    EXPECT_THROW(make_weight_vector(10, neg), DomainError);
    const auto tri = make_weight_vector(5, WeightFunction::custom([](double x) { return x; }));
    EXPECT_DOUBLE_EQ(tri.alpha(), 0.0 + 0.2 + 0.4 + 0.6 + 0.8);
}

TEST(Averages, UniformIsArithmeticMean)
{
    std::vector<double> x(1000);
    std::iota(x.begin(), x.end(), 1.0);
    EXPECT_DOUBLE_EQ(birkhoff_average(x).value, 500.5);
}

TEST(Averages, RotationCosineVanishesFast)
{
    const double alpha = std::numbers::sqrt2;
    std::vector<double> x(20000);
    for (std::size_t n = 0; n < x.size(); ++n)
        x[n] = std::cos(2 * std::numbers::pi * (0.1 + alpha * static_cast<double>(n)));
    const auto wv = make_weight_vector(x.size(), WeightFunction::bump());
    EXPECT_LT(std::abs(birkhoff_average(x, wv).value), 1e-13);
    EXPECT_GT(std::abs(birkhoff_average(x).value), 1e-7);
}

TEST(Averages, ComplexSeries)
{
    std::vector<std::complex<double>> z(5000);
    for (std::size_t n = 0; n < z.size(); ++n)
        z[n] = std::polar(1.0, 2.0 * static_cast<double>(n));
    const auto r = birkhoff_average(std::span<const std::complex<double>>(z), WeightFunction::bump());
    EXPECT_TRUE(r.weighted);
    EXPECT_LT(std::abs(r.value), 1e-12);
}

TEST(Averages, NonFiniteRejected)
{
    std::vector<double> x{1.0, NAN, 2.0};
    EXPECT_THROW(birkhoff_average(x), NumericalError);
}

TEST(Averages, SweepSortedAndZeroAtBenchmark)
{
    const auto t = driven_logistic(0.0, 0.25, 0.0, 20000);
    std::vector<double> x(t.length());
    for (std::size_t i = 0; i < x.size(); ++i)
        x[i] = t.states(0, static_cast<Eigen::Index>(i));
    const auto rows = convergence_sweep(std::span<const double>(x), {20000, 1000, 100}, 20000, WeightFunction::bump());
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0].n, 100u);
    EXPECT_EQ(rows[2].err_weighted, 0.0);
    EXPECT_THROW(convergence_sweep(std::span<const double>(x), {30000}, 20000, WeightFunction::bump()), SizeError);
}

TEST(Summation, CascadeMatchesLongDouble)
{
    CascadeSum<double> acc(0.0, 64);
    long double ref = 0;
    for (int i = 1; i <= 1000000; ++i) {
        const double v = 1.0 / i;
        acc.add(v);
        ref += v;
    }
    EXPECT_NEAR(acc.total(), static_cast<double>(ref), 1e-13);
}
