#include <birkhoff/birkhoff.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace birkhoff;

namespace {

constexpr double pi = std::numbers::pi;

std::vector<Complex> rotation_series(double alpha, std::size_t n)
{
    std::vector<Complex> z(n);
    for (std::size_t i = 0; i < n; ++i)
        z[i] = std::polar(1.0, 0.4 + alpha * static_cast<double>(i));
    return z;
}

} // namespace

TEST(Specmeas, RotationAutocorrelationsExact)
{
    const double alpha = 1.3;
    const auto acs = autocorrelations(rotation_series(alpha, 20000), 40, WeightFunction::bump());
    for (int n = -40; n <= 40; ++n)
        EXPECT_NEAR(std::abs(acs.at(n) - std::polar(1.0 / (2 * pi), -n * alpha)), 0.0, 1e-10) << n;
}

TEST(Specmeas, HermitianSymmetry)
{
    RngStream rng(11);
    std::vector<Complex> z(3000);
    for (auto& v : z)
        v = {rng.normal(), rng.normal()};
    const auto acs = autocorrelations(z, 25, WeightFunction::bump());
    EXPECT_EQ(acs.at(0).imag(), 0.0);
    for (int n = 1; n <= 25; ++n)
        EXPECT_EQ(acs.at(-n), std::conj(acs.at(n)));
    EXPECT_THROW(acs.at(26), SizeError);
}

TEST(Specmeas, Filters)
{
    EXPECT_DOUBLE_EQ(cosine_filter(0.0), 1.0);
    EXPECT_NEAR(cosine_filter(1.0), 0.0, 1e-15);
    EXPECT_DOUBLE_EQ(smoothstep_filter(0.0), 1.0);
    EXPECT_NEAR(smoothstep_filter(1.0), 0.0, 1e-14);
    EXPECT_NEAR(smoothstep_filter(0.5), 0.5, 1e-14);
    EXPECT_NEAR(smoothstep_filter(-0.3), smoothstep_filter(0.3), 1e-15);
    EXPECT_THROW(cosine_filter(1.1), DomainError);
}

TEST(Specmeas, DensityPeakAndIntegral)
{
    const double alpha = 1.3;
    const auto acs = autocorrelations(rotation_series(alpha, 50000), 100, WeightFunction::bump());
    const SpectralDensity d(acs, FilterFunction::cosine());
    const std::size_t g = 4096;
    EXPECT_NEAR(d.integral(g), 2 * pi * acs.at(0).real(), 1e-10);
    const auto peaks = peak_report(d, g, 0.05);
    ASSERT_FALSE(peaks.empty());
    auto best = std::max_element(peaks.begin(), peaks.end(), [](auto& a, auto& b) { return a.height < b.height; });
    EXPECT_NEAR(best->theta, alpha, 2 * pi / g + 1e-12);
}

TEST(Specmeas, WhiteNoiseDensityIsFlat)
{
    RngStream rng(3);
    std::vector<Complex> z(200000);
    for (auto& v : z)
        v = {rng.normal(), 0.0};
    const auto acs = autocorrelations(z, 10, WeightFunction::uniform(), false);
    const SpectralDensity d(acs, FilterFunction::bump());
    for (double th : {-2.0, 0.0, 1.5})
        EXPECT_NEAR(d.eval(th), 1.0 / (2 * pi), 0.01);
}

TEST(Specmeas, SizeErrors)
{
    const auto z = rotation_series(1.0, 10);
    EXPECT_THROW(autocorrelations(z, 9, WeightFunction::bump()), SizeError);
    EXPECT_NO_THROW(autocorrelations(z, 8, WeightFunction::uniform()));
    EXPECT_THROW(autocorrelations(z, -1, WeightFunction::bump()), ConfigError);
}

TEST(Specmeas, ThetaGrid)
{
    const auto g = theta_grid(4);
    ASSERT_EQ(g.size(), 4u);
    EXPECT_DOUBLE_EQ(g[0], -pi);
    EXPECT_DOUBLE_EQ(g[2], 0.0);
}
