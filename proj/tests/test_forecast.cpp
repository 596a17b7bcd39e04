#include <birkhoff/birkhoff.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace birkhoff;

namespace {

std::vector<double> ou_series(std::size_t n, std::uint64_t seed)
{
    const auto t = ou_sample(1.0, std::numbers::sqrt2, 0.0, 0.1, n + 500, 10, RngStream(seed));
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = t.states(0, static_cast<Eigen::Index>(500 + i));
    return x;
}

} // namespace

TEST(Forecast, DelayEmbedLayout)
{
    const std::vector<double> s{1, 2, 3, 4, 5};
    const auto e = delay_embed(s, 3);
    ASSERT_EQ(e.points.rows(), 3);
    EXPECT_EQ(e.points(0, 0), 1);
    EXPECT_EQ(e.points(0, 2), 3);
    EXPECT_EQ(e.points(2, 2), 5);
    EXPECT_EQ(e.offset, 2u);
    EXPECT_THROW(delay_embed(s, 6), SizeError);
    EXPECT_THROW(delay_embed(s, 0), ConfigError);
}

TEST(Forecast, BasisOrthonormalWithConstantLead)
{
    const auto x = ou_series(3000, 1);
    const auto e = delay_embed(x, 1);
    const auto b = diffusion_basis(e.points, 8, BasisOptions{}, RngStream(0));
    EXPECT_LT(orthonormality_residual(b), 1e-10);
    EXPECT_NEAR(b.phi().col(0).minCoeff(), 1.0, 1e-8);
    EXPECT_NEAR(b.phi().col(0).maxCoeff(), 1.0, 1e-8);
    EXPECT_EQ(b.landmarks(), 1000);
}

TEST(Forecast, NystromReproducesTrainingRows)
{
    const auto x = ou_series(600, 2);
    const auto e = delay_embed(x, 2);
    const auto b = diffusion_basis(e.points, 5, BasisOptions{}, RngStream(0));
    for (Eigen::Index i : {0, 100, 599 - 1}) {
        const Eigen::VectorXd p = e.points.row(i).transpose();
        const auto ext = b.extend(p);
        EXPECT_FALSE(ext.extrapolated);
        EXPECT_LT((ext.phi - b.phi().row(i)).norm(), 1e-8);
    }
}

TEST(Forecast, FarPointFallsBackToClimatology)
{
    const auto x = ou_series(800, 3);
    const auto e = delay_embed(x, 1);
    const auto b = diffusion_basis(e.points, 6, BasisOptions{}, RngStream(0));
    const auto a = shift_matrix(b, WeightFunction::uniform());
    const Eigen::VectorXd g = observable_coefficients(b, e.points.col(0));
    const auto f = forecast(b, a, Eigen::VectorXd::Constant(1, 100.0), 3, g);
    EXPECT_TRUE(f.extrapolated);
    for (double v : f.values)
        EXPECT_DOUBLE_EQ(v, g(0));
}

TEST(Forecast, OuConditionalMeanAtShortLeads)
{
    const auto x = ou_series(20000, 4);
    const auto e = delay_embed(x, 1);
    const auto b = diffusion_basis(e.points, 10, BasisOptions{}, RngStream(0));
    const auto a = shift_matrix(b, WeightFunction::uniform());
    const Eigen::VectorXd g = observable_coefficients(b, e.points.col(0));
    const double mu = e.points.col(0).mean();
    for (double x0 : {-1.0, 1.0}) {
        const auto f = forecast(b, a, Eigen::VectorXd::Constant(1, x0), 5, g);
        for (int k = 1; k <= 5; ++k) {
            const double truth = mu + (x0 - mu) * std::exp(-0.1 * k);
            EXPECT_NEAR(f.values[k], truth, 0.1 * std::abs(truth)) << x0 << " " << k;
        }
    }
}

TEST(Forecast, ShiftMatrixWeightLength)
{
    const auto x = ou_series(300, 5);
    const auto e = delay_embed(x, 1);
    const auto b = diffusion_basis(e.points, 4, BasisOptions{}, RngStream(0));
    EXPECT_THROW(shift_matrix(b, make_weight_vector(300, WeightFunction::bump())), ShapeError);
    EXPECT_NO_THROW(shift_matrix(b, make_weight_vector(299, WeightFunction::bump())));
}

TEST(Forecast, SkillMetrics)
{
    const std::vector<double> v{1, 2, 3, 4};
    EXPECT_NEAR(climatology(v), std::sqrt(1.25), 1e-15);
    const std::vector<double> w{2, 4, 6, 8}, c{1, 1, 1, 1};
    EXPECT_NEAR(*pearson(v, w), 1.0, 1e-15);
    EXPECT_FALSE(pearson(v, c).has_value());
    const auto s = skill({{1, 2, 3, 4}}, {{1, 2, 3, 6}}, 1.0);
    ASSERT_EQ(s.rows.size(), 1u);
    EXPECT_NEAR(*s.rows[0].rmse, 1.0, 1e-15);
    EXPECT_EQ(s.rows[0].count, 4u);
}

TEST(Forecast, NinoPipelineOnSyntheticSeries)
{
    MonthlySeries s;
    s.start = {1900, 1};
    RngStream rng(8);
    double x = 0;
    for (int i = 0; i < 12 * 120; ++i) {
        x = 0.9 * x + 0.3 * rng.normal();
        s.values.push_back(x + std::sin(2 * std::numbers::pi * i / 50.0));
    }
    NinoOptions o;
    o.basis.max_kernel_points = 400;
    const auto r = nino34_pipeline(s, o, WeightFunction::bump());
    EXPECT_EQ(r.unweighted.rows.size(), 24u);
    EXPECT_FALSE(r.report_dates.empty());
    EXPECT_EQ(r.report_dates.size(), r.report_w.size());
    EXPECT_FALSE(r.large_m_warning);
    ASSERT_TRUE(r.unweighted.rows[0].rmse.has_value());
    EXPECT_LT(*r.unweighted.rows[0].rmse, r.unweighted.climatology);
}
