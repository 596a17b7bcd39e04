#include <birkhoff/birkhoff.hpp>

#include <gtest/gtest.h>

using namespace birkhoff;

namespace {

struct Problem {
    RealMatrix psi;
    TargetData<double> data;
};

Problem harmonic(std::size_t n, double sigma, std::uint64_t seed)
{
    const auto h = harmonic_series(2.0, 0.0, 0.01, n, sigma, RngStream(seed));
    return {monomial_matrix(h.interior, 5), {h.second_derivative.transpose(), TargetMode::Continuous}};
}

} // namespace

TEST(Sindy, NoiselessRecovery)
{
    const auto p = harmonic(10000, 0.0, 0);
    StlsqOptions o;
    o.eta = 1e-2;
    const auto m = stlsq(p.psi, p.data, WeightFunction::bump(), o);
    EXPECT_LT((m.xi - harmonic_exact_coefficients(5)).norm(), 1e-3);
    EXPECT_TRUE(m.converged);
    EXPECT_EQ(m.rows[0].active, 1);
    EXPECT_TRUE(m.active_mask(0, 1));
}

TEST(Sindy, ExactSparseDiscreteModel)
{
    const Eigen::Index n = 200;
    Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(n, -1.0, 1.0);
    const RealMatrix psi = monomial_matrix(x, 3);
    RealMatrix y(2, n);
    y.row(0) = (0.5 * x.array() - 2.0 * x.array().cube()).matrix().transpose();
    y.row(1) = Eigen::RowVectorXd::Constant(n, 3.0);
    StlsqOptions o;
    o.eta = 0.1;
    const auto m = stlsq(psi, TargetData<double>{y, TargetMode::Discrete}, WeightFunction::uniform(), o);
    EXPECT_NEAR(m.xi(0, 1), 0.5, 1e-12);
    EXPECT_NEAR(m.xi(0, 3), -2.0, 1e-12);
    EXPECT_EQ(m.xi(0, 0), 0.0);
    EXPECT_NEAR(m.xi(1, 0), 3.0, 1e-12);
    EXPECT_EQ(m.rows[1].active, 1);
}

TEST(Sindy, AllPrunedReportsEmptyModel)
{
    const auto p = harmonic(500, 0.0, 0);
    StlsqOptions o;
    o.eta = 1e6;
    const auto m = stlsq(p.psi, p.data, WeightFunction::bump(), o);
    EXPECT_TRUE(m.rows[0].all_pruned);
    EXPECT_EQ(m.xi.norm(), 0.0);
}

TEST(Sindy, FixedPointUnderRestart)
{
    const auto p = harmonic(3000, 1e-7, 4);
    StlsqOptions o;
    o.eta = 1e-2;
    const auto m = stlsq(p.psi, p.data, WeightFunction::bump(), o);
    StlsqOptions again = o;
    again.initial_mask = m.active_mask;
    const auto m2 = stlsq(p.psi, p.data, WeightFunction::bump(), again);
    EXPECT_EQ(m.active_mask, m2.active_mask);
    EXPECT_LT((m.xi - m2.xi).norm(), 1e-12 * std::max(1.0, m.xi.norm()));
    EXPECT_LE(m2.iterations, 1);
}

TEST(Sindy, ShapeChecks)
{
    const auto p = harmonic(100, 0.0, 0);
    TargetData<double> bad{RealMatrix::Zero(1, 50), TargetMode::Continuous};
    EXPECT_THROW(stlsq(p.psi, bad, WeightFunction::bump()), ShapeError);
    StlsqOptions o;
    o.eta = -1;
    EXPECT_THROW(stlsq(p.psi, p.data, WeightFunction::bump(), o), ConfigError);
}

TEST(Sindy, SweepEmitsAllMethods)
{
    HarmonicParams hp;
    const auto rows = sindy_error_sweep(hp, {1000, 2000}, {1e-2}, 5, WeightFunction::bump());
    EXPECT_EQ(rows.size(), 8u);
    for (const auto& r : rows)
        EXPECT_TRUE(std::isfinite(r.coeff_error));
}
