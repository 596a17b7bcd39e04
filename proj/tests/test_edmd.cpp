#include <birkhoff/birkhoff.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace birkhoff;

TEST(Dictionary, FourierOrderingAndSize)
{
    const auto d = Dictionary::fourier({1, 1});
    EXPECT_EQ(d.size(), 9);
    EXPECT_EQ(d.exponents().front(), (std::vector<int>{-1, -1}));
    EXPECT_EQ(d.exponents()[4], (std::vector<int>{0, 0}));
    const Eigen::Vector2d x(0.3, 1.1);
    const auto row = d.evaluate(x);
    EXPECT_NEAR(std::abs(row(8) - std::polar(1.0, 1.4)), 0.0, 1e-15);
    EXPECT_EQ(Dictionary::monomials(5).size(), 6);
    EXPECT_EQ(Dictionary::monomials(2, 2).size(), 6);
}

TEST(Edmd, RotationKoopmanIsDiagonal)
{
    const double alpha = 0.9;
    const auto t = circle_rotation(alpha, 0.2, 2001);
    const auto d = Dictionary::fourier({2});
    const auto k = edmd(build_dictionary_matrices(t, d, d), WeightFunction::bump());
    for (int j = 0; j < 5; ++j) {
        const int m = j - 2;
        EXPECT_NEAR(std::abs(k.k(j, j) - std::polar(1.0, m * alpha)), 0.0, 1e-10);
    }
    EXPECT_NEAR((k.k - ComplexMatrix(k.k.diagonal().asDiagonal())).norm(), 0.0, 1e-10);
}

// Chaotic data keeps the Gram matrix well conditioned, so the two routes
// must agree to rounding.
TEST(Edmd, StreamingRouteMatchesDirect)
{
    const auto t = standard_map(LambdaMode::fixed(5.0), 1.0, 2.0, 3001, RngStream(0));
    const auto d = Dictionary::fourier({1, 1});
    const auto mats = build_dictionary_matrices(t, d, d, 3000);
    for (auto w : {WeightFunction::uniform(), WeightFunction::bump()}) {
        const auto direct = edmd(mats, w);
        const auto streamed = edmd_streaming(t, d, d, 3000, w);
        EXPECT_LT((direct.k - streamed.k).norm() / direct.k.norm(), 1e-10);
        const auto mom = moments(mats, make_weight_vector(3000, w));
        EXPECT_LT((edmd_from_moments(mom).k - direct.k).norm() / direct.k.norm(), 1e-10);
    }
}

TEST(Edmd, AccumulateMomentsSharesPassAcrossWeights)
{
    const auto t = standard_map(LambdaMode::fixed(0.25), 1.0, 2.0, 1001, RngStream(0));
    const auto d = Dictionary::fourier({1, 1});
    std::vector<WeightVector> ws{make_weight_vector(1000, WeightFunction::uniform()),
                                 make_weight_vector(1000, WeightFunction::bump())};
    const auto ms = accumulate_moments(t, d, d, 1000, ws, false);
    ASSERT_EQ(ms.size(), 2u);
    const auto mats = build_dictionary_matrices(t, d, d, 1000);
    EXPECT_LT((ms[1].gram - moments(mats, ws[1]).gram).norm(), 1e-12);
    EXPECT_LT((ms[0].gram - ms[0].gram.adjoint()).norm(), 1e-15);
}

TEST(Mpedmd, RotationEigenvaluesOnCircle)
{
    const double alpha = std::fmod(std::numbers::sqrt2 * 2 * std::numbers::pi, 2 * std::numbers::pi);
    const auto t = circle_rotation(alpha, 0.3, 5001);
    const auto d = Dictionary::fourier({1});
    const auto r = mpedmd(build_dictionary_matrices(t, d, d), WeightFunction::bump());
    for (Eigen::Index i = 0; i < r.eigenvalues.size(); ++i)
        EXPECT_NEAR(std::abs(r.eigenvalues(i)), 1.0, 1e-12);
    EXPECT_LT(unitarity_residual(r.k, r.gram), 1e-9);
    std::vector<double> args;
    for (Eigen::Index i = 0; i < 3; ++i)
        args.push_back(std::arg(r.eigenvalues(i)));
    std::sort(args.begin(), args.end());
    const double a = std::remainder(alpha, 2 * std::numbers::pi);
    EXPECT_NEAR(args[0], -std::abs(a), 1e-6);
    EXPECT_NEAR(args[1], 0.0, 1e-6);
    EXPECT_NEAR(args[2], std::abs(a), 1e-6);
}

TEST(Mpedmd, ChaoticDataStillUnitary)
{
    const auto t = standard_map(LambdaMode::fixed(5.0), 1.0, 2.0, 4001, RngStream(2));
    const auto d = Dictionary::fourier({1, 1});
    for (auto cross : {MpedmdCross::PsiPhi, MpedmdCross::PhiPhi}) {
        const auto r = mpedmd(build_dictionary_matrices(t, d, d), WeightFunction::bump(), default_rel_tol, cross);
        EXPECT_LT(unitarity_residual(r.k, r.gram), 1e-9);
    }
}

TEST(Edmd, DimensionMismatch)
{
    const auto t = circle_rotation(0.5, 0.0, 10);
    EXPECT_THROW(build_dictionary_matrices(t, Dictionary::fourier({1, 1}), Dictionary::fourier({1, 1})), ShapeError);
}
