#include <birkhoff/birkhoff.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace birkhoff;

TEST(Linalg, PinvMatchesCompleteOrthogonalDecomposition)
{
    std::mt19937_64 g(7);
    std::normal_distribution<double> nd;
    for (int trial = 0; trial < 100; ++trial) {
        const int m = 1 + trial % 6, n = 1 + (trial / 6) % 6, r = 1 + trial % std::min(m, n);
        Eigen::MatrixXd l(m, r), rr(r, n), b(m, 2);
        for (auto* mat : {&l, &rr, &b})
            for (Eigen::Index i = 0; i < mat->size(); ++i)
                mat->data()[i] = nd(g);
        const Eigen::MatrixXd a = l * rr;
        const Eigen::MatrixXd ref = a.completeOrthogonalDecomposition().pseudoInverse() * b;
        const auto mine = pinv_lstsq_right(a, b, 1e-10);
        EXPECT_LT((mine.solution - ref).norm(), 1e-8 * std::max(1.0, ref.norm()));
        EXPECT_EQ(mine.effective_rank, r);
    }
}

TEST(Linalg, LeftSolveIsTransposeOfRight)
{
    Eigen::MatrixXd a = Eigen::MatrixXd::Random(5, 3), b = Eigen::MatrixXd::Random(4, 3);
    const auto left = pinv_lstsq_left(a, b, 1e-12).solution;
    const Eigen::MatrixXd ref = b * a.completeOrthogonalDecomposition().pseudoInverse();
    EXPECT_LT((left - ref).norm(), 1e-12);
}

TEST(Linalg, EigenOrdering)
{
    Eigen::Matrix3d a = Eigen::Vector3d(0.5, -2.0, 1.0).asDiagonal();
    const auto e = eig(a);
    EXPECT_NEAR(e.values(0).real(), -2.0, 1e-14);
    EXPECT_NEAR(e.values(1).real(), 1.0, 1e-14);
    EXPECT_NEAR(e.values(2).real(), 0.5, 1e-14);
    for (Eigen::Index j = 0; j < 3; ++j)
        EXPECT_NEAR(e.vectors.col(j).norm(), 1.0, 1e-14);
    EXPECT_THROW(eig(Eigen::MatrixXd::Zero(2, 3)), ShapeError);
}

TEST(Linalg, SymmetricSquareRootInverse)
{
    Eigen::MatrixXd m = Eigen::MatrixXd::Random(4, 4);
    const Eigen::MatrixXd g = m * m.transpose() + Eigen::MatrixXd::Identity(4, 4);
    const auto s = sym_sqrt_inv(g);
    EXPECT_LT((s.sqrt * s.sqrt - g).norm(), 1e-12);
    EXPECT_LT((s.inv_sqrt * g * s.inv_sqrt - Eigen::MatrixXd::Identity(4, 4)).norm(), 1e-12);
}

TEST(Linalg, RelativeFrobenius)
{
    Eigen::Matrix2d a = Eigen::Matrix2d::Identity(), b = 2 * Eigen::Matrix2d::Identity();
    EXPECT_DOUBLE_EQ(relative_frobenius(a, b), 0.5);
}
