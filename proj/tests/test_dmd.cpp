#include <birkhoff/birkhoff.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace birkhoff;

namespace {

Eigen::Matrix3d generator()
{
    Eigen::Matrix3d core = Eigen::Matrix3d::Zero();
    core.topLeftCorner<2, 2>() << std::cos(0.7), -std::sin(0.7), std::sin(0.7), std::cos(0.7);
    core(2, 2) = 0.995;
    Eigen::Matrix3d s = Eigen::Matrix3d::Identity();
    s(0, 1) = 0.3;
    s(1, 2) = -0.3;
    s(2, 0) = 0.3;
    return s * core * s.inverse();
}

} // namespace

TEST(Dmd, RecoversLinearGenerator)
{
    const Eigen::Matrix3d a = generator();
    const auto t = linear_map(a, Eigen::Vector3d(1, -0.5, 0.25), 101);
    for (auto w : {WeightFunction::uniform(), WeightFunction::bump()}) {
        const auto r = dmd(SnapshotPair::from_trajectory(t, 100), w);
        EXPECT_LT(relative_frobenius(r.a, a), 1e-9);
        EXPECT_NEAR(std::abs(r.eigenvalues(0)), 1.0, 1e-9);
    }
}

TEST(Dmd, SwappedFormulaIsInverseOnInvertibleData)
{
    const Eigen::Matrix3d a = generator();
    const auto t = linear_map(a, Eigen::Vector3d(1, -0.5, 0.25), 31);
    DmdOptions o;
    o.formula = DmdFormula::SwappedRoles;
    const auto r = dmd(SnapshotPair::from_trajectory(t, 30), o);
    EXPECT_LT(relative_frobenius(r.a, Eigen::Matrix3d(a.inverse())), 1e-8);
}

TEST(Dmd, RandomProjectionOrthonormal)
{
    const auto p = random_projection(20, 11, 5);
    EXPECT_LT((p.u.transpose() * p.u - Eigen::MatrixXd::Identity(11, 11)).norm(), 1e-13);
    const auto q = random_projection(20, 11, 5);
    EXPECT_EQ(p.u, q.u);
    EXPECT_THROW(random_projection(5, 6, 0), ShapeError);
}

TEST(Dmd, EigenvalueDistanceIsPermutationInvariant)
{
    ComplexVector a(3), b(3);
    a << 1.0, std::complex<double>(0, 1), -1.0;
    b << -1.0, 1.0, std::complex<double>(0, 1);
    EXPECT_NEAR(eigenvalue_distance(a, b), 0.0, 1e-15);
}

TEST(Dmd, SweepWeightedBeatsUnweighted)
{
    FieldParams fp;
    const auto full = quasiperiodic_field(fp, 1001);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto t = project(full, random_projection(full.dim(), 11, seed));
        const auto rows = dmd_error_sweep(t, {100, 500}, 1000, WeightFunction::bump());
        ASSERT_EQ(rows.size(), 2u);
        EXPECT_LT(rows[1].relerr_matrix_w * 10, rows[1].relerr_matrix_unw) << seed;
        EXPECT_LT(rows[1].relerr_matrix_w, rows[0].relerr_matrix_w) << seed;
    }
}

TEST(Dmd, ShapeErrors)
{
    const auto t = linear_map(generator(), Eigen::Vector3d(1, 0, 0), 5);
    EXPECT_THROW(SnapshotPair::from_trajectory(t, 5), SizeError);
    const auto sp = SnapshotPair::from_trajectory(t, 4);
    EXPECT_THROW(dmd(sp, make_weight_vector(3, WeightFunction::uniform())), ShapeError);
}
