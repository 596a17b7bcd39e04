#pragma once

/** @file
 * Dense kernels shared by the fitting modules: weighted data scaling,
 * truncated-SVD least squares, sorted eigendecomposition, and Hermitian
 * square roots. Matrices are Eigen column-major.
 */

#include <birkhoff/averages.hpp>
#include <birkhoff/errors.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <string>
#include <vector>

namespace birkhoff {

using RealMatrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr double default_rel_tol = 1e-12;

/// Nonnegative diagonal weight W; only sqrt(W) is ever applied to data.
class DiagonalWeight {
public:
    explicit DiagonalWeight(Eigen::VectorXd diag) : diag_(std::move(diag))
    {
        if ((diag_.array() < 0.0).any() || !diag_.allFinite())
            throw DomainError("diagonal weight entries must be finite and nonnegative");
        if (!(diag_.array() > 0.0).any())
            throw DegenerateWeightError("diagonal weight has no positive entry");
    }

    explicit DiagonalWeight(const WeightVector& w)
        : DiagonalWeight(Eigen::Map<const Eigen::VectorXd>(w.normalized().data(),
                                                           static_cast<Eigen::Index>(w.size())))
    {
    }

    Eigen::Index size() const noexcept { return diag_.size(); }
    const Eigen::VectorXd& diag() const noexcept { return diag_; }
    Eigen::VectorXd sqrt() const { return diag_.array().sqrt(); }

private:
    Eigen::VectorXd diag_;
};

/// Which matrix axis indexes samples.
enum class DataAxis { Columns, Rows };

/// Scales every sample of M by sqrt(W): M W^{1/2} (columns) or W^{1/2} M (rows).
template <class Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
weighted_pair(const Eigen::MatrixBase<Derived>& m, const DiagonalWeight& w, DataAxis axis)
{
    const Eigen::Index samples = axis == DataAxis::Columns ? m.cols() : m.rows();
    if (samples != w.size())
        throw ShapeError("weighted_pair: " + std::to_string(samples) + " samples but " +
                         std::to_string(w.size()) + " weights");
    const Eigen::VectorXd s = w.sqrt();
    if (axis == DataAxis::Columns)
        return m * s.asDiagonal();
    return s.asDiagonal() * m;
}

template <class Scalar>
struct LstsqSolution {
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> solution;
    Eigen::Index effective_rank = 0;
    Eigen::VectorXd singular_values; ///< retained values, descending
};

namespace detail {

template <class Scalar>
struct TruncatedSvd {
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    Matrix u;
    Eigen::VectorXd s;
    Matrix v;
};

template <class Derived>
TruncatedSvd<typename Derived::Scalar> truncated_svd(const Eigen::MatrixBase<Derived>& a, double rel_tol)
{
    using Scalar = typename Derived::Scalar;
    if (!(rel_tol > 0.0 && rel_tol < 1.0))
        throw ConfigError("pseudoinverse tolerance must lie in (0,1)");
    if (!a.allFinite())
        throw NumericalError("least squares: non-finite input");
    TruncatedSvd<Scalar> out;
    if (a.size() == 0)
        return out;
    Eigen::BDCSVD<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success)
        throw NumericalError("SVD failed to converge");
    const Eigen::VectorXd& s = svd.singularValues();
    Eigen::Index rank = 0;
    if (s.size() > 0 && s(0) > 0.0) {
        const double cut = rel_tol * s(0);
        while (rank < s.size() && s(rank) >= cut)
            ++rank;
    }
    out.u = svd.matrixU().leftCols(rank);
    out.s = s.head(rank);
    out.v = svd.matrixV().leftCols(rank);
    return out;
}

} // namespace detail

/// Minimal-norm K minimizing ||B - A K||_F, i.e. K = A^+ B (EDMD convention).
template <class DA, class DB>
LstsqSolution<typename DA::Scalar> pinv_lstsq_right(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b,
                                                    double rel_tol = default_rel_tol)
{
    using Scalar = typename DA::Scalar;
    if (a.rows() != b.rows())
        throw ShapeError("pinv_lstsq_right: A has " + std::to_string(a.rows()) + " rows, B has " +
                         std::to_string(b.rows()));
    auto svd = detail::truncated_svd(a, rel_tol);
    LstsqSolution<Scalar> out;
    out.effective_rank = svd.s.size();
    out.singular_values = svd.s;
    if (out.effective_rank == 0) {
        out.solution.setZero(a.cols(), b.cols());
        return out;
    }
    const Eigen::VectorXd inv = svd.s.cwiseInverse();
    out.solution = svd.v * (inv.asDiagonal() * (svd.u.adjoint() * b.template cast<Scalar>()));
    return out;
}

/// Minimal-norm K minimizing ||B - K A||_F, i.e. K = B A^+ (DMD convention).
template <class DA, class DB>
LstsqSolution<typename DA::Scalar> pinv_lstsq_left(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b,
                                                   double rel_tol = default_rel_tol)
{
    using Scalar = typename DA::Scalar;
    if (a.cols() != b.cols())
        throw ShapeError("pinv_lstsq_left: A has " + std::to_string(a.cols()) + " columns, B has " +
                         std::to_string(b.cols()));
    auto svd = detail::truncated_svd(a, rel_tol);
    LstsqSolution<Scalar> out;
    out.effective_rank = svd.s.size();
    out.singular_values = svd.s;
    if (out.effective_rank == 0) {
        out.solution.setZero(b.rows(), a.rows());
        return out;
    }
    const Eigen::VectorXd inv = svd.s.cwiseInverse();
    out.solution = ((b.template cast<Scalar>() * svd.v) * inv.asDiagonal()) * svd.u.adjoint();
    return out;
}

struct EigenDecomposition {
    ComplexVector values;
    ComplexMatrix vectors; ///< unit 2-norm columns, matching `values`
};

/**
 * Permutation that orders eigenvalues by descending modulus; values whose
 * moduli agree to a relative 1e-12 are ordered by descending real part,
 * then descending imaginary part.
 */
inline std::vector<Eigen::Index> eigen_order(const ComplexVector& values)
{
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(values.size()));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
        return std::abs(values(a)) > std::abs(values(b));
    });
    const double scale = values.size() ? std::max(1.0, values.cwiseAbs().maxCoeff()) : 1.0;
    const double tol = 1e-12 * scale;
    auto tie_less = [&](Eigen::Index a, Eigen::Index b) {
        if (values(a).real() != values(b).real())
            return values(a).real() > values(b).real();
        return values(a).imag() > values(b).imag();
    };
    std::size_t start = 0;
    while (start < idx.size()) {
        std::size_t end = start + 1;
        while (end < idx.size() && std::abs(values(idx[end - 1])) - std::abs(values(idx[end])) <= tol)
            ++end;
        std::stable_sort(idx.begin() + static_cast<std::ptrdiff_t>(start), idx.begin() + static_cast<std::ptrdiff_t>(end),
                         tie_less);
        start = end;
    }
    return idx;
}

inline EigenDecomposition sorted_eigen(const ComplexVector& values, const ComplexMatrix& vectors)
{
    const auto order = eigen_order(values);
    EigenDecomposition out;
    out.values.resize(values.size());
    out.vectors.resize(vectors.rows(), vectors.cols());
    for (std::size_t k = 0; k < order.size(); ++k) {
        const auto j = static_cast<Eigen::Index>(k);
        out.values(j) = values(order[k]);
        const double nrm = vectors.col(order[k]).norm();
        out.vectors.col(j) = nrm > 0.0 ? ComplexVector(vectors.col(order[k]) / nrm) : ComplexVector(vectors.col(order[k]));
    }
    return out;
}

/// Eigendecomposition A V = V Lambda with the ordering of `eigen_order`.
template <class Derived>
EigenDecomposition eig(const Eigen::MatrixBase<Derived>& a)
{
    if (a.rows() != a.cols())
        throw ShapeError("eig: matrix must be square");
    if (!a.allFinite())
        throw NumericalError("eig: non-finite entries");
    const ComplexMatrix ac = a.template cast<std::complex<double>>();
    Eigen::ComplexEigenSolver<ComplexMatrix> solver(ac, true);
    if (solver.info() != Eigen::Success) {
        Eigen::JacobiSVD<ComplexMatrix> svd(ac);
        const auto& s = svd.singularValues();
        const double cond = s.size() && s(s.size() - 1) > 0.0 ? s(0) / s(s.size() - 1) : INFINITY;
        throw NumericalError("eig: QR iteration did not converge (condition number " + std::to_string(cond) + ")");
    }
    return sorted_eigen(solver.eigenvalues(), solver.eigenvectors());
}

template <class Scalar>
struct SqrtPair {
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> sqrt;
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> inv_sqrt;
};

/// G^{1/2} and G^{-1/2} for Hermitian positive-definite G.
template <class Derived>
SqrtPair<typename Derived::Scalar> sym_sqrt_inv(const Eigen::MatrixBase<Derived>& g, double rel_tol = default_rel_tol)
{
    using Scalar = typename Derived::Scalar;
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    if (g.rows() != g.cols())
        throw ShapeError("sym_sqrt_inv: matrix must be square");
    const double nrm = g.norm();
    if (!(nrm > 0.0) || !std::isfinite(nrm))
        throw ConditioningError("sym_sqrt_inv: zero or non-finite matrix");
    if ((g - g.adjoint()).norm() > 1e-10 * nrm)
        throw ConditioningError("sym_sqrt_inv: matrix is not Hermitian");
    const Matrix herm = (g + g.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Matrix> es(herm);
    if (es.info() != Eigen::Success)
        throw NumericalError("sym_sqrt_inv: eigensolver failed");
    const Eigen::VectorXd& lam = es.eigenvalues();
    const double lmax = lam.maxCoeff();
    const double lmin = lam.minCoeff();
    if (!(lmax > 0.0) || !(lmin > rel_tol * lmax))
        throw ConditioningError("sym_sqrt_inv: eigenvalue ratio min/max = " + std::to_string(lmin / lmax) +
                                " is below tolerance " + std::to_string(rel_tol));
    const Eigen::VectorXd r = lam.array().sqrt();
    SqrtPair<Scalar> out;
    out.sqrt = es.eigenvectors() * r.asDiagonal() * es.eigenvectors().adjoint();
    out.inv_sqrt = es.eigenvectors() * r.cwiseInverse().asDiagonal() * es.eigenvectors().adjoint();
    return out;
}

/// ||a - b||_F / ||b||_F, or ||a||_F when b vanishes.
template <class DA, class DB>
double relative_frobenius(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b)
{
    const double nb = b.norm();
    const double diff = (a - b).norm();
    return nb > 0.0 ? diff / nb : diff;
}

} // namespace birkhoff
