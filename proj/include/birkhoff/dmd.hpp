#pragma once

/** @file
 * Dynamic mode decomposition with optional temporal tapering.
 *
 * With snapshot matrices X = [X_1 .. X_N], Y = [X_2 .. X_{N+1}] and
 * W = diag(w(0), w(1/N), ..., w((N-1)/N)), the weighted DMD matrix is
 * A_w = (Y W^{1/2}) (X W^{1/2})^+. Uniform weights give A = Y X^+.
 */

#include <birkhoff/averages.hpp>
#include <birkhoff/linalg.hpp>
#include <birkhoff/systems.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace birkhoff {

struct SnapshotPair {
    RealMatrix x; ///< d x N, columns X_1 .. X_N
    RealMatrix y; ///< d x N, columns X_2 .. X_{N+1}

    Eigen::Index samples() const noexcept { return x.cols(); }

    /// Consecutive pairs from the first `n + 1` states of a trajectory
    /// (all of it when `n` is 0).
    static SnapshotPair from_trajectory(const Trajectory& t, std::size_t n = 0)
    {
        const auto total = static_cast<Eigen::Index>(t.length());
        const Eigen::Index pairs = n == 0 ? total - 1 : static_cast<Eigen::Index>(n);
        if (pairs < 1 || pairs + 1 > total)
            throw SizeError("snapshot pair: need N + 1 <= trajectory length with N >= 1");
        return {t.states.leftCols(pairs), t.states.middleCols(1, pairs)};
    }
};

struct DmdResult {
    RealMatrix a;
    ComplexVector eigenvalues;
    ComplexMatrix modes;
    bool weighted = false;
    Eigen::Index n_used = 0;
};

/// Argument order of the weighted pseudoinverse product.
enum class DmdFormula {
    FitNext,      ///< A_w = Y_w X_w^+, the least-squares fit of Y from X (default)
    SwappedRoles, ///< A_w = X_w Y_w^+, kept for comparison with the listing form
};

struct DmdOptions {
    double rel_tol = default_rel_tol;
    DmdFormula formula = DmdFormula::FitNext;
};

inline DmdResult dmd(const SnapshotPair& pair, const WeightVector& weights, const DmdOptions& opt = {})
{
    if (pair.x.rows() != pair.y.rows() || pair.x.cols() != pair.y.cols())
        throw ShapeError("dmd: X and Y must have equal shapes");
    if (pair.samples() < 2)
        throw SizeError("dmd: need at least 2 snapshot pairs");
    if (static_cast<Eigen::Index>(weights.size()) != pair.samples())
        throw ShapeError("dmd: weight length " + std::to_string(weights.size()) + " != N = " +
                         std::to_string(pair.samples()));
    const DiagonalWeight w(weights);
    const RealMatrix xw = weighted_pair(pair.x, w, DataAxis::Columns);
    const RealMatrix yw = weighted_pair(pair.y, w, DataAxis::Columns);
    DmdResult out;
    out.a = opt.formula == DmdFormula::FitNext ? pinv_lstsq_left(xw, yw, opt.rel_tol).solution
                                               : pinv_lstsq_left(yw, xw, opt.rel_tol).solution;
    auto ed = eig(out.a);
    out.eigenvalues = std::move(ed.values);
    out.modes = std::move(ed.vectors);
    out.weighted = !weights.is_uniform();
    out.n_used = pair.samples();
    return out;
}

inline DmdResult dmd(const SnapshotPair& pair, const WeightFunction& w, const DmdOptions& opt = {})
{
    return dmd(pair, make_weight_vector(static_cast<std::size_t>(pair.samples()), w), opt);
}

/// Classical DMD, A = Y X^+.
inline DmdResult dmd(const SnapshotPair& pair, const DmdOptions& opt = {})
{
    return dmd(pair, WeightFunction::uniform(), opt);
}

struct ProjectionBasis {
    RealMatrix u; ///< D x r, orthonormal columns
    std::uint64_t seed = 0;
};

/// Orthonormal D x r basis from the QR factorization of a seeded Gaussian
/// matrix; column signs are fixed so that diag(R) > 0.
inline ProjectionBasis random_projection(Eigen::Index full_dim, Eigen::Index rank, std::uint64_t seed)
{
    if (rank < 1 || full_dim < 1)
        throw ShapeError("random_projection: dimensions must be positive");
    if (rank > full_dim)
        throw ShapeError("random_projection: rank r = " + std::to_string(rank) + " exceeds D = " + std::to_string(full_dim));
    RngStream rng = RngStream(seed).derive("random_projection");
    RealMatrix g(full_dim, rank);
    for (Eigen::Index j = 0; j < rank; ++j)
        for (Eigen::Index i = 0; i < full_dim; ++i)
            g(i, j) = rng.normal();
    Eigen::HouseholderQR<RealMatrix> qr(g);
    RealMatrix q = qr.householderQ() * RealMatrix::Identity(full_dim, rank);
    const RealMatrix r = qr.matrixQR().topRows(rank).template triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < rank; ++j)
        if (r(j, j) < 0.0)
            q.col(j) *= -1.0;
    return {std::move(q), seed};
}

/// Snapshots mapped to U^T X_n.
inline Trajectory project(const Trajectory& t, const ProjectionBasis& basis)
{
    if (basis.u.rows() != t.dim())
        throw ShapeError("project: basis has " + std::to_string(basis.u.rows()) + " rows, state dimension is " +
                         std::to_string(t.dim()));
    Trajectory out = t;
    out.states = basis.u.transpose() * t.states;
    out.params += " projected_rank=" + std::to_string(basis.u.cols());
    return out;
}

/**
 * Normalized l2 distance between two spectra after greedy nearest pairing:
 * the globally closest unpaired (estimate, reference) pair is matched first.
 * The value does not depend on the order in which eigenvalues are listed.
 */
inline double eigenvalue_distance(const ComplexVector& estimate, const ComplexVector& reference)
{
    if (estimate.size() != reference.size())
        throw ShapeError("eigenvalue_distance: spectra differ in size");
    const Eigen::Index n = reference.size();
    if (n == 0)
        return 0.0;
    std::vector<char> used_e(static_cast<std::size_t>(n), 0), used_r(static_cast<std::size_t>(n), 0);
    double sq = 0.0;
    for (Eigen::Index step = 0; step < n; ++step) {
        double best = std::numeric_limits<double>::infinity();
        Eigen::Index bi = -1, bj = -1;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (used_e[static_cast<std::size_t>(i)])
                continue;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (used_r[static_cast<std::size_t>(j)])
                    continue;
                const double d = std::abs(estimate(i) - reference(j));
                if (d < best) {
                    best = d;
                    bi = i;
                    bj = j;
                }
            }
        }
        used_e[static_cast<std::size_t>(bi)] = 1;
        used_r[static_cast<std::size_t>(bj)] = 1;
        sq += best * best;
    }
    const double nr = reference.norm();
    return nr > 0.0 ? std::sqrt(sq) / nr : std::sqrt(sq);
}

struct DmdSweepRow {
    std::size_t n = 0;
    double relerr_matrix_unw = 0.0;
    double relerr_matrix_w = 0.0;
    double relerr_eigs_unw = 0.0;
    double relerr_eigs_w = 0.0;
};

/// Errors of DMD and weighted DMD on the first N pairs against weighted DMD
/// on the first `benchmark_n` pairs.
inline std::vector<DmdSweepRow> dmd_error_sweep(const Trajectory& t, std::vector<std::size_t> n_values,
                                                std::size_t benchmark_n, const WeightFunction& w,
                                                const DmdOptions& opt = {})
{
    std::sort(n_values.begin(), n_values.end());
    n_values.erase(std::unique(n_values.begin(), n_values.end()), n_values.end());
    if (!n_values.empty() && n_values.back() > benchmark_n)
        throw SizeError("dmd_error_sweep: benchmark N must be >= every swept N");
    const auto bench = dmd(SnapshotPair::from_trajectory(t, benchmark_n), w, opt);
    std::vector<DmdSweepRow> rows;
    rows.reserve(n_values.size());
    for (std::size_t n : n_values) {
        const auto pair = SnapshotPair::from_trajectory(t, n);
        const auto unw = dmd(pair, opt);
        const auto wtd = dmd(pair, w, opt);
        rows.push_back({n, relative_frobenius(unw.a, bench.a), relative_frobenius(wtd.a, bench.a),
                        eigenvalue_distance(unw.eigenvalues, bench.eigenvalues),
                        eigenvalue_distance(wtd.eigenvalues, bench.eigenvalues)});
    }
    return rows;
}

} // namespace birkhoff
