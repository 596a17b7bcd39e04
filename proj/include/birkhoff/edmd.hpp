#pragma once

/** @file
 * Extended DMD and measure-preserving EDMD with temporal tapering.
 *
 * Psi (N x L) holds psi(X_1..X_N) row-wise and Phi (N x R) holds
 * phi(X_2..X_{N+1}). Weighted EDMD is K_w = (W^{1/2} Psi)^+ (W^{1/2} Phi).
 * For long trajectories the same matrix follows from the weighted moments
 * G = Psi^* W Psi and A = Psi^* W Phi as K_w = G^+ A; `accumulate_moments`
 * streams those sums without materializing Psi.
 */

#include <birkhoff/averages.hpp>
#include <birkhoff/dictionary.hpp>
#include <birkhoff/linalg.hpp>
#include <birkhoff/summation.hpp>
#include <birkhoff/systems.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <span>
#include <string>
#include <vector>

namespace birkhoff {

struct DictionaryMatrices {
    ComplexMatrix psi; ///< N x L
    ComplexMatrix phi; ///< N x R
    std::string psi_id;
    std::string phi_id;

    Eigen::Index samples() const noexcept { return psi.rows(); }
};

/// Psi from X_1..X_N and Phi from X_2..X_{N+1}, with N = length - 1 (or the
/// given `n` pairs).
inline DictionaryMatrices build_dictionary_matrices(const Trajectory& t, const Dictionary& psi, const Dictionary& phi,
                                                    std::size_t n = 0)
{
    if (t.length() < 3)
        throw SizeError("build_dictionary_matrices: trajectory needs at least 3 states");
    if (psi.dimension() != t.dim() || phi.dimension() != t.dim())
        throw ShapeError("build_dictionary_matrices: dictionary dimension does not match state dimension " +
                         std::to_string(t.dim()));
    const auto pairs = n == 0 ? static_cast<Eigen::Index>(t.length()) - 1 : static_cast<Eigen::Index>(n);
    if (pairs + 1 > static_cast<Eigen::Index>(t.length()))
        throw SizeError("build_dictionary_matrices: N + 1 exceeds trajectory length");
    return {psi.matrix(t.states, 0, pairs), phi.matrix(t.states, 1, pairs), psi.id(), phi.id()};
}

struct KoopmanMatrix {
    ComplexMatrix k; ///< L x R
    bool weighted = false;
    Eigen::Index n_used = 0;
    std::string psi_id;
    std::string phi_id;
};

inline KoopmanMatrix edmd(const DictionaryMatrices& m, const WeightVector& weights, double rel_tol = default_rel_tol)
{
    if (m.psi.rows() != m.phi.rows())
        throw ShapeError("edmd: Psi and Phi row counts differ");
    if (static_cast<Eigen::Index>(weights.size()) != m.samples())
        throw ShapeError("edmd: weight length " + std::to_string(weights.size()) + " != N = " +
                         std::to_string(m.samples()));
    const DiagonalWeight w(weights);
    const ComplexMatrix pw = weighted_pair(m.psi, w, DataAxis::Rows);
    const ComplexMatrix fw = weighted_pair(m.phi, w, DataAxis::Rows);
    return {pinv_lstsq_right(pw, fw, rel_tol).solution, !weights.is_uniform(), m.samples(), m.psi_id, m.phi_id};
}

inline KoopmanMatrix edmd(const DictionaryMatrices& m, const WeightFunction& w, double rel_tol = default_rel_tol)
{
    return edmd(m, make_weight_vector(static_cast<std::size_t>(m.samples()), w), rel_tol);
}

/// Weighted second moments of the dictionary data, normalized by alpha_N.
struct Moments {
    ComplexMatrix gram;     ///< Psi^* W Psi
    ComplexMatrix cross;    ///< Psi^* W Phi
    ComplexMatrix phi_gram; ///< Phi^* W Phi (only when requested)
    Eigen::Index n_used = 0;
    bool weighted = false;
};

/**
 * Streams the moments over the first `n` pairs of `t` for several weight
 * vectors at once (each must have length n). Dictionary values are
 * evaluated in blocks and block products are merged by cascade summation.
 */
inline std::vector<Moments> accumulate_moments(const Trajectory& t, const Dictionary& psi, const Dictionary& phi,
                                               std::size_t n, std::span<const WeightVector> weights,
                                               bool with_phi_gram = false)
{
    if (psi.dimension() != t.dim() || phi.dimension() != t.dim())
        throw ShapeError("accumulate_moments: dictionary dimension does not match state dimension");
    if (n < 2 || n + 1 > t.length())
        throw SizeError("accumulate_moments: need 2 <= N and N + 1 <= trajectory length");
    for (const auto& w : weights)
        if (w.size() != n)
            throw ShapeError("accumulate_moments: weight length must equal N");

    const Eigen::Index l = psi.size();
    const Eigen::Index r = phi.size();
    std::vector<CascadeSum<ComplexMatrix>> g, a, f;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        g.emplace_back(ComplexMatrix::Zero(l, l), 1);
        a.emplace_back(ComplexMatrix::Zero(l, r), 1);
        if (with_phi_gram)
            f.emplace_back(ComplexMatrix::Zero(r, r), 1);
    }

    constexpr Eigen::Index block = 256;
    ComplexMatrix pb(block, l), qb(block, r), pw;
    Dictionary::Row row;
    const auto total = static_cast<Eigen::Index>(n);
    for (Eigen::Index start = 0; start < total; start += block) {
        const Eigen::Index b = std::min(block, total - start);
        for (Eigen::Index i = 0; i < b; ++i) {
            psi.evaluate_into(t.states.col(start + i), row);
            pb.row(i) = row;
            phi.evaluate_into(t.states.col(start + i + 1), row);
            qb.row(i) = row;
        }
        const auto p = pb.topRows(b);
        const auto q = qb.topRows(b);
        for (std::size_t k = 0; k < weights.size(); ++k) {
            const auto wn = weights[k].normalized();
            const Eigen::Map<const Eigen::VectorXd> wseg(wn.data() + start, b);
            pw = wseg.asDiagonal() * p;
            g[k].accumulate([&](ComplexMatrix& s) { s.noalias() += p.adjoint() * pw; });
            a[k].accumulate([&](ComplexMatrix& s) { s.noalias() += pw.adjoint() * q; });
            if (with_phi_gram) {
                const ComplexMatrix qw = wseg.asDiagonal() * q;
                f[k].accumulate([&](ComplexMatrix& s) { s.noalias() += q.adjoint() * qw; });
            }
        }
    }
    std::vector<Moments> out;
    out.reserve(weights.size());
    for (std::size_t k = 0; k < weights.size(); ++k) {
        Moments m;
        m.gram = g[k].total();
        m.gram = (m.gram + m.gram.adjoint()).eval() / 2.0;
        m.cross = a[k].total();
        if (with_phi_gram) {
            m.phi_gram = f[k].total();
            m.phi_gram = (m.phi_gram + m.phi_gram.adjoint()).eval() / 2.0;
        }
        m.n_used = total;
        m.weighted = !weights[k].is_uniform();
        out.push_back(std::move(m));
    }
    return out;
}

/// Moments computed directly from materialized dictionary matrices.
inline Moments moments(const DictionaryMatrices& m, const WeightVector& weights, bool with_phi_gram = false)
{
    if (static_cast<Eigen::Index>(weights.size()) != m.samples())
        throw ShapeError("moments: weight length must equal N");
    const Eigen::Map<const Eigen::VectorXd> w(weights.normalized().data(), m.samples());
    Moments out;
    const ComplexMatrix pw = w.asDiagonal() * m.psi;
    out.gram = m.psi.adjoint() * pw;
    out.gram = (out.gram + out.gram.adjoint()).eval() / 2.0;
    out.cross = pw.adjoint() * m.phi;
    if (with_phi_gram) {
        const ComplexMatrix fw = w.asDiagonal() * m.phi;
        out.phi_gram = m.phi.adjoint() * fw;
        out.phi_gram = (out.phi_gram + out.phi_gram.adjoint()).eval() / 2.0;
    }
    out.n_used = m.samples();
    out.weighted = !weights.is_uniform();
    return out;
}

/// K = G^+ A; the truncation tolerance applies to the spectrum of G.
inline KoopmanMatrix edmd_from_moments(const Moments& m, double rel_tol = default_rel_tol)
{
    return {pinv_lstsq_right(m.gram, m.cross, rel_tol).solution, m.weighted, m.n_used, {}, {}};
}

/// Streaming wtEDMD on the first `n` pairs of a trajectory.
inline KoopmanMatrix edmd_streaming(const Trajectory& t, const Dictionary& psi, const Dictionary& phi, std::size_t n,
                                    const WeightFunction& w, double rel_tol = default_rel_tol)
{
    const WeightVector wv = make_weight_vector(n, w);
    auto m = accumulate_moments(t, psi, phi, n, std::span<const WeightVector>(&wv, 1));
    auto k = edmd_from_moments(m.front(), rel_tol);
    k.psi_id = psi.id();
    k.phi_id = phi.id();
    return k;
}

struct EdmdSweepRow {
    std::size_t n = 0;
    double relerr_unw = 0.0;
    double relerr_w = 0.0;
};

/// Relative Frobenius errors of EDMD and wtEDMD on the first N pairs against
/// wtEDMD on the first `benchmark_n` pairs.
inline std::vector<EdmdSweepRow> edmd_error_sweep(const Trajectory& t, const Dictionary& psi, const Dictionary& phi,
                                                  std::vector<std::size_t> n_values, std::size_t benchmark_n,
                                                  const WeightFunction& w, double rel_tol = default_rel_tol)
{
    std::sort(n_values.begin(), n_values.end());
    n_values.erase(std::unique(n_values.begin(), n_values.end()), n_values.end());
    if (!n_values.empty() && n_values.back() > benchmark_n)
        throw SizeError("edmd_error_sweep: benchmark N must be >= every swept N");
    const auto bench = edmd_streaming(t, psi, phi, benchmark_n, w, rel_tol);
    std::vector<EdmdSweepRow> rows;
    for (std::size_t n : n_values) {
        const std::vector<WeightVector> ws{make_weight_vector(n, WeightFunction::uniform()), make_weight_vector(n, w)};
        const auto m = accumulate_moments(t, psi, phi, n, ws);
        const auto ku = edmd_from_moments(m[0], rel_tol);
        const auto kw = edmd_from_moments(m[1], rel_tol);
        rows.push_back({n, relative_frobenius(ku.k, bench.k), relative_frobenius(kw.k, bench.k)});
    }
    return rows;
}

struct MpedmdResult {
    ComplexMatrix k;
    ComplexVector eigenvalues;
    ComplexMatrix eigenvectors;
    ComplexMatrix gram;
    bool weighted = false;
    Eigen::Index n_used = 0;
};

/// Which matrix plays the role of the cross moment in measure-preserving EDMD.
enum class MpedmdCross {
    PsiPhi, ///< A = Psi^* W Phi (default)
    PhiPhi, ///< A = Phi^* W Phi, the variant printed in some listings
};

/**
 * Measure-preserving EDMD from moments: with B = G^{-1/2} A^* G^{-1/2} =
 * U1 S U2^*, K = G^{-1/2} U2 U1^* G^{1/2}. The unitary U2 U1^* is
 * diagonalized through its Schur form, so eigenvalues sit on the unit circle
 * up to roundoff and V = G^{-1/2} Vhat.
 */
inline MpedmdResult mpedmd_from_moments(const Moments& m, double rel_tol = default_rel_tol,
                                        MpedmdCross cross = MpedmdCross::PsiPhi)
{
    const ComplexMatrix& a = cross == MpedmdCross::PsiPhi ? m.cross : m.phi_gram;
    if (m.gram.rows() != m.gram.cols() || a.rows() != m.gram.rows() || a.cols() != m.gram.cols())
        throw ShapeError("mpedmd: requires square moments with psi = phi");
    const auto roots = sym_sqrt_inv(m.gram, rel_tol);
    const ComplexMatrix b = roots.inv_sqrt * a.adjoint() * roots.inv_sqrt;
    Eigen::JacobiSVD<ComplexMatrix> svd(b, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const ComplexMatrix unitary = svd.matrixV() * svd.matrixU().adjoint();
    Eigen::ComplexSchur<ComplexMatrix> schur(unitary);
    if (schur.info() != Eigen::Success)
        throw NumericalError("mpedmd: Schur decomposition failed");
    ComplexVector lambda = schur.matrixT().diagonal();
    for (Eigen::Index i = 0; i < lambda.size(); ++i)
        lambda(i) /= std::abs(lambda(i));
    auto sorted = sorted_eigen(lambda, schur.matrixU());
    MpedmdResult out;
    out.k = roots.inv_sqrt * unitary * roots.sqrt;
    out.eigenvalues = std::move(sorted.values);
    out.eigenvectors = roots.inv_sqrt * sorted.vectors;
    out.gram = m.gram;
    out.weighted = m.weighted;
    out.n_used = m.n_used;
    return out;
}

inline MpedmdResult mpedmd(const DictionaryMatrices& mats, const WeightVector& weights, double rel_tol = default_rel_tol,
                           MpedmdCross cross = MpedmdCross::PsiPhi)
{
    if (mats.psi_id != mats.phi_id || mats.psi.cols() != mats.phi.cols())
        throw ShapeError("mpedmd: psi and phi dictionaries must coincide");
    return mpedmd_from_moments(moments(mats, weights, cross == MpedmdCross::PhiPhi), rel_tol, cross);
}

inline MpedmdResult mpedmd(const DictionaryMatrices& mats, const WeightFunction& w, double rel_tol = default_rel_tol,
                           MpedmdCross cross = MpedmdCross::PsiPhi)
{
    return mpedmd(mats, make_weight_vector(static_cast<std::size_t>(mats.samples()), w), rel_tol, cross);
}

/// ||K^* G K - G||_F / ||G||_F.
inline double unitarity_residual(const ComplexMatrix& k, const ComplexMatrix& g)
{
    return relative_frobenius(ComplexMatrix(k.adjoint() * g * k), g);
}

} // namespace birkhoff
