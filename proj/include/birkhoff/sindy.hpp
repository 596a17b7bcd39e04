#pragma once

/** @file
 * Sequentially thresholded least squares (STLSQ) with optional temporal
 * weights, for discrete maps (targets = next states) and ODEs (targets =
 * derivative estimates).
 *
 * Each output row j solves min ||W^{1/2}(y_j - Psi xi_j)||, prunes entries
 * with |xi_jk| < eta, and refits on the surviving columns until the active
 * set stops changing. Pruned entries never re-enter within a run.
 */

#include <birkhoff/averages.hpp>
#include <birkhoff/dictionary.hpp>
#include <birkhoff/linalg.hpp>
#include <birkhoff/systems.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace birkhoff {

enum class TargetMode { Discrete, Continuous };

template <class Scalar>
struct TargetData {
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> targets; ///< d x N
    TargetMode mode = TargetMode::Continuous;
};

using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

struct SindyRowDiagnostics {
    int iterations = 0;
    Eigen::Index active = 0;
    bool converged = false;
    bool all_pruned = false;
};

template <class Scalar>
struct SindyModel {
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> xi; ///< d x L
    BoolMatrix active_mask;                                    ///< d x L
    double eta = 0.0;
    int iterations = 0; ///< maximum over rows
    bool converged = true;
    std::string dictionary_id;
    std::vector<SindyRowDiagnostics> rows;
};

struct StlsqOptions {
    double eta = 0.0;
    int max_iter = 0; ///< 0 selects L + 1
    double rel_tol = default_rel_tol;
    std::optional<BoolMatrix> initial_mask;
    std::string dictionary_id;
};

template <class Scalar>
SindyModel<Scalar> stlsq(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& psi,
                         const TargetData<Scalar>& data, const WeightVector& weights, const StlsqOptions& opt = {})
{
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    const Eigen::Index n = psi.rows();
    const Eigen::Index l = psi.cols();
    const Eigen::Index d = data.targets.rows();
    if (data.targets.cols() != n)
        throw ShapeError("stlsq: targets have " + std::to_string(data.targets.cols()) + " samples, dictionary has " +
                         std::to_string(n));
    if (static_cast<Eigen::Index>(weights.size()) != n)
        throw ShapeError("stlsq: weight length must equal N");
    if (!(opt.eta >= 0.0) || !std::isfinite(opt.eta))
        throw ConfigError("stlsq: eta must be finite and >= 0");
    if (opt.max_iter < 0)
        throw ConfigError("stlsq: max_iter must be >= 1");
    if (!psi.allFinite() || !data.targets.allFinite())
        throw NumericalError("stlsq: non-finite data");
    if (opt.initial_mask && (opt.initial_mask->rows() != d || opt.initial_mask->cols() != l))
        throw ShapeError("stlsq: initial mask must be d x L");
    const int max_iter = opt.max_iter == 0 ? static_cast<int>(l) + 1 : opt.max_iter;

    const DiagonalWeight w(weights);
    const Matrix pw = weighted_pair(psi, w, DataAxis::Rows);
    const Matrix yw = weighted_pair(Matrix(data.targets.transpose()), w, DataAxis::Rows);

    SindyModel<Scalar> model;
    model.xi.setZero(d, l);
    model.active_mask.setConstant(d, l, false);
    model.eta = opt.eta;
    model.dictionary_id = opt.dictionary_id;
    model.rows.resize(static_cast<std::size_t>(d));

    for (Eigen::Index j = 0; j < d; ++j) {
        std::vector<Eigen::Index> active;
        for (Eigen::Index k = 0; k < l; ++k)
            if (!opt.initial_mask || (*opt.initial_mask)(j, k))
                active.push_back(k);
        auto& diag = model.rows[static_cast<std::size_t>(j)];
        Vector coef = Vector::Zero(l);
        while (!active.empty()) {
            Matrix sub(n, static_cast<Eigen::Index>(active.size()));
            for (std::size_t c = 0; c < active.size(); ++c)
                sub.col(static_cast<Eigen::Index>(c)) = pw.col(active[c]);
            const Matrix sol = pinv_lstsq_right(sub, yw.col(j), opt.rel_tol).solution;
            coef.setZero();
            for (std::size_t c = 0; c < active.size(); ++c)
                coef(active[c]) = sol(static_cast<Eigen::Index>(c), 0);
            ++diag.iterations;
            std::vector<Eigen::Index> kept;
            for (Eigen::Index k : active)
                if (std::abs(coef(k)) >= opt.eta)
                    kept.push_back(k);
            const bool stable = kept.size() == active.size();
            if (stable || diag.iterations >= max_iter) {
                diag.converged = stable;
                for (Eigen::Index k = 0; k < l; ++k)
                    if (std::abs(coef(k)) < opt.eta)
                        coef(k) = Scalar(0);
                active = std::move(kept);
                break;
            }
            active = std::move(kept);
        }
        if (active.empty()) {
            coef.setZero();
            diag.all_pruned = true;
            diag.converged = true;
        }
        for (Eigen::Index k : active)
            model.active_mask(j, k) = true;
        model.xi.row(j) = coef.transpose();
        diag.active = static_cast<Eigen::Index>(active.size());
        model.iterations = std::max(model.iterations, diag.iterations);
        model.converged = model.converged && diag.converged;
    }
    return model;
}

template <class Scalar>
SindyModel<Scalar> stlsq(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& psi,
                         const TargetData<Scalar>& data, const WeightFunction& w, const StlsqOptions& opt = {})
{
    return stlsq(psi, data, make_weight_vector(static_cast<std::size_t>(psi.rows()), w), opt);
}

/// Real monomial dictionary matrix (N x L) of a scalar series.
inline RealMatrix monomial_matrix(const Eigen::VectorXd& x, int degree)
{
    if (degree < 0)
        throw ConfigError("monomial_matrix: degree must be >= 0");
    RealMatrix out(x.size(), degree + 1);
    out.col(0).setOnes();
    for (int p = 1; p <= degree; ++p)
        out.col(p) = out.col(p - 1).cwiseProduct(x);
    return out;
}

struct HarmonicParams {
    double amplitude = 2.0;
    double phase = 0.0;
    double k = 0.01;
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
};

enum class SindyMethod { LS, WtLS, SINDy, WtSINDy };

inline const char* to_string(SindyMethod m)
{
    switch (m) {
    case SindyMethod::LS: return "LS";
    case SindyMethod::WtLS: return "wtLS";
    case SindyMethod::SINDy: return "SINDy";
    case SindyMethod::WtSINDy: return "wtSINDy";
    }
    return "?";
}

struct SindySweepRow {
    std::size_t n = 0;
    SindyMethod method = SindyMethod::LS;
    double eta = 0.0;
    double coeff_error = 0.0;
};

/// Coefficients of x'' = -x in the monomial basis 1, x, ..., x^degree.
inline Eigen::RowVectorXd harmonic_exact_coefficients(int degree)
{
    Eigen::RowVectorXd xi = Eigen::RowVectorXd::Zero(degree + 1);
    if (degree >= 1)
        xi(1) = -1.0;
    return xi;
}

/**
 * Frobenius coefficient errors of LS / wtLS (eta = 0) and SINDy / wtSINDy for
 * each eta in `etas`, identifying x'' = f(x) from the first N samples of
 * the noisy harmonic surrogate.
 */
inline std::vector<SindySweepRow> sindy_error_sweep(const HarmonicParams& p, std::vector<std::size_t> n_values,
                                                    const std::vector<double>& etas, int degree,
                                                    const WeightFunction& w)
{
    std::sort(n_values.begin(), n_values.end());
    n_values.erase(std::unique(n_values.begin(), n_values.end()), n_values.end());
    if (n_values.empty())
        return {};
    const auto series = harmonic_series(p.amplitude, p.phase, p.k, n_values.back(), p.noise_sigma,
                                        RngStream(p.seed).derive("harmonic_noise"));
    const Eigen::RowVectorXd exact = harmonic_exact_coefficients(degree);
    std::vector<SindySweepRow> rows;
    for (std::size_t n : n_values) {
        const auto m = static_cast<Eigen::Index>(n);
        const RealMatrix psi = monomial_matrix(series.interior.head(m), degree);
        TargetData<double> data{series.second_derivative.head(m).transpose(), TargetMode::Continuous};
        const WeightVector uni = make_weight_vector(n, WeightFunction::uniform());
        const WeightVector wtd = make_weight_vector(n, w);
        auto err = [&](const SindyModel<double>& model) { return (model.xi.row(0) - exact).norm(); };
        StlsqOptions ls;
        rows.push_back({n, SindyMethod::LS, 0.0, err(stlsq(psi, data, uni, ls))});
        rows.push_back({n, SindyMethod::WtLS, 0.0, err(stlsq(psi, data, wtd, ls))});
        for (double eta : etas) {
            StlsqOptions o;
            o.eta = eta;
            rows.push_back({n, SindyMethod::SINDy, eta, err(stlsq(psi, data, uni, o))});
            rows.push_back({n, SindyMethod::WtSINDy, eta, err(stlsq(psi, data, wtd, o))});
        }
    }
    return rows;
}

} // namespace birkhoff
