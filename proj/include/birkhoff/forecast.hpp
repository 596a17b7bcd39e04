#pragma once

/** @file
 * Diffusion forecasting with temporally weighted shift matrices.
 *
 * A kernel eigenbasis phi_1..phi_M is learned on (delay-embedded) training
 * data and orthonormalized empirically, (1/N) sum_n phi_i(X_n) phi_j(X_n) =
 * delta_ij, with phi_1 = 1. The one-step transfer operator is represented by
 *     A_ij = sum_n w_n phi_j(X_n) phi_i(X_{n+1}),
 * with w uniform (1/(N-1)) or a normalized taper. The forecast of g at lead
 * k from x is ghat^T A^k c with c = phi(x) and ghat_j = (1/N) sum g phi_j.
 */

#include <birkhoff/averages.hpp>
#include <birkhoff/errors.hpp>
#include <birkhoff/linalg.hpp>
#include <birkhoff/series.hpp>
#include <birkhoff/systems.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace birkhoff {

struct DelayEmbedding {
    RealMatrix points; ///< rows: embedded samples, lags * d columns
    int lags = 1;
    /// Row n stacks samples n, n+1, ..., n+lags-1 (oldest first), so it sits
    /// at original index n + offset and its last column is the newest value.
    std::size_t offset = 0;
};

inline DelayEmbedding delay_embed(std::span<const double> series, int lags)
{
    if (lags < 1)
        throw ConfigError("delay_embed: lags must be >= 1");
    if (series.size() < static_cast<std::size_t>(lags))
        throw SizeError("delay_embed: series of length " + std::to_string(series.size()) + " is shorter than lags = " +
                        std::to_string(lags));
    const auto rows = static_cast<Eigen::Index>(series.size()) - lags + 1;
    DelayEmbedding e;
    e.lags = lags;
    e.offset = static_cast<std::size_t>(lags - 1);
    e.points.resize(rows, lags);
    for (Eigen::Index n = 0; n < rows; ++n)
        for (int j = 0; j < lags; ++j)
            e.points(n, j) = series[static_cast<std::size_t>(n + j)];
    return e;
}

inline DelayEmbedding delay_embed(const std::vector<double>& series, int lags)
{
    return delay_embed(std::span<const double>(series), lags);
}

struct BasisOptions {
    double bandwidth = 0.0;        ///< 0 selects the median-distance heuristic
    double bandwidth_factor = 0.3; ///< multiplies the median pairwise distance
    double alpha = 0.5;            ///< density normalization exponent
    std::size_t max_kernel_points = 1000;
    std::size_t median_pairs = 4096;
    double extrapolation_tol = 1e-8; ///< kernel mass below this (relative) means extrapolation
};

/// Median of distances between random pairs of rows (all pairs when few).
inline double median_pairwise_distance(const RealMatrix& pts, std::size_t pairs, RngStream rng)
{
    const auto n = static_cast<std::size_t>(pts.rows());
    if (n < 2)
        throw SizeError("median_pairwise_distance: need at least 2 points");
    std::vector<double> d;
    if (n * (n - 1) / 2 <= pairs) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                d.push_back((pts.row(static_cast<Eigen::Index>(i)) - pts.row(static_cast<Eigen::Index>(j))).norm());
    } else {
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        while (d.size() < pairs) {
            const std::size_t i = pick(rng.engine()), j = pick(rng.engine());
            if (i != j)
                d.push_back((pts.row(static_cast<Eigen::Index>(i)) - pts.row(static_cast<Eigen::Index>(j))).norm());
        }
    }
    const auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
    std::nth_element(d.begin(), mid, d.end());
    return *mid;
}

struct Extension {
    Eigen::RowVectorXd phi;
    bool extrapolated = false;
};

class DiffusionBasis {
public:
    /// phi_j(X_n), N_train x M, empirically orthonormal with a constant first column.
    const RealMatrix& phi() const noexcept { return phi_; }
    /// Leading eigenvalues of the normalized kernel (Markov) operator.
    const Eigen::VectorXd& eigenvalues() const noexcept { return lambda_; }
    double bandwidth() const noexcept { return h_; }
    double alpha() const noexcept { return alpha_; }
    Eigen::Index size() const noexcept { return phi_.cols(); }
    Eigen::Index samples() const noexcept { return phi_.rows(); }
    Eigen::Index landmarks() const noexcept { return landmarks_.rows(); }

    /// Nystrom extension of the orthonormalized eigenfunctions to `x`.
    template <class Vec>
    Extension extend(const Vec& x) const
    {
        if (x.size() != landmarks_.cols())
            throw ShapeError("diffusion basis: point has dimension " + std::to_string(x.size()) + ", expected " +
                             std::to_string(landmarks_.cols()));
        Extension out;
        const Eigen::VectorXd k = kernel_row(x);
        const double q = k.sum();
        if (!(q > extrapolation_tol_ * mean_mass_)) {
            out.extrapolated = true;
            out.phi = Eigen::RowVectorXd::Zero(size());
            out.phi(0) = 1.0;
            return out;
        }
        const Eigen::VectorXd kt = k.cwiseQuotient(landmark_scale_) / std::pow(q, alpha_);
        const double deg = kt.sum();
        const Eigen::RowVectorXd raw = (kt.transpose() * landmark_vecs_) / deg;
        out.phi = raw.cwiseQuotient(lambda_.transpose()) * transform_;
        return out;
    }

    static DiffusionBasis build(const RealMatrix& points, Eigen::Index m, const BasisOptions& opt, RngStream rng);

private:
    template <class Vec>
    Eigen::VectorXd kernel_row(const Vec& x) const
    {
        Eigen::VectorXd k(landmarks_.rows());
        const double inv_h2 = 1.0 / (h_ * h_);
        for (Eigen::Index j = 0; j < landmarks_.rows(); ++j)
            k(j) = std::exp(-(landmarks_.row(j).transpose() - x).squaredNorm() * inv_h2);
        return k;
    }

    RealMatrix phi_;
    Eigen::VectorXd lambda_;
    double h_ = 0.0;
    double alpha_ = 0.5;
    double extrapolation_tol_ = 1e-8;
    double mean_mass_ = 1.0;
    RealMatrix landmarks_;
    Eigen::VectorXd landmark_scale_; ///< q_j^alpha of each landmark
    RealMatrix landmark_vecs_;       ///< right Markov eigenvectors at the landmarks
    RealMatrix transform_;           ///< raw -> orthonormal, R^{-1}
};

/**
 * Gaussian kernel exp(-|x-y|^2/h^2) on at most `max_kernel_points` evenly
 * spaced landmarks; density normalization K/(q_i q_j)^alpha, then the
 * Markov normalization through its symmetric conjugate. Eigenvectors are
 * extended to all training points by Nystrom and orthonormalized with a QR
 * factorization of Psi / sqrt(N).
 */
inline DiffusionBasis DiffusionBasis::build(const RealMatrix& points, Eigen::Index m, const BasisOptions& opt,
                                            RngStream rng)
{
    const Eigen::Index n = points.rows();
    if (n < 2)
        throw SizeError("diffusion_basis: need at least 2 training points");
    if (m < 1 || m > n)
        throw SizeError("diffusion_basis: M = " + std::to_string(m) + " must lie in [1, N_train = " +
                        std::to_string(n) + "]");
    if (!points.allFinite())
        throw NumericalError("diffusion_basis: non-finite training data");
    if (opt.bandwidth < 0.0 || !(opt.bandwidth_factor > 0.0) || opt.alpha < 0.0 || opt.max_kernel_points < 2)
        throw ConfigError("diffusion_basis: invalid options");

    DiffusionBasis b;
    b.alpha_ = opt.alpha;
    b.extrapolation_tol_ = opt.extrapolation_tol;
    b.h_ = opt.bandwidth > 0.0 ? opt.bandwidth
                               : opt.bandwidth_factor *
                                     median_pairwise_distance(points, opt.median_pairs, rng.derive("bandwidth"));
    if (!(b.h_ > 0.0))
        b.h_ = 1.0; // every point coincides; any bandwidth gives the all-ones kernel

    const Eigen::Index nl = std::min<Eigen::Index>(n, static_cast<Eigen::Index>(opt.max_kernel_points));
    if (m > nl)
        throw SizeError("diffusion_basis: M exceeds the number of kernel points");
    b.landmarks_.resize(nl, points.cols());
    for (Eigen::Index i = 0; i < nl; ++i)
        b.landmarks_.row(i) = points.row(static_cast<Eigen::Index>((static_cast<double>(i) * n) / nl));

    RealMatrix k(nl, nl);
    const double inv_h2 = 1.0 / (b.h_ * b.h_);
    for (Eigen::Index i = 0; i < nl; ++i) {
        k(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < nl; ++j)
            k(i, j) = k(j, i) = std::exp(-(b.landmarks_.row(i) - b.landmarks_.row(j)).squaredNorm() * inv_h2);
    }
    const Eigen::VectorXd q = k.rowwise().sum();
    b.mean_mass_ = q.mean();
    b.landmark_scale_ = q.array().pow(opt.alpha);
    const RealMatrix kt = b.landmark_scale_.cwiseInverse().asDiagonal() * k * b.landmark_scale_.cwiseInverse().asDiagonal();
    const Eigen::VectorXd d = kt.rowwise().sum();
    const Eigen::VectorXd dis = d.cwiseSqrt().cwiseInverse();
    const RealMatrix s = dis.asDiagonal() * kt * dis.asDiagonal();
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(s);
    if (es.info() != Eigen::Success)
        throw NumericalError("diffusion_basis: kernel eigensolver failed");
    // ascending order from the solver; the top M are the last M
    b.lambda_ = es.eigenvalues().tail(m).reverse();
    const RealMatrix u = es.eigenvectors().rightCols(m).rowwise().reverse();
    const double lmax = b.lambda_(0);
    for (Eigen::Index j = 0; j < m; ++j)
        if (!(b.lambda_(j) > 1e-10 * lmax))
            throw ConditioningError("diffusion_basis: kernel eigenvalue " + std::to_string(j + 1) + " of " +
                                    std::to_string(m) + " is degenerate (" + std::to_string(b.lambda_(j)) +
                                    "); reduce M or the bandwidth");
    b.landmark_vecs_ = dis.asDiagonal() * u;
    b.transform_ = RealMatrix::Identity(m, m);

    // Nystrom values of the raw eigenfunctions on every training point
    RealMatrix raw(n, m);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::VectorXd kr = b.kernel_row(points.row(i).transpose());
        const Eigen::VectorXd krt = kr.cwiseQuotient(b.landmark_scale_) / std::pow(kr.sum(), opt.alpha);
        raw.row(i) = (krt.transpose() * b.landmark_vecs_) / krt.sum();
    }
    raw = raw * b.lambda_.cwiseInverse().asDiagonal();

    const double sqrt_n = std::sqrt(static_cast<double>(n));
    Eigen::HouseholderQR<RealMatrix> qr(raw / sqrt_n);
    RealMatrix r = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
    const double rscale = r.diagonal().cwiseAbs().maxCoeff();
    for (Eigen::Index j = 0; j < m; ++j) {
        if (!(std::abs(r(j, j)) > 1e-10 * rscale))
            throw ConditioningError("diffusion_basis: eigenfunctions are linearly dependent on the training data");
        if (r(j, j) < 0.0)
            r.row(j) *= -1.0;
    }
    b.transform_ = r.triangularView<Eigen::Upper>().solve(RealMatrix::Identity(m, m));
    b.phi_ = raw * b.transform_;
    return b;
}

inline DiffusionBasis diffusion_basis(const RealMatrix& points, Eigen::Index m, const BasisOptions& opt, RngStream rng)
{
    return DiffusionBasis::build(points, m, opt, std::move(rng));
}

/// max |(1/N) Phi^T Phi - I|.
inline double orthonormality_residual(const DiffusionBasis& b)
{
    const RealMatrix g = b.phi().transpose() * b.phi() / static_cast<double>(b.samples());
    return (g - RealMatrix::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

struct ShiftMatrix {
    RealMatrix a;
    bool weighted = false;
};

/// `weights` covers the N - 1 consecutive pairs of training samples.
inline ShiftMatrix shift_matrix(const DiffusionBasis& b, const WeightVector& weights)
{
    const Eigen::Index n = b.samples();
    if (n < 2)
        throw SizeError("shift_matrix: need at least 2 consecutive samples");
    if (static_cast<Eigen::Index>(weights.size()) != n - 1)
        throw ShapeError("shift_matrix: weight length " + std::to_string(weights.size()) + " != N - 1 = " +
                         std::to_string(n - 1));
    const Eigen::Map<const Eigen::VectorXd> w(weights.normalized().data(), n - 1);
    const auto& p = b.phi();
    return {p.bottomRows(n - 1).transpose() * w.asDiagonal() * p.topRows(n - 1), !weights.is_uniform()};
}

inline ShiftMatrix shift_matrix(const DiffusionBasis& b, const WeightFunction& w)
{
    return shift_matrix(b, make_weight_vector(static_cast<std::size_t>(b.samples() - 1), w));
}

/// ghat_j = (1/N) sum_n g(X_n) phi_j(X_n) from training values of g.
inline Eigen::VectorXd observable_coefficients(const DiffusionBasis& b, const Eigen::VectorXd& g_train)
{
    if (g_train.size() != b.samples())
        throw ShapeError("observable_coefficients: need one value per training sample");
    return b.phi().transpose() * g_train / static_cast<double>(b.samples());
}

struct PointForecast {
    std::vector<double> values; ///< leads 0..k_max
    bool extrapolated = false;  ///< climatological fallback was used
};

template <class Vec>
PointForecast forecast(const DiffusionBasis& b, const ShiftMatrix& a, const Vec& x_init, int k_max,
                       const Eigen::VectorXd& ghat)
{
    if (k_max < 0)
        throw ConfigError("forecast: k_max must be >= 0");
    if (a.a.rows() != b.size() || ghat.size() != b.size())
        throw ShapeError("forecast: basis, shift matrix and observable sizes differ");
    const auto ext = b.extend(x_init);
    PointForecast out;
    out.extrapolated = ext.extrapolated;
    out.values.resize(static_cast<std::size_t>(k_max) + 1);
    if (ext.extrapolated) {
        std::fill(out.values.begin(), out.values.end(), ghat(0));
        return out;
    }
    Eigen::VectorXd c = ext.phi.transpose();
    for (int k = 0; k <= k_max; ++k) {
        out.values[static_cast<std::size_t>(k)] = ghat.dot(c);
        c = a.a * c;
    }
    return out;
}

struct SkillRow {
    int lead = 0;
    std::size_t count = 0;
    std::optional<double> rmse;
    std::optional<double> correlation;
};

struct ForecastSkill {
    std::vector<SkillRow> rows;
    double climatology = 0.0;
};

/// Population standard deviation.
inline double climatology(std::span<const double> v)
{
    if (v.empty())
        throw SizeError("climatology: empty series");
    double mean = 0.0;
    for (double x : v)
        mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v)
        ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(v.size()));
}

inline std::optional<double> pearson(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size() || a.size() < 3)
        return std::nullopt;
    const double n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    const double scale = std::max({saa, sbb, 1e-300});
    if (saa <= 1e-24 * scale || sbb <= 1e-24 * scale || saa == 0.0 || sbb == 0.0)
        return std::nullopt;
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

/// Per-lead RMSE and correlation; predictions[k-1] and truth[k-1] hold the
/// aligned pairs at lead k. Leads with fewer than 3 pairs are missing.
inline ForecastSkill skill(const std::vector<std::vector<double>>& predictions,
                           const std::vector<std::vector<double>>& truth, double climatology_std)
{
    if (predictions.size() != truth.size())
        throw ShapeError("skill: prediction and truth lead counts differ");
    ForecastSkill out;
    out.climatology = climatology_std;
    for (std::size_t k = 0; k < predictions.size(); ++k) {
        const auto& p = predictions[k];
        const auto& t = truth[k];
        if (p.size() != t.size())
            throw ShapeError("skill: lead " + std::to_string(k + 1) + " has unaligned predictions");
        SkillRow row;
        row.lead = static_cast<int>(k) + 1;
        row.count = p.size();
        if (p.size() >= 3) {
            double ss = 0.0;
            for (std::size_t i = 0; i < p.size(); ++i)
                ss += (p[i] - t[i]) * (p[i] - t[i]);
            row.rmse = std::sqrt(ss / static_cast<double>(p.size()));
            row.correlation = pearson(p, t);
        }
        out.rows.push_back(row);
    }
    return out;
}

struct NinoOptions {
    YearMonth train_begin{1920, 1};
    YearMonth train_end{1999, 12};
    YearMonth valid_begin{2000, 1};
    YearMonth valid_end{2013, 12};
    int lags = 6;
    Eigen::Index m = 14;
    int max_lead = 24;
    int report_lead = 16;
    BasisOptions basis;
    std::uint64_t seed = 0;
};

struct NinoResult {
    ForecastSkill unweighted;
    ForecastSkill weighted;
    std::vector<YearMonth> report_dates; ///< verification months at the report lead
    std::vector<double> report_truth;
    std::vector<double> report_unw;
    std::vector<double> report_w;
    std::size_t extrapolated_starts = 0;
    bool large_m_warning = false;
    double bandwidth = 0.0;
};

/**
 * Trains one basis on the delay-embedded training range, fits uniform and
 * tapered shift matrices, and forecasts the newest embedding coordinate from
 * every validation month. Both runs share the basis and initial vectors.
 */
inline NinoResult nino34_pipeline(const MonthlySeries& s, const NinoOptions& opt, const WeightFunction& w)
{
    if (opt.lags < 1 || opt.max_lead < 1 || opt.report_lead < 1 || opt.report_lead > opt.max_lead)
        throw ConfigError("nino34: lags, max_lead and report_lead must be positive with report_lead <= max_lead");
    if (opt.train_end.ordinal() < opt.train_begin.ordinal() || opt.valid_end.ordinal() < opt.valid_begin.ordinal())
        throw ConfigError("nino34: empty training or validation range");
    const std::size_t i0 = s.index_of(opt.train_begin);
    const std::size_t i1 = s.index_of(opt.train_end);
    const std::size_t v0 = s.index_of(opt.valid_begin);
    const std::size_t v1 = s.index_of(opt.valid_end);
    if (v0 < static_cast<std::size_t>(opt.lags - 1))
        throw SizeError("nino34: not enough history before the validation range for the embedding");

    const std::span<const double> all(s.values);
    const auto emb = delay_embed(all.subspan(i0, i1 - i0 + 1), opt.lags);
    NinoResult out;
    out.large_m_warning = opt.m > 30;
    const auto basis = diffusion_basis(emb.points, opt.m, opt.basis, RngStream(opt.seed).derive("nino34_basis"));
    out.bandwidth = basis.bandwidth();
    const auto a_unw = shift_matrix(basis, WeightFunction::uniform());
    const auto a_w = shift_matrix(basis, w);
    const Eigen::VectorXd g = emb.points.col(opt.lags - 1);
    const Eigen::VectorXd ghat = observable_coefficients(basis, g);

    const auto leads = static_cast<std::size_t>(opt.max_lead);
    std::vector<std::vector<double>> pu(leads), pw(leads), tr(leads);
    Eigen::VectorXd x(opt.lags);
    for (std::size_t t = v0; t <= v1; ++t) {
        for (int j = 0; j < opt.lags; ++j)
            x(j) = s.values[t + 1 + static_cast<std::size_t>(j) - static_cast<std::size_t>(opt.lags)];
        const auto fu = forecast(basis, a_unw, x, opt.max_lead, ghat);
        const auto fw = forecast(basis, a_w, x, opt.max_lead, ghat);
        if (fu.extrapolated)
            ++out.extrapolated_starts;
        for (std::size_t k = 1; k <= leads && t + k <= v1; ++k) {
            pu[k - 1].push_back(fu.values[k]);
            pw[k - 1].push_back(fw.values[k]);
            tr[k - 1].push_back(s.values[t + k]);
        }
        const auto rl = static_cast<std::size_t>(opt.report_lead);
        if (t + rl <= v1) {
            out.report_dates.push_back(YearMonth::from_ordinal(s.start.ordinal() + static_cast<int>(t + rl)));
            out.report_truth.push_back(s.values[t + rl]);
            out.report_unw.push_back(fu.values[rl]);
            out.report_w.push_back(fw.values[rl]);
        }
    }
    const double clim = climatology(all.subspan(v0, v1 - v0 + 1));
    out.unweighted = skill(pu, tr, clim);
    out.weighted = skill(pw, tr, clim);
    return out;
}

} // namespace birkhoff
