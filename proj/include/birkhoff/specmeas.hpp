#pragma once

/** @file
 * Spectral measures of scalar observables from trajectory data.
 *
 * Lag-n autocorrelations are weighted time averages
 *     a_n = 1/(2 pi alpha_{N-n}) sum_{j<N-n} w(j/(N-n)) g(X_j) conj(g(X_{j+n})),
 * each lag with its own weight vector of length N - n. The density
 *     xi(theta) = sum_{|n|<=M} phi(n/M) a_n e^{i n theta}
 * is a filtered trigonometric sum.
 */

#include <birkhoff/averages.hpp>
#include <birkhoff/errors.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace birkhoff {

using Complex = std::complex<double>;

struct AutocorrelationSet {
    std::vector<Complex> values; ///< a_{-M} .. a_M
    int m = 0;
    std::size_t n_used = 0;
    bool weighted = false;

    Complex at(int n) const
    {
        if (n < -m || n > m)
            throw SizeError("autocorrelation lag " + std::to_string(n) + " outside [-M, M]");
        return values[static_cast<std::size_t>(n + m)];
    }
};

inline AutocorrelationSet autocorrelations(std::span<const Complex> series, int m, const WeightFunction& w,
                                           bool weighted = true)
{
    const std::size_t n = series.size();
    if (m < 0)
        throw ConfigError("autocorrelations: M must be >= 0");
    if (n < 2 || static_cast<std::size_t>(m) + 2 > n)
        throw SizeError("autocorrelations: need M <= N - 2 (M = " + std::to_string(m) + ", N = " + std::to_string(n) +
                        ")");
    for (const auto& v : series)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw NumericalError("autocorrelations: non-finite sample");
    AutocorrelationSet out;
    out.m = m;
    out.n_used = n;
    out.weighted = weighted && !w.is_uniform();
    out.values.assign(static_cast<std::size_t>(2 * m + 1), Complex{});
    const double inv_2pi = 0.5 / std::numbers::pi;
    std::vector<Complex> products;
    for (int lag = 0; lag <= m; ++lag) {
        const std::size_t len = n - static_cast<std::size_t>(lag);
        products.resize(len);
        for (std::size_t j = 0; j < len; ++j)
            products[j] = series[j] * std::conj(series[j + static_cast<std::size_t>(lag)]);
        const std::span<const Complex> view(products);
        const Complex avg = out.weighted ? birkhoff_average(view, make_weight_vector(len, w)).value
                                         : birkhoff_average(view).value;
        Complex a = avg * inv_2pi;
        if (lag == 0)
            a = Complex(a.real(), 0.0);
        out.values[static_cast<std::size_t>(m + lag)] = a;
        out.values[static_cast<std::size_t>(m - lag)] = std::conj(a);
    }
    return out;
}

inline AutocorrelationSet autocorrelations(const std::vector<Complex>& series, int m, const WeightFunction& w,
                                           bool weighted = true)
{
    return autocorrelations(std::span<const Complex>(series), m, w, weighted);
}

/// 1/2 + cos(pi x)/2.
inline double cosine_filter(double x)
{
    if (!(std::abs(x) <= 1.0))
        throw DomainError("cosine filter: |x| must be <= 1, got " + std::to_string(x));
    return 0.5 + 0.5 * std::cos(std::numbers::pi * x);
}

/// 1 - s(|x|) with the C^3 smoothstep s(t) = 35t^4 - 84t^5 + 70t^6 - 20t^7.
inline double smoothstep_filter(double x)
{
    if (!(std::abs(x) <= 1.0))
        throw DomainError("smoothstep filter: |x| must be <= 1, got " + std::to_string(x));
    const double t = std::abs(x);
    const double t4 = t * t * t * t;
    return 1.0 - t4 * (35.0 + t * (-84.0 + t * (70.0 - 20.0 * t)));
}

class FilterFunction {
public:
    enum class Kind { CosineSharp, BumpFilter, Custom };

    static FilterFunction cosine() { return FilterFunction(Kind::CosineSharp, "cosine", cosine_filter); }
    static FilterFunction bump() { return FilterFunction(Kind::BumpFilter, "smoothstep", smoothstep_filter); }
    static FilterFunction custom(std::function<double(double)> f, std::string name = "custom")
    {
        if (!f)
            throw ConfigError("custom filter: empty callable");
        return FilterFunction(Kind::Custom, std::move(name), std::move(f));
    }

    Kind kind() const noexcept { return kind_; }
    const std::string& name() const noexcept { return name_; }

    double operator()(double x) const
    {
        if (!(std::abs(x) <= 1.0))
            throw DomainError("filter " + name_ + ": |x| must be <= 1");
        return f_(x);
    }

private:
    FilterFunction(Kind k, std::string name, std::function<double(double)> f)
        : kind_(k), name_(std::move(name)), f_(std::move(f))
    {
    }

    Kind kind_;
    std::string name_;
    std::function<double(double)> f_;
};

/// Points -pi + 2 pi k / size, k = 0..size-1.
inline std::vector<double> theta_grid(std::size_t size)
{
    if (size < 1)
        throw SizeError("theta_grid: size must be >= 1");
    std::vector<double> g(size);
    for (std::size_t k = 0; k < size; ++k)
        g[k] = -std::numbers::pi + 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(size);
    return g;
}

class SpectralDensity {
public:
    SpectralDensity(const AutocorrelationSet& acs, const FilterFunction& filt) : m_(acs.m)
    {
        if (acs.values.size() != static_cast<std::size_t>(2 * acs.m + 1))
            throw ShapeError("density: autocorrelation set has inconsistent M");
        coeffs_.resize(acs.values.size());
        for (int n = -m_; n <= m_; ++n) {
            const double x = m_ == 0 ? 0.0 : static_cast<double>(n) / m_;
            coeffs_[static_cast<std::size_t>(n + m_)] = filt(x) * acs.at(n);
        }
        for (const auto& c : coeffs_)
            scale_ += std::abs(c);
    }

    int m() const noexcept { return m_; }
    /// phi(n/M) a_n for n = -M..M.
    const std::vector<Complex>& coefficients() const noexcept { return coeffs_; }

    double eval(double theta) const
    {
        Complex s{};
        for (int n = -m_; n <= m_; ++n)
            s += coeffs_[static_cast<std::size_t>(n + m_)] * std::polar(1.0, n * theta);
        if (std::abs(s.imag()) > 1e-10 * std::max(scale_, 1e-300))
            throw NumericalError("density: imaginary residue " + std::to_string(s.imag()) +
                                 " exceeds tolerance; coefficients are not Hermitian");
        return s.real();
    }

    std::vector<double> eval_grid(std::span<const double> grid) const
    {
        std::vector<double> out(grid.size());
        for (std::size_t k = 0; k < grid.size(); ++k)
            out[k] = eval(grid[k]);
        return out;
    }

    /// Periodic trapezoid rule on `size` equispaced points of [-pi, pi).
    double integral(std::size_t size = 4096) const
    {
        const auto g = theta_grid(size);
        const auto v = eval_grid(g);
        const double sum = pairwise_sum(v.size(), [&](std::size_t i) { return v[i]; }, 0.0);
        return sum * 2.0 * std::numbers::pi / static_cast<double>(size);
    }

private:
    int m_ = 0;
    double scale_ = 0.0;
    std::vector<Complex> coeffs_;
};

struct Peak {
    double theta = 0.0;
    double height = 0.0;
    double prominence = 0.0;
};

/**
 * Local maxima of the density on a periodic grid of `grid_size` points whose
 * topographic prominence is at least `min_prominence * max|xi|`. The result
 * is sorted by theta.
 */
inline std::vector<Peak> peak_report(const SpectralDensity& density, std::size_t grid_size = 4096,
                                     double min_prominence = 0.05)
{
    if (grid_size < 16)
        throw SizeError("peak_report: grid size must be >= 16");
    const auto grid = theta_grid(grid_size);
    const auto y = density.eval_grid(grid);
    const auto g = static_cast<std::ptrdiff_t>(grid_size);
    auto at = [&](std::ptrdiff_t i) { return y[static_cast<std::size_t>(((i % g) + g) % g)]; };
    const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
    const double amax = std::max(std::abs(*lo), std::abs(*hi));
    std::vector<Peak> peaks;
    if (!(*hi - *lo > 1e-12 * amax))
        return peaks;
    for (std::ptrdiff_t i = 0; i < g; ++i) {
        const double v = y[static_cast<std::size_t>(i)];
        // plateaus count once, at their left end
        if (!(v > at(i - 1)))
            continue;
        std::ptrdiff_t r = i + 1;
        while (r < i + g && at(r) == v)
            ++r;
        if (at(r) > v)
            continue;
        double left_min = v, right_min = v;
        bool left_higher = false, right_higher = false;
        for (std::ptrdiff_t s = 1; s < g; ++s) {
            const double u = at(i - s);
            if (u > v) {
                left_higher = true;
                break;
            }
            left_min = std::min(left_min, u);
        }
        for (std::ptrdiff_t s = 1; s < g; ++s) {
            const double u = at(i + s);
            if (u > v) {
                right_higher = true;
                break;
            }
            right_min = std::min(right_min, u);
        }
        double prominence;
        if (!left_higher && !right_higher)
            prominence = v - *lo;
        else if (!left_higher)
            prominence = v - right_min;
        else if (!right_higher)
            prominence = v - left_min;
        else
            prominence = v - std::max(left_min, right_min);
        if (prominence >= min_prominence * amax)
            peaks.push_back({grid[static_cast<std::size_t>(i)], v, prominence});
    }
    return peaks;
}

struct AutocorrSweepRow {
    std::size_t n = 0;
    double relerr_unw = 0.0;
    double relerr_w = 0.0;
};

/// Relative l2 errors of a_0..a_M from the first N samples against the
/// weighted estimate from the first `benchmark_n` samples.
inline std::vector<AutocorrSweepRow> autocorrelation_error_sweep(std::span<const Complex> series, int m,
                                                                 std::vector<std::size_t> n_values,
                                                                 std::size_t benchmark_n, const WeightFunction& w)
{
    std::sort(n_values.begin(), n_values.end());
    n_values.erase(std::unique(n_values.begin(), n_values.end()), n_values.end());
    if (benchmark_n > series.size() || (!n_values.empty() && n_values.back() > benchmark_n))
        throw SizeError("autocorrelation_error_sweep: benchmark N must cover every N and fit in the series");
    const auto ref = autocorrelations(series.first(benchmark_n), m, w, true);
    auto err = [&](const AutocorrelationSet& a) {
        double num = 0.0, den = 0.0;
        for (int n = 0; n <= m; ++n) {
            num += std::norm(a.at(n) - ref.at(n));
            den += std::norm(ref.at(n));
        }
        return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
    };
    std::vector<AutocorrSweepRow> rows;
    for (std::size_t n : n_values) {
        const auto view = series.first(n);
        rows.push_back({n, err(autocorrelations(view, m, w, false)), err(autocorrelations(view, m, w, true))});
    }
    return rows;
}

} // namespace birkhoff
