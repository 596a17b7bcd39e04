#pragma once

/** @file
 * Taper weights and (weighted) Birkhoff averages along a trajectory.
 *
 * A weighted Birkhoff average of N samples g_0..g_{N-1} is
 *
 *     WB_N = (1/alpha_N) * sum_n w(n/N) g_n,   alpha_N = sum_n w(n/N),
 *
 * with w a smooth taper vanishing to all orders at 0 and 1. The uniform
 * weight w = 1 gives the ordinary time average B_N.
 */

#include <birkhoff/errors.hpp>
#include <birkhoff/summation.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

namespace birkhoff {

enum class WeightKind { ExponentialBump, Uniform, CustomTaper };

/// Unnormalized bump exp(-1/(x(1-x))) on [0,1]; exactly 0 at the endpoints.
inline double eval_bump(double x)
{
    if (!(x >= 0.0 && x <= 1.0))
        throw DomainError("eval_bump: x must lie in [0,1]");
    const double s = x * (1.0 - x);
    if (s < 1e-300)
        return 0.0;
    return std::exp(-1.0 / s);
}

class WeightFunction {
public:
    using Taper = std::function<double(double)>;

    static WeightFunction bump() { return WeightFunction(WeightKind::ExponentialBump, {}, "bump"); }
    static WeightFunction uniform() { return WeightFunction(WeightKind::Uniform, {}, "uniform"); }

    /// A user taper on [0,1]. It must be nonnegative; it need not integrate to 1.
    static WeightFunction custom(Taper taper, std::string name = "custom")
    {
        if (!taper)
            throw ConfigError("custom weight: empty callable");
        return WeightFunction(WeightKind::CustomTaper, std::move(taper), std::move(name));
    }

    WeightKind kind() const noexcept { return kind_; }
    const std::string& name() const noexcept { return name_; }
    bool is_uniform() const noexcept { return kind_ == WeightKind::Uniform; }

    double operator()(double x) const
    {
        if (!(x >= 0.0 && x <= 1.0))
            throw DomainError("weight function evaluated outside [0,1]");
        switch (kind_) {
        case WeightKind::ExponentialBump: return eval_bump(x);
        case WeightKind::Uniform: return 1.0;
        case WeightKind::CustomTaper: break;
        }
        const double v = taper_(x);
        if (!(v >= 0.0) || !std::isfinite(v))
            throw DomainError("custom taper returned a negative or non-finite value");
        return v;
    }

private:
    WeightFunction(WeightKind kind, Taper taper, std::string name)
        : kind_(kind), taper_(std::move(taper)), name_(std::move(name))
    {
    }

    WeightKind kind_;
    Taper taper_;
    std::string name_;
};

/// Taper samples w(n/N), n = 0..N-1, together with their normalization.
class WeightVector {
public:
    WeightVector(std::vector<double> raw, WeightKind kind)
        : raw_(std::move(raw)), kind_(kind)
    {
        if (raw_.size() < 2)
            throw SizeError("weight vector needs at least 2 samples");
        for (double v : raw_)
            if (!(v >= 0.0) || !std::isfinite(v))
                throw DomainError("weight vector entries must be finite and nonnegative");
        alpha_ = pairwise_sum(raw_.size(), [&](std::size_t i) { return raw_[i]; }, 0.0);
        if (!(alpha_ > 0.0))
            throw DegenerateWeightError("weight vector sums to zero");
        normalized_.resize(raw_.size());
        for (std::size_t i = 0; i < raw_.size(); ++i)
            normalized_[i] = raw_[i] / alpha_;
    }

    std::size_t size() const noexcept { return raw_.size(); }
    double alpha() const noexcept { return alpha_; }
    WeightKind kind() const noexcept { return kind_; }
    bool is_uniform() const noexcept { return kind_ == WeightKind::Uniform; }

    std::span<const double> raw() const noexcept { return raw_; }
    std::span<const double> normalized() const noexcept { return normalized_; }

    /// Effective sample size (sum w)^2 / sum w^2.
    double effective_size() const
    {
        const double sq = pairwise_sum(raw_.size(), [&](std::size_t i) { return raw_[i] * raw_[i]; }, 0.0);
        return alpha_ * alpha_ / sq;
    }

private:
    std::vector<double> raw_;
    std::vector<double> normalized_;
    double alpha_ = 0.0;
    WeightKind kind_;
};

/// Samples w at n/N for n = 0..N-1. Since w(0) = 0 for tapers, the first
/// sample always carries zero weight.
inline WeightVector make_weight_vector(std::size_t n, const WeightFunction& w)
{
    if (n < 2)
        throw SizeError("make_weight_vector: N must be at least 2");
    std::vector<double> raw(n);
    const double dn = static_cast<double>(n);
    if (w.kind() == WeightKind::ExponentialBump) {
        // i/N and (N-i)/N from exact integers keep w(n/N) = w(1 - n/N) bitwise.
        for (std::size_t i = 0; i < n; ++i) {
            const double s = (static_cast<double>(i) / dn) * (static_cast<double>(n - i) / dn);
            raw[i] = s < 1e-300 ? 0.0 : std::exp(-1.0 / s);
        }
    } else {
        for (std::size_t i = 0; i < n; ++i)
            raw[i] = w(static_cast<double>(i) / dn);
    }
    return WeightVector(std::move(raw), w.kind());
}

template <class T>
struct AverageResult {
    T value;
    std::size_t n_samples = 0;
    bool weighted = false;
};

namespace detail {

template <class T>
bool all_finite(const T& v)
{
    if constexpr (std::is_arithmetic_v<T>) {
        return std::isfinite(v);
    } else if constexpr (std::is_same_v<T, std::complex<double>>) {
        return std::isfinite(v.real()) && std::isfinite(v.imag());
    } else {
        return v.allFinite();
    }
}

template <class T>
T zero_like(const T& v)
{
    if constexpr (std::is_arithmetic_v<T> || std::is_same_v<T, std::complex<double>>)
        return T{};
    else
        return T::Zero(v.rows(), v.cols());
}

} // namespace detail

/// Time average of `series` under normalized `weights`.
template <class T>
AverageResult<T> birkhoff_average(std::span<const T> series, const WeightVector& weights)
{
    if (series.empty())
        throw SizeError("birkhoff_average: empty series");
    if (series.size() != weights.size())
        throw ShapeError("birkhoff_average: series length " + std::to_string(series.size()) +
                         " != weight length " + std::to_string(weights.size()));
    const auto wn = weights.normalized();
    T value = pairwise_sum(
        series.size(), [&](std::size_t i) -> T { return wn[i] * series[i]; },
        detail::zero_like(series.front()));
    if (!detail::all_finite(value))
        throw NumericalError("birkhoff_average: non-finite result");
    return {std::move(value), series.size(), !weights.is_uniform()};
}

/// Plain arithmetic mean; accepts a single sample.
template <class T>
AverageResult<T> birkhoff_average(std::span<const T> series)
{
    if (series.empty())
        throw SizeError("birkhoff_average: empty series");
    T sum = pairwise_sum(
        series.size(), [&](std::size_t i) -> T { return series[i]; }, detail::zero_like(series.front()));
    T value = sum / static_cast<double>(series.size());
    if (!detail::all_finite(value))
        throw NumericalError("birkhoff_average: non-finite result");
    return {std::move(value), series.size(), false};
}

template <class T>
AverageResult<T> birkhoff_average(const std::vector<T>& series, const WeightVector& weights)
{
    return birkhoff_average(std::span<const T>(series), weights);
}

template <class T>
AverageResult<T> birkhoff_average(const std::vector<T>& series)
{
    return birkhoff_average(std::span<const T>(series));
}

/// Weighted average over the first n samples using w sampled at n/N.
template <class T>
AverageResult<T> birkhoff_average(std::span<const T> series, const WeightFunction& w)
{
    if (w.is_uniform())
        return birkhoff_average(series);
    return birkhoff_average(series, make_weight_vector(series.size(), w));
}

struct ErrorRow {
    std::size_t n = 0;
    double err_unweighted = 0.0;
    double err_weighted = 0.0;
};

/**
 * Absolute errors of B_N and WB_N of a scalar (real or complex) series
 * against the weighted average over the first `benchmark_n` samples.
 * Rows come back sorted by N.
 */
template <class T>
std::vector<ErrorRow> convergence_sweep(std::span<const T> series, std::vector<std::size_t> n_values,
                                        std::size_t benchmark_n, const WeightFunction& w)
{
    if (n_values.empty())
        return {};
    std::sort(n_values.begin(), n_values.end());
    n_values.erase(std::unique(n_values.begin(), n_values.end()), n_values.end());
    if (benchmark_n > series.size())
        throw SizeError("convergence_sweep: benchmark N exceeds series length");
    if (n_values.back() > benchmark_n)
        throw SizeError("convergence_sweep: requested N exceeds benchmark N");
    if (n_values.front() < 2)
        throw SizeError("convergence_sweep: N must be at least 2");

    const T reference = birkhoff_average(series.first(benchmark_n), w).value;
    std::vector<ErrorRow> rows;
    rows.reserve(n_values.size());
    for (std::size_t n : n_values) {
        const auto window = series.first(n);
        const T unw = birkhoff_average(window).value;
        const T wtd = birkhoff_average(window, w).value;
        rows.push_back({n, std::abs(unw - reference), std::abs(wtd - reference)});
    }
    return rows;
}

/// Sweep on an orbit: `observable` maps the state at step n to a scalar.
template <class Orbit, class Observable>
std::vector<ErrorRow> convergence_sweep(const Orbit& orbit, Observable&& observable,
                                        std::vector<std::size_t> n_values, std::size_t benchmark_n,
                                        const WeightFunction& w)
{
    if (benchmark_n > orbit.length())
        throw SizeError("convergence_sweep: benchmark N exceeds orbit length");
    using Value = std::decay_t<decltype(observable(orbit.state(0)))>;
    std::vector<Value> series(benchmark_n);
    for (std::size_t i = 0; i < benchmark_n; ++i)
        series[i] = observable(orbit.state(i));
    return convergence_sweep(std::span<const Value>(series), std::move(n_values), benchmark_n, w);
}

} // namespace birkhoff
