#pragma once

/** @file
 * Trajectory generators used as ground-truth data sources.
 *
 * States are stored column-wise: `Trajectory::states` is d x T, column n is
 * X_n. Every generator is a pure function of its parameters and seed.
 */

#include <birkhoff/errors.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>

namespace birkhoff {

/// Floored modulo in [0, m).
inline double wrap(double x, double m)
{
    double r = x - m * std::floor(x / m);
    if (r >= m)
        r -= m;
    if (r < 0.0)
        r += m;
    if (r >= m) // x/m rounded across an integer
        r = 0.0;
    return r;
}

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace detail

/// Seeded random stream. Child streams are derived from a label, so adding
/// a new consumer never shifts the draws of an existing one.
class RngStream {
public:
    static constexpr std::string_view algorithm = "mt19937_64+splitmix64";

    explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(detail::splitmix64(seed)) {}

    std::uint64_t seed() const noexcept { return seed_; }

    RngStream derive(std::string_view label) const
    {
        return RngStream(detail::splitmix64(seed_ ^ detail::fnv1a(label)));
    }

    RngStream derive(std::uint64_t index) const
    {
        return RngStream(detail::splitmix64(seed_ + 0x632be59bd9b4e019ULL * (index + 1)));
    }

    double uniform(double lo = 0.0, double hi = 1.0)
    {
        return std::uniform_real_distribution<double>(lo, hi)(engine_);
    }

    double normal(double mean = 0.0, double sd = 1.0)
    {
        return std::normal_distribution<double>(mean, sd)(engine_);
    }

    std::uint64_t next() { return engine_(); }

    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

struct Trajectory {
    Eigen::MatrixXd states; ///< d x T, one column per time step
    double dt = 1.0;
    std::optional<std::uint64_t> seed;
    std::string system;
    std::string params; ///< free-form "key=value ..." description

    Eigen::Index dim() const noexcept { return states.rows(); }
    std::size_t length() const noexcept { return static_cast<std::size_t>(states.cols()); }
    auto state(std::size_t n) const { return states.col(static_cast<Eigen::Index>(n)); }

    /// Checks the structural invariants; throws on violation.
    void validate() const
    {
        if (states.rows() < 1)
            throw ShapeError("trajectory: state dimension must be at least 1");
        if (states.cols() < 2)
            throw SizeError("trajectory: need at least 2 states");
        if (!states.allFinite())
            throw NumericalError("trajectory: non-finite state");
    }

    /// The first n states as a new trajectory.
    Trajectory head(std::size_t n) const
    {
        if (n > length())
            throw SizeError("trajectory: head longer than trajectory");
        Trajectory t = *this;
        t.states = states.leftCols(static_cast<Eigen::Index>(n));
        return t;
    }
};

/// x_{n+1} = 3.5(1 + eps cos(2 pi theta_n)) x_n (1 - x_n),  theta_{n+1} = theta_n + sqrt(2) mod 1.
inline Trajectory driven_logistic(double eps, double x0, double theta0, std::size_t n)
{
    if (!(eps >= 0.0) || !std::isfinite(eps))
        throw ConfigError("driven_logistic: eps must be finite and >= 0");
    if (!(x0 >= 0.0 && x0 <= 1.0))
        throw ConfigError("driven_logistic: x0 must lie in [0,1]");
    if (!(theta0 >= 0.0 && theta0 < 1.0))
        throw ConfigError("driven_logistic: theta0 must lie in [0,1)");
    if (n < 2)
        throw SizeError("driven_logistic: N must be at least 2");

    Trajectory t;
    t.states.resize(2, static_cast<Eigen::Index>(n));
    t.system = "driven-logistic";
    t.params = "eps=" + std::to_string(eps) + " x0=" + std::to_string(x0) + " theta0=" + std::to_string(theta0);
    double x = x0;
    double theta = theta0;
    constexpr double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t i = 0; i < n; ++i) {
        t.states(0, static_cast<Eigen::Index>(i)) = x;
        t.states(1, static_cast<Eigen::Index>(i)) = theta;
        x = 3.5 * (1.0 + eps * std::cos(two_pi * theta)) * x * (1.0 - x);
        theta = wrap(theta + std::numbers::sqrt2, 1.0);
    }
    if (!t.states.allFinite())
        throw NumericalError("driven_logistic: orbit diverged");
    return t;
}

/// Kick strength of the standard map: fixed, or redrawn uniformly each step.
struct LambdaMode {
    enum class Kind { Fixed, UniformResample };
    Kind kind = Kind::Fixed;
    double value = 0.0;
    double lo = 0.0;
    double hi = 5.0;

    static LambdaMode fixed(double lambda) { return {Kind::Fixed, lambda, lambda, lambda}; }
    static LambdaMode uniform_resample(double lo = 0.0, double hi = 5.0) { return {Kind::UniformResample, 0.0, lo, hi}; }

    void validate() const
    {
        if (kind == Kind::Fixed && (!std::isfinite(value) || value < 0.0))
            throw ConfigError("standard_map: lambda must be finite and >= 0");
        if (kind == Kind::UniformResample && (!std::isfinite(lo) || !std::isfinite(hi) || lo < 0.0 || hi < lo))
            throw ConfigError("standard_map: resample interval must satisfy 0 <= lo <= hi");
    }
};

/**
 * Standard map on the torus:
 *     p_{n+1} = p_n + lambda_n sin(theta_n)   mod 2 pi
 *     theta_{n+1} = theta_n + p_{n+1}           mod 2 pi
 * States are (p, theta). In resample mode one uniform draw per step.
 */
inline Trajectory standard_map(const LambdaMode& mode, double p0, double theta0, std::size_t n, RngStream rng)
{
    mode.validate();
    if (n < 2)
        throw SizeError("standard_map: N must be at least 2");
    constexpr double two_pi = 2.0 * std::numbers::pi;
    Trajectory t;
    t.states.resize(2, static_cast<Eigen::Index>(n));
    t.system = "standard-map";
    t.params = mode.kind == LambdaMode::Kind::Fixed ? "lambda=" + std::to_string(mode.value)
                                                    : "lambda~U[" + std::to_string(mode.lo) + "," + std::to_string(mode.hi) + "]";
    if (mode.kind == LambdaMode::Kind::UniformResample)
        t.seed = rng.seed();
    double p = wrap(p0, two_pi);
    double theta = wrap(theta0, two_pi);
    for (std::size_t i = 0; i < n; ++i) {
        t.states(0, static_cast<Eigen::Index>(i)) = p;
        t.states(1, static_cast<Eigen::Index>(i)) = theta;
        const double lambda = mode.kind == LambdaMode::Kind::Fixed ? mode.value : rng.uniform(mode.lo, mode.hi);
        p = wrap(p + lambda * std::sin(theta), two_pi);
        theta = wrap(theta + p, two_pi);
    }
    return t;
}

/// Pure rotation theta_{n+1} = theta_n + alpha mod 2 pi, one coordinate.
inline Trajectory circle_rotation(double alpha, double theta0, std::size_t n)
{
    if (n < 2)
        throw SizeError("circle_rotation: N must be at least 2");
    constexpr double two_pi = 2.0 * std::numbers::pi;
    Trajectory t;
    t.states.resize(1, static_cast<Eigen::Index>(n));
    t.system = "rotation";
    t.params = "alpha=" + std::to_string(alpha);
    double theta = wrap(theta0, two_pi);
    const double step = wrap(alpha, two_pi);
    for (std::size_t i = 0; i < n; ++i) {
        t.states(0, static_cast<Eigen::Index>(i)) = theta;
        theta = wrap(theta + step, two_pi);
    }
    return t;
}

/// x_{n+1} = A x_n.
inline Trajectory linear_map(const Eigen::MatrixXd& a, const Eigen::VectorXd& x0, std::size_t n)
{
    if (a.rows() != a.cols() || a.rows() != x0.size())
        throw ShapeError("linear_map: A must be square and match x0");
    if (n < 2)
        throw SizeError("linear_map: N must be at least 2");
    Trajectory t;
    t.states.resize(a.rows(), static_cast<Eigen::Index>(n));
    t.system = "linear";
    t.params = "dim=" + std::to_string(a.rows());
    t.states.col(0) = x0;
    for (Eigen::Index i = 1; i < static_cast<Eigen::Index>(n); ++i)
        t.states.col(i) = a * t.states.col(i - 1);
    return t;
}

/// Positions of a noisy harmonic oscillator and their central second differences.
struct HarmonicSeries {
    Eigen::VectorXd positions;         ///< X_0 .. X_{N+1}
    Eigen::VectorXd interior;          ///< X_1 .. X_N, aligned with the derivative
    Eigen::VectorXd second_derivative; ///< (X_{n+1} + X_{n-1} - 2 X_n) / k^2, n = 1..N
    double step = 0.0;
};

/**
 * X_n = A cos(n k + phase) + N(0, sigma^2) for n = 0..N+1; the second
 * difference is returned on the N interior samples n = 1..N.
 */
inline HarmonicSeries harmonic_series(double amplitude, double phase, double k, std::size_t n, double noise_sigma,
                                      RngStream rng)
{
    if (n < 3)
        throw SizeError("harmonic_series: N must be at least 3");
    if (!(k > 0.0))
        throw ConfigError("harmonic_series: step k must be positive");
    if (!(noise_sigma >= 0.0))
        throw ConfigError("harmonic_series: noise sigma must be >= 0");
    const auto total = static_cast<Eigen::Index>(n + 2);
    HarmonicSeries h;
    h.step = k;
    h.positions.resize(total);
    for (Eigen::Index i = 0; i < total; ++i) {
        h.positions(i) = amplitude * std::cos(static_cast<double>(i) * k + phase);
        if (noise_sigma > 0.0)
            h.positions(i) += rng.normal(0.0, noise_sigma);
    }
    const auto m = static_cast<Eigen::Index>(n);
    h.interior = h.positions.segment(1, m);
    h.second_derivative.resize(m);
    const double inv_k2 = 1.0 / (k * k);
    for (Eigen::Index i = 0; i < m; ++i)
        h.second_derivative(i) = (h.positions(i + 2) + h.positions(i) - 2.0 * h.positions(i + 1)) * inv_k2;
    return h;
}

/// Noise level on positions that gives the second-difference estimate a
/// signal-to-noise ratio `snr` (rms of the true derivative over noise std).
inline double harmonic_noise_for_snr(double amplitude, double k, double snr)
{
    const double signal_rms = std::abs(amplitude) * (2.0 - 2.0 * std::cos(k)) / (k * k) / std::numbers::sqrt2;
    return signal_rms * k * k / (snr * std::sqrt(6.0));
}

/**
 * Ornstein-Uhlenbeck path dx = -theta x dt + sigma dB via Euler-Maruyama with
 * `substeps` internal steps per recorded sample.
 */
inline Trajectory ou_sample(double theta_rate, double diffusion, double x0, double dt, std::size_t n,
                            std::size_t substeps, RngStream rng)
{
    if (!(theta_rate > 0.0) || !(diffusion > 0.0) || !(dt > 0.0))
        throw ConfigError("ou_sample: rate, diffusion and dt must be positive");
    if (substeps < 1)
        throw ConfigError("ou_sample: substeps must be >= 1");
    if (n < 2)
        throw SizeError("ou_sample: N must be at least 2");
    const double h = dt / static_cast<double>(substeps);
    if (!(1.0 - theta_rate * h > 0.0))
        throw ConfigError("ou_sample: step too large for Euler-Maruyama stability");
    Trajectory t;
    t.states.resize(1, static_cast<Eigen::Index>(n));
    t.dt = dt;
    t.seed = rng.seed();
    t.system = "ou";
    t.params = "theta=" + std::to_string(theta_rate) + " sigma=" + std::to_string(diffusion);
    const double noise = diffusion * std::sqrt(h);
    double x = x0;
    for (std::size_t i = 0; i < n; ++i) {
        t.states(0, static_cast<Eigen::Index>(i)) = x;
        for (std::size_t s = 0; s < substeps; ++s)
            x += -theta_rate * x * h + noise * rng.normal();
    }
    return t;
}

/// Parameters of the synthetic two-frequency travelling-wave field.
struct FieldParams {
    Eigen::Index dim = 20;
    double omega1 = 2.0 * std::numbers::pi / 17.0;
    double omega2 = 2.0 * std::numbers::pi / 17.0 * (std::numbers::sqrt2 - 1.0) * 2.0;
    double sharpness = 1.0;
    double secondary = 0.5;
};

/**
 * Quasiperiodic field on `dim` spatial points: at location s_i = 2 pi i / dim,
 *     X_n[i] = exp(b cos(n w1 - s_i)) + c exp(b cos(n w2 - 2 s_i + 1)).
 * Every component is analytic in the two phases, so it carries infinitely
 * many harmonics and no finite linear model reproduces it exactly.
 */
inline Trajectory quasiperiodic_field(const FieldParams& p, std::size_t n)
{
    if (p.dim < 1)
        throw ConfigError("quasiperiodic_field: dim must be >= 1");
    if (n < 2)
        throw SizeError("quasiperiodic_field: N must be at least 2");
    constexpr double two_pi = 2.0 * std::numbers::pi;
    Trajectory t;
    t.states.resize(p.dim, static_cast<Eigen::Index>(n));
    t.system = "qp-field";
    t.params = "dim=" + std::to_string(p.dim);
    for (std::size_t k = 0; k < n; ++k) {
        const double a = wrap(static_cast<double>(k) * p.omega1, two_pi);
        const double b = wrap(static_cast<double>(k) * p.omega2, two_pi);
        for (Eigen::Index i = 0; i < p.dim; ++i) {
            const double s = two_pi * static_cast<double>(i) / static_cast<double>(p.dim);
            t.states(i, static_cast<Eigen::Index>(k)) =
                std::exp(p.sharpness * std::cos(a - s)) + p.secondary * std::exp(p.sharpness * std::cos(b - 2.0 * s + 1.0));
        }
    }
    return t;
}

} // namespace birkhoff
