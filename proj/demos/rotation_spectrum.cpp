// Spectral density of e^{i theta} under a rotation and under the chaotic
// standard map; prints the prominent peaks.
#include <birkhoff/birkhoff.hpp>

#include <cmath>
#include <cstdio>
#include <numbers>

using namespace birkhoff;

namespace {

void report(const char* label, const std::vector<Complex>& z)
{
    const auto acs = autocorrelations(z, 100, WeightFunction::bump());
    const SpectralDensity d(acs, FilterFunction::cosine());
    std::printf("%s: integral %.6f (2 pi a_0 = %.6f)\n", label, d.integral(4096), 2 * std::numbers::pi * acs.at(0).real());
    for (const auto& p : peak_report(d))
        std::printf("  peak theta=%+.5f height=%.3f prominence=%.3f\n", p.theta, p.height, p.prominence);
}

} // namespace

int main()
{
    const double alpha = std::fmod(std::numbers::sqrt2 * 2 * std::numbers::pi, 2 * std::numbers::pi);
    const auto rot = circle_rotation(alpha, 0.0, 100'000);
    std::vector<Complex> z(rot.length());
    for (std::size_t i = 0; i < z.size(); ++i)
        z[i] = std::polar(1.0, rot.states(0, static_cast<Eigen::Index>(i)));
    report("rotation", z);
    std::printf("  expected Dirac at %+.5f\n", std::remainder(alpha, 2 * std::numbers::pi));

    const auto sm = standard_map(LambdaMode::fixed(5.0), 1.0, 2.0, 100'000, RngStream(0));
    for (std::size_t i = 0; i < z.size(); ++i)
        z[i] = std::polar(1.0, sm.states(1, static_cast<Eigen::Index>(i)));
    report("standard map, lambda = 5", z);
}
