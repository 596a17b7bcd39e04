// Identifies x'' = -x from sampled positions of a harmonic oscillator, with
// and without measurement noise.
#include <birkhoff/birkhoff.hpp>

#include <cstdio>

using namespace birkhoff;

int main()
{
    for (double snr : {0.0, 10.0}) {
        HarmonicParams hp;
        hp.noise_sigma = snr > 0 ? harmonic_noise_for_snr(hp.amplitude, hp.k, snr) : 0.0;
        hp.seed = 1;
        std::printf("snr = %s\n", snr > 0 ? "10" : "inf");
        for (const auto& r : sindy_error_sweep(hp, {1000, 5000, 10000}, {1e-2}, 5, WeightFunction::bump()))
            std::printf("  N=%6zu %-8s error %.3e\n", r.n, to_string(r.method), r.coeff_error);
    }
}
