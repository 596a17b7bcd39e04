// Convergence of B_N and WB_N along the driven logistic map for the three
// regimes eps = 0, 0.01, 0.1.
#include <birkhoff/birkhoff.hpp>

#include <cstdio>

using namespace birkhoff;

int main()
{
    const std::size_t bench = 1'000'000;
    for (double eps : {0.0, 0.01, 0.1}) {
        const auto t = driven_logistic(eps, 0.25, 0.0, bench);
        std::vector<double> x(t.length());
        for (std::size_t i = 0; i < x.size(); ++i)
            x[i] = t.states(0, static_cast<Eigen::Index>(i));
        const auto rows = convergence_sweep(std::span<const double>(x), {1000, 10000, 100000}, bench, WeightFunction::bump());
        std::printf("eps = %.2f\n%10s %14s %14s\n", eps, "N", "unweighted", "weighted");
        for (const auto& r : rows)
            std::printf("%10zu %14.3e %14.3e\n", r.n, r.err_unweighted, r.err_weighted);
    }
}
