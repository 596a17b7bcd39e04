#include "acceptance.hpp"

#include "cli.hpp"

#include <birkhoff/birkhoff.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <ostream>
#include <sstream>

namespace birkhoff::acceptance {
namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

struct Outcome {
    Status status = Status::Fail;
    std::string detail;
};

Outcome verdict(bool ok, std::string detail) { return {ok ? Status::Pass : Status::Fail, std::move(detail)}; }

std::vector<double> first_coordinate(const Trajectory& t)
{
    std::vector<double> x(t.length());
    for (std::size_t i = 0; i < x.size(); ++i)
        x[i] = t.states(0, static_cast<Eigen::Index>(i));
    return x;
}

std::vector<ErrorRow> logistic_errors(double eps, std::vector<std::size_t> ns)
{
    const auto t = driven_logistic(eps, 0.25, 0.0, 1'000'000);
    const auto x = first_coordinate(t);
    return convergence_sweep(std::span<const double>(x), std::move(ns), 1'000'000, WeightFunction::bump());
}

Outcome c1(const Options&)
{
    const auto r = logistic_errors(0.0, {100'000}).front();
    const bool ok = r.err_weighted < 1e-12 && r.err_unweighted >= 1e-8 && r.err_unweighted <= 1e-2;
    return verdict(ok, fmt("N=1e5 weighted=%.3e (<1e-12) unweighted=%.3e (in [1e-8,1e-2])", r.err_weighted,
                           r.err_unweighted));
}

Outcome c2(const Options&)
{
    const auto r = logistic_errors(0.01, {100'000}).front();
    const bool ok = r.err_weighted < 1e-10 && r.err_unweighted >= 1e4 * r.err_weighted;
    return verdict(ok, fmt("N=1e5 weighted=%.3e (<1e-10) unweighted=%.3e (>=1e4 x weighted)", r.err_weighted,
                           r.err_unweighted));
}

Outcome c3(const Options&)
{
    const auto rows = logistic_errors(0.1, {1000, 10'000, 100'000});
    bool ok = true;
    std::string d;
    for (const auto& r : rows) {
        const double hi = std::max(r.err_weighted, r.err_unweighted);
        const double lo = std::min(r.err_weighted, r.err_unweighted);
        const double ratio = lo > 0.0 ? hi / lo : INFINITY;
        ok = ok && ratio <= 10.0;
        d += fmt("N=%zu ratio=%.2f ", r.n, ratio);
    }
    return verdict(ok, d + "(each <= 10)");
}

Outcome c4(const Options& opt)
{
    RngStream rng = RngStream(opt.seed).derive("acceptance_linear3");
    Eigen::MatrixXd s = Eigen::MatrixXd::Identity(3, 3);
    for (Eigen::Index i = 0; i < 3; ++i)
        for (Eigen::Index j = 0; j < 3; ++j)
            s(i, j) += 0.3 * rng.normal();
    Eigen::MatrixXd core = Eigen::MatrixXd::Zero(3, 3);
    const double w = 0.7;
    core << std::cos(w), -std::sin(w), 0, std::sin(w), std::cos(w), 0, 0, 0, 0.995;
    const Eigen::MatrixXd a = s * core * s.inverse();
    Eigen::VectorXd x0(3);
    x0 << 1.0, -0.5, 0.8;
    const auto t = linear_map(a, x0, 1001);
    double worst = 0.0;
    for (std::size_t n : {10u, 30u, 100u, 1000u}) {
        const auto pair = SnapshotPair::from_trajectory(t, n);
        worst = std::max(worst, relative_frobenius(dmd(pair).a, a));
        worst = std::max(worst, relative_frobenius(dmd(pair, WeightFunction::bump()).a, a));
    }
    return verdict(worst < 1e-9, fmt("N in {10,30,100,1000}: max relative error %.3e (<1e-9)", worst));
}

Outcome c5(const Options& opt)
{
    FieldParams fp;
    const auto full = quasiperiodic_field(fp, 1001);
    const auto basis = random_projection(fp.dim, 11, RngStream(opt.seed).derive("acceptance_projection").next());
    const auto t = project(full, basis);
    std::vector<std::size_t> ns;
    for (std::size_t n = 10; n <= 500; n += 10)
        ns.push_back(n);
    const auto rows = dmd_error_sweep(t, ns, 1000, WeightFunction::bump());
    const auto& last = rows.back();
    const bool ok = last.relerr_matrix_w * 100.0 <= last.relerr_matrix_unw;
    return verdict(ok, fmt("N=500 weighted=%.3e unweighted=%.3e ratio=%.1f (>=100)", last.relerr_matrix_w,
                           last.relerr_matrix_unw, last.relerr_matrix_unw / last.relerr_matrix_w));
}

struct EdmdMeans {
    double unw = 0.0;
    double w = 0.0;
};

EdmdMeans edmd_means(const LambdaMode& mode, std::size_t n, std::size_t bench, int ics, std::uint64_t seed,
                     const std::string& label)
{
    const auto dict = Dictionary::fourier({1, 1});
    RngStream root = RngStream(seed).derive(label);
    RngStream icr = root.derive("ics");
    EdmdMeans m;
    for (int i = 0; i < ics; ++i) {
        const double p0 = icr.uniform(0.0, two_pi);
        const double th0 = icr.uniform(0.0, two_pi);
        const auto t = standard_map(mode, p0, th0, bench + 1, root.derive("map").derive(static_cast<std::uint64_t>(i)));
        const auto r = edmd_error_sweep(t, dict, dict, {n}, bench, WeightFunction::bump()).front();
        m.unw += r.relerr_unw / ics;
        m.w += r.relerr_w / ics;
    }
    return m;
}

Outcome c6(const Options& opt)
{
    const auto m = edmd_means(LambdaMode::fixed(0.25), 10'000, 1'000'000, 20, opt.seed, "acceptance_edmd_kam");
    return verdict(m.unw >= 10.0 * m.w, fmt("20 ICs, N=1e4: mean weighted=%.3e unweighted=%.3e ratio=%.1f (>=10)", m.w,
                                            m.unw, m.unw / m.w));
}

Outcome c7(const Options& opt)
{
    const auto a = edmd_means(LambdaMode::fixed(5.0), 100'000, 1'000'000, 20, opt.seed, "acceptance_edmd_chaos");
    const auto b = edmd_means(LambdaMode::uniform_resample(0.0, 5.0), 100'000, 1'000'000, 20, opt.seed,
                              "acceptance_edmd_random");
    auto ratio = [](const EdmdMeans& m) { return std::max(m.unw, m.w) / std::min(m.unw, m.w); };
    const bool ok = ratio(a) <= 3.0 && ratio(b) <= 3.0;
    return verdict(ok, fmt("N=1e5 lambda=5: w=%.3e u=%.3e ratio=%.2f; lambda~U[0,5]: w=%.3e u=%.3e ratio=%.2f (<=3)", a.w,
                           a.unw, ratio(a), b.w, b.unw, ratio(b)));
}

Outcome c8(const Options& opt)
{
    HarmonicParams hp;
    const auto clean = sindy_error_sweep(hp, {10'000}, {1e-2}, 5, WeightFunction::bump());
    double clean_err = 0.0;
    for (const auto& r : clean)
        if (r.method == SindyMethod::WtSINDy)
            clean_err = r.coeff_error;
    hp.noise_sigma = harmonic_noise_for_snr(hp.amplitude, hp.k, 10.0);
    hp.seed = RngStream(opt.seed).derive("acceptance_sindy").next();
    const auto noisy = sindy_error_sweep(hp, {5000}, {1e-2}, 5, WeightFunction::bump());
    double ls = 0, s = 0, ws = 0;
    for (const auto& r : noisy) {
        if (r.method == SindyMethod::LS)
            ls = r.coeff_error;
        else if (r.method == SindyMethod::SINDy)
            s = r.coeff_error;
        else if (r.method == SindyMethod::WtSINDy)
            ws = r.coeff_error;
    }
    const bool ok = clean_err < 1e-3 && ws <= s && ls >= 5.0 * s && ls >= 5.0 * ws;
    return verdict(ok, fmt("noiseless wtSINDy=%.3e (<1e-3); noisy N=5000 LS=%.3e SINDy=%.3e wtSINDy=%.3e "
                           "(wtSINDy<=SINDy, LS>=5x both)",
                           clean_err, ls, s, ws));
}

Outcome c9(const Options&)
{
    const double alpha = std::fmod(std::numbers::sqrt2 * two_pi, two_pi);
    const auto t = circle_rotation(alpha, 0.0, 100'000);
    std::vector<Complex> series(t.length());
    for (std::size_t i = 0; i < series.size(); ++i)
        series[i] = std::polar(1.0, t.states(0, static_cast<Eigen::Index>(i)));
    const auto acs = autocorrelations(series, 100, WeightFunction::bump(), true);
    double err = 0.0;
    for (int n = -100; n <= 100; ++n)
        err = std::max(err, std::abs(acs.at(n) - std::polar(1.0, -n * alpha) / two_pi));
    const SpectralDensity dens(acs, FilterFunction::cosine());
    const auto grid = theta_grid(4096);
    const auto v = dens.eval_grid(grid);
    const double peak = grid[static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin())];
    const double dirac = std::remainder(alpha, two_pi);
    const double dist = std::abs(std::remainder(peak - dirac, two_pi));
    const double step = two_pi / 4096.0;
    const double integral_err = std::abs(dens.integral(4096) - two_pi * acs.at(0).real());
    const bool ok = err < 1e-8 && dist <= step && integral_err < 1e-6;
    return verdict(ok, fmt("max|a_n - e^{-i n alpha}/2pi|=%.3e (<1e-8); argmax %.6f vs %.6f (|d|=%.2e <= step %.2e); "
                           "integral error %.2e (<1e-6)",
                           err, peak, dirac, dist, step, integral_err));
}

Outcome c10(const Options& opt)
{
    const double alpha = std::fmod(std::numbers::sqrt2 * two_pi, two_pi);
    const auto rot = circle_rotation(alpha, 0.3, 10'001);
    const auto d1 = Dictionary::fourier({1});
    const auto m1 = build_dictionary_matrices(rot, d1, d1);
    const auto r = mpedmd(m1, WeightFunction::bump());
    ComplexVector expected(3);
    expected << std::polar(1.0, -alpha), Complex(1.0, 0.0), std::polar(1.0, alpha);
    double eig_err = 0.0;
    for (Eigen::Index i = 0; i < 3; ++i) {
        double best = INFINITY;
        for (Eigen::Index j = 0; j < 3; ++j)
            best = std::min(best, std::abs(r.eigenvalues(i) - expected(j)));
        eig_err = std::max(eig_err, best);
    }
    double resid = unitarity_residual(r.k, r.gram);
    const auto d2 = Dictionary::fourier({1, 1});
    RngStream rng = RngStream(opt.seed).derive("acceptance_mpedmd");
    for (const auto& mode : {LambdaMode::fixed(0.25), LambdaMode::fixed(5.0), LambdaMode::uniform_resample()}) {
        const auto t = standard_map(mode, rng.uniform(0.0, two_pi), rng.uniform(0.0, two_pi), 10'001, rng.derive("map"));
        const auto m = build_dictionary_matrices(t, d2, d2);
        for (const auto& w : {WeightFunction::bump(), WeightFunction::uniform()}) {
            const auto rr = mpedmd(m, w);
            resid = std::max(resid, unitarity_residual(rr.k, rr.gram));
        }
    }
    resid = std::max(resid, unitarity_residual(mpedmd(m1, WeightFunction::uniform()).k,
                                               mpedmd(m1, WeightFunction::uniform()).gram));
    const bool ok = eig_err < 1e-6 && resid < 1e-9;
    return verdict(ok, fmt("rotation eigenvalue error %.3e (<1e-6); max ||K*GK-G||/||G|| over 7 datasets %.3e (<1e-9)",
                           eig_err, resid));
}

Outcome c11(const Options& opt)
{
    const double tau = 0.1;
    const int leads = 20;
    RngStream root = RngStream(opt.seed).derive("acceptance_ou");
    const auto train = ou_sample(1.0, std::numbers::sqrt2, 0.0, tau, 21'000, 20, root.derive("train"));
    const RealMatrix pts = train.states.rightCols(20'000).transpose();
    const auto basis = diffusion_basis(pts, 10, BasisOptions{}, root.derive("basis"));
    const auto au = shift_matrix(basis, WeightFunction::uniform());
    const auto aw = shift_matrix(basis, WeightFunction::bump());
    const Eigen::VectorXd ghat = observable_coefficients(basis, pts.col(0));
    const int starts = 200;
    const auto valid = ou_sample(1.0, std::numbers::sqrt2, 0.0, tau, 1000 + 10 * starts, 20, root.derive("valid"));
    std::vector<double> nu(leads + 1, 0.0), nw(leads + 1, 0.0), den(leads + 1, 0.0);
    for (int s = 0; s < starts; ++s) {
        Eigen::VectorXd x(1);
        x(0) = valid.states(0, 1000 + 10 * s);
        const auto fu = forecast(basis, au, x, leads, ghat);
        const auto fw = forecast(basis, aw, x, leads, ghat);
        for (int k = 1; k <= leads; ++k) {
            const double truth = x(0) * std::exp(-k * tau);
            nu[k] += std::pow(fu.values[k] - truth, 2);
            nw[k] += std::pow(fw.values[k] - truth, 2);
            den[k] += truth * truth;
        }
    }
    double worst_u = 0.0, worst_w = 0.0;
    int first_bad = 0;
    for (int k = 1; k <= leads; ++k) {
        const double eu = std::sqrt(nu[k] / den[k]);
        worst_u = std::max(worst_u, eu);
        worst_w = std::max(worst_w, std::sqrt(nw[k] / den[k]));
        if (eu > 0.1 && first_bad == 0)
            first_bad = k;
    }
    const double mean = pts.col(0).mean();
    return verdict(worst_u <= 0.1,
                   fmt("200 starts, k*tau<=2: max relative L2 error %.3f (<=0.1, first lead over: %d; weighted A %.3f); "
                       "training-sample mean %.4f",
                       worst_u, first_bad, worst_w, mean));
}

std::filesystem::path nino_path(const Options& opt)
{
    if (!opt.nino34_csv.empty())
        return opt.nino34_csv;
    if (const char* env = std::getenv("NINO34_CSV"); env && *env)
        return env;
    return "data/nino34.csv";
}

Outcome c12(const Options& opt)
{
    const auto path = nino_path(opt);
    if (!std::filesystem::exists(path))
        return {Status::Skip, "no Nino-3.4 file at '" + path.string() +
                                  "' (set NINO34_CSV to a year,month,value CSV covering 1920-01..2013-12)"};
    const auto series = io::read_nino34_csv(path);
    NinoOptions no;
    no.seed = opt.seed;
    const auto r = nino34_pipeline(series, no, WeightFunction::bump());
    auto reach = [&](const ForecastSkill& s) {
        for (const auto& row : s.rows)
            if (row.lead <= 7 && row.rmse && *row.rmse >= 0.95 * s.climatology)
                return row.lead;
        return 0;
    };
    const int lu = reach(r.unweighted), lw = reach(r.weighted);
    const auto& cu = r.unweighted.rows[15].correlation;
    const auto& cw = r.weighted.rows[15].correlation;
    const bool ok = lu > 0 && lw > 0 && cu && cw && *cw >= *cu;
    return verdict(ok, fmt("climatology %.3f reached (RMSE >= 0.95 clim) at lead unw=%d w=%d (<=7); lead-16 corr w=%.3f "
                           "unw=%.3f",
                           r.unweighted.climatology, lu, lw, cw.value_or(NAN), cu.value_or(NAN)));
}

bool same_files(const std::filesystem::path& a, const std::filesystem::path& b, std::string& why)
{
    std::vector<std::string> names;
    for (const auto& e : std::filesystem::directory_iterator(a))
        if (e.path().extension() == ".csv")
            names.push_back(e.path().filename().string());
    std::sort(names.begin(), names.end());
    if (names.empty()) {
        why = "no CSV output in " + a.string();
        return false;
    }
    for (const auto& n : names) {
        if (!std::filesystem::exists(b / n) || io::read_file(a / n) != io::read_file(b / n)) {
            why = n + " differs";
            return false;
        }
    }
    return true;
}

Outcome c13(const Options& opt)
{
    std::vector<std::string> failures;
    auto check = [&](bool ok, const std::string& what) {
        if (!ok)
            failures.push_back(what);
    };
    RngStream rng = RngStream(opt.seed).derive("acceptance_properties");

    // weights: unit mass and mirror symmetry
    double mass_err = 0.0, sym_err = 0.0;
    for (std::size_t n : {2u, 3u, 10u, 1001u, 65536u}) {
        const auto w = make_weight_vector(n, WeightFunction::bump());
        double total = 0.0;
        for (double v : w.normalized())
            total += v;
        mass_err = std::max(mass_err, std::abs(total - 1.0));
        const auto raw = w.raw();
        for (std::size_t i = 1; i < n; ++i)
            sym_err = std::max(sym_err, std::abs(raw[i] - raw[n - i]) / std::max(raw[i], 1e-300));
    }
    check(mass_err < 1e-13, fmt("weight mass error %.2e", mass_err));
    check(sym_err < 1e-12, fmt("weight symmetry error %.2e", sym_err));

    // pseudoinverse against an independent complete orthogonal decomposition
    double pinv_err = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto m = static_cast<Eigen::Index>(1 + rng.next() % 6);
        const auto n = static_cast<Eigen::Index>(1 + rng.next() % 6);
        const auto rank = static_cast<Eigen::Index>(1 + rng.next() % static_cast<std::uint64_t>(std::min(m, n)));
        Eigen::MatrixXd l(m, rank), r(rank, n), b(m, 2);
        for (Eigen::Index i = 0; i < l.size(); ++i)
            l.data()[i] = rng.normal();
        for (Eigen::Index i = 0; i < r.size(); ++i)
            r.data()[i] = rng.normal();
        for (Eigen::Index i = 0; i < b.size(); ++i)
            b.data()[i] = rng.normal();
        const Eigen::MatrixXd a = l * r;
        const Eigen::MatrixXd mine = pinv_lstsq_right(a, b, 1e-10).solution;
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
        cod.setThreshold(1e-10);
        const Eigen::MatrixXd ref = cod.pseudoInverse() * b;
        pinv_err = std::max(pinv_err, (mine - ref).norm() / std::max(ref.norm(), 1.0));
    }
    check(pinv_err < 1e-8, fmt("pseudoinverse mismatch %.2e", pinv_err));

    // stlsq fixed point and scaling equivariance
    {
        Eigen::MatrixXd psi(400, 6), targets(2, 400);
        for (Eigen::Index i = 0; i < psi.size(); ++i)
            psi.data()[i] = rng.normal();
        Eigen::MatrixXd xi_true(2, 6);
        xi_true << 1.0, 0.0, -0.5, 0.0, 0.02, 0.0, 0.0, 2.0, 0.0, 0.003, 0.0, -1.0;
        targets = xi_true * psi.transpose();
        for (Eigen::Index i = 0; i < targets.size(); ++i)
            targets.data()[i] += 0.01 * rng.normal();
        const TargetData<double> data{targets, TargetMode::Discrete};
        StlsqOptions o;
        o.eta = 0.05;
        const auto model = stlsq(psi, data, WeightFunction::bump(), o);
        StlsqOptions again = o;
        again.initial_mask = model.active_mask;
        const auto model2 = stlsq(psi, data, WeightFunction::bump(), again);
        check(model2.xi == model.xi && model2.active_mask == model.active_mask, "stlsq fixed point");
        const double c = 3.7;
        StlsqOptions scaled = o;
        scaled.eta = c * o.eta;
        const auto model3 = stlsq(psi, TargetData<double>{c * targets, TargetMode::Discrete}, WeightFunction::bump(), scaled);
        check(model3.active_mask == model.active_mask && (model3.xi - c * model.xi).norm() <= 1e-12 * c * model.xi.norm(),
              "stlsq scaling equivariance");
    }

    // Hermitian autocorrelations
    {
        const auto t = standard_map(LambdaMode::fixed(5.0), 1.0, 2.0, 5000, rng.derive("acf"));
        std::vector<Complex> s(t.length());
        for (std::size_t i = 0; i < s.size(); ++i)
            s[i] = std::polar(1.0, t.states(1, static_cast<Eigen::Index>(i)));
        for (bool weighted : {true, false}) {
            const auto acs = autocorrelations(s, 40, WeightFunction::bump(), weighted);
            bool herm = acs.at(0).imag() == 0.0;
            for (int n = 1; n <= 40; ++n)
                herm = herm && acs.at(-n) == std::conj(acs.at(n));
            check(herm, "autocorrelation Hermitian symmetry");
        }
    }

    // diffusion basis orthonormality
    {
        const auto t = ou_sample(1.0, std::numbers::sqrt2, 0.0, 0.1, 3000, 10, rng.derive("ou"));
        const auto b = diffusion_basis(t.states.transpose(), 8, BasisOptions{}, rng.derive("basis"));
        const double res = orthonormality_residual(b);
        const double const_var = (b.phi().col(0).array() - 1.0).abs().maxCoeff();
        check(res < 1e-6 && const_var < 1e-6, fmt("basis orthonormality %.2e / constant %.2e", res, const_var));
    }

    // seed determinism of full CLI pipelines
    std::size_t pipelines = 0;
    {
        auto scratch = opt.scratch_dir.empty() ? std::filesystem::temp_directory_path() / "birkhoff_acceptance"
                                               : opt.scratch_dir;
        std::filesystem::remove_all(scratch);
        const std::vector<std::vector<std::string>> runs = {
            {"specmeas", "--system", "standard-map", "--lambda", "5", "--N", "20000", "--M", "60"},
            {"sindy", "--snr", "10", "--N", "3000"},
            {"edmd", "--lambda-mode", "uniform", "--N", "2000", "--benchmark-N", "20000", "--sweep", "--ics", "2"},
            {"forecast", "--N-train", "2000", "--starts", "50", "--landmarks", "300"},
            {"average", "--system", "driven-logistic", "--eps", "0.1", "--N", "20000", "--sweep"},
        };
        for (const auto& run : runs) {
            std::string why;
            std::vector<std::filesystem::path> dirs;
            bool ran = true;
            for (int rep = 0; rep < 2; ++rep) {
                const auto dir = scratch / (run.front() + std::to_string(rep));
                std::vector<std::string> args = {"--out", dir.string(), "--seed", std::to_string(opt.seed)};
                args.insert(args.end(), run.begin(), run.end());
                std::ostringstream out, err;
                if (cli::run(args, out, err) != 0) {
                    failures.push_back(run.front() + " pipeline failed: " + err.str());
                    ran = false;
                    break;
                }
                dirs.push_back(dir);
            }
            if (ran) {
                ++pipelines;
                check(same_files(dirs[0], dirs[1], why), run.front() + " rerun not byte-identical: " + why);
            }
        }
        std::filesystem::remove_all(scratch);
    }

    std::string d = fmt("weights mass %.1e sym %.1e; pinv vs COD %.1e; %zu pipelines rerun", mass_err, sym_err, pinv_err,
                        pipelines);
    for (const auto& f : failures)
        d += "; FAILED: " + f;
    return verdict(failures.empty(), d);
}

struct Criterion {
    int id;
    const char* name;
    double budget;
    Outcome (*fn)(const Options&);
};

const Criterion criteria[] = {
    {1, "weighted average, periodic logistic", 5, c1},
    {2, "weighted average, quasiperiodic logistic", 5, c2},
    {3, "weighted average, chaotic parity", 5, c3},
    {4, "DMD exact recovery", 1, c4},
    {5, "wtDMD quasiperiodic sweep", 30, c5},
    {6, "wtEDMD standard map lambda=0.25", 60, c6},
    {7, "EDMD chaotic/stochastic parity", 60, c7},
    {8, "wtSINDy harmonic recovery", 10, c8},
    {9, "spectral measure of a rotation", 10, c9},
    {10, "mpEDMD unitarity", 10, c10},
    {11, "diffusion forecast OU oracle", 120, c11},
    {12, "Nino-3.4 rerun", 60, c12},
    {13, "property suite", 30, c13},
};

} // namespace

std::string format_line(const CriterionResult& r)
{
    return fmt("[%s] %2d %-42s %7.2fs (limit %gs)  %s", to_string(r.status), r.id, r.name.c_str(), r.seconds, r.budget,
               r.detail.c_str());
}

std::vector<CriterionResult> run_all(const Options& opt, std::ostream& log)
{
    std::vector<CriterionResult> out;
    for (const auto& c : criteria) {
        if (!opt.only.empty() && std::find(opt.only.begin(), opt.only.end(), c.id) == opt.only.end())
            continue;
        CriterionResult r;
        r.id = c.id;
        r.name = c.name;
        r.budget = c.budget;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            const auto o = c.fn(opt);
            r.status = o.status;
            r.detail = o.detail;
        } catch (const std::exception& e) {
            r.status = Status::Fail;
            r.detail = std::string("exception: ") + e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (r.status == Status::Pass && r.seconds > r.budget) {
            r.status = Status::Fail;
            r.detail += " [runtime over limit]";
        }
        log << format_line(r) << std::endl;
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace birkhoff::acceptance
