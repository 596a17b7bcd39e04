#include "cli.hpp"

#include "acceptance.hpp"

#include <birkhoff/birkhoff.hpp>

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <type_traits>

namespace birkhoff::cli {
namespace {

namespace fs = std::filesystem;
constexpr double two_pi = 2.0 * std::numbers::pi;

struct Outputs {
    std::vector<std::pair<std::string, std::string>> files;
    void add(std::string name, std::string content) { files.emplace_back(std::move(name), std::move(content)); }
};

struct Context {
    std::uint64_t seed = 0;
    std::ostream& out;
    std::ostream& err;
    RngStream rng(std::string_view label) const { return RngStream(seed).derive(label); }
};

std::string sha256_hex(const std::string& data)
{
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx, data.data(), data.size()) != 1 || EVP_DigestFinal_ex(ctx, md, &len) != 1) {
        EVP_MD_CTX_free(ctx);
        throw IoError("sha256 digest failed");
    }
    EVP_MD_CTX_free(ctx);
    static const char* hex = "0123456789abcdef";
    std::string s;
    for (unsigned int i = 0; i < len; ++i) {
        s += hex[md[i] >> 4];
        s += hex[md[i] & 15];
    }
    return s;
}

std::string utc_now()
{
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void require_file(const std::string& path, const char* what)
{
    if (path.empty())
        return;
    std::error_code ec;
    if (!fs::is_regular_file(path, ec))
        throw IoError(std::string(what) + " '" + path + "' does not exist or is not a regular file");
}

void check_output_dir(const fs::path& dir)
{
    std::error_code ec;
    if (fs::exists(dir, ec)) {
        if (!fs::is_directory(dir, ec))
            throw IoError("output path '" + dir.string() + "' exists and is not a directory");
        return;
    }
    auto parent = fs::absolute(dir, ec).parent_path();
    while (!parent.empty() && !fs::exists(parent, ec))
        parent = parent.parent_path();
    if (!parent.empty() && !fs::is_directory(parent, ec))
        throw IoError("cannot create output directory '" + dir.string() + "'");
}

template <class T>
std::string default_text(const T& v)
{
    if constexpr (std::is_floating_point_v<T>)
        return io::format_double(v);
    else if constexpr (std::is_same_v<T, std::string>)
        return v;
    else if constexpr (std::is_integral_v<T>)
        return std::to_string(v);
    else {
        std::string s;
        for (const auto& x : v)
            s += (s.empty() ? "" : ",") + default_text(x);
        return s;
    }
}

// Defaults are printed at full precision so the effective config reproduces the run.
template <class T>
CLI::Option* opt(CLI::App& app, const std::string& name, T& var, const std::string& desc)
{
    return app.add_option(name, var, desc)->default_str(default_text(var));
}

// Keeps the global keys and the section of the subcommand that ran; unset
// (empty) entries are dropped so the file parses back cleanly.
std::string effective_config(const CLI::App& app, const std::string& sub)
{
    std::istringstream in(app.config_to_str(true, false));
    std::string line, outs;
    const std::string prefix = sub + ".";
    while (std::getline(in, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos || line.compare(eq, std::string::npos, "=\"\"") == 0)
            continue;
        const std::string key = line.substr(0, eq);
        if (key == "config")
            continue;
        if (key.find('.') == std::string::npos || key.rfind(prefix, 0) == 0)
            outs += line + "\n";
    }
    return outs;
}

WeightFunction weight_from(const std::string& name)
{
    if (name == "bump")
        return WeightFunction::bump();
    if (name == "uniform")
        return WeightFunction::uniform();
    throw ConfigError("unknown weight '" + name + "' (expected bump or uniform)");
}

std::vector<std::size_t> sweep_values(std::vector<std::size_t> values, std::size_t n_max, std::size_t n_min,
                                      int per_decade)
{
    if (!values.empty())
        return values;
    std::vector<std::size_t> out;
    const double lo = std::log10(static_cast<double>(std::max<std::size_t>(n_min, 2)));
    const double hi = std::log10(static_cast<double>(n_max));
    const int steps = std::max(1, static_cast<int>(std::ceil((hi - lo) * per_decade)));
    for (int i = 0; i <= steps; ++i) {
        const auto n = static_cast<std::size_t>(std::llround(std::pow(10.0, lo + (hi - lo) * i / steps)));
        if (out.empty() || out.back() != n)
            out.push_back(n);
    }
    return out;
}

std::string complex_matrix_csv(const ComplexMatrix& m)
{
    io::CsvTable t({"row", "col", "re", "im"});
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            t.row().add(static_cast<long long>(i)).add(static_cast<long long>(j)).add(m(i, j).real()).add(m(i, j).imag());
    return t.str();
}

std::string eigen_csv(const ComplexVector& v)
{
    io::CsvTable t({"index", "re", "im", "abs", "arg"});
    for (Eigen::Index i = 0; i < v.size(); ++i)
        t.row().add(static_cast<long long>(i)).add(v(i).real()).add(v(i).imag()).add(std::abs(v(i))).add(std::arg(v(i)));
    return t.str();
}

LambdaMode lambda_mode(const std::string& kind, double lambda, double lo, double hi)
{
    if (kind == "fixed")
        return LambdaMode::fixed(lambda);
    if (kind == "uniform")
        return LambdaMode::uniform_resample(lo, hi);
    throw ConfigError("unknown lambda mode '" + kind + "' (expected fixed or uniform)");
}

// ---------------------------------------------------------------- average

struct AverageOpts {
    std::string system = "driven-logistic";
    std::string input;
    double eps = 0.0;
    double x0 = 0.25;
    double theta0 = 0.0;
    double lambda = 0.25;
    double p0 = 1.0;
    double alpha = std::numbers::sqrt2;
    int coord = 0;
    std::size_t n = 100'000;
    std::size_t benchmark_n = 0;
    bool sweep = false;
    std::vector<std::size_t> n_values;
    std::string weights = "bump";
};

void add_average(CLI::App& app, AverageOpts& o)
{
    opt(app, "--system", o.system, "driven-logistic | standard-map | rotation");
    opt(app, "--input", o.input, "scalar series CSV (replaces --system)");
    opt(app, "--eps", o.eps, "driving amplitude of the logistic map");
    opt(app, "--x0", o.x0, "initial x");
    opt(app, "--theta0", o.theta0, "initial angle");
    opt(app, "--lambda", o.lambda, "standard map parameter");
    opt(app, "--p0", o.p0, "standard map initial momentum");
    opt(app, "--alpha", o.alpha, "rotation angle (radians)");
    opt(app, "--coord", o.coord, "state coordinate used as observable");
    opt(app, "--N", o.n, "trajectory length");
    opt(app, "--benchmark-N", o.benchmark_n, "reference length for --sweep (0: N)");
    app.add_flag("--sweep", o.sweep, "emit the error table against the weighted benchmark");
    app.add_option("--n-values", o.n_values, "sweep lengths (default: 10 per decade from 100)")->delimiter(',');
    opt(app, "--weights", o.weights, "bump | uniform");
}

void run_average(const AverageOpts& o, Context& ctx, Outputs& outs)
{
    const auto w = weight_from(o.weights);
    std::vector<double> x;
    if (!o.input.empty()) {
        x = io::read_scalar_csv(o.input);
    } else {
        Trajectory t;
        if (o.system == "driven-logistic")
            t = driven_logistic(o.eps, o.x0, o.theta0, o.n);
        else if (o.system == "standard-map")
            t = standard_map(LambdaMode::fixed(o.lambda), o.p0, o.theta0, o.n, ctx.rng("average_map"));
        else if (o.system == "rotation")
            t = circle_rotation(o.alpha, o.theta0, o.n);
        else
            throw ConfigError("average: unknown system '" + o.system + "'");
        if (o.coord < 0 || o.coord >= t.dim())
            throw ConfigError("average: --coord outside the state dimension");
        x.resize(t.length());
        for (std::size_t i = 0; i < x.size(); ++i)
            x[i] = t.states(o.coord, static_cast<Eigen::Index>(i));
    }
    const std::span<const double> s(x);
    if (o.sweep) {
        const std::size_t bench = o.benchmark_n ? o.benchmark_n : s.size();
        if (bench > s.size())
            throw SizeError("average: benchmark N exceeds the series length");
        const auto rows = convergence_sweep(s, sweep_values(o.n_values, bench, 100, 10), bench, w);
        io::CsvTable t({"n", "err_unweighted", "err_weighted"});
        for (const auto& r : rows)
            t.row().add(r.n).add(r.err_unweighted).add(r.err_weighted);
        outs.add("average_sweep.csv", t.str());
        ctx.out << "average: " << rows.size() << " sweep rows, benchmark N=" << bench << "\n";
    } else {
        const auto u = birkhoff_average(s).value;
        const auto v = birkhoff_average(s, w).value;
        io::CsvTable t({"n", "unweighted", "weighted"});
        t.row().add(s.size()).add(u).add(v);
        outs.add("average.csv", t.str());
        ctx.out << "average: N=" << s.size() << " unweighted=" << io::format_double(u)
                << " weighted=" << io::format_double(v) << "\n";
    }
}

// ---------------------------------------------------------------- dmd

struct DmdOpts {
    std::string system = "qp-field";
    std::string input;
    int dim = 20;
    int rank = 11;
    std::size_t n = 500;
    std::size_t benchmark_n = 1000;
    bool sweep = false;
    std::vector<std::size_t> n_values;
    std::string weights = "bump";
    std::string formula = "fit-next";
};

void add_dmd(CLI::App& app, DmdOpts& o)
{
    opt(app, "--system", o.system, "qp-field | linear");
    opt(app, "--input", o.input, "trajectory CSV (replaces --system)");
    opt(app, "--dim", o.dim, "field dimension D");
    opt(app, "--rank", o.rank, "random projection rank r (0: none)");
    opt(app, "--N", o.n, "snapshot pairs");
    opt(app, "--benchmark-N", o.benchmark_n, "reference pairs for --sweep");
    app.add_flag("--sweep", o.sweep, "emit the error table against the weighted benchmark");
    app.add_option("--n-values", o.n_values, "sweep sizes (default 10, 20, ..., N)")->delimiter(',');
    opt(app, "--weights", o.weights, "bump | uniform");
    opt(app, "--formula", o.formula, "fit-next | swapped");
}

void run_dmd(const DmdOpts& o, Context& ctx, Outputs& outs)
{
    DmdOptions dopt;
    if (o.formula == "swapped")
        dopt.formula = DmdFormula::SwappedRoles;
    else if (o.formula != "fit-next")
        throw ConfigError("dmd: unknown formula '" + o.formula + "'");
    const std::size_t need = (o.sweep ? std::max(o.benchmark_n, o.n) : o.n) + 1;
    Trajectory t;
    if (!o.input.empty()) {
        t = io::read_trajectory_csv(o.input);
        t.validate();
    } else if (o.system == "qp-field") {
        FieldParams fp;
        fp.dim = o.dim;
        t = quasiperiodic_field(fp, need);
    } else if (o.system == "linear") {
        RngStream rng = ctx.rng("dmd_linear");
        Eigen::MatrixXd a(o.dim, o.dim);
        for (Eigen::Index i = 0; i < a.size(); ++i)
            a.data()[i] = rng.normal() / std::sqrt(static_cast<double>(o.dim));
        Eigen::VectorXd x0(o.dim);
        for (Eigen::Index i = 0; i < x0.size(); ++i)
            x0(i) = rng.normal();
        Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(a).householderQ();
        t = linear_map(q, x0, need);
    } else {
        throw ConfigError("dmd: unknown system '" + o.system + "'");
    }
    if (o.rank > 0 && o.rank < t.dim())
        t = project(t, random_projection(t.dim(), o.rank, ctx.rng("dmd_projection").next()));
    if (o.sweep) {
        std::vector<std::size_t> ns = o.n_values;
        if (ns.empty())
            for (std::size_t n = 10; n <= o.n; n += 10)
                ns.push_back(n);
        const auto rows = dmd_error_sweep(t, ns, o.benchmark_n, WeightFunction::bump(), dopt);
        io::CsvTable tab({"n", "relerr_matrix_unw", "relerr_matrix_w", "relerr_eigs_unw", "relerr_eigs_w"});
        for (const auto& r : rows)
            tab.row().add(r.n).add(r.relerr_matrix_unw).add(r.relerr_matrix_w).add(r.relerr_eigs_unw).add(r.relerr_eigs_w);
        outs.add("dmd_sweep.csv", tab.str());
        ctx.out << "dmd: " << rows.size() << " sweep rows\n";
        return;
    }
    const auto r = dmd(SnapshotPair::from_trajectory(t, o.n), weight_from(o.weights), dopt);
    outs.add("dmd_matrix.csv", complex_matrix_csv(r.a.cast<std::complex<double>>()));
    outs.add("dmd_eigs.csv", eigen_csv(r.eigenvalues));
    ctx.out << "dmd: " << r.a.rows() << "x" << r.a.cols() << " operator from N=" << r.n_used << " pairs\n";
}

// ---------------------------------------------------------------- edmd / mpedmd

struct EdmdOpts {
    std::string input;
    std::string lambda_mode = "fixed";
    double lambda = 0.25;
    double lambda_lo = 0.0;
    double lambda_hi = 5.0;
    int kmax = 1;
    std::size_t n = 10'000;
    std::size_t benchmark_n = 100'000;
    int ics = 1;
    double p0 = 1.0;
    double theta0 = 2.0;
    bool sweep = false;
    std::vector<std::size_t> n_values;
    std::string weights = "bump";
};

void add_edmd(CLI::App& app, EdmdOpts& o)
{
    opt(app, "--input", o.input, "trajectory CSV on the torus (replaces the standard map)");
    opt(app, "--lambda-mode", o.lambda_mode, "fixed | uniform");
    opt(app, "--lambda", o.lambda, "standard map parameter (fixed mode)");
    opt(app, "--lambda-lo", o.lambda_lo, "resample interval start");
    opt(app, "--lambda-hi", o.lambda_hi, "resample interval end");
    opt(app, "--kmax", o.kmax, "Fourier modes per coordinate");
    opt(app, "--N", o.n, "snapshot pairs");
    opt(app, "--benchmark-N", o.benchmark_n, "reference pairs for --sweep");
    opt(app, "--ics", o.ics, "random initial conditions for --sweep");
    opt(app, "--p0", o.p0, "initial momentum (single run)");
    opt(app, "--theta0", o.theta0, "initial angle (single run)");
    app.add_flag("--sweep", o.sweep, "emit the error table against the weighted benchmark");
    app.add_option("--n-values", o.n_values, "sweep sizes (default 10 per decade up to N)")->delimiter(',');
    opt(app, "--weights", o.weights, "bump | uniform");
}

void run_edmd(const EdmdOpts& o, Context& ctx, Outputs& outs)
{
    const auto mode = lambda_mode(o.lambda_mode, o.lambda, o.lambda_lo, o.lambda_hi);
    if (o.kmax < 0)
        throw ConfigError("edmd: kmax must be >= 0");
    const auto dict = Dictionary::fourier({o.kmax, o.kmax});
    if (o.sweep) {
        if (o.ics < 1)
            throw ConfigError("edmd: --ics must be >= 1");
        const auto ns = sweep_values(o.n_values, o.n, 100, 4);
        RngStream icr = ctx.rng("edmd_ics");
        io::CsvTable tab({"ic", "p0", "theta0", "n", "relerr_unw", "relerr_w"});
        std::map<std::size_t, std::pair<double, double>> mean;
        for (int i = 0; i < o.ics; ++i) {
            const double p0 = icr.uniform(0.0, two_pi), th0 = icr.uniform(0.0, two_pi);
            const auto t = standard_map(mode, p0, th0, o.benchmark_n + 1,
                                        ctx.rng("edmd_map").derive(static_cast<std::uint64_t>(i)));
            for (const auto& r : edmd_error_sweep(t, dict, dict, ns, o.benchmark_n, WeightFunction::bump())) {
                tab.row().add(i).add(p0).add(th0).add(r.n).add(r.relerr_unw).add(r.relerr_w);
                mean[r.n].first += r.relerr_unw / o.ics;
                mean[r.n].second += r.relerr_w / o.ics;
            }
        }
        io::CsvTable m({"n", "mean_relerr_unw", "mean_relerr_w"});
        for (const auto& [n, v] : mean)
            m.row().add(n).add(v.first).add(v.second);
        outs.add("edmd_sweep.csv", tab.str());
        outs.add("edmd_sweep_mean.csv", m.str());
        ctx.out << "edmd: " << o.ics << " initial conditions x " << ns.size() << " sizes\n";
        return;
    }
    const Trajectory t = o.input.empty() ? standard_map(mode, o.p0, o.theta0, o.n + 1, ctx.rng("edmd_map"))
                                         : io::read_trajectory_csv(o.input);
    const std::size_t n = o.input.empty() ? o.n : std::min(o.n, t.length() - 1);
    const auto mats = build_dictionary_matrices(t, Dictionary::fourier(std::vector<int>(static_cast<std::size_t>(t.dim()), o.kmax)),
                                                Dictionary::fourier(std::vector<int>(static_cast<std::size_t>(t.dim()), o.kmax)), n);
    const auto k = edmd(mats, weight_from(o.weights));
    outs.add("edmd_matrix.csv", complex_matrix_csv(k.k));
    outs.add("edmd_eigs.csv", eigen_csv(eig(k.k).values));
    ctx.out << "edmd: " << k.k.rows() << "x" << k.k.cols() << " Koopman matrix from N=" << k.n_used << " pairs\n";
}

struct MpedmdOpts {
    std::string system = "rotation";
    std::string input;
    double alpha = std::fmod(std::numbers::sqrt2 * two_pi, two_pi);
    double theta0 = 0.3;
    double p0 = 1.0;
    std::string lambda_mode = "fixed";
    double lambda = 0.25;
    int kmax = 1;
    std::size_t n = 10'000;
    std::string weights = "bump";
    std::string cross = "psi-phi";
};

void add_mpedmd(CLI::App& app, MpedmdOpts& o)
{
    opt(app, "--system", o.system, "rotation | standard-map");
    opt(app, "--input", o.input, "trajectory CSV on the torus (replaces --system)");
    opt(app, "--alpha", o.alpha, "rotation angle (radians)");
    opt(app, "--theta0", o.theta0, "initial angle");
    opt(app, "--p0", o.p0, "standard map initial momentum");
    opt(app, "--lambda-mode", o.lambda_mode, "fixed | uniform");
    opt(app, "--lambda", o.lambda, "standard map parameter");
    opt(app, "--kmax", o.kmax, "Fourier modes per coordinate");
    opt(app, "--N", o.n, "snapshot pairs");
    opt(app, "--weights", o.weights, "bump | uniform");
    opt(app, "--cross", o.cross, "psi-phi | phi-phi");
}

void run_mpedmd(const MpedmdOpts& o, Context& ctx, Outputs& outs)
{
    MpedmdCross cross;
    if (o.cross == "psi-phi")
        cross = MpedmdCross::PsiPhi;
    else if (o.cross == "phi-phi")
        cross = MpedmdCross::PhiPhi;
    else
        throw ConfigError("mpedmd: unknown cross moment '" + o.cross + "'");
    Trajectory t;
    if (!o.input.empty())
        t = io::read_trajectory_csv(o.input);
    else if (o.system == "rotation")
        t = circle_rotation(o.alpha, o.theta0, o.n + 1);
    else if (o.system == "standard-map")
        t = standard_map(lambda_mode(o.lambda_mode, o.lambda, 0.0, 5.0), o.p0, o.theta0, o.n + 1, ctx.rng("mpedmd_map"));
    else
        throw ConfigError("mpedmd: unknown system '" + o.system + "'");
    const auto dict = Dictionary::fourier(std::vector<int>(static_cast<std::size_t>(t.dim()), o.kmax));
    const auto mats = build_dictionary_matrices(t, dict, dict, std::min(o.n, t.length() - 1));
    const auto r = mpedmd(mats, weight_from(o.weights), default_rel_tol, cross);
    const double resid = unitarity_residual(r.k, r.gram);
    outs.add("mpedmd_matrix.csv", complex_matrix_csv(r.k));
    outs.add("mpedmd_eigs.csv", eigen_csv(r.eigenvalues));
    io::CsvTable s({"n", "dictionary_size", "unitarity_residual"});
    s.row().add(static_cast<long long>(r.n_used)).add(static_cast<long long>(dict.size())).add(resid);
    outs.add("mpedmd_summary.csv", s.str());
    ctx.out << "mpedmd: " << dict.size() << " eigenvalues, unitarity residual " << io::format_double(resid) << "\n";
}

// ---------------------------------------------------------------- sindy

struct SindyOpts {
    std::string mode = "continuous";
    std::string input;
    double eta = 1e-2;
    int degree = 5;
    std::string weights = "bump";
    int max_iter = 0;
    double amplitude = 2.0;
    double phase = 0.0;
    double k = 0.01;
    double snr = 0.0;
    std::size_t n = 10'000;
    bool sweep = false;
    std::vector<std::size_t> n_values;
    std::vector<double> etas;
};

void add_sindy(CLI::App& app, SindyOpts& o)
{
    opt(app, "--mode", o.mode, "continuous | discrete");
    opt(app, "--input", o.input, "trajectory CSV (positions; replaces the harmonic surrogate)");
    opt(app, "--eta", o.eta, "pruning threshold");
    opt(app, "--degree", o.degree, "monomial dictionary degree");
    opt(app, "--weights", o.weights, "bump | uniform");
    opt(app, "--max-iter", o.max_iter, "iteration cap (0: L + 1)");
    opt(app, "--amplitude", o.amplitude, "surrogate amplitude");
    opt(app, "--phase", o.phase, "surrogate phase");
    opt(app, "--k", o.k, "sampling step");
    opt(app, "--snr", o.snr, "second-derivative signal-to-noise ratio (0: noiseless)");
    opt(app, "--N", o.n, "samples");
    app.add_flag("--sweep", o.sweep, "emit the coefficient-error table for LS, wtLS, SINDy, wtSINDy");
    app.add_option("--n-values", o.n_values, "sweep sizes (default 10 per decade from 200)")->delimiter(',');
    app.add_option("--etas", o.etas, "sweep thresholds (default: --eta)")->delimiter(',');
}

void run_sindy(const SindyOpts& o, Context& ctx, Outputs& outs)
{
    const auto w = weight_from(o.weights);
    if (o.mode != "continuous" && o.mode != "discrete")
        throw ConfigError("sindy: unknown mode '" + o.mode + "'");
    if (!(o.snr >= 0.0))
        throw ConfigError("sindy: snr must be >= 0");
    HarmonicParams hp{o.amplitude, o.phase, o.k, o.snr > 0.0 ? harmonic_noise_for_snr(o.amplitude, o.k, o.snr) : 0.0,
                      ctx.rng("sindy_noise").next()};
    if (o.sweep) {
        if (!o.input.empty() || o.mode != "continuous")
            throw ConfigError("sindy: --sweep runs on the harmonic surrogate in continuous mode");
        const auto rows = sindy_error_sweep(hp, sweep_values(o.n_values, o.n, 200, 10),
                                            o.etas.empty() ? std::vector<double>{o.eta} : o.etas, o.degree, w);
        io::CsvTable t({"n", "method", "eta", "coeff_error"});
        for (const auto& r : rows)
            t.row().add(r.n).add(to_string(r.method)).add(r.eta).add(r.coeff_error);
        outs.add("sindy_sweep.csv", t.str());
        ctx.out << "sindy: " << rows.size() << " sweep rows\n";
        return;
    }
    RealMatrix psi;
    TargetData<double> data;
    Dictionary dict = Dictionary::monomials(o.degree, 1);
    if (o.mode == "continuous") {
        Eigen::VectorXd x, d2;
        if (!o.input.empty()) {
            const auto t = io::read_trajectory_csv(o.input);
            if (t.dim() != 1 || t.length() < 3)
                throw ShapeError("sindy: continuous mode expects a one-column position series of length >= 3");
            const auto m = static_cast<Eigen::Index>(t.length()) - 2;
            x = t.states.row(0).segment(1, m).transpose();
            d2.resize(m);
            for (Eigen::Index i = 0; i < m; ++i)
                d2(i) = (t.states(0, i + 2) + t.states(0, i) - 2.0 * t.states(0, i + 1)) / (t.dt * t.dt);
        } else {
            const auto h = harmonic_series(hp.amplitude, hp.phase, hp.k, o.n, hp.noise_sigma, RngStream(hp.seed).derive("harmonic_noise"));
            x = h.interior;
            d2 = h.second_derivative;
        }
        psi = monomial_matrix(x, o.degree);
        data = {d2.transpose(), TargetMode::Continuous};
    } else {
        if (o.input.empty())
            throw ConfigError("sindy: discrete mode needs --input");
        const auto t = io::read_trajectory_csv(o.input);
        t.validate();
        dict = Dictionary::monomials(o.degree, t.dim());
        const auto n = static_cast<Eigen::Index>(t.length()) - 1;
        psi.resize(n, dict.size());
        for (Eigen::Index i = 0; i < n; ++i)
            psi.row(i) = dict.evaluate(t.states.col(i)).real();
        data = {t.states.rightCols(n), TargetMode::Discrete};
    }
    StlsqOptions so;
    so.eta = o.eta;
    so.max_iter = o.max_iter;
    so.dictionary_id = dict.id();
    const auto model = stlsq(psi, data, w, so);
    io::CsvTable t({"output", "term", "coefficient", "active"});
    for (Eigen::Index j = 0; j < model.xi.rows(); ++j)
        for (Eigen::Index k = 0; k < model.xi.cols(); ++k) {
            std::string term;
            const auto& e = dict.exponents()[static_cast<std::size_t>(k)];
            for (std::size_t v = 0; v < e.size(); ++v)
                if (e[v] > 0)
                    term += (term.empty() ? "" : "*") + std::string("x") + std::to_string(v) + "^" + std::to_string(e[v]);
            t.row().add(static_cast<long long>(j)).add(term.empty() ? "1" : term).add(model.xi(j, k))
                .add(model.active_mask(j, k) ? 1 : 0);
        }
    outs.add("sindy_xi.csv", t.str());
    std::string diag;
    for (std::size_t j = 0; j < model.rows.size(); ++j) {
        const auto& r = model.rows[j];
        nlohmann::ordered_json line{{"output", j},           {"iterations", r.iterations}, {"active", r.active},
                                    {"converged", r.converged}, {"all_pruned", r.all_pruned}, {"eta", model.eta},
                                    {"dictionary", model.dictionary_id}};
        diag += line.dump() + "\n";
    }
    outs.add("sindy_diagnostics.jsonl", diag);
    ctx.out << "sindy: " << model.xi.rows() << " output(s), " << model.iterations << " iteration(s)\n";
}

// ---------------------------------------------------------------- specmeas

struct SpecOpts {
    std::string system = "rotation";
    std::string input;
    double alpha = std::fmod(std::numbers::sqrt2 * two_pi, two_pi);
    double lambda = 5.0;
    std::size_t n = 100'000;
    int m = 100;
    std::string filter = "cosine";
    std::size_t grid = 4096;
    std::string weights = "bump";
    double min_prominence = 0.05;
    bool sweep = false;
    std::vector<std::size_t> n_values;
    std::size_t benchmark_n = 0;
};

void add_specmeas(CLI::App& app, SpecOpts& o)
{
    opt(app, "--system", o.system, "rotation | standard-map (observable e^{i theta})");
    opt(app, "--input", o.input, "series CSV: one column (real) or re,im");
    opt(app, "--alpha", o.alpha, "rotation angle (radians)");
    opt(app, "--lambda", o.lambda, "standard map parameter");
    opt(app, "--N", o.n, "series length");
    opt(app, "--M", o.m, "largest autocorrelation lag");
    opt(app, "--filter", o.filter, "cosine | smoothstep");
    opt(app, "--grid", o.grid, "density grid points on [-pi, pi)");
    opt(app, "--weights", o.weights, "bump | uniform");
    opt(app, "--min-prominence", o.min_prominence, "peak prominence relative to max |xi|");
    app.add_flag("--sweep", o.sweep, "emit the autocorrelation error table");
    app.add_option("--n-values", o.n_values, "sweep sizes (default 10 per decade)")->delimiter(',');
    opt(app, "--benchmark-N", o.benchmark_n, "reference length for --sweep (0: N)");
}

void run_specmeas(const SpecOpts& o, Context& ctx, Outputs& outs)
{
    const auto w = weight_from(o.weights);
    FilterFunction filt = FilterFunction::cosine();
    if (o.filter == "smoothstep")
        filt = FilterFunction::bump();
    else if (o.filter != "cosine")
        throw ConfigError("specmeas: unknown filter '" + o.filter + "'");
    std::vector<Complex> s;
    if (!o.input.empty()) {
        s = io::read_complex_csv(o.input);
    } else {
        Trajectory t;
        int coord = 0;
        if (o.system == "rotation")
            t = circle_rotation(o.alpha, 0.0, o.n);
        else if (o.system == "standard-map") {
            t = standard_map(LambdaMode::fixed(o.lambda), 1.0, 2.0, o.n, ctx.rng("specmeas_map"));
            coord = 1;
        } else
            throw ConfigError("specmeas: unknown system '" + o.system + "'");
        s.resize(t.length());
        for (std::size_t i = 0; i < s.size(); ++i)
            s[i] = std::polar(1.0, t.states(coord, static_cast<Eigen::Index>(i)));
    }
    if (o.sweep) {
        const std::size_t bench = o.benchmark_n ? o.benchmark_n : s.size();
        const auto rows = autocorrelation_error_sweep(s, o.m, sweep_values(o.n_values, bench, std::size_t(o.m) * 4, 10), bench, w);
        io::CsvTable t({"n", "relerr_unw", "relerr_w"});
        for (const auto& r : rows)
            t.row().add(r.n).add(r.relerr_unw).add(r.relerr_w);
        outs.add("autocorr_sweep.csv", t.str());
        ctx.out << "specmeas: " << rows.size() << " sweep rows\n";
        return;
    }
    const auto acs = autocorrelations(s, o.m, w, !w.is_uniform());
    const SpectralDensity dens(acs, filt);
    const auto grid = theta_grid(o.grid);
    const auto xi = dens.eval_grid(grid);
    io::CsvTable d({"theta", "xi"});
    for (std::size_t i = 0; i < grid.size(); ++i)
        d.row().add(grid[i]).add(xi[i]);
    io::CsvTable a({"n", "re", "im"});
    for (int n = -o.m; n <= o.m; ++n)
        a.row().add(n).add(acs.at(n).real()).add(acs.at(n).imag());
    const auto peaks = peak_report(dens, o.grid, o.min_prominence);
    io::CsvTable p({"theta", "height", "prominence"});
    for (const auto& pk : peaks)
        p.row().add(pk.theta).add(pk.height).add(pk.prominence);
    outs.add("density.csv", d.str());
    outs.add("autocorr.csv", a.str());
    outs.add("peaks.csv", p.str());
    ctx.out << "specmeas: M=" << o.m << ", " << peaks.size() << " peak(s)\n";
}

// ---------------------------------------------------------------- forecast

struct ForecastOpts {
    std::string nino34;
    double theta_rate = 1.0;
    double diffusion = std::numbers::sqrt2;
    double tau = 0.1;
    std::size_t n_train = 20'000;
    int starts = 200;
    int lags = 0; ///< 0: 1 for OU, 6 for Nino-3.4
    int m = 0;    ///< 0: 10 for OU, 14 for Nino-3.4
    int max_lead = 0;
    int report_lead = 0;
    double bandwidth = 0.0;
    double bandwidth_factor = 0.3;
    double alpha_norm = 0.5;
    std::size_t landmarks = 1000;
    std::string train_range = "1920-01:1999-12";
    std::string valid_range = "2000-01:2013-12";
    std::string weights = "bump";
};

void add_forecast(CLI::App& app, ForecastOpts& o)
{
    opt(app, "--nino34", o.nino34, "Nino-3.4 CSV (year,month,value); default runs the OU oracle");
    opt(app, "--theta-rate", o.theta_rate, "OU mean reversion rate");
    opt(app, "--diffusion", o.diffusion, "OU diffusion coefficient");
    opt(app, "--tau", o.tau, "OU sampling interval");
    opt(app, "--N-train", o.n_train, "OU training samples");
    opt(app, "--starts", o.starts, "OU validation starts");
    opt(app, "--lags", o.lags, "delay embedding length (0: system default)");
    opt(app, "--M", o.m, "basis size (0: system default)");
    opt(app, "--max-lead", o.max_lead, "largest lead (0: system default)");
    opt(app, "--report-lead", o.report_lead, "lead of the emitted forecast series (0: default)");
    opt(app, "--bandwidth", o.bandwidth, "kernel bandwidth (0: automatic)");
    opt(app, "--bandwidth-factor", o.bandwidth_factor, "multiplier of the median pairwise distance");
    opt(app, "--alpha-norm", o.alpha_norm, "kernel density normalization exponent");
    opt(app, "--landmarks", o.landmarks, "maximum kernel points");
    opt(app, "--train-range", o.train_range, "YYYY-MM:YYYY-MM");
    opt(app, "--valid-range", o.valid_range, "YYYY-MM:YYYY-MM");
    opt(app, "--weights", o.weights, "taper for the weighted shift matrix");
}

std::pair<YearMonth, YearMonth> parse_range(const std::string& s)
{
    int y0, m0, y1, m1;
    char tail;
    if (std::sscanf(s.c_str(), "%d-%d:%d-%d%c", &y0, &m0, &y1, &m1, &tail) != 4 || m0 < 1 || m0 > 12 || m1 < 1 || m1 > 12)
        throw ConfigError("invalid month range '" + s + "' (expected YYYY-MM:YYYY-MM)");
    return {{y0, m0}, {y1, m1}};
}

void add_skill(const ForecastSkill& u, const ForecastSkill& w, Outputs& outs)
{
    io::CsvTable t({"lead", "rmse_unw", "rmse_w", "corr_unw", "corr_w", "climatology"});
    for (std::size_t i = 0; i < u.rows.size(); ++i)
        t.row().add(u.rows[i].lead).add(u.rows[i].rmse).add(w.rows[i].rmse).add(u.rows[i].correlation)
            .add(w.rows[i].correlation).add(u.climatology);
    outs.add("skill.csv", t.str());
}

void run_forecast(const ForecastOpts& o, Context& ctx, Outputs& outs)
{
    const auto w = weight_from(o.weights);
    BasisOptions bo;
    bo.bandwidth = o.bandwidth;
    bo.bandwidth_factor = o.bandwidth_factor;
    bo.alpha = o.alpha_norm;
    bo.max_kernel_points = o.landmarks;
    const bool nino = !o.nino34.empty();
    const int m = o.m ? o.m : (nino ? 14 : 10);
    if (m > 30)
        ctx.err << "warning: basis size M=" << m << " > 30; large bases tend to degrade the weighted forecast\n";
    if (nino) {
        NinoOptions no;
        std::tie(no.train_begin, no.train_end) = parse_range(o.train_range);
        std::tie(no.valid_begin, no.valid_end) = parse_range(o.valid_range);
        no.lags = o.lags ? o.lags : 6;
        no.m = m;
        no.max_lead = o.max_lead ? o.max_lead : 24;
        no.report_lead = o.report_lead ? o.report_lead : 16;
        no.basis = bo;
        no.seed = ctx.seed;
        const auto series = io::read_nino34_csv(o.nino34);
        const auto r = nino34_pipeline(series, no, w);
        add_skill(r.unweighted, r.weighted, outs);
        io::CsvTable t({"date", "truth", "forecast_unw", "forecast_w"});
        for (std::size_t i = 0; i < r.report_dates.size(); ++i)
            t.row().add(r.report_dates[i].str()).add(r.report_truth[i]).add(r.report_unw[i]).add(r.report_w[i]);
        outs.add("forecast_series.csv", t.str());
        if (r.extrapolated_starts)
            ctx.err << "warning: " << r.extrapolated_starts << " start(s) fell outside the training support; "
                    << "climatology used\n";
        ctx.out << "forecast: Nino-3.4, bandwidth " << io::format_double(r.bandwidth) << ", "
                << r.unweighted.rows.size() << " leads\n";
        return;
    }
    if (o.starts < 3)
        throw ConfigError("forecast: need at least 3 validation starts");
    const int lags = o.lags ? o.lags : 1;
    const int leads = o.max_lead ? o.max_lead : 20;
    const int report = o.report_lead ? o.report_lead : std::min(10, leads);
    if (report > leads)
        throw ConfigError("forecast: report lead exceeds max lead");
    const std::size_t burn = 1000;
    const auto train = ou_sample(o.theta_rate, o.diffusion, 0.0, o.tau, o.n_train + burn, 20, ctx.rng("forecast_ou_train"));
    std::vector<double> xs(o.n_train);
    for (std::size_t i = 0; i < xs.size(); ++i)
        xs[i] = train.states(0, static_cast<Eigen::Index>(burn + i));
    const auto emb = delay_embed(xs, lags);
    const auto basis = diffusion_basis(emb.points, m, bo, ctx.rng("forecast_basis"));
    const auto au = shift_matrix(basis, WeightFunction::uniform());
    const auto aw = shift_matrix(basis, w);
    const Eigen::VectorXd ghat = observable_coefficients(basis, emb.points.col(lags - 1));
    const auto spacing = static_cast<std::size_t>(leads);
    const auto valid = ou_sample(o.theta_rate, o.diffusion, 0.0, o.tau,
                                 burn + spacing * static_cast<std::size_t>(o.starts) + spacing, 20, ctx.rng("forecast_ou_valid"));
    std::vector<double> vs(valid.length());
    for (std::size_t i = 0; i < vs.size(); ++i)
        vs[i] = valid.states(0, static_cast<Eigen::Index>(i));
    std::vector<std::vector<double>> pu(leads), pw(leads), tr(leads);
    std::vector<double> nu(leads, 0.0), nw(leads, 0.0), den(leads, 0.0);
    io::CsvTable series({"start", "x0", "truth", "forecast_unw", "forecast_w", "conditional_mean"});
    Eigen::VectorXd x(lags);
    for (int s = 0; s < o.starts; ++s) {
        const std::size_t t0 = burn + spacing * static_cast<std::size_t>(s);
        for (int j = 0; j < lags; ++j)
            x(j) = vs[t0 + 1 + static_cast<std::size_t>(j) - static_cast<std::size_t>(lags)];
        const double x0 = x(lags - 1);
        const auto fu = forecast(basis, au, x, leads, ghat);
        const auto fw = forecast(basis, aw, x, leads, ghat);
        for (int k = 1; k <= leads; ++k) {
            const double mean = x0 * std::exp(-o.theta_rate * k * o.tau);
            pu[k - 1].push_back(fu.values[k]);
            pw[k - 1].push_back(fw.values[k]);
            tr[k - 1].push_back(vs[t0 + static_cast<std::size_t>(k)]);
            nu[k - 1] += std::pow(fu.values[k] - mean, 2);
            nw[k - 1] += std::pow(fw.values[k] - mean, 2);
            den[k - 1] += mean * mean;
            if (k == report)
                series.row().add(s).add(x0).add(tr[k - 1].back()).add(fu.values[k]).add(fw.values[k]).add(mean);
        }
    }
    const double clim = climatology(std::span<const double>(vs).subspan(burn));
    add_skill(skill(pu, tr, clim), skill(pw, tr, clim), outs);
    io::CsvTable oracle({"lead", "relerr_unw", "relerr_w"});
    for (int k = 1; k <= leads; ++k)
        oracle.row().add(k).add(std::sqrt(nu[k - 1] / den[k - 1])).add(std::sqrt(nw[k - 1] / den[k - 1]));
    outs.add("ou_oracle.csv", oracle.str());
    outs.add("forecast_series.csv", series.str());
    ctx.out << "forecast: OU, bandwidth " << io::format_double(basis.bandwidth()) << ", " << leads << " leads\n";
}

// ---------------------------------------------------------------- bench

struct BenchOpts {
    std::string suite = "paper-desk";
    std::vector<int> only;
    std::string nino34;
};

void add_bench(CLI::App& app, BenchOpts& o)
{
    opt(app, "--suite", o.suite, "benchmark suite");
    app.add_option("--only", o.only, "criterion ids to run")->delimiter(',');
    opt(app, "--nino34", o.nino34, "Nino-3.4 CSV for criterion 12");
}

bool run_bench(const BenchOpts& o, Context& ctx, Outputs& outs, const fs::path& out_dir)
{
    if (o.suite != "paper-desk")
        throw ConfigError("bench: unknown suite '" + o.suite + "'");
    acceptance::Options ao;
    ao.seed = ctx.seed;
    ao.only = o.only;
    ao.nino34_csv = o.nino34;
    ao.scratch_dir = fs::temp_directory_path() / ("birkhoff_bench_" + sha256_hex(out_dir.string()).substr(0, 12));
    const auto results = acceptance::run_all(ao, ctx.out);
    io::CsvTable t({"id", "name", "status", "seconds", "limit_seconds", "detail"});
    bool ok = true;
    auto cell = [](std::string s) {
        for (auto& c : s)
            if (c == ',' || c == '"')
                c = ';';
        return s;
    };
    for (const auto& r : results) {
        t.row().add(r.id).add(cell(r.name)).add(acceptance::to_string(r.status)).add(r.seconds).add(r.budget)
            .add(cell(r.detail));
        ok = ok && r.status != acceptance::Status::Fail;
    }
    outs.add("bench.csv", t.str());
    return ok;
}

// ---------------------------------------------------------------- driver

int exit_code_for(ErrorKind k)
{
    switch (k) {
    case ErrorKind::Config: return config_error;
    case ErrorKind::Io: return io_error;
    case ErrorKind::Parse:
    case ErrorKind::Gap: return parse_error;
    default: return numerical_error;
    }
}

void report_error(std::ostream& err, const std::string& kind, int code, std::string msg)
{
    for (auto& c : msg)
        if (c == '\n' || c == '\r')
            c = ' ';
    std::string escaped;
    for (char c : msg) {
        if (c == '"' || c == '\\')
            escaped += '\\';
        escaped += c;
    }
    err << "error: code=" << kind << " exit=" << code << " msg=\"" << escaped << "\"" << std::endl;
}

void write_outputs(const fs::path& dir, const Outputs& outs, const std::string& config, const std::string& subcommand,
                   std::uint64_t seed, const std::string& started)
{
    fs::create_directories(dir);
    nlohmann::ordered_json files = nlohmann::ordered_json::array();
    for (const auto& [name, content] : outs.files) {
        io::write_file_atomic(dir / name, content);
        files.push_back({{"file", name}, {"bytes", content.size()}, {"sha256", sha256_hex(content)}});
    }
    io::write_file_atomic(dir / "config.ini", config);
    nlohmann::ordered_json manifest{
        {"tool", "birkhoff"},
        {"version", version},
        {"subcommand", subcommand},
        {"seed", seed},
        {"rng", std::string(RngStream::algorithm)},
        {"config_file", "config.ini"},
        {"config_hash", "sha256:" + sha256_hex(config)},
        {"started_utc", started},
        {"finished_utc", utc_now()},
        {"outputs", files},
    };
    io::write_file_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Weighted ergodic averages, DMD/EDMD/SINDy, spectral measures and diffusion forecasts"};
    app.name("birkhoff");
    app.set_version_flag("--version", version);
    app.set_config("--config", "", "key=value configuration file (flags override it)");
    app.require_subcommand(1);
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.fallthrough();

    std::string out_dir;
    if (const char* env = std::getenv("BIRKHOFF_OUT"); env && *env)
        out_dir = env;
    else
        out_dir = "out";
    std::uint64_t seed = 0;
    opt(app, "--out", out_dir, "output directory (default: $BIRKHOFF_OUT or ./out)");
    opt(app, "--seed", seed, "global 64-bit seed");

    AverageOpts avg;
    DmdOpts dm;
    EdmdOpts ed;
    MpedmdOpts mp;
    SindyOpts si;
    SpecOpts sp;
    ForecastOpts fc;
    BenchOpts be;
    add_average(*app.add_subcommand("average", "weighted and unweighted Birkhoff averages"), avg);
    add_dmd(*app.add_subcommand("dmd", "dynamic mode decomposition"), dm);
    add_edmd(*app.add_subcommand("edmd", "extended DMD on the standard map"), ed);
    add_mpedmd(*app.add_subcommand("mpedmd", "measure-preserving EDMD"), mp);
    add_sindy(*app.add_subcommand("sindy", "sparse model identification"), si);
    add_specmeas(*app.add_subcommand("specmeas", "spectral measure of a scalar observable"), sp);
    add_forecast(*app.add_subcommand("forecast", "diffusion forecasting"), fc);
    add_bench(*app.add_subcommand("bench", "acceptance benchmark suite"), be);

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return ok;
    } catch (const CLI::CallForVersion&) {
        out << version << "\n";
        return ok;
    } catch (const CLI::FileError& e) {
        report_error(err, "io", io_error, e.what());
        return io_error;
    } catch (const CLI::ConfigError& e) {
        report_error(err, "config", config_error, e.what());
        return config_error;
    } catch (const CLI::ParseError& e) {
        report_error(err, "usage", usage_error, e.what());
        return usage_error;
    }

    const auto* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    const std::string started = utc_now();
    Context ctx{seed, out, err};
    Outputs outs;
    try {
        require_file(avg.input, "input");
        require_file(dm.input, "input");
        require_file(ed.input, "input");
        require_file(mp.input, "input");
        require_file(si.input, "input");
        require_file(sp.input, "input");
        require_file(fc.nino34, "Nino-3.4 file");
        require_file(be.nino34, "Nino-3.4 file");
        check_output_dir(out_dir);
        bool bench_ok = true;
        if (name == "average")
            run_average(avg, ctx, outs);
        else if (name == "dmd")
            run_dmd(dm, ctx, outs);
        else if (name == "edmd")
            run_edmd(ed, ctx, outs);
        else if (name == "mpedmd")
            run_mpedmd(mp, ctx, outs);
        else if (name == "sindy")
            run_sindy(si, ctx, outs);
        else if (name == "specmeas")
            run_specmeas(sp, ctx, outs);
        else if (name == "forecast")
            run_forecast(fc, ctx, outs);
        else if (name == "bench")
            bench_ok = run_bench(be, ctx, outs, out_dir);
        write_outputs(out_dir, outs, effective_config(app, name), name, seed, started);
        if (!bench_ok) {
            report_error(err, "bench", bench_failure, "one or more acceptance criteria failed");
            return bench_failure;
        }
        return ok;
    } catch (const Error& e) {
        const int code = exit_code_for(e.kind());
        report_error(err, to_string(e.kind()), code, e.what());
        return code;
    } catch (const fs::filesystem_error& e) {
        report_error(err, "io", io_error, e.what());
        return io_error;
    } catch (const std::exception& e) {
        report_error(err, "internal", other_failure, e.what());
        return other_failure;
    }
}

} // namespace birkhoff::cli
