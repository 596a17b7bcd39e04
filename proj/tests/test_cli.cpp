#include "cli.hpp"

#include <birkhoff/io/csv.hpp>

#include <gtest/gtest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using birkhoff::cli::run;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result call(std::vector<std::string> args)
{
    std::ostringstream o, e;
    const int c = run(args, o, e);
    return {c, o.str(), e.str()};
}

fs::path fresh(const std::string& name)
{
    const auto p = fs::temp_directory_path() / "birkhoff_cli_test" / name;
    fs::remove_all(p);
    fs::create_directories(p.parent_path());
    return p;
}

std::string slurp(const fs::path& p)
{
    return birkhoff::io::read_file(p);
}

const std::vector<std::string> small_spec = {"specmeas", "--system", "rotation", "--N", "3000", "--M", "20", "--grid", "256"};

} // namespace

TEST(Cli, VersionAndHelp)
{
    EXPECT_EQ(call({"--version"}).out, std::string(birkhoff::cli::version) + "\n");
    const auto h = call({"--help"});
    EXPECT_EQ(h.code, 0);
    EXPECT_NE(h.out.find("specmeas"), std::string::npos);
}

TEST(Cli, UsageErrors)
{
    const auto r = call({"average", "--no-such-flag"});
    EXPECT_EQ(r.code, birkhoff::cli::usage_error);
    EXPECT_EQ(r.err.rfind("error: code=usage exit=2", 0), 0u) << r.err;
    EXPECT_EQ(call({}).code, birkhoff::cli::usage_error);
    EXPECT_EQ(call({"average", "--N", "abc"}).code, birkhoff::cli::usage_error);
}

TEST(Cli, DistinctErrorCodes)
{
    const auto dir = fresh("codes");
    EXPECT_EQ(call({"--out", dir.string(), "specmeas", "--input", "/nonexistent/x.csv"}).code, birkhoff::cli::io_error);
    EXPECT_EQ(call({"--out", dir.string(), "average", "--eps", "-1"}).code, birkhoff::cli::config_error);
    EXPECT_EQ(call({"--out", dir.string(), "specmeas", "--N", "50", "--M", "60"}).code, birkhoff::cli::numerical_error);
    const auto bad = dir.parent_path() / "bad.ini";
    std::ofstream(bad) << "specmeas.no_such_key=1\n";
    EXPECT_EQ(call({"--config", bad.string(), "--out", dir.string(), "specmeas"}).code, birkhoff::cli::config_error);
    EXPECT_EQ(call({"--config", (dir.parent_path() / "absent.ini").string(), "specmeas"}).code, birkhoff::cli::io_error);
    const auto gap = dir.parent_path() / "gap.csv";
    std::ofstream(gap) << "year,month,value\n2000,1,0.1\n2000,3,0.2\n";
    const auto r = call({"--out", dir.string(), "forecast", "--nino34", gap.string()});
    EXPECT_EQ(r.code, birkhoff::cli::parse_error);
    EXPECT_NE(r.err.find("code=gap"), std::string::npos);
    EXPECT_FALSE(fs::exists(dir));
}

TEST(Cli, FailureLeavesNoPartialOutputs)
{
    const auto dir = fresh("partial");
    const auto r = call({"--out", dir.string(), "specmeas", "--N", "50", "--M", "60"});
    EXPECT_NE(r.code, 0);
    EXPECT_FALSE(fs::exists(dir));
}

TEST(Cli, OutputFileInPlaceOfDirectory)
{
    const auto f = fresh("is_a_file");
    std::ofstream(f) << "x";
    auto args = small_spec;
    args.insert(args.begin(), {"--out", f.string()});
    EXPECT_EQ(call(args).code, birkhoff::cli::io_error);
}

TEST(Cli, RerunIsByteIdenticalAndManifested)
{
    const auto a = fresh("rerun_a"), b = fresh("rerun_b");
    for (const auto& d : {a, b}) {
        auto args = small_spec;
        args.insert(args.begin(), {"--out", d.string(), "--seed", "9"});
        ASSERT_EQ(call(args).code, 0);
    }
    for (const char* f : {"density.csv", "autocorr.csv", "peaks.csv"})
        EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    const auto m = nlohmann::json::parse(slurp(a / "manifest.json"));
    const auto mb = nlohmann::json::parse(slurp(b / "manifest.json"));
    EXPECT_EQ(m["version"], birkhoff::cli::version);
    EXPECT_EQ(m["seed"], 9);
    EXPECT_EQ(m["outputs"].size(), 3u);
    EXPECT_EQ(m["outputs"], mb["outputs"]);
    EXPECT_EQ(m["config_hash"].get<std::string>().size(), 7u + 64u);
}

TEST(Cli, EffectiveConfigReproducesRun)
{
    const auto a = fresh("cfg_a"), b = fresh("cfg_b");
    auto args = small_spec;
    args.insert(args.begin(), {"--out", a.string(), "--seed", "4"});
    args.insert(args.end(), {"--alpha", "0.123456789012345"});
    ASSERT_EQ(call(args).code, 0);
    const auto cfg = slurp(a / "config.ini");
    EXPECT_NE(cfg.find("specmeas.alpha=0.123456789012345"), std::string::npos) << cfg;
    EXPECT_EQ(cfg.find("average."), std::string::npos);
    const auto r = call({"--config", (a / "config.ini").string(), "--out", b.string(), "specmeas"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(slurp(a / "density.csv"), slurp(b / "density.csv"));
}

TEST(Cli, FlagsOverrideConfig)
{
    const auto a = fresh("ovr_a"), b = fresh("ovr_b");
    const auto cfg = a.parent_path() / "ovr.ini";
    std::ofstream(cfg) << "specmeas.M=20\nspecmeas.N=3000\nspecmeas.grid=256\n";
    ASSERT_EQ(call({"--config", cfg.string(), "--out", a.string(), "specmeas", "--M", "10"}).code, 0);
    const auto text = slurp(a / "config.ini");
    EXPECT_NE(text.find("specmeas.M=10"), std::string::npos);
    EXPECT_NE(text.find("specmeas.N=3000"), std::string::npos);
}

TEST(Cli, EnvironmentOutputDirectory)
{
    const auto a = fresh("env_out");
    ::setenv("BIRKHOFF_OUT", a.string().c_str(), 1);
    const auto r = call(small_spec);
    ::unsetenv("BIRKHOFF_OUT");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(fs::exists(a / "density.csv"));
}

TEST(Cli, LargeBasisWarning)
{
    const auto a = fresh("warn");
    const auto r = call({"--out", a.string(), "forecast", "--N-train", "600", "--starts", "5", "--M", "31", "--landmarks", "300"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.err.find("warning: basis size M=31"), std::string::npos);
}

TEST(Cli, SindyWritesCoefficientsAndDiagnostics)
{
    const auto a = fresh("sindy");
    ASSERT_EQ(call({"--out", a.string(), "sindy", "--N", "4000"}).code, 0);
    const auto xi = slurp(a / "sindy_xi.csv");
    EXPECT_EQ(xi.rfind("output,term,coefficient,active\n", 0), 0u);
    const auto diag = nlohmann::json::parse(slurp(a / "sindy_diagnostics.jsonl"));
    EXPECT_EQ(diag["active"], 1);
    EXPECT_TRUE(diag["converged"].get<bool>());
}
