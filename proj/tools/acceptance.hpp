#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace birkhoff::acceptance {

enum class Status { Pass, Fail, Skip };

inline const char* to_string(Status s)
{
    switch (s) {
    case Status::Pass: return "PASS";
    case Status::Fail: return "FAIL";
    case Status::Skip: return "SKIP";
    }
    return "?";
}

struct CriterionResult {
    int id = 0;
    std::string name;
    Status status = Status::Fail;
    double seconds = 0.0;
    double budget = 0.0; ///< runtime limit in seconds
    std::string detail;
};

struct Options {
    std::uint64_t seed = 0;
    std::filesystem::path nino34_csv; ///< empty: look up NINO34_CSV, then data/nino34.csv
    std::filesystem::path scratch_dir; ///< for the determinism check; empty: system temp
    std::vector<int> only;             ///< subset of criterion ids; empty runs all
};

/// Runs the criteria in order, printing one line per criterion to `log`
/// as soon as it finishes.
std::vector<CriterionResult> run_all(const Options& opt, std::ostream& log);

std::string format_line(const CriterionResult& r);

} // namespace birkhoff::acceptance
