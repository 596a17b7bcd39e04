#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace birkhoff::cli {

/// Process exit codes.
enum ExitCode : int {
    ok = 0,
    other_failure = 1,
    usage_error = 2,
    config_error = 3,
    io_error = 4,
    parse_error = 5,
    numerical_error = 6,
    bench_failure = 7,
};

inline constexpr const char* version = "0.1.0";

/// Entry point; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace birkhoff::cli
