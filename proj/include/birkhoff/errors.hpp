#pragma once

#include <stdexcept>
#include <string>

namespace birkhoff {

/// Failure categories. The CLI maps each one onto a distinct exit code.
enum class ErrorKind {
    Domain,
    Size,
    Shape,
    DegenerateWeight,
    Config,
    Numerical,
    Conditioning,
    Parse,
    Gap,
    Io,
};

inline const char* to_string(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Size: return "size";
    case ErrorKind::Shape: return "shape";
    case ErrorKind::DegenerateWeight: return "degenerate_weight";
    case ErrorKind::Config: return "config";
    case ErrorKind::Numerical: return "numerical";
    case ErrorKind::Conditioning: return "conditioning";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Gap: return "gap";
    case ErrorKind::Io: return "io";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind)
    {
    }

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

namespace detail {

template <ErrorKind K>
class TaggedError : public Error {
public:
    explicit TaggedError(const std::string& what) : Error(K, what) {}
};

} // namespace detail

using DomainError = detail::TaggedError<ErrorKind::Domain>;
using SizeError = detail::TaggedError<ErrorKind::Size>;
using ShapeError = detail::TaggedError<ErrorKind::Shape>;
using DegenerateWeightError = detail::TaggedError<ErrorKind::DegenerateWeight>;
using ConfigError = detail::TaggedError<ErrorKind::Config>;
using NumericalError = detail::TaggedError<ErrorKind::Numerical>;
using ConditioningError = detail::TaggedError<ErrorKind::Conditioning>;
using GapError = detail::TaggedError<ErrorKind::Gap>;
using IoError = detail::TaggedError<ErrorKind::Io>;

/// Malformed input text; carries the 1-based line number when known.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : Error(ErrorKind::Parse,
                line ? what + " (line " + std::to_string(line) + ")" : what),
          line_(line)
    {
    }

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

} // namespace birkhoff
