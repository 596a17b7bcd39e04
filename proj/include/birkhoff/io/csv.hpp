#pragma once

/** @file
 * CSV ingestion and emission. Values are written with %.17g so that they
 * round-trip exactly; every emitted table has a header row.
 */

#include <birkhoff/errors.hpp>
#include <birkhoff/series.hpp>
#include <birkhoff/systems.hpp>

#include <charconv>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace birkhoff::io {

inline std::string format_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {

inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos)
            return out;
        start = pos + 1;
    }
}

inline std::optional<double> to_double(std::string_view s)
{
    if (!s.empty() && s.front() == '+')
        s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        return std::nullopt;
    return v;
}

inline double finite_field(std::string_view s, std::size_t line, const std::string& what)
{
    const auto v = to_double(s);
    if (!v)
        throw ParseError(what + ": cannot parse '" + std::string(s) + "' as a number", line);
    if (!std::isfinite(*v))
        throw ParseError(what + ": non-finite value", line);
    return *v;
}

struct Lines {
    std::vector<std::string> text;
    std::vector<std::size_t> number; ///< 1-based source line of each entry
};

/// Non-empty lines, optionally collecting `#` comments separately.
inline Lines read_lines(const std::filesystem::path& path, std::vector<std::string>* comments = nullptr)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open '" + path.string() + "' for reading");
    Lines out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        const auto t = trim(line);
        if (t.empty())
            continue;
        if (t.front() == '#') {
            if (comments)
                comments->emplace_back(t.substr(1));
            continue;
        }
        out.text.emplace_back(t);
        out.number.push_back(n);
    }
    return out;
}

inline bool is_header(std::string_view line)
{
    for (auto f : split(line))
        if (!to_double(f))
            return true;
    return false;
}

} // namespace detail

/// One value per row (first column); an optional non-numeric header is skipped.
inline std::vector<double> read_scalar_csv(const std::filesystem::path& path)
{
    const auto lines = detail::read_lines(path);
    std::vector<double> out;
    for (std::size_t i = 0; i < lines.text.size(); ++i) {
        if (i == 0 && detail::is_header(lines.text[i]))
            continue;
        const auto f = detail::split(lines.text[i]);
        out.push_back(detail::finite_field(f[0], lines.number[i], path.string()));
    }
    if (out.empty())
        throw ParseError(path.string() + ": no data rows");
    return out;
}

/// Columns `re,im`; a single column is read as a real series.
inline std::vector<std::complex<double>> read_complex_csv(const std::filesystem::path& path)
{
    const auto lines = detail::read_lines(path);
    std::vector<std::complex<double>> out;
    for (std::size_t i = 0; i < lines.text.size(); ++i) {
        if (i == 0 && detail::is_header(lines.text[i]))
            continue;
        const auto f = detail::split(lines.text[i]);
        if (f.size() > 2)
            throw ParseError(path.string() + ": expected one or two columns", lines.number[i]);
        const double re = detail::finite_field(f[0], lines.number[i], path.string());
        const double im = f.size() == 2 ? detail::finite_field(f[1], lines.number[i], path.string()) : 0.0;
        out.emplace_back(re, im);
    }
    if (out.empty())
        throw ParseError(path.string() + ": no data rows");
    return out;
}

/// Header `year,month,value` and consecutive monthly rows. A skipped month
/// or an empty / NaN value raises a gap error naming that month.
inline MonthlySeries read_nino34_csv(const std::filesystem::path& path)
{
    const auto lines = detail::read_lines(path);
    if (lines.text.empty())
        throw ParseError(path.string() + ": empty file");
    const auto header = detail::split(lines.text[0]);
    if (header.size() != 3 || header[0] != "year" || header[1] != "month" || header[2] != "value")
        throw ParseError(path.string() + ": header must be 'year,month,value'", lines.number[0]);
    MonthlySeries s;
    std::optional<int> prev;
    for (std::size_t i = 1; i < lines.text.size(); ++i) {
        const auto f = detail::split(lines.text[i]);
        const auto ln = lines.number[i];
        if (f.size() != 3)
            throw ParseError(path.string() + ": expected 3 columns", ln);
        const double yv = detail::finite_field(f[0], ln, path.string());
        const double mv = detail::finite_field(f[1], ln, path.string());
        if (yv != std::floor(yv) || mv != std::floor(mv) || mv < 1 || mv > 12)
            throw ParseError(path.string() + ": invalid year/month", ln);
        const YearMonth ym{static_cast<int>(yv), static_cast<int>(mv)};
        if (prev) {
            if (ym.ordinal() <= *prev)
                throw ParseError(path.string() + ": month " + ym.str() + " is out of order or duplicated", ln);
            if (ym.ordinal() != *prev + 1)
                throw GapError(path.string() + ": missing month " + YearMonth::from_ordinal(*prev + 1).str());
        } else {
            s.start = ym;
        }
        const auto v = detail::to_double(f[2]);
        if (f[2].empty() || (v && std::isnan(*v)))
            throw GapError(path.string() + ": missing value for " + ym.str());
        if (!v || !std::isfinite(*v))
            throw ParseError(path.string() + ": invalid value '" + std::string(f[2]) + "'", ln);
        s.values.push_back(*v);
        prev = ym.ordinal();
    }
    if (s.values.empty())
        throw ParseError(path.string() + ": no data rows");
    return s;
}

/// Simple table builder; cells are formatted on insertion.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    CsvTable& row() { rows_.emplace_back(); return *this; }
    CsvTable& add(double v) { rows_.back().push_back(format_double(v)); return *this; }
    CsvTable& add(long long v) { rows_.back().push_back(std::to_string(v)); return *this; }
    CsvTable& add(std::size_t v) { rows_.back().push_back(std::to_string(v)); return *this; }
    CsvTable& add(int v) { rows_.back().push_back(std::to_string(v)); return *this; }
    CsvTable& add(std::string v) { rows_.back().push_back(std::move(v)); return *this; }
    CsvTable& add(const char* v) { rows_.back().emplace_back(v); return *this; }
    CsvTable& add_missing() { rows_.back().emplace_back(); return *this; }
    CsvTable& add(const std::optional<double>& v) { return v ? add(*v) : add_missing(); }

    std::size_t size() const noexcept { return rows_.size(); }

    std::string str() const
    {
        std::string out;
        for (std::size_t i = 0; i < header_.size(); ++i)
            out += (i ? "," : "") + header_[i];
        out += '\n';
        for (const auto& r : rows_) {
            if (r.size() != header_.size())
                throw ShapeError("csv table: row has " + std::to_string(r.size()) + " cells, header has " +
                                 std::to_string(header_.size()));
            for (std::size_t i = 0; i < r.size(); ++i)
                out += (i ? "," : "") + r[i];
            out += '\n';
        }
        return out;
    }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

inline std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open '" + path.string() + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Writes through a sibling temporary file and renames it into place.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content)
{
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw IoError("cannot open '" + tmp + "' for writing");
        out << content;
        out.flush();
        if (!out)
            throw IoError("write to '" + tmp + "' failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot move '" + tmp + "' to '" + path.string() + "'");
    }
}

/// `# system=<name> dt=<dt> seed=<seed>` then header `x0,x1,...` and one row per step.
inline std::string trajectory_csv(const Trajectory& t)
{
    std::string out = "# system=" + (t.system.empty() ? std::string("unknown") : t.system) +
                      " dt=" + format_double(t.dt) + " seed=" + (t.seed ? std::to_string(*t.seed) : std::string("none")) +
                      "\n";
    std::vector<std::string> header;
    for (Eigen::Index j = 0; j < t.dim(); ++j)
        header.push_back("x" + std::to_string(j));
    CsvTable table(header);
    for (Eigen::Index n = 0; n < static_cast<Eigen::Index>(t.length()); ++n) {
        table.row();
        for (Eigen::Index j = 0; j < t.dim(); ++j)
            table.add(t.states(j, n));
    }
    return out + table.str();
}

inline Trajectory read_trajectory_csv(const std::filesystem::path& path)
{
    std::vector<std::string> comments;
    const auto lines = detail::read_lines(path, &comments);
    if (lines.text.empty())
        throw ParseError(path.string() + ": empty file");
    Trajectory t;
    t.dt = 1.0;
    for (const auto& c : comments) {
        std::istringstream ss(c);
        std::string tok;
        while (ss >> tok) {
            const auto eq = tok.find('=');
            if (eq == std::string::npos)
                continue;
            const auto key = tok.substr(0, eq), val = tok.substr(eq + 1);
            if (key == "system")
                t.system = val;
            else if (key == "dt") {
                const auto v = detail::to_double(val);
                if (!v || !(*v > 0.0))
                    throw ParseError(path.string() + ": invalid dt '" + val + "'");
                t.dt = *v;
            } else if (key == "seed" && val != "none") {
                std::uint64_t s = 0;
                const auto [p, ec] = std::from_chars(val.data(), val.data() + val.size(), s);
                if (ec != std::errc() || p != val.data() + val.size())
                    throw ParseError(path.string() + ": invalid seed '" + val + "'");
                t.seed = s;
            }
        }
    }
    std::size_t first = detail::is_header(lines.text[0]) ? 1 : 0;
    const std::size_t cols = detail::split(lines.text[0]).size();
    std::vector<double> flat;
    for (std::size_t i = first; i < lines.text.size(); ++i) {
        const auto f = detail::split(lines.text[i]);
        if (f.size() != cols)
            throw ParseError(path.string() + ": expected " + std::to_string(cols) + " columns", lines.number[i]);
        for (auto v : f)
            flat.push_back(detail::finite_field(v, lines.number[i], path.string()));
    }
    const std::size_t rows = flat.size() / cols;
    if (rows < 1)
        throw ParseError(path.string() + ": no data rows");
    t.states.resize(static_cast<Eigen::Index>(cols), static_cast<Eigen::Index>(rows));
    for (std::size_t n = 0; n < rows; ++n)
        for (std::size_t j = 0; j < cols; ++j)
            t.states(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(n)) = flat[n * cols + j];
    return t;
}

} // namespace birkhoff::io
