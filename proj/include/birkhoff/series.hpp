#pragma once

/** @file
 * Contiguous monthly time series.
 */

#include <birkhoff/errors.hpp>

#include <cstdio>
#include <string>
#include <vector>

namespace birkhoff {

struct YearMonth {
    int year = 0;
    int month = 1; ///< 1..12

    int ordinal() const noexcept { return year * 12 + (month - 1); }
    static YearMonth from_ordinal(int k) noexcept { return {k >= 0 ? k / 12 : (k - 11) / 12, ((k % 12) + 12) % 12 + 1}; }

    std::string str() const
    {
        char buf[16];
        std::snprintf(buf, sizeof buf, "%04d-%02d", year, month);
        return buf;
    }

    friend bool operator==(const YearMonth&, const YearMonth&) = default;
};

struct MonthlySeries {
    YearMonth start;
    std::vector<double> values;

    YearMonth end() const { return YearMonth::from_ordinal(start.ordinal() + static_cast<int>(values.size()) - 1); }

    /// Position of `ym` in `values`; throws GapError when it is not covered.
    std::size_t index_of(YearMonth ym) const
    {
        const int k = ym.ordinal() - start.ordinal();
        if (k < 0 || k >= static_cast<int>(values.size()))
            throw GapError("monthly series " + start.str() + ".." + end().str() + " does not cover " + ym.str());
        return static_cast<std::size_t>(k);
    }
};

} // namespace birkhoff
