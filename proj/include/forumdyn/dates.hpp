// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace forumdyn {

// Seconds since the Unix epoch, UTC.
using Timestamp = std::int64_t;

constexpr std::int64_t kSecondsPerDay = 86400;

// Accepts "YYYY-MM-DD", "YYYY-MM-DDTHH:MM[:SS[.fff]]" with optional "Z" or
// "+hh:mm"/"-hh:mm" offset (a space may replace the 'T'). Fractional seconds
// are truncated.
std::optional<Timestamp> parse_iso8601(std::string_view text);

std::int64_t days_from_civil(int year, unsigned month, unsigned day);

// Week index such that every ISO week (Monday..Sunday, UTC) maps to one
// integer and consecutive weeks map to consecutive integers.
std::int64_t iso_week_index(Timestamp ts);
std::int64_t week_index_of_day(std::int64_t days);

// Monday of the given week as days since epoch.
std::int64_t week_monday(std::int64_t week_index);

// "YYYY-MM-DD" of the Monday starting the week.
std::string week_start_date(std::int64_t week_index);

std::string format_date(std::int64_t days);

}  // namespace forumdyn
