#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace tripboost {

/// Naive local wall-clock time at one-second resolution. No time zone is
/// attached; arithmetic treats the clock as uniform.
using Timestamp = std::chrono::sys_seconds;
using Seconds = std::chrono::seconds;

/// Parses `YYYY-MM-DDTHH:MM:SS` strictly. Returns nullopt on any deviation,
/// including out-of-range calendar fields.
std::optional<Timestamp> parse_timestamp(std::string_view text);

std::string format_timestamp(Timestamp t);

/// `YYYY-MM-DD`
std::string format_date(std::chrono::sys_days d);

struct CivilFields {
  int year;
  unsigned month;         // 1..12
  unsigned day;           // 1..31
  unsigned iso_week;      // 1..53
  unsigned day_of_week;   // Monday = 0 .. Sunday = 6
  unsigned hour;          // 0..23
  unsigned minute;        // 0..59
  unsigned second;        // 0..59
};

CivilFields civil_fields(Timestamp t);

/// ISO-8601 week number of the given day.
unsigned iso_week_number(std::chrono::sys_days d);

/// Monday = 0 .. Sunday = 6
unsigned day_of_week(std::chrono::sys_days d);

inline std::chrono::sys_days day_of(Timestamp t) {
  return std::chrono::floor<std::chrono::days>(t);
}

/// First day of the month containing `d`.
std::chrono::sys_days month_start(std::chrono::sys_days d);

/// `d` shifted by whole calendar months; `d` must be a month start.
std::chrono::sys_days add_months(std::chrono::sys_days month_first, int months);

}  // namespace tripboost
