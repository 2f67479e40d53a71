#include "tripboost/civil_time.hpp"

#include <array>
#include <cstdio>

namespace tripboost {
namespace {

using namespace std::chrono;

bool parse_digits(std::string_view text, std::size_t pos, std::size_t count, int& out) {
  int value = 0;
  for (std::size_t i = pos; i < pos + count; ++i) {
    const char c = text[i];
    if (c < '0' || c > '9') return false;
    value = value * 10 + (c - '0');
  }
  out = value;
  return true;
}

}  // namespace

std::optional<Timestamp> parse_timestamp(std::string_view text) {
  // YYYY-MM-DDTHH:MM:SS
  if (text.size() != 19) return std::nullopt;
  if (text[4] != '-' || text[7] != '-' || text[10] != 'T' || text[13] != ':' || text[16] != ':') {
    return std::nullopt;
  }
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  if (!parse_digits(text, 0, 4, y) || !parse_digits(text, 5, 2, mo) ||
      !parse_digits(text, 8, 2, d) || !parse_digits(text, 11, 2, h) ||
      !parse_digits(text, 14, 2, mi) || !parse_digits(text, 17, 2, s)) {
    return std::nullopt;
  }
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 59) return std::nullopt;
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{s};
}

std::string format_timestamp(Timestamp t) {
  const auto f = civil_fields(t);
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%04d-%02u-%02uT%02u:%02u:%02u", f.year, f.month, f.day,
                f.hour, f.minute, f.second);
  return buf.data();
}

std::string format_date(sys_days d) {
  const year_month_day ymd{d};
  std::array<char, 16> buf{};
  std::snprintf(buf.data(), buf.size(), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf.data();
}

unsigned day_of_week(sys_days d) {
  // iso_encoding: Monday = 1 .. Sunday = 7
  return weekday{d}.iso_encoding() - 1;
}

unsigned iso_week_number(sys_days d) {
  // The ISO week belongs to the year of its Thursday.
  const sys_days thursday = d + days{3 - static_cast<int>(day_of_week(d))};
  const year iso_year = year_month_day{thursday}.year();
  const sys_days jan1 = sys_days{iso_year / January / 1};
  return static_cast<unsigned>((thursday - jan1).count() / 7 + 1);
}

CivilFields civil_fields(Timestamp t) {
  const sys_days d = day_of(t);
  const year_month_day ymd{d};
  const hh_mm_ss<seconds> tod{t - d};
  return CivilFields{
      static_cast<int>(ymd.year()),
      static_cast<unsigned>(ymd.month()),
      static_cast<unsigned>(ymd.day()),
      iso_week_number(d),
      day_of_week(d),
      static_cast<unsigned>(tod.hours().count()),
      static_cast<unsigned>(tod.minutes().count()),
      static_cast<unsigned>(tod.seconds().count()),
  };
}

sys_days month_start(sys_days d) {
  const year_month_day ymd{d};
  return sys_days{ymd.year() / ymd.month() / 1};
}

sys_days add_months(sys_days month_first, int n) {
  const year_month_day ymd{month_first};
  const year_month ym = ymd.year() / ymd.month() + months{n};
  return sys_days{ym / 1};
}

}  // namespace tripboost
