#include "rfa/calendar.hpp"

#include <array>
#include <charconv>
#include <cstdio>

namespace rfa {

namespace {

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
  static constexpr std::array<int, 13> base = {0, 31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (m == 2 && is_leap(y)) return 29;
  return base[static_cast<std::size_t>(m)];
}

}  // namespace

bool is_valid_date(const Date& d) {
  if (d.month < 1 || d.month > 12) return false;
  if (d.day < 1 || d.day > days_in_month(d.year, d.month)) return false;
  return true;
}

// Howard Hinnant's civil-days algorithms.
std::int32_t to_epoch_day(const Date& d) {
  int y = d.year;
  const int m = d.month;
  y -= m <= 2;
  const int era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = static_cast<unsigned>((153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d.day - 1);
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return static_cast<std::int32_t>(era * 146097 + static_cast<int>(doe) - 719468);
}

Date from_epoch_day(std::int32_t days) {
  std::int64_t z = days;
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp + (mp < 10 ? 3 : static_cast<unsigned>(-9));
  return Date{static_cast<int>(y + (m <= 2)), static_cast<int>(m), static_cast<int>(d)};
}

std::optional<Date> parse_iso_date(std::string_view s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  Date d;
  auto num = [&](std::string_view part, int& out) {
    auto [p, ec] = std::from_chars(part.data(), part.data() + part.size(), out);
    return ec == std::errc() && p == part.data() + part.size();
  };
  if (!num(s.substr(0, 4), d.year) || !num(s.substr(5, 2), d.month) || !num(s.substr(8, 2), d.day))
    return std::nullopt;
  if (!is_valid_date(d)) return std::nullopt;
  return d;
}

std::string format_iso_date(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", d.year, d.month, d.day);
  return buf;
}

std::string format_iso_date(std::int32_t epoch_day) { return format_iso_date(from_epoch_day(epoch_day)); }

Season season_of_month(int month) {
  switch (month) {
    case 9: case 10: case 11: return Season::SON;
    case 12: case 1: case 2: return Season::DJF;
    case 3: case 4: case 5: return Season::MAM;
    default: return Season::JJA;
  }
}

const char* season_name(Season s) {
  switch (s) {
    case Season::SON: return "SON";
    case Season::DJF: return "DJF";
    case Season::MAM: return "MAM";
    case Season::JJA: return "JJA";
  }
  return "?";
}

std::optional<Season> parse_season(std::string_view s) {
  if (s == "SON" || s == "son") return Season::SON;
  if (s == "DJF" || s == "djf") return Season::DJF;
  if (s == "MAM" || s == "mam") return Season::MAM;
  if (s == "JJA" || s == "jja") return Season::JJA;
  return std::nullopt;
}

int season_year(const Date& d, Season s) {
  if (s == Season::DJF && d.month == 12) return d.year + 1;
  return d.year;
}

int season_length_days(Season s, int sy) {
  switch (s) {
    case Season::SON: return 91;
    case Season::MAM: return 92;
    case Season::JJA: return 92;
    case Season::DJF: return 31 + 31 + (is_leap(sy) ? 29 : 28);  // Dec(sy-1), Jan, Feb
  }
  return 0;
}

}  // namespace rfa
