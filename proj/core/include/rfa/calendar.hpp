#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace rfa {

/// Proleptic Gregorian calendar date. Days are exchanged as "epoch days"
/// (days since 1970-01-01) so series arithmetic is plain integer math.
struct Date {
  int year = 1970;
  int month = 1;  // 1..12
  int day = 1;    // 1..31
};

bool is_valid_date(const Date& d);
std::int32_t to_epoch_day(const Date& d);
Date from_epoch_day(std::int32_t days);

/// Parse strict ISO-8601 "YYYY-MM-DD". Returns nullopt on malformed text or
/// an impossible calendar day (e.g. 2001-02-30).
std::optional<Date> parse_iso_date(std::string_view s);
std::string format_iso_date(const Date& d);
std::string format_iso_date(std::int32_t epoch_day);

/// Meteorological seasons.
enum class Season { SON, DJF, MAM, JJA };

inline constexpr Season kAllSeasons[] = {Season::SON, Season::DJF, Season::MAM, Season::JJA};

Season season_of_month(int month);
const char* season_name(Season s);
std::optional<Season> parse_season(std::string_view s);

inline bool in_season(int month, Season s) { return season_of_month(month) == s; }

/// Season-year label. DJF spans the calendar year boundary: a DJF season-year
/// is labeled by its January, so December belongs to the following label.
/// Other seasons are labeled by their calendar year.
int season_year(const Date& d, Season s);

/// Number of days of season `s` falling in season-year `sy`.
int season_length_days(Season s, int sy);

}  // namespace rfa
