#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rfa/calendar.hpp"

namespace rfa {

/// One grid point's daily precipitation record. Days absent from the source
/// and NaN entries are missing observations; they are never zero-filled.
struct SiteSeries {
  std::string id;
  double lon = 0.0;
  double lat = 0.0;
  std::optional<double> elevation_m;
  std::vector<std::int32_t> days;  // epoch days, strictly increasing
  std::vector<float> precip_mm;    // same length; NaN = missing
  std::vector<Season> high_missing;  // seasons with > 20% missing days in-record

  std::size_t size() const { return days.size(); }
};

/// Wet-day sample of one site and season: values strictly above the threshold
/// u, in chronological order, with the deterministic declustering/holdout
/// split. Position j in the wet-day sequence belongs to FIT when j % 3 == 0,
/// TEST when j % 3 == 1 and SPARE when j % 3 == 2, so consecutive wet days
/// never share a set and the three sizes differ by at most one.
struct SeasonalWetSample {
  std::string site_id;
  Season season = Season::SON;
  double threshold_u = 1.0;
  std::vector<std::int32_t> wet_days;
  std::vector<double> wet_values;

  /// Mean wet days per season, averaged over complete seasons only (a season
  /// clipped by the record edge is excluded; within complete seasons, missing
  /// observations shrink the denominator proportionally).
  double n_wds_mean = 0.0;
  int complete_seasons = 0;

  int fit_count() const { return (static_cast<int>(wet_values.size()) + 2) / 3; }
  int test_count() const { return (static_cast<int>(wet_values.size()) + 1) / 3; }
  int spare_count() const { return static_cast<int>(wet_values.size()) / 3; }

  std::vector<double> fit_values() const;
  std::vector<double> test_values() const;
  std::vector<double> spare_values() const;

  bool sufficient(int min_fit = 30) const { return fit_count() >= min_fit; }
};

/// Default wet-day threshold (mm/day).
inline constexpr double kDefaultThresholdMm = 1.0;

SeasonalWetSample seasonal_wet_sample(const SiteSeries& series, Season season,
                                      double threshold_u = kDefaultThresholdMm);

// ---------------------------------------------------------------------------
// Grid input
// ---------------------------------------------------------------------------

/// Format A: long CSV `site_id,lon,lat,date,precip_mm` with ISO-8601 dates;
/// an empty or `nan` precipitation field is a missing observation.
/// Format B: JSON sidecar (site table, start date, day count, data file name)
/// plus a row-major float32 matrix (sites x days), missing = NaN.
enum class GridFormat { LongCsv, DenseBinary };

struct GridSource {
  std::string path;
  GridFormat format = GridFormat::LongCsv;
};

/// .json -> DenseBinary sidecar, anything else -> LongCsv.
GridFormat guess_format(const std::string& path);

/// Load the whole grid into memory, sites in file order (format B) or order
/// of first appearance (format A). Hard DataError on schema violations,
/// naming the offending site/row.
std::vector<SiteSeries> load_grid(const GridSource& source);

/// Visit one site at a time without holding the full grid. Format B streams
/// one matrix row per site; format A falls back to a full load.
void for_each_site(const GridSource& source, const std::function<void(SiteSeries&&)>& fn);

/// Number of sites (cheap header read for format B, full scan for format A).
std::size_t count_sites(const GridSource& source);

/// Mark seasons whose missing fraction within the record span exceeds 20%.
std::vector<Season> seasons_with_high_missing(const SiteSeries& series);

}  // namespace rfa
