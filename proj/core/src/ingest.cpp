#include "rfa/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "rfa/csv.hpp"
#include "rfa/errors.hpp"

namespace rfa {

namespace {

using nlohmann::json;

std::vector<double> take_mod3(const std::vector<double>& v, int residue) {
  std::vector<double> out;
  out.reserve(v.size() / 3 + 1);
  for (std::size_t i = static_cast<std::size_t>(residue); i < v.size(); i += 3)
    out.push_back(v[i]);
  return out;
}

}  // namespace

std::vector<double> SeasonalWetSample::fit_values() const { return take_mod3(wet_values, 0); }
std::vector<double> SeasonalWetSample::test_values() const { return take_mod3(wet_values, 1); }
std::vector<double> SeasonalWetSample::spare_values() const { return take_mod3(wet_values, 2); }

SeasonalWetSample seasonal_wet_sample(const SiteSeries& series, Season season, double threshold_u) {
  if (!(threshold_u > 0.0)) throw UsageError("seasonal_wet_sample: threshold must be positive");
  SeasonalWetSample out;
  out.site_id = series.id;
  out.season = season;
  out.threshold_u = threshold_u;
  if (series.days.empty()) return out;

  const std::int32_t first = series.days.front();
  const std::int32_t last = series.days.back();

  // per season-year: observed days and wet days
  std::map<int, int> present, wet;
  for (std::size_t i = 0; i < series.days.size(); ++i) {
    const Date d = from_epoch_day(series.days[i]);
    if (season_of_month(d.month) != season) continue;
    const float v = series.precip_mm[i];
    if (std::isnan(v)) continue;  // missing: not counted anywhere
    const int sy = season_year(d, season);
    present[sy] += 1;
    if (v > threshold_u) {
      wet[sy] += 1;
      out.wet_days.push_back(series.days[i]);
      out.wet_values.push_back(static_cast<double>(v));
    }
  }

  // A season-year is complete when all its nominal days lie inside the record
  // span. Incomplete edge seasons still contribute wet values, but not to the
  // per-season wet-day rate.
  double eff_seasons = 0.0;
  double wet_in_complete = 0.0;
  int complete = 0;
  for (const auto& [sy, n_present] : present) {
    Date season_first{}, season_last{};
    switch (season) {
      case Season::SON: season_first = {sy, 9, 1}; season_last = {sy, 11, 30}; break;
      case Season::DJF: season_first = {sy - 1, 12, 1};
        season_last = {sy, 2, season_length_days(Season::DJF, sy) - 62}; break;
      case Season::MAM: season_first = {sy, 3, 1}; season_last = {sy, 5, 31}; break;
      case Season::JJA: season_first = {sy, 6, 1}; season_last = {sy, 8, 31}; break;
    }
    if (to_epoch_day(season_first) < first || to_epoch_day(season_last) > last) continue;
    const int nominal = season_length_days(season, sy);
    eff_seasons += static_cast<double>(n_present) / static_cast<double>(nominal);
    auto it = wet.find(sy);
    wet_in_complete += it == wet.end() ? 0.0 : static_cast<double>(it->second);
    complete += 1;
  }
  out.complete_seasons = complete;
  out.n_wds_mean = eff_seasons > 0.0 ? wet_in_complete / eff_seasons : 0.0;
  return out;
}

std::vector<Season> seasons_with_high_missing(const SiteSeries& series) {
  std::vector<Season> out;
  if (series.days.empty()) return out;
  const std::int32_t first = series.days.front();
  const std::int32_t last = series.days.back();

  // nominal in-span days per season
  int nominal[4] = {0, 0, 0, 0};
  for (std::int32_t d = first; d <= last; ++d) {
    const Date date = from_epoch_day(d);
    nominal[static_cast<int>(season_of_month(date.month))] += 1;
  }
  int observed[4] = {0, 0, 0, 0};
  for (std::size_t i = 0; i < series.days.size(); ++i) {
    if (std::isnan(series.precip_mm[i])) continue;
    const Date date = from_epoch_day(series.days[i]);
    observed[static_cast<int>(season_of_month(date.month))] += 1;
  }
  for (Season s : kAllSeasons) {
    const int idx = static_cast<int>(s);
    if (nominal[idx] == 0) continue;
    const double missing =
        1.0 - static_cast<double>(observed[idx]) / static_cast<double>(nominal[idx]);
    if (missing > 0.20) out.push_back(s);
  }
  return out;
}

GridFormat guess_format(const std::string& path) {
  const auto ext = std::filesystem::path(path).extension().string();
  return ext == ".json" ? GridFormat::DenseBinary : GridFormat::LongCsv;
}

namespace {

void validate_site_id(const std::string& id, const std::string& context) {
  if (id.empty()) throw DataError(context + ": empty site_id");
  if (id.find(',') != std::string::npos || id.find('\n') != std::string::npos)
    throw DataError(context + ": site_id '" + id + "' contains a comma or newline");
}

std::vector<SiteSeries> load_long_csv(const std::string& path) {
  CsvReader reader(path);
  const int c_site = reader.require_column("site_id");
  const int c_lon = reader.require_column("lon");
  const int c_lat = reader.require_column("lat");
  const int c_date = reader.require_column("date");
  const int c_precip = reader.require_column("precip_mm");

  std::vector<SiteSeries> sites;
  std::unordered_map<std::string, std::size_t> index;
  std::vector<std::string> f;
  while (reader.next(f)) {
    const std::string& id = f[static_cast<std::size_t>(c_site)];
    const std::string where = path + ":" + std::to_string(reader.line_number());
    validate_site_id(id, where);

    auto [it, inserted] = index.try_emplace(id, sites.size());
    if (inserted) {
      SiteSeries s;
      s.id = id;
      s.lon = parse_double_field(f[static_cast<std::size_t>(c_lon)], reader, "lon");
      s.lat = parse_double_field(f[static_cast<std::size_t>(c_lat)], reader, "lat");
      sites.push_back(std::move(s));
    }
    SiteSeries& s = sites[it->second];

    const auto date = parse_iso_date(f[static_cast<std::size_t>(c_date)]);
    if (!date) {
      throw DataError(where + ": invalid date '" + f[static_cast<std::size_t>(c_date)] +
                      "' for site " + id);
    }
    const std::int32_t epoch = to_epoch_day(*date);
    if (!s.days.empty() && epoch <= s.days.back()) {
      throw DataError(where + ": non-monotone date " + f[static_cast<std::size_t>(c_date)] +
                      " for site " + id);
    }

    const std::string& pv = f[static_cast<std::size_t>(c_precip)];
    float value;
    if (pv.empty() || pv == "nan" || pv == "NaN" || pv == "NA") {
      value = std::numeric_limits<float>::quiet_NaN();
    } else {
      const double v = parse_double_field(pv, reader, "precip_mm");
      if (std::isnan(v)) {
        value = std::numeric_limits<float>::quiet_NaN();
      } else {
        if (!(v >= 0.0) || !std::isfinite(v))
          throw DataError(where + ": negative or non-finite precipitation for site " + id);
        value = static_cast<float>(v);
      }
    }
    s.days.push_back(epoch);
    s.precip_mm.push_back(value);
  }
  for (auto& s : sites) s.high_missing = seasons_with_high_missing(s);
  return sites;
}

struct DenseHeader {
  std::string data_path;
  std::int32_t start_day = 0;
  std::int64_t n_days = 0;
  struct SiteMeta {
    std::string id;
    double lon, lat;
    std::optional<double> elev;
  };
  std::vector<SiteMeta> sites;
};

DenseHeader read_dense_header(const std::string& sidecar_path) {
  std::ifstream in(sidecar_path);
  if (!in) throw DataError("cannot open: " + sidecar_path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError(sidecar_path + ": invalid JSON: " + e.what());
  }

  DenseHeader h;
  try {
    const auto date = parse_iso_date(j.at("start_date").get<std::string>());
    if (!date) throw DataError(sidecar_path + ": invalid start_date");
    h.start_day = to_epoch_day(*date);
    h.n_days = j.at("n_days").get<std::int64_t>();
    if (h.n_days <= 0) throw DataError(sidecar_path + ": n_days must be positive");
    const std::string data_file = j.at("data_file").get<std::string>();
    h.data_path = (std::filesystem::path(sidecar_path).parent_path() / data_file).string();
    for (const auto& js : j.at("sites")) {
      DenseHeader::SiteMeta m;
      m.id = js.at("id").get<std::string>();
      validate_site_id(m.id, sidecar_path);
      m.lon = js.at("lon").get<double>();
      m.lat = js.at("lat").get<double>();
      if (js.contains("elev") && !js["elev"].is_null()) m.elev = js["elev"].get<double>();
      h.sites.push_back(std::move(m));
    }
  } catch (const json::exception& e) {
    throw DataError(sidecar_path + ": schema mismatch: " + e.what());
  }
  if (h.sites.empty()) throw DataError(sidecar_path + ": no sites");
  return h;
}

void stream_dense(const std::string& sidecar_path, const std::function<void(SiteSeries&&)>& fn) {
  const DenseHeader h = read_dense_header(sidecar_path);
  std::ifstream data(h.data_path, std::ios::binary);
  if (!data) throw DataError("cannot open data file: " + h.data_path);

  data.seekg(0, std::ios::end);
  const auto file_size = static_cast<std::int64_t>(data.tellg());
  const std::int64_t expect = static_cast<std::int64_t>(h.sites.size()) * h.n_days * 4;
  if (file_size != expect) {
    throw DataError(h.data_path + ": size " + std::to_string(file_size) + " does not match " +
                    std::to_string(h.sites.size()) + " sites x " + std::to_string(h.n_days) +
                    " days x 4 bytes");
  }
  data.seekg(0, std::ios::beg);

  std::vector<float> row(static_cast<std::size_t>(h.n_days));
  std::vector<std::int32_t> days(static_cast<std::size_t>(h.n_days));
  for (std::int64_t d = 0; d < h.n_days; ++d)
    days[static_cast<std::size_t>(d)] = h.start_day + static_cast<std::int32_t>(d);

  for (const auto& meta : h.sites) {
    data.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size() * 4));
    if (!data) throw DataError(h.data_path + ": short read at site " + meta.id);
    for (float v : row) {
      if (!std::isnan(v) && (v < 0.0f || !std::isfinite(v)))
        throw DataError(h.data_path + ": negative or non-finite precipitation for site " + meta.id);
    }
    SiteSeries s;
    s.id = meta.id;
    s.lon = meta.lon;
    s.lat = meta.lat;
    s.elevation_m = meta.elev;
    s.days = days;
    s.precip_mm = row;
    s.high_missing = seasons_with_high_missing(s);
    fn(std::move(s));
  }
}

}  // namespace

std::vector<SiteSeries> load_grid(const GridSource& source) {
  if (source.format == GridFormat::LongCsv) return load_long_csv(source.path);
  std::vector<SiteSeries> sites;
  stream_dense(source.path, [&](SiteSeries&& s) { sites.push_back(std::move(s)); });
  return sites;
}

void for_each_site(const GridSource& source, const std::function<void(SiteSeries&&)>& fn) {
  if (source.format == GridFormat::DenseBinary) {
    stream_dense(source.path, fn);
    return;
  }
  for (auto& s : load_long_csv(source.path)) fn(std::move(s));
}

std::size_t count_sites(const GridSource& source) {
  if (source.format == GridFormat::DenseBinary)
    return read_dense_header(source.path).sites.size();
  return load_long_csv(source.path).size();
}

}  // namespace rfa
