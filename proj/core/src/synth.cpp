#include "rfa/synth.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "rfa/csv.hpp"
#include "rfa/errors.hpp"
#include "rfa/rng.hpp"

namespace rfa {

namespace {
using nlohmann::json;
}

SynthSpec parse_synth_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open synth spec: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError(path + ": invalid JSON: " + e.what());
  }

  SynthSpec spec;
  try {
    spec.start_year = j.value("start_year", 1979);
    spec.years = j.at("years").get<int>();
    spec.threshold_u = j.value("threshold_mm", kDefaultThresholdMm);
    spec.seed = j.value("seed", 0ULL);
    if (j.contains("seasons")) {
      for (const auto& s : j["seasons"]) {
        const auto season = parse_season(s.get<std::string>());
        if (!season) throw DataError(path + ": unknown season '" + s.get<std::string>() + "'");
        spec.active_seasons.push_back(*season);
      }
    }
    for (const auto& jr : j.at("regions")) {
      SynthRegion r;
      r.name = jr.at("name").get<std::string>();
      r.n_sites = jr.at("n_sites").get<int>();
      r.kappa = jr.at("kappa").get<double>();
      r.xi = jr.at("xi").get<double>();
      const auto& sr = jr.at("sigma_range");
      r.sigma_min = sr.at(0).get<double>();
      r.sigma_max = sr.at(1).get<double>();
      r.wet_fraction = jr.at("wet_fraction").get<double>();
      spec.regions.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw DataError(path + ": schema mismatch: " + e.what());
  }

  if (spec.regions.empty()) throw UsageError(path + ": at least one region required");
  if (spec.years < 1) throw UsageError(path + ": years must be >= 1");
  for (const auto& r : spec.regions) {
    if (r.n_sites < 1) throw UsageError("region " + r.name + ": n_sites must be >= 1");
    if (!(r.kappa > 0.0)) throw UsageError("region " + r.name + ": kappa must be positive");
    if (!(r.xi >= 0.0) || r.xi >= 1.0) throw UsageError("region " + r.name + ": xi must be in [0, 1)");
    if (!(r.sigma_min > 0.0) || r.sigma_max < r.sigma_min)
      throw UsageError("region " + r.name + ": bad sigma_range");
    if (!(r.wet_fraction > 0.0) || r.wet_fraction > 1.0)
      throw UsageError("region " + r.name + ": wet_fraction must be in (0, 1]");
  }
  return spec;
}

SynthGrid generate_synth(const SynthSpec& spec) {
  SynthGrid grid;

  const std::int32_t first_day = to_epoch_day({spec.start_year, 1, 1});
  const std::int32_t last_day = to_epoch_day({spec.start_year + spec.years - 1, 12, 31});
  const auto n_days = static_cast<std::size_t>(last_day - first_day + 1);

  std::vector<std::int32_t> days(n_days);
  std::vector<char> in_season(n_days, 1);
  for (std::size_t d = 0; d < n_days; ++d) {
    days[d] = first_day + static_cast<std::int32_t>(d);
    if (!spec.active_seasons.empty()) {
      const Season s = season_of_month(from_epoch_day(days[d]).month);
      in_season[d] =
          std::find(spec.active_seasons.begin(), spec.active_seasons.end(), s) !=
          spec.active_seasons.end();
    }
  }

  int total_sites = 0;
  for (const auto& r : spec.regions) total_sites += r.n_sites;
  const int id_width = total_sites >= 10000 ? 6 : 4;

  int global = 0;
  for (std::size_t ri = 0; ri < spec.regions.size(); ++ri) {
    const SynthRegion& region = spec.regions[ri];
    grid.region_names.push_back(region.name);
    const int grid_w = std::max(1, static_cast<int>(std::ceil(std::sqrt(region.n_sites))));
    for (int si = 0; si < region.n_sites; ++si, ++global) {
      const double frac = region.n_sites > 1
                              ? static_cast<double>(si) / static_cast<double>(region.n_sites - 1)
                              : 0.5;
      const double sigma = region.sigma_min + (region.sigma_max - region.sigma_min) * frac;
      const Egpd dist(region.kappa, sigma, region.xi);

      char idbuf[32];
      std::snprintf(idbuf, sizeof(idbuf), "s%0*d", id_width, global);

      SiteSeries site;
      site.id = idbuf;
      // regions laid out as separated lon bands on a 0.25 deg grid
      site.lon = 10.0 * static_cast<double>(ri) + 0.25 * (si % grid_w);
      site.lat = 40.0 + 0.25 * (si / grid_w);
      site.days = days;
      site.precip_mm.assign(n_days, 0.0f);

      Rng rng = Rng::stream(spec.seed, "synth-site", static_cast<std::uint64_t>(global));
      for (std::size_t d = 0; d < n_days; ++d) {
        if (!in_season[d]) continue;
        if (rng.uniform01() < region.wet_fraction) {
          site.precip_mm[d] = static_cast<float>(dist.sample_truncated(rng, spec.threshold_u));
        }
      }
      grid.sites.push_back(std::move(site));

      SynthSiteTruth t;
      t.id = idbuf;
      t.region = static_cast<int>(ri);
      t.params = dist.params();
      t.wet_fraction = region.wet_fraction;
      grid.truth.push_back(std::move(t));
    }
  }
  return grid;
}

void write_grid_csv(const std::vector<SiteSeries>& sites, const std::string& path) {
  CsvWriter w(path, {"site_id", "lon", "lat", "date", "precip_mm"});
  for (const auto& s : sites) {
    for (std::size_t i = 0; i < s.days.size(); ++i) {
      const float v = s.precip_mm[i];
      w.row({s.id, format_double(s.lon), format_double(s.lat), format_iso_date(s.days[i]),
             std::isnan(v) ? std::string() : format_double(static_cast<double>(v))});
    }
  }
  w.close();
}

void write_grid_dense(const std::vector<SiteSeries>& sites, const std::string& sidecar_path,
                      const std::string& data_file_name) {
  if (sites.empty()) throw UsageError("write_grid_dense: no sites");
  const std::size_t n_days = sites.front().days.size();
  for (const auto& s : sites) {
    if (s.days.size() != n_days)
      throw UsageError("write_grid_dense: all sites must share the same day axis");
  }

  json j;
  j["format"] = "rfa-dense-grid-v1";
  j["start_date"] = format_iso_date(sites.front().days.front());
  j["n_days"] = n_days;
  j["data_file"] = data_file_name;
  json jsites = json::array();
  for (const auto& s : sites) {
    json js;
    js["id"] = s.id;
    js["lon"] = s.lon;
    js["lat"] = s.lat;
    if (s.elevation_m) js["elev"] = *s.elevation_m;
    jsites.push_back(std::move(js));
  }
  j["sites"] = std::move(jsites);

  std::ofstream side(sidecar_path, std::ios::binary);
  if (!side) throw DataError("cannot write: " + sidecar_path);
  side << j.dump(2) << '\n';
  side.close();

  const auto data_path =
      (std::filesystem::path(sidecar_path).parent_path() / data_file_name).string();
  std::ofstream data(data_path, std::ios::binary);
  if (!data) throw DataError("cannot write: " + data_path);
  for (const auto& s : sites) {
    data.write(reinterpret_cast<const char*>(s.precip_mm.data()),
               static_cast<std::streamsize>(s.precip_mm.size() * 4));
  }
  data.close();
  if (!data) throw DataError("write failure on " + data_path);
}

void write_truth_manifest(const SynthGrid& grid, const SynthSpec& spec, const std::string& path) {
  json j;
  j["seed"] = spec.seed;
  j["threshold_mm"] = spec.threshold_u;
  j["years"] = spec.years;
  j["start_year"] = spec.start_year;
  j["regions"] = grid.region_names;
  json sites = json::array();
  for (const auto& t : grid.truth) {
    json js;
    js["id"] = t.id;
    js["region"] = t.region;
    js["kappa"] = t.params.kappa;
    js["sigma"] = t.params.sigma;
    js["xi"] = t.params.xi;
    js["wet_fraction"] = t.wet_fraction;
    sites.push_back(std::move(js));
  }
  j["sites"] = std::move(sites);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write: " + path);
  out << j.dump(2) << '\n';
}

}  // namespace rfa
