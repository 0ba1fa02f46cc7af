#include "pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>

#include <nlohmann/json.hpp>

#include "rfa/cluster.hpp"
#include "rfa/csv.hpp"
#include "rfa/errors.hpp"
#include "rfa/evaluate.hpp"
#include "rfa/fit.hpp"
#include "rfa/parallel.hpp"
#include "rfa/pwm.hpp"
#include "rfa/rng.hpp"
#include "rfa/synth.hpp"
#include "rfa/version.hpp"

namespace rfa::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string join_path(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create output directory " + dir + ": " + ec.message());
}

void write_manifest(const std::string& out_dir, const std::string& command, json config) {
  json j;
  j["command"] = command;
  j["version"] = kVersion;
  j["config"] = std::move(config);
  std::ofstream out(join_path(out_dir, command + "_manifest.json"), std::ios::binary);
  if (!out) throw DataError("cannot write manifest in " + out_dir);
  out << j.dump(2) << '\n';
}

json common_config_json(const CommonConfig& cfg) {
  json j;
  j["input"] = cfg.input;
  j["format"] = cfg.format;
  json seasons = json::array();
  for (Season s : cfg.resolve_seasons()) seasons.push_back(season_name(s));
  j["seasons"] = std::move(seasons);
  j["threshold_mm"] = cfg.threshold_u;
  j["seed"] = cfg.seed;
  j["threads"] = cfg.threads;
  j["min_fit"] = cfg.min_fit;
  j["out"] = cfg.out_dir;
  return j;
}

// ---------------------------------------------------------------------------
// Grid reduction: one pass over the input, one wet sample per (site, season).
// Sites come out sorted by id so every downstream loop is order-canonical.
// ---------------------------------------------------------------------------

struct SeasonSite {
  std::string id;
  double lon = 0.0, lat = 0.0;
  std::optional<double> elevation_m;
  SeasonalWetSample sample;
  OmegaResult omega;
};

struct SeasonData {
  Season season = Season::SON;
  std::vector<SeasonSite> sites;  // sorted by id
};

std::vector<SeasonData> reduce_grid(const GridSource& source, const std::vector<Season>& seasons,
                                    double threshold_u) {
  std::vector<SeasonData> data(seasons.size());
  for (std::size_t si = 0; si < seasons.size(); ++si) data[si].season = seasons[si];

  for_each_site(source, [&](SiteSeries&& site) {
    for (std::size_t si = 0; si < seasons.size(); ++si) {
      SeasonSite entry;
      entry.id = site.id;
      entry.lon = site.lon;
      entry.lat = site.lat;
      entry.elevation_m = site.elevation_m;
      entry.sample = seasonal_wet_sample(site, seasons[si], threshold_u);
      entry.sample.wet_days.clear();
      entry.sample.wet_days.shrink_to_fit();
      entry.omega = entry.sample.wet_values.size() >= 3
                        ? omega_ratio(entry.sample.wet_values)
                        : OmegaResult{0.0, true, static_cast<int>(entry.sample.wet_values.size())};
      data[si].sites.push_back(std::move(entry));
    }
  });
  for (auto& sd : data) {
    std::sort(sd.sites.begin(), sd.sites.end(),
              [](const SeasonSite& a, const SeasonSite& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < sd.sites.size(); ++i) {
      if (sd.sites[i].id == sd.sites[i - 1].id)
        throw DataError("duplicate site id '" + sd.sites[i].id + "' in input");
    }
  }
  return data;
}

void write_wet_stats(const std::vector<SeasonData>& data, const std::string& path, int min_fit) {
  CsvWriter w(path, {"site_id", "lon", "lat", "season", "n_wds_mean", "n_wet", "n_fit", "n_test",
                     "n_spare", "complete_seasons", "insufficient"});
  for (const auto& sd : data) {
    for (const auto& s : sd.sites) {
      w.row({s.id, format_double(s.lon), format_double(s.lat), season_name(sd.season),
             format_double(s.sample.n_wds_mean), format_int(static_cast<long long>(s.sample.wet_values.size())),
             format_int(s.sample.fit_count()), format_int(s.sample.test_count()),
             format_int(s.sample.spare_count()), format_int(s.sample.complete_seasons),
             s.sample.sufficient(min_fit) ? "0" : "1"});
    }
  }
  w.close();
}

}  // namespace

GridSource CommonConfig::resolve_source() const {
  if (input.empty()) throw UsageError("--input is required");
  GridSource src;
  src.path = input;
  if (format == "A" || format == "a") src.format = GridFormat::LongCsv;
  else if (format == "B" || format == "b") src.format = GridFormat::DenseBinary;
  else if (format == "auto") src.format = guess_format(input);
  else throw UsageError("unknown --format '" + format + "' (use A, B or auto)");
  return src;
}

std::vector<Season> CommonConfig::resolve_seasons() const {
  if (seasons.empty()) return {Season::SON, Season::DJF, Season::MAM, Season::JJA};
  std::vector<Season> out;
  for (const auto& name : seasons) {
    const auto s = parse_season(name);
    if (!s) throw UsageError("unknown season '" + name + "'");
    if (std::find(out.begin(), out.end(), *s) == out.end()) out.push_back(*s);
  }
  return out;
}

// ---------------------------------------------------------------------------
// cluster
// ---------------------------------------------------------------------------

int cmd_cluster(const ClusterConfig& cfg) {
  ensure_out_dir(cfg.out_dir);
  const auto seasons = cfg.resolve_seasons();
  const auto data = reduce_grid(cfg.resolve_source(), seasons, cfg.threshold_u);

  // omega field export
  {
    CsvWriter w(join_path(cfg.out_dir, "omega.csv"),
                {"site_id", "lon", "lat", "season", "omega", "n_fit"});
    for (const auto& sd : data) {
      for (const auto& s : sd.sites) {
        w.row({s.id, format_double(s.lon), format_double(s.lat), season_name(sd.season),
               s.omega.degenerate ? std::string() : format_double(s.omega.omega),
               format_int(s.omega.n)});
      }
    }
    w.close();
  }
  write_wet_stats(data, join_path(cfg.out_dir, "wet_stats.csv"), cfg.min_fit);

  const bool scan = cfg.k == "scan";
  int k_fixed = 0;
  if (!scan) {
    try {
      k_fixed = std::stoi(cfg.k);
    } catch (const std::exception&) {
      throw UsageError("--k must be an integer or 'scan'");
    }
    if (k_fixed < 2 || k_fixed > 10) throw UsageError("--k must lie in [2, 10]");
  }

  std::optional<CsvWriter> validity_csv;
  std::optional<CsvWriter> partition_csv;
  std::optional<CsvWriter> marker_csv;
  if (scan) {
    validity_csv.emplace(join_path(cfg.out_dir, "validity.csv"),
                         std::vector<std::string>{"season", "k", "mean_silhouette", "dunn",
                                                  "davies_bouldin", "xie_beni", "s_dbw", "note"});
  } else {
    partition_csv.emplace(join_path(cfg.out_dir, "partition.csv"),
                          std::vector<std::string>{"site_id", "lon", "lat", "season", "cluster",
                                                   "silhouette", "is_medoid"});
    marker_csv.emplace(join_path(cfg.out_dir, "cluster_markers.csv"),
                       std::vector<std::string>{"season", "cluster", "marker", "site_id"});
  }

  for (const auto& sd : data) {
    // clustering universe: sites with a usable omega
    std::vector<int> active;
    std::vector<double> omega;
    for (std::size_t i = 0; i < sd.sites.size(); ++i) {
      if (!sd.sites[i].omega.degenerate) {
        active.push_back(static_cast<int>(i));
        omega.push_back(sd.sites[i].omega.omega);
      }
    }

    if (scan) {
      if (omega.size() < 2) {
        validity_csv->row({season_name(sd.season), "", "", "", "", "", "",
                           "fewer than 2 usable sites"});
        continue;
      }
      const auto rows = validity_indices(omega, 2, 10, cfg.max_sweeps);
      for (const auto& r : rows) {
        if (r.ok) {
          validity_csv->row({season_name(sd.season), format_int(r.k),
                             format_double(r.mean_silhouette), format_double(r.dunn),
                             format_double(r.davies_bouldin), format_double(r.xie_beni),
                             format_double(r.s_dbw), ""});
        } else {
          validity_csv->row({season_name(sd.season), format_int(r.k), "", "", "", "", "", r.note});
        }
      }
      continue;
    }

    if (static_cast<int>(omega.size()) < k_fixed) {
      throw NumericError(std::string("season ") + season_name(sd.season) + ": only " +
                         std::to_string(omega.size()) + " usable sites for k=" +
                         std::to_string(k_fixed));
    }
    const Partition part = pam_cluster(omega, k_fixed, cfg.max_sweeps);

    // full-site assignment: degenerate sites inherit the cluster of the
    // geographically nearest usable site
    std::vector<int> cluster_of(sd.sites.size(), -1);
    std::vector<double> sil_of(sd.sites.size(), 0.0);
    std::vector<char> medoid_of(sd.sites.size(), 0);
    for (std::size_t a = 0; a < active.size(); ++a) {
      cluster_of[static_cast<std::size_t>(active[a])] = part.assignment[a];
      sil_of[static_cast<std::size_t>(active[a])] = part.silhouette[a];
    }
    for (int m : part.medoids) medoid_of[static_cast<std::size_t>(active[static_cast<std::size_t>(m)])] = 1;
    for (std::size_t i = 0; i < sd.sites.size(); ++i) {
      if (cluster_of[i] >= 0) continue;
      if (sd.sites[i].sample.wet_values.empty()) continue;  // stays unassigned
      double best = std::numeric_limits<double>::infinity();
      int best_site = -1;
      for (std::size_t a = 0; a < active.size(); ++a) {
        const auto& other = sd.sites[static_cast<std::size_t>(active[a])];
        const double dx = other.lon - sd.sites[i].lon;
        const double dy = other.lat - sd.sites[i].lat;
        const double d2 = dx * dx + dy * dy;
        if (d2 < best) {
          best = d2;
          best_site = static_cast<int>(a);
        }
      }
      if (best_site >= 0) cluster_of[i] = part.assignment[static_cast<std::size_t>(best_site)];
    }

    for (std::size_t i = 0; i < sd.sites.size(); ++i) {
      partition_csv->row({sd.sites[i].id, format_double(sd.sites[i].lon),
                          format_double(sd.sites[i].lat), season_name(sd.season),
                          cluster_of[i] < 0 ? std::string() : format_int(cluster_of[i]),
                          format_double(sil_of[i]), medoid_of[i] ? "1" : "0"});
    }

    // markers: medoid, lowest and highest silhouette per cluster
    for (int c = 0; c < part.k; ++c) {
      int min_i = -1, max_i = -1;
      for (std::size_t a = 0; a < active.size(); ++a) {
        if (part.assignment[a] != c) continue;
        if (min_i < 0 || part.silhouette[a] < part.silhouette[static_cast<std::size_t>(min_i)])
          min_i = static_cast<int>(a);
        if (max_i < 0 || part.silhouette[a] > part.silhouette[static_cast<std::size_t>(max_i)])
          max_i = static_cast<int>(a);
      }
      const auto site_of = [&](int a) {
        return sd.sites[static_cast<std::size_t>(active[static_cast<std::size_t>(a)])].id;
      };
      marker_csv->row({season_name(sd.season), format_int(c), "medoid",
                       site_of(part.medoids[static_cast<std::size_t>(c)])});
      if (min_i >= 0)
        marker_csv->row({season_name(sd.season), format_int(c), "min_silhouette", site_of(min_i)});
      if (max_i >= 0)
        marker_csv->row({season_name(sd.season), format_int(c), "max_silhouette", site_of(max_i)});
    }
  }

  if (validity_csv) validity_csv->close();
  if (partition_csv) partition_csv->close();
  if (marker_csv) marker_csv->close();

  json config = common_config_json(cfg);
  config["k"] = cfg.k;
  config["max_sweeps"] = cfg.max_sweeps;
  config["omega_sample"] = "all wet days";
  config["n_wds_convention"] = "complete seasons only; missing days shrink denominators proportionally";
  write_manifest(cfg.out_dir, "cluster", std::move(config));
  return 0;
}

// ---------------------------------------------------------------------------
// fit
// ---------------------------------------------------------------------------

namespace {

struct PartitionEntry {
  int cluster = -1;
  double silhouette = 0.0;
};

/// (season, site_id) -> cluster / silhouette from a partition.csv
struct PartitionTable {
  std::map<std::pair<std::string, std::string>, PartitionEntry> entries;
  std::map<std::string, int> k_per_season;

  const PartitionEntry* find(Season season, const std::string& id) const {
    const auto it = entries.find({season_name(season), id});
    return it == entries.end() ? nullptr : &it->second;
  }
  int k(Season season) const {
    const auto it = k_per_season.find(season_name(season));
    return it == k_per_season.end() ? 0 : it->second;
  }
};

PartitionTable read_partition(const std::string& path) {
  PartitionTable t;
  CsvReader r(path);
  const auto c_site = static_cast<std::size_t>(r.require_column("site_id"));
  const auto c_season = static_cast<std::size_t>(r.require_column("season"));
  const auto c_cluster = static_cast<std::size_t>(r.require_column("cluster"));
  const auto c_sil = static_cast<std::size_t>(r.require_column("silhouette"));
  std::vector<std::string> f;
  while (r.next(f)) {
    if (f[c_cluster].empty()) continue;  // site excluded from clustering
    PartitionEntry e;
    e.cluster = static_cast<int>(parse_int_field(f[c_cluster], r, "cluster"));
    e.silhouette = f[c_sil].empty() ? 0.0 : parse_double_field(f[c_sil], r, "silhouette");
    t.entries[{f[c_season], f[c_site]}] = e;
    int& k = t.k_per_season[f[c_season]];
    k = std::max(k, e.cluster + 1);
  }
  if (t.entries.empty()) throw DataError(path + ": no cluster assignments");
  return t;
}

std::vector<FitLevel> parse_levels(const std::vector<std::string>& names) {
  std::vector<FitLevel> out;
  for (const auto& n : names) {
    FitLevel lv;
    if (n == "local") lv = FitLevel::Local;
    else if (n == "semiregional") lv = FitLevel::Semiregional;
    else if (n == "regional") lv = FitLevel::Regional;
    else throw UsageError("unknown level '" + n + "' (local, semiregional, regional)");
    if (std::find(out.begin(), out.end(), lv) == out.end()) out.push_back(lv);
  }
  if (out.empty()) throw UsageError("--levels must name at least one level");
  return out;
}

}  // namespace

int cmd_fit(const FitConfig& cfg) {
  ensure_out_dir(cfg.out_dir);
  const auto seasons = cfg.resolve_seasons();
  const auto levels = parse_levels(cfg.levels);
  const bool needs_partition =
      std::find(levels.begin(), levels.end(), FitLevel::Semiregional) != levels.end() ||
      std::find(levels.begin(), levels.end(), FitLevel::Regional) != levels.end();

  PartitionTable partition;
  if (needs_partition) {
    if (cfg.partition_path.empty())
      throw UsageError("--partition is required for semiregional/regional levels");
    partition = read_partition(cfg.partition_path);
  }

  const auto data = reduce_grid(cfg.resolve_source(), seasons, cfg.threshold_u);
  write_wet_stats(data, join_path(cfg.out_dir, "wet_stats.csv"), cfg.min_fit);

  CsvWriter params_csv(join_path(cfg.out_dir, "params.csv"),
                       {"site_id", "season", "level", "cluster", "kappa", "sigma", "xi",
                        "converged", "n_fit"});
  CsvWriter diag_csv(join_path(cfg.out_dir, "fit_diagnostics.csv"),
                     {"site_id", "season", "level", "iterations", "used_fallback"});
  CsvWriter unfit_csv(join_path(cfg.out_dir, "unfitted.csv"),
                      {"site_id", "season", "level", "reason"});

  FitOptions opts;
  opts.threshold_u = cfg.threshold_u;
  opts.min_sample = cfg.min_fit;
  opts.threads = cfg.threads;

  for (const auto& sd : data) {
    // fitting universe: sufficient FIT sample
    std::vector<int> fit_sites;
    std::vector<std::vector<double>> fit_values;
    for (std::size_t i = 0; i < sd.sites.size(); ++i) {
      const auto& s = sd.sites[i];
      if (!s.sample.sufficient(cfg.min_fit)) {
        for (FitLevel lv : levels)
          unfit_csv.row({s.id, season_name(sd.season), fit_level_name(lv), "insufficient data"});
        continue;
      }
      fit_sites.push_back(static_cast<int>(i));
      fit_values.push_back(s.sample.fit_values());
    }

    const auto local = fit_local_all(fit_values, opts);

    auto emit = [&](FitLevel lv, const std::vector<SiteFit>& fits) {
      for (std::size_t a = 0; a < fits.size(); ++a) {
        const auto& s = sd.sites[static_cast<std::size_t>(fit_sites[a])];
        const SiteFit& f = fits[a];
        if (!f.fitted) {
          unfit_csv.row({s.id, season_name(sd.season), fit_level_name(lv),
                         f.cluster < 0 && lv != FitLevel::Local ? "not in partition"
                                                                : "no convergence"});
          continue;
        }
        params_csv.row({s.id, season_name(sd.season), fit_level_name(lv),
                        f.cluster < 0 ? std::string() : format_int(f.cluster),
                        format_double(f.params.kappa), format_double(f.params.sigma),
                        format_double(f.params.xi), f.converged ? "1" : "0",
                        format_int(f.n_fit)});
        diag_csv.row({s.id, season_name(sd.season), fit_level_name(lv), format_int(f.iterations),
                      f.used_fallback ? "1" : "0"});
      }
    };

    if (std::find(levels.begin(), levels.end(), FitLevel::Local) != levels.end())
      emit(FitLevel::Local, local);

    if (needs_partition) {
      const int k = partition.k(sd.season);
      std::vector<int> cluster(fit_sites.size(), -1);
      for (std::size_t a = 0; a < fit_sites.size(); ++a) {
        const auto* e = partition.find(sd.season, sd.sites[static_cast<std::size_t>(fit_sites[a])].id);
        if (e) cluster[a] = e->cluster;
      }
      if (k <= 0) {
        throw DataError(std::string("partition has no clusters for season ") +
                        season_name(sd.season));
      }
      if (std::find(levels.begin(), levels.end(), FitLevel::Semiregional) != levels.end())
        emit(FitLevel::Semiregional, fit_semiregional_all(fit_values, local, cluster, k, opts));
      if (std::find(levels.begin(), levels.end(), FitLevel::Regional) != levels.end())
        emit(FitLevel::Regional, fit_regional_all(fit_values, local, cluster, k, opts).site);
    }
  }

  params_csv.close();
  diag_csv.close();
  unfit_csv.close();

  json config = common_config_json(cfg);
  config["partition"] = cfg.partition_path;
  config["levels"] = cfg.levels;
  write_manifest(cfg.out_dir, "fit", std::move(config));
  return 0;
}

// ---------------------------------------------------------------------------
// return-levels
// ---------------------------------------------------------------------------

namespace {

struct ParamRow {
  std::string site_id;
  std::string season;
  std::string level;
  int cluster = -1;
  EgpdParams params;
  int n_fit = 0;
};

std::vector<ParamRow> read_params(const std::string& path) {
  CsvReader r(path);
  const auto c_site = static_cast<std::size_t>(r.require_column("site_id"));
  const auto c_season = static_cast<std::size_t>(r.require_column("season"));
  const auto c_level = static_cast<std::size_t>(r.require_column("level"));
  const auto c_cluster = static_cast<std::size_t>(r.require_column("cluster"));
  const auto c_kappa = static_cast<std::size_t>(r.require_column("kappa"));
  const auto c_sigma = static_cast<std::size_t>(r.require_column("sigma"));
  const auto c_xi = static_cast<std::size_t>(r.require_column("xi"));
  const auto c_nfit = static_cast<std::size_t>(r.require_column("n_fit"));
  std::vector<ParamRow> rows;
  std::vector<std::string> f;
  while (r.next(f)) {
    ParamRow row;
    row.site_id = f[c_site];
    row.season = f[c_season];
    row.level = f[c_level];
    row.cluster = f[c_cluster].empty()
                      ? -1
                      : static_cast<int>(parse_int_field(f[c_cluster], r, "cluster"));
    row.params.kappa = parse_double_field(f[c_kappa], r, "kappa");
    row.params.sigma = parse_double_field(f[c_sigma], r, "sigma");
    row.params.xi = parse_double_field(f[c_xi], r, "xi");
    row.n_fit = static_cast<int>(parse_int_field(f[c_nfit], r, "n_fit"));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError(path + ": no parameter rows");
  return rows;
}

struct WetStats {
  double n_wds_mean = 0.0;
  double lon = 0.0, lat = 0.0;
};

std::map<std::pair<std::string, std::string>, WetStats> read_wet_stats(const std::string& path) {
  CsvReader r(path);
  const auto c_site = static_cast<std::size_t>(r.require_column("site_id"));
  const auto c_season = static_cast<std::size_t>(r.require_column("season"));
  const auto c_nwds = static_cast<std::size_t>(r.require_column("n_wds_mean"));
  const auto c_lon = static_cast<std::size_t>(r.require_column("lon"));
  const auto c_lat = static_cast<std::size_t>(r.require_column("lat"));
  std::map<std::pair<std::string, std::string>, WetStats> out;
  std::vector<std::string> f;
  while (r.next(f)) {
    WetStats w;
    w.n_wds_mean = parse_double_field(f[c_nwds], r, "n_wds_mean");
    w.lon = parse_double_field(f[c_lon], r, "lon");
    w.lat = parse_double_field(f[c_lat], r, "lat");
    out[{f[c_season], f[c_site]}] = w;
  }
  return out;
}

}  // namespace

int cmd_return_levels(const ReturnLevelsConfig& cfg) {
  ensure_out_dir(cfg.out_dir);
  if (cfg.params_path.empty()) throw UsageError("--params is required");
  for (double t : cfg.periods) {
    if (!(t >= 1.0)) throw UsageError("--periods entries must be >= 1 year");
  }

  const auto params = read_params(cfg.params_path);

  std::map<std::pair<std::string, std::string>, WetStats> wet_stats;
  if (!cfg.wet_stats_path.empty()) {
    wet_stats = read_wet_stats(cfg.wet_stats_path);
  } else if (!cfg.input.empty()) {
    const auto data = reduce_grid(cfg.resolve_source(), cfg.resolve_seasons(), cfg.threshold_u);
    for (const auto& sd : data) {
      for (const auto& s : sd.sites)
        wet_stats[{season_name(sd.season), s.id}] = {s.sample.n_wds_mean, s.lon, s.lat};
    }
  } else {
    throw UsageError("n_wds metadata missing: provide --wet-stats or --input");
  }

  CsvWriter rl_csv(join_path(cfg.out_dir, "return_levels.csv"),
                   {"site_id", "lon", "lat", "season", "T_years", "return_level_mm", "level"});

  // (season, level, T) -> site -> RL, for the optional diff summary
  std::map<std::tuple<std::string, std::string, double>, std::map<std::string, double>> fields;

  for (const auto& row : params) {
    const auto it = wet_stats.find({row.season, row.site_id});
    if (it == wet_stats.end()) {
      throw DataError("n_wds metadata missing for site " + row.site_id + " season " + row.season);
    }
    if (!(it->second.n_wds_mean > 0.0)) continue;  // no complete season: no rate
    for (double t_years : cfg.periods) {
      const double rl = return_level(row.params, t_years, it->second.n_wds_mean);
      rl_csv.row({row.site_id, format_double(it->second.lon), format_double(it->second.lat),
                  row.season, format_double(t_years), format_double(rl), row.level});
      if (cfg.diff_regional_local && (row.level == "regional" || row.level == "local"))
        fields[{row.season, row.level, t_years}][row.site_id] = rl;
    }
  }
  rl_csv.close();

  if (cfg.diff_regional_local) {
    CsvWriter diff_csv(join_path(cfg.out_dir, "rl_diff.csv"),
                       {"site_id", "season", "T_years", "rel_diff"});
    json summary = json::array();
    std::set<std::pair<std::string, double>> season_periods;
    for (const auto& [key, _] : fields)
      season_periods.insert({std::get<0>(key), std::get<2>(key)});
    for (const auto& [season, t_years] : season_periods) {
      const auto reg_it = fields.find({season, "regional", t_years});
      const auto loc_it = fields.find({season, "local", t_years});
      if (reg_it == fields.end() || loc_it == fields.end()) continue;
      std::vector<std::string> ids;
      std::vector<double> a, b;
      for (const auto& [id, rl] : reg_it->second) {
        const auto lit = loc_it->second.find(id);
        if (lit == loc_it->second.end()) continue;
        ids.push_back(id);
        a.push_back(rl);
        b.push_back(lit->second);
      }
      if (ids.empty()) continue;
      const RlDiffSummary s = return_level_diff(a, b);
      for (std::size_t i = 0; i < ids.size(); ++i) {
        diff_csv.row({ids[i], season, format_double(t_years), format_double(s.rel_diff[i])});
      }
      json js;
      js["season"] = season;
      js["T_years"] = t_years;
      js["n_sites"] = ids.size();
      js["frac_within_10pct"] = s.frac_within_10pct;
      js["mean_abs_rel_diff"] = s.mean_abs;
      summary.push_back(std::move(js));
    }
    diff_csv.close();
    std::ofstream out(join_path(cfg.out_dir, "rl_diff_summary.json"), std::ios::binary);
    out << summary.dump(2) << '\n';
  }

  json config = common_config_json(cfg);
  config["params"] = cfg.params_path;
  config["wet_stats"] = cfg.wet_stats_path;
  config["periods"] = cfg.periods;
  config["diff_regional_local"] = cfg.diff_regional_local;
  write_manifest(cfg.out_dir, "return_levels", std::move(config));
  return 0;
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

int cmd_validate(const ValidateConfig& cfg) {
  ensure_out_dir(cfg.out_dir);
  if (cfg.params_path.empty()) throw UsageError("--params is required");
  const auto seasons = cfg.resolve_seasons();
  const auto params = read_params(cfg.params_path);
  const auto data = reduce_grid(cfg.resolve_source(), seasons, cfg.threshold_u);

  PartitionTable partition;
  const bool have_partition = !cfg.partition_path.empty();
  if (have_partition) partition = read_partition(cfg.partition_path);

  // (season, level) -> site -> params
  std::map<std::pair<std::string, std::string>, std::map<std::string, ParamRow>> by_level;
  std::map<std::pair<std::string, std::string>, std::set<int>> clusters_of;
  for (const auto& row : params) {
    by_level[{row.season, row.level}][row.site_id] = row;
    if (row.cluster >= 0) clusters_of[{row.season, row.level}].insert(row.cluster);
  }

  // seeded spatial subsample over the union of site ids in the grid
  std::vector<std::string> all_ids;
  if (!data.empty())
    for (const auto& s : data.front().sites) all_ids.push_back(s.id);
  const auto chosen = spatial_subsample(all_ids, cfg.fraction, cfg.seed);
  const std::set<std::string> chosen_set(chosen.begin(), chosen.end());

  CsvWriter gof_csv(join_path(cfg.out_dir, "gof.csv"),
                    {"site_id", "season", "level", "ad_stat", "p_value", "reject_5pct",
                     "altitude_band", "silhouette_band"});
  CsvWriter aic_csv(join_path(cfg.out_dir, "aic.csv"),
                    {"season", "level", "total_aic", "total_loglik", "n_params", "n_sites",
                     "n_clusters"});
  std::optional<CsvWriter> qq_csv;
  if (!cfg.qq_sites.empty()) {
    qq_csv.emplace(join_path(cfg.out_dir, "qq.csv"),
                   std::vector<std::string>{"site_id", "season", "level", "p", "model_mm",
                                            "empirical_mm"});
  }

  json summary;
  summary["subsample_fraction"] = cfg.fraction;
  summary["seed"] = cfg.seed;
  summary["n_sims"] = cfg.n_sims;
  summary["holdout"] = "TEST third (positions 1 mod 3); SPARE third unused";
  json rates = json::array();

  for (const auto& sd : data) {
    std::map<std::string, const SeasonSite*> site_by_id;
    for (const auto& s : sd.sites) site_by_id[s.id] = &s;

    for (const auto& [key, site_params] : by_level) {
      if (key.first != season_name(sd.season)) continue;
      const std::string& level = key.second;

      // --- goodness of fit on the seeded subsample
      int tested = 0, rejected = 0, skipped = 0;
      struct Band { int tested = 0, rejected = 0; };
      std::map<std::string, Band> alt_bands, sil_bands;
      for (const auto& [site_id, prow] : site_params) {
        if (chosen_set.find(site_id) == chosen_set.end()) continue;
        const auto sit = site_by_id.find(site_id);
        if (sit == site_by_id.end()) continue;
        const auto holdout = sit->second->sample.test_values();
        if (static_cast<int>(holdout.size()) < 20) {
          ++skipped;
          continue;
        }
        Rng rng = Rng::stream(cfg.seed ^ fnv1a64(level), season_name(sd.season), fnv1a64(site_id));
        const Egpd dist(prow.params);
        const AdTest ad = anderson_darling_test(dist, cfg.threshold_u, holdout, rng, cfg.n_sims);
        ++tested;
        if (ad.reject_5pct) ++rejected;

        std::string alt_band;
        if (sit->second->elevation_m)
          alt_band = *sit->second->elevation_m >= 1000.0 ? "high" : "low";
        std::string sil_band;
        if (have_partition) {
          const auto* pe = partition.find(sd.season, site_id);
          if (pe) sil_band = pe->silhouette >= 0.2 ? "high" : "low";
        }
        if (!alt_band.empty()) {
          alt_bands[alt_band].tested++;
          if (ad.reject_5pct) alt_bands[alt_band].rejected++;
        }
        if (!sil_band.empty()) {
          sil_bands[sil_band].tested++;
          if (ad.reject_5pct) sil_bands[sil_band].rejected++;
        }
        gof_csv.row({site_id, season_name(sd.season), level, format_double(ad.a2),
                     format_double(ad.p_value), ad.reject_5pct ? "1" : "0", alt_band, sil_band});
      }
      json jr;
      jr["season"] = season_name(sd.season);
      jr["level"] = level;
      jr["tested"] = tested;
      jr["skipped_small_holdout"] = skipped;
      if (tested > 0) jr["nonrejection_rate"] = 1.0 - static_cast<double>(rejected) / tested;
      for (const auto& [band, b] : alt_bands) {
        if (b.tested > 0)
          jr["altitude_" + band + "_nonrejection_rate"] =
              1.0 - static_cast<double>(b.rejected) / b.tested;
      }
      for (const auto& [band, b] : sil_bands) {
        if (b.tested > 0)
          jr["silhouette_" + band + "_nonrejection_rate"] =
              1.0 - static_cast<double>(b.rejected) / b.tested;
      }
      rates.push_back(std::move(jr));

      // --- AIC on FIT data over all fitted sites
      double loglik = 0.0;
      int n_sites_aic = 0;
      for (const auto& [site_id, prow] : site_params) {
        const auto sit = site_by_id.find(site_id);
        if (sit == site_by_id.end()) continue;
        const auto fit_vals = sit->second->sample.fit_values();
        if (fit_vals.empty()) continue;
        loglik += truncated_loglik(Egpd(prow.params), cfg.threshold_u, fit_vals);
        ++n_sites_aic;
      }
      FitLevel lv = FitLevel::Local;
      if (level == "semiregional") lv = FitLevel::Semiregional;
      else if (level == "regional") lv = FitLevel::Regional;
      const int n_clusters = static_cast<int>(clusters_of[{key.first, level}].size());
      const int n_params_total = parameter_count(lv, n_sites_aic, n_clusters);
      aic_csv.row({season_name(sd.season), level, format_double(aic(loglik, n_params_total)),
                   format_double(loglik), format_int(n_params_total), format_int(n_sites_aic),
                   format_int(n_clusters)});

      // --- QQ data for requested sites
      if (qq_csv) {
        for (const auto& qq_site : cfg.qq_sites) {
          const auto pit = site_params.find(qq_site);
          const auto sit = site_by_id.find(qq_site);
          if (pit == site_params.end() || sit == site_by_id.end()) continue;
          const auto holdout = sit->second->sample.test_values();
          if (holdout.empty()) continue;
          const auto pairs = qq_data(Egpd(pit->second.params), cfg.threshold_u, holdout);
          const double dn = static_cast<double>(pairs.size());
          for (std::size_t j = 0; j < pairs.size(); ++j) {
            qq_csv->row({qq_site, season_name(sd.season), level,
                         format_double((static_cast<double>(j) + 0.5) / dn),
                         format_double(pairs[j].model), format_double(pairs[j].empirical)});
          }
        }
      }
    }
  }

  gof_csv.close();
  aic_csv.close();
  if (qq_csv) qq_csv->close();
  summary["nonrejection"] = std::move(rates);
  {
    std::ofstream out(join_path(cfg.out_dir, "gof_summary.json"), std::ios::binary);
    if (!out) throw DataError("cannot write gof_summary.json");
    out << summary.dump(2) << '\n';
  }

  json config = common_config_json(cfg);
  config["params"] = cfg.params_path;
  config["partition"] = cfg.partition_path;
  config["fraction"] = cfg.fraction;
  config["n_sims"] = cfg.n_sims;
  config["qq_sites"] = cfg.qq_sites;
  write_manifest(cfg.out_dir, "validate", std::move(config));
  return 0;
}

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------

int cmd_synth(const SynthConfig& cfg) {
  ensure_out_dir(cfg.out_dir);
  SynthSpec spec = parse_synth_spec(cfg.spec_path);
  if (cfg.seed_given) spec.seed = cfg.seed;

  const SynthGrid grid = generate_synth(spec);

  if (cfg.format == "A" || cfg.format == "both") {
    write_grid_csv(grid.sites, join_path(cfg.out_dir, "grid.csv"));
  }
  if (cfg.format == "B" || cfg.format == "both") {
    write_grid_dense(grid.sites, join_path(cfg.out_dir, "grid.json"), "grid.f32");
  }
  if (cfg.format != "A" && cfg.format != "B" && cfg.format != "both")
    throw UsageError("--format must be A, B or both");
  write_truth_manifest(grid, spec, join_path(cfg.out_dir, "truth.json"));

  json config;
  config["spec"] = cfg.spec_path;
  config["format"] = cfg.format;
  config["seed"] = spec.seed;
  config["out"] = cfg.out_dir;
  write_manifest(cfg.out_dir, "synth", std::move(config));
  return 0;
}

}  // namespace rfa::cli
