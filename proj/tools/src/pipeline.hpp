#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rfa/calendar.hpp"
#include "rfa/egpd.hpp"
#include "rfa/ingest.hpp"

namespace rfa::cli {

struct CommonConfig {
  std::string input;
  std::string format = "auto";  // "A" long CSV, "B" dense binary, "auto" by extension
  std::vector<std::string> seasons;  // empty = all four
  double threshold_u = kDefaultThresholdMm;
  std::uint64_t seed = 0;
  int threads = 1;
  int min_fit = 30;
  std::string out_dir = ".";

  GridSource resolve_source() const;
  std::vector<Season> resolve_seasons() const;
};

struct ClusterConfig : CommonConfig {
  std::string k = "scan";  // "scan" or an integer 2..10
  int max_sweeps = 100;
};

struct FitConfig : CommonConfig {
  std::string partition_path;            // required for semiregional/regional
  std::vector<std::string> levels = {"local", "semiregional", "regional"};
};

struct ReturnLevelsConfig : CommonConfig {
  std::string params_path;
  std::string wet_stats_path;  // n_wds source; falls back to --input if empty
  std::vector<double> periods = {10.0, 50.0, 100.0};
  bool diff_regional_local = false;
};

struct ValidateConfig : CommonConfig {
  std::string params_path;
  std::string partition_path;  // optional: enables the silhouette bands
  double fraction = 0.125;
  int n_sims = 999;
  std::vector<std::string> qq_sites;
};

struct SynthConfig {
  std::string spec_path;
  std::string out_dir = ".";
  std::string format = "B";  // "A", "B", or "both"
  std::uint64_t seed = 0;
  bool seed_given = false;
};

int cmd_cluster(const ClusterConfig& cfg);
int cmd_fit(const FitConfig& cfg);
int cmd_return_levels(const ReturnLevelsConfig& cfg);
int cmd_validate(const ValidateConfig& cfg);
int cmd_synth(const SynthConfig& cfg);

}  // namespace rfa::cli
