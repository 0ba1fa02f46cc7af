#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rfa/calendar.hpp"
#include "rfa/egpd.hpp"
#include "rfa/ingest.hpp"

namespace rfa {

/// One homogeneous region of the synthetic grid: all sites share (kappa, xi);
/// sigma varies per site, evenly spaced across [sigma_min, sigma_max].
struct SynthRegion {
  std::string name;
  int n_sites = 0;
  double kappa = 1.0;
  double xi = 0.1;
  double sigma_min = 2.0;
  double sigma_max = 8.0;
  double wet_fraction = 0.5;  // probability an in-season day is wet (> u)
};

struct SynthSpec {
  std::vector<SynthRegion> regions;
  int start_year = 1979;
  int years = 40;
  /// Seasons that receive rain; days outside stay dry. Empty = all seasons.
  std::vector<Season> active_seasons;
  double threshold_u = kDefaultThresholdMm;
  std::uint64_t seed = 0;
};

/// Parse the JSON spec file (see README for the schema).
SynthSpec parse_synth_spec(const std::string& path);

struct SynthSiteTruth {
  std::string id;
  int region = 0;
  EgpdParams params;
  double wet_fraction = 0.0;
};

struct SynthGrid {
  std::vector<SiteSeries> sites;          // generation order == id order
  std::vector<SynthSiteTruth> truth;      // aligned with sites
  std::vector<std::string> region_names;  // index = region label
};

/// Generate the grid. Wet days carry draws from the EGPD truncated at the
/// threshold; dry days are exact zeros. Each site has its own random stream
/// derived from the master seed, so the output is independent of evaluation
/// order.
SynthGrid generate_synth(const SynthSpec& spec);

/// Writers for the two input formats plus the truth manifest.
void write_grid_csv(const std::vector<SiteSeries>& sites, const std::string& path);
void write_grid_dense(const std::vector<SiteSeries>& sites, const std::string& sidecar_path,
                      const std::string& data_file_name);
void write_truth_manifest(const SynthGrid& grid, const SynthSpec& spec, const std::string& path);

}  // namespace rfa
