#pragma once

#include <span>
#include <string>
#include <vector>

namespace rfa {

/// k-medoids partition of a 1-D feature (the per-site omega values) under the
/// Manhattan distance. Distances are always computed on the fly from the
/// scalar feature; no n x n matrix is ever materialized.
struct Partition {
  int k = 0;
  std::vector<int> medoids;      // point indices, ascending; cluster label = position
  std::vector<int> assignment;   // per point: nearest medoid (ties -> lowest label)
  double total_cost = 0.0;       // sum of distances to own medoid
  std::vector<double> silhouette;  // filled by silhouette_scores
};

/// Deterministic greedy BUILD, returned in selection order. The first medoid
/// minimizes total distance to all points; each subsequent medoid maximizes
/// the cost reduction. Ties are broken by lowest point index. Greedy steps do
/// not depend on the final k, so the result for k is a prefix of the result
/// for any larger k. Throws UsageError if k < 1 or k exceeds the number of
/// distinct values.
std::vector<int> pam_build(std::span<const double> x, int k);

/// Swap phase: repeatedly applies the best cost-decreasing
/// (medoid, non-medoid) exchange until none exists. Each sweep evaluates all
/// candidates against cached nearest/second-nearest medoid distances, so the
/// per-candidate work is one pass over the points with no per-medoid
/// recomputation. Throws NumericError if max_sweeps is exceeded.
Partition pam_swap(std::span<const double> x, std::vector<int> medoids, int max_sweeps = 100);

/// Convenience: BUILD followed by swap, silhouettes filled in.
Partition pam_cluster(std::span<const double> x, int k, int max_sweeps = 100);

/// Per-point silhouette 1 - d_in / d_nearest_foreign, where d_in is the mean
/// distance to the other members of the own cluster and d_nearest_foreign the
/// smallest mean distance to another cluster. Members of singleton clusters
/// score 0. Values are clamped to [-1, 1].
std::vector<double> silhouette_scores(std::span<const double> x, const Partition& p);

struct ValidityRow {
  int k = 0;
  double mean_silhouette = 0.0;
  double dunn = 0.0;
  double davies_bouldin = 0.0;
  double xie_beni = 0.0;
  double s_dbw = 0.0;
  bool ok = false;  // false: this k failed (reason in `note`), other rows still valid
  std::string note;
};

/// Runs BUILD + swap for every k in [k_min, k_max] and computes the five
/// cluster-validity criteria. The optimal k is deliberately not auto-selected.
std::vector<ValidityRow> validity_indices(std::span<const double> x, int k_min, int k_max,
                                          int max_sweeps = 100);

}  // namespace rfa
