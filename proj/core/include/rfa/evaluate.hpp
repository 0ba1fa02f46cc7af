#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rfa/egpd.hpp"
#include "rfa/rng.hpp"

namespace rfa {

/// One-sample Anderson-Darling statistic from probability-integral-transform
/// values sorted ascending.
double ad_statistic_from_sorted_pit(std::span<const double> sorted_pit);

struct AdTest {
  double a2 = 0.0;
  double p_value = 1.0;
  bool reject_5pct = false;
  int n = 0;
};

/// AD test of a holdout against the fitted distribution truncated at u.
/// The p-value is the rank of the observed statistic among n_sims statistics
/// of samples simulated from the fitted distribution itself:
///   p = (1 + #{A2_sim >= A2_obs}) / (n_sims + 1).
/// Requires holdout.size() >= 20.
AdTest anderson_darling_test(const Egpd& dist, double u, std::span<const double> holdout,
                             Rng& rng, int n_sims = 999);

/// Seeded uniform subsample without replacement of ceil(fraction * n) ids.
/// Operates on the sorted id set, so the selection depends only on the ids,
/// the fraction and the seed -- not on input order.
std::vector<std::string> spatial_subsample(std::vector<std::string> ids, double fraction,
                                           std::uint64_t seed);

/// Akaike information criterion: 2 k - 2 loglik.
inline double aic(double log_likelihood, int n_params) {
  return 2.0 * static_cast<double>(n_params) - 2.0 * log_likelihood;
}

/// Aggregate parameter accounting across a grid of n_sites in n_clusters:
/// local 3n, semiregional 2n + k, regional n + 2k.
int parameter_count(FitLevel level, int n_sites, int n_clusters);

/// Log-likelihood of values under the distribution truncated at u.
double truncated_loglik(const Egpd& dist, double u, std::span<const double> values);

struct QqPair {
  double model = 0.0;
  double empirical = 0.0;
};

/// Empirical order statistics of the holdout paired with model quantiles of
/// the truncated fit at plotting positions (j - 0.5) / n.
std::vector<QqPair> qq_data(const Egpd& dist, double u, std::span<const double> holdout);

struct RlDiffSummary {
  std::vector<double> rel_diff;   // per site: (a - b) / b
  double frac_within_10pct = 0.0;
  double mean_abs = 0.0;
};

/// Relative difference field between two aligned return-level vectors.
RlDiffSummary return_level_diff(std::span<const double> field_a, std::span<const double> field_b);

}  // namespace rfa
