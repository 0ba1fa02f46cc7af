#pragma once

#include <span>
#include <string>
#include <vector>

namespace rfa {

/// First three probability weighted moments alpha_i = E[Z F(Z)^i].
struct PwmTriple {
  double a0 = 0.0;
  double a1 = 0.0;
  double a2 = 0.0;
};

/// Unbiased order-statistics (Landwehr) estimator of (alpha_0, alpha_1, alpha_2):
/// with ascending order statistics z_(1..n),
///   alpha_i = (1/n) sum_j z_(j) * prod_{l=1..i} (j-l)/(n-l).
/// Positively homogeneous of degree 1 in the data.
/// Throws UsageError if n < 2 or any value is not a positive finite number.
PwmTriple estimate_pwm(std::span<const double> sample);

/// Same, for a sample already sorted ascending (not checked).
PwmTriple estimate_pwm_sorted(std::span<const double> sorted);

/// Relative guard on the omega denominator 2*a1 - a0; below it the sample is
/// effectively constant and the ratio is meaningless.
inline constexpr double kOmegaDenomGuard = 1e-9;

struct OmegaResult {
  double omega = 0.0;
  bool degenerate = false;  // |2 a1 - a0| <= guard * a0
  int n = 0;
};

/// Scale-invariant ratio omega = (3 a2 - 2 a1) / (2 a1 - a0).
OmegaResult omega_ratio(const PwmTriple& pwm, int n);
OmegaResult omega_ratio(std::span<const double> sample);

/// Manhattan distance on the omega line.
double omega_distance(double omega_i, double omega_j);

/// Per-site omega estimates for one season, in a fixed site order.
struct OmegaField {
  std::vector<std::string> site_id;
  std::vector<double> lon, lat;
  std::vector<double> omega;     // valid where !degenerate
  std::vector<int> n_used;       // wet-day sample size behind each estimate
  std::vector<bool> degenerate;  // flagged, never silently emitted

  std::size_t size() const { return site_id.size(); }

  /// Indices of non-degenerate sites (the clustering universe).
  std::vector<int> active_sites() const;
};

}  // namespace rfa
