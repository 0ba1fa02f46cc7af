#pragma once

#include <cstdint>

#include "rfa/pwm.hpp"
#include "rfa/rng.hpp"

namespace rfa {

/// Regionalization level a parameter set was fitted at.
enum class FitLevel { Local, Semiregional, Regional };

const char* fit_level_name(FitLevel level);

/// Extended generalized Pareto parameters: flexibility kappa, scale sigma (mm),
/// tail shape xi. Estimation keeps xi in [0, kXiMax]; xi = 0 is the
/// exponential-tail limit.
struct EgpdParams {
  double kappa = 1.0;
  double sigma = 1.0;
  double xi = 0.0;
};

inline constexpr double kXiMax = 0.9;

/// Extended GPD with power flexibility function:
///   F(z) = [H_{sigma,xi}(z)]^kappa,
///   H_{sigma,xi}(z) = 1 - (1 + xi z / sigma)^(-1/xi)   (xi > 0)
///                   = 1 - exp(-z / sigma)              (xi = 0 limit).
/// kappa = 1 reduces to the plain GPD. Models the full positive-rain range
/// with a GPD-compliant upper tail.
class Egpd {
 public:
  Egpd(double kappa, double sigma, double xi);
  explicit Egpd(const EgpdParams& p) : Egpd(p.kappa, p.sigma, p.xi) {}

  double kappa() const { return kappa_; }
  double sigma() const { return sigma_; }
  double xi() const { return xi_; }
  EgpdParams params() const { return {kappa_, sigma_, xi_}; }

  double cdf(double z) const;
  double survival(double z) const;  // 1 - cdf, computed without cancellation
  double pdf(double z) const;
  double log_pdf(double z) const;

  /// Exact inverse of cdf: y_p = (sigma/xi) [ (1 - p^(1/kappa))^(-xi) - 1 ]
  /// for xi > 0 and -sigma log(1 - p^(1/kappa)) in the xi = 0 limit.
  double quantile(double p) const;

  // Left-truncated views: the law of Z | Z > u (wet-day values above the
  // threshold). Fitting and goodness-of-fit work on these.
  double cdf_truncated(double z, double u) const;
  double survival_truncated(double z, double u) const;
  double log_pdf_truncated(double z, double u) const;
  double quantile_truncated(double p, double u) const;
  double sample_truncated(Rng& rng, double u) const;

  /// Theoretical first three PWMs of the law truncated at u, in closed form
  /// through incomplete Beta integrals. Requires xi < 1. For xi below 1e-6
  /// the value at xi = 1e-6 is used (the map is smooth there; error ~1e-6
  /// relative, far below sampling noise).
  PwmTriple pwm_truncated(double u) const;

  /// Mean of Z | Z > u (equals pwm_truncated(u).a0).
  double mean_truncated(double u) const;

 private:
  double kappa_, sigma_, xi_;

  double gpd_y(double z) const;  // y with H(z) = 1 - exp(-y), stable in xi
};

/// T-year return level: the wet-day quantile at exceedance probability
/// 1 / (T * n_wds_mean), where n_wds_mean is the mean number of wet days per
/// season. Requires T >= 1, n_wds_mean > 0 and T * n_wds_mean > 1.
double return_level(const EgpdParams& params, double T_years, double n_wds_mean);

}  // namespace rfa
