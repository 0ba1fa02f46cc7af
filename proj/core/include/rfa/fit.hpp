#pragma once

#include <span>
#include <string>
#include <vector>

#include "rfa/egpd.hpp"
#include "rfa/pwm.hpp"

namespace rfa {

struct FitOptions {
  double threshold_u = 1.0;  // mm; data are values > u, fitted left-truncated at u
  double xi_max = kXiMax;
  double kappa_min = 0.02;
  double kappa_max = 50.0;
  double sigma_min = 1e-6;
  double sigma_max = 1e7;
  int min_sample = 30;       // fewer FIT values than this -> site not fitted
  double resid_tol = 1e-9;   // max |log(alpha_model / alpha_target)| at a root
  double accept_tol = 0.05;  // residual above this triggers the ML fallback
  int max_iterations = 200;
  int threads = 1;
};

struct FitResult {
  EgpdParams params;
  bool converged = false;
  bool used_mle_fallback = false;
  int iterations = 0;
  double residual = 0.0;  // final max |log alpha ratio| (PWM route only)
};

/// Solve the three PWM-matching equations alpha_i(kappa, sigma, xi) =
/// target alpha_i for the EGPD truncated at u. Damped Gauss-Newton with a
/// finite-difference Jacobian, multistart, box constraints; xi may end on the
/// 0 boundary, in which case the best least-squares point is accepted.
FitResult fit_pwm_match(const PwmTriple& target, const FitOptions& opts);

/// Two-parameter variant with xi frozen: match (alpha_0, alpha_1) over
/// (kappa, sigma).
FitResult fit_pwm_match_fixed_xi(const PwmTriple& target, double xi_fixed,
                                 const EgpdParams& init, const FitOptions& opts);

/// Maximum likelihood on the truncated EGPD with boxed parameters
/// (Nelder-Mead); the fallback route when PWM matching fails.
FitResult fit_mle(std::span<const double> values, const EgpdParams& init, const FitOptions& opts);

/// Local fit of one site: PWM matching first, ML fallback second.
/// Precondition: all values > u. Returns converged=false when the sample is
/// too small, effectively constant, or no route converges.
FitResult fit_local(std::span<const double> values, const FitOptions& opts = {});

// ---------------------------------------------------------------------------
// Regional machinery
// ---------------------------------------------------------------------------

/// One step of the regional scale update: with (kappa_0, xi_0) frozen and
/// m = site mean of values above u,
///   sigma_new = xi_0 m / [ (kappa_0 / Fbar(u)) IB(H_{xi_0}(u/sigma_0), 1,
///                          kappa_0, 1 - xi_0) - 1 ],
/// where Fbar(u) is the EGPD survival at u under (kappa_0, sigma_0, xi_0) and
/// IB integrates t^(kappa_0 - 1) (1-t)^(-xi_0) from the lower limit to 1.
/// The fixed point matches the model's truncated mean to m.
/// Returns NaN when the update is not defined (numerical failure).
double regional_sigma_update(double kappa0, double xi0, double u, double mean_excess,
                             double sigma0);

struct SigmaIteration {
  double sigma = 0.0;
  bool converged = false;
  int iterations = 0;
};

/// Iterate regional_sigma_update until |sigma_new - sigma_0| < eps.
SigmaIteration solve_regional_sigma(double kappa0, double xi0, double u, double mean_excess,
                                    double sigma_init, double eps = 1e-3, int cap = 500);

// ---------------------------------------------------------------------------
// Per-site orchestration over a partition
// ---------------------------------------------------------------------------

struct SiteFit {
  EgpdParams params;
  FitLevel level = FitLevel::Local;
  int cluster = -1;   // -1 when level == Local
  bool fitted = false;
  bool converged = false;
  bool used_fallback = false;
  int iterations = 0;
  int n_fit = 0;
};

/// Independent local fits, one per site. Sites with fewer than
/// opts.min_sample values come back with fitted=false.
std::vector<SiteFit> fit_local_all(const std::vector<std::vector<double>>& site_values,
                                   const FitOptions& opts);

/// Semiregional: xi frozen at the unweighted cluster mean of converged local
/// xi estimates; per-site (kappa, sigma) re-matched on (alpha_0, alpha_1).
/// Throws NumericError if a cluster has no converged local fit.
std::vector<SiteFit> fit_semiregional_all(const std::vector<std::vector<double>>& site_values,
                                          const std::vector<SiteFit>& local,
                                          const std::vector<int>& cluster, int n_clusters,
                                          const FitOptions& opts);

/// Regional model: per-cluster (kappa_0, xi_0) from cluster means of local
/// estimates; per-site sigma from the fixed-point iteration, started at the
/// local sigma. Sites whose iteration does not converge keep the local sigma
/// and are flagged (converged=false).
struct RegionalModel {
  std::vector<double> kappa0;  // per cluster
  std::vector<double> xi0;     // per cluster
  double threshold_u = 1.0;
  std::vector<SiteFit> site;   // level == Regional; params = (kappa0[c], sigma_s, xi0[c])
};

RegionalModel fit_regional_all(const std::vector<std::vector<double>>& site_values,
                               const std::vector<SiteFit>& local,
                               const std::vector<int>& cluster, int n_clusters,
                               const FitOptions& opts);

}  // namespace rfa
