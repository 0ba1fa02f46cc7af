#pragma once

// Independent reference computations for the unit and acceptance suites.
// Everything here deliberately avoids the library's incomplete-Beta /
// fixed-point code paths so the two routes can check each other.

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

namespace oracle {

/// Adaptive Simpson quadrature with recursive error control.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12, int max_depth = 40);

/// Theoretical PWMs alpha_i = E[Z F(Z)^i] of the EGPD truncated at u,
/// computed by quadrature on the quantile scale: alpha_i = int_0^1 Q(q) q^i dq.
/// Independent of the closed-form incomplete-Beta route in the library.
struct PwmRef {
  double a0, a1, a2;
};
PwmRef egpd_truncated_pwms(double kappa, double sigma, double xi, double u);

/// Mean of the EGPD truncated at u, by quadrature.
double egpd_truncated_mean(double kappa, double sigma, double xi, double u);

/// Exhaustive k-medoids optimum (all C(n, k) medoid sets) under |.| distance.
double brute_force_kmedoids_cost(std::span<const double> x, int k);

/// Adjusted Rand index between two labelings.
double adjusted_rand_index(std::span<const int> a, std::span<const int> b);

}  // namespace oracle
