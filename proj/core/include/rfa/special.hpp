#pragma once

namespace rfa {

/// log of the complete Beta function B(a, b), a > 0, b > 0.
double log_beta(double a, double b);

/// Regularized incomplete Beta I_x(a, b) = (1/B(a,b)) * int_0^x t^(a-1)(1-t)^(b-1) dt.
/// Continued-fraction evaluation (modified Lentz), relative accuracy ~1e-14.
double reg_inc_beta(double x, double a, double b);

/// Upper (unregularized) incomplete Beta accumulated from `lo` to 1:
///   int_lo^1 t^(a-1) (1-t)^(b-1) dt  =  B(a,b) * (1 - I_lo(a,b)).
double inc_beta_upper(double lo, double a, double b);

/// Same integral with the complement 1-lo supplied directly, for callers that
/// can compute it without cancellation (e.g. from a survival function).
double inc_beta_upper_c(double one_minus_lo, double a, double b);

}  // namespace rfa
