#include "rfa/egpd.hpp"

#include <cmath>
#include <limits>

#include "rfa/errors.hpp"
#include "rfa/special.hpp"

namespace rfa {

const char* fit_level_name(FitLevel level) {
  switch (level) {
    case FitLevel::Local: return "local";
    case FitLevel::Semiregional: return "semiregional";
    case FitLevel::Regional: return "regional";
  }
  return "?";
}

namespace {
constexpr double kXiZero = 1e-12;      // below this, use the exact xi = 0 forms
constexpr double kXiBetaFloor = 1e-6;  // floor for the incomplete-Beta route
}  // namespace

Egpd::Egpd(double kappa, double sigma, double xi) : kappa_(kappa), sigma_(sigma), xi_(xi) {
  if (!(kappa > 0.0) || !std::isfinite(kappa))
    throw UsageError("Egpd: kappa must be positive and finite");
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw UsageError("Egpd: sigma must be positive and finite");
  if (!(xi >= 0.0) || !(xi < 1.0))
    throw UsageError("Egpd: xi must lie in [0, 1)");
}

double Egpd::gpd_y(double z) const {
  const double t = z / sigma_;
  if (xi_ < kXiZero) return t;
  return std::log1p(xi_ * t) / xi_;  // log1p keeps small-xi evaluation exact
}

double Egpd::cdf(double z) const {
  if (z <= 0.0) return 0.0;
  if (!std::isfinite(z)) return 1.0;
  const double h = -std::expm1(-gpd_y(z));
  return std::pow(h, kappa_);
}

double Egpd::survival(double z) const {
  if (z <= 0.0) return 1.0;
  if (!std::isfinite(z)) return 0.0;
  const double y = gpd_y(z);
  const double log_h = std::log(-std::expm1(-y));
  return -std::expm1(kappa_ * log_h);
}

double Egpd::log_pdf(double z) const {
  if (!(z > 0.0)) return -std::numeric_limits<double>::infinity();
  const double y = gpd_y(z);
  const double log_h = std::log(-std::expm1(-y));        // log H(z)
  const double log_dens_h = -std::log(sigma_) - (1.0 + xi_) * y;  // log h(z)
  return std::log(kappa_) + (kappa_ - 1.0) * log_h + log_dens_h;
}

double Egpd::pdf(double z) const { return std::exp(log_pdf(z)); }

double Egpd::quantile(double p) const {
  if (!(p > 0.0) || !(p < 1.0)) throw UsageError("Egpd::quantile: p must be in (0, 1)");
  const double log_g = std::log(p) / kappa_;  // log of G^{-1}(p) = p^(1/kappa)
  // log(1 - g) without cancellation when g -> 1:
  const double log_1mg = std::log(-std::expm1(log_g));
  if (xi_ < kXiZero) return -sigma_ * log_1mg;
  return sigma_ * std::expm1(-xi_ * log_1mg) / xi_;
}

double Egpd::cdf_truncated(double z, double u) const {
  if (z <= u) return 0.0;
  const double fu = cdf(u);
  return (cdf(z) - fu) / (1.0 - fu);
}

double Egpd::survival_truncated(double z, double u) const {
  if (z <= u) return 1.0;
  return survival(z) / survival(u);
}

double Egpd::log_pdf_truncated(double z, double u) const {
  if (!(z > u)) return -std::numeric_limits<double>::infinity();
  return log_pdf(z) - std::log(survival(u));
}

double Egpd::quantile_truncated(double p, double u) const {
  if (!(p >= 0.0) || !(p < 1.0))
    throw UsageError("Egpd::quantile_truncated: p must be in [0, 1)");
  if (p == 0.0) return u;
  const double fu = cdf(u);
  return quantile(fu + p * (1.0 - fu));
}

double Egpd::sample_truncated(Rng& rng, double u) const {
  return quantile_truncated(rng.uniform_open01(), u);
}

PwmTriple Egpd::pwm_truncated(double u) const {
  // alpha_i = E[Z_u F_u(Z_u)^i] for Z_u = Z | Z > u. Substituting v = H(z)
  // turns each moment into incomplete Beta integrals
  //   IB_m = int_x^1 v^(m kappa - 1) (1 - v)^(-xi) dv,  x = H(u),
  // plus elementary powers of x.
  if (xi_ < kXiBetaFloor) return Egpd(kappa_, sigma_, kXiBetaFloor).pwm_truncated(u);
  const double xi = xi_;
  const double k = kappa_;
  const double y_u = std::log1p(xi * (u / sigma_)) / xi;
  const double hs = std::exp(-y_u);            // 1 - H(u), exact complement
  const double x = -std::expm1(-y_u);          // H(u)
  const double xk = std::pow(x, k);            // F(u)
  const double fbar = -std::expm1(k * std::log(x));  // survival(u)

  const double b = 1.0 - xi;
  const double ib1 = inc_beta_upper_c(hs, k, b);
  const double ib2 = inc_beta_upper_c(hs, 2.0 * k, b);
  const double ib3 = inc_beta_upper_c(hs, 3.0 * k, b);

  const double x2k = xk * xk;
  const double x3k = x2k * xk;
  const double scale = sigma_ / xi;

  PwmTriple out;
  out.a0 = scale * (k * ib1 - fbar) / fbar;
  const double t1 = k * ib2 - k * xk * ib1 - 0.5 * (1.0 - x2k) + xk * (1.0 - xk);
  out.a1 = scale * t1 / (fbar * fbar);
  const double t2 = k * (ib3 - 2.0 * xk * ib2 + x2k * ib1) -
                    ((1.0 - x3k) / 3.0 - xk * (1.0 - x2k) + x2k * (1.0 - xk));
  out.a2 = scale * t2 / (fbar * fbar * fbar);
  return out;
}

double Egpd::mean_truncated(double u) const { return pwm_truncated(u).a0; }

double return_level(const EgpdParams& params, double T_years, double n_wds_mean) {
  if (!(T_years >= 1.0)) throw UsageError("return_level: T must be >= 1 year");
  if (!(n_wds_mean > 0.0)) throw UsageError("return_level: n_wds_mean must be positive");
  const double events = T_years * n_wds_mean;
  if (!(events > 1.0)) throw UsageError("return_level: T * n_wds_mean must exceed 1");
  return Egpd(params).quantile(1.0 - 1.0 / events);
}

}  // namespace rfa
