#include "rfa/pwm.hpp"

#include <algorithm>
#include <cmath>

#include "rfa/errors.hpp"

namespace rfa {

PwmTriple estimate_pwm_sorted(std::span<const double> z) {
  const std::size_t n = z.size();
  if (n < 2) throw UsageError("estimate_pwm: need at least 2 values");
  const double dn = static_cast<double>(n);
  double s0 = 0.0, s1 = 0.0, s2 = 0.0;
  for (std::size_t j = 1; j <= n; ++j) {
    const double v = z[j - 1];
    const double w1 = static_cast<double>(j - 1) / (dn - 1.0);
    // weights depend only on (j, n), so the estimator is exactly degree-1
    // homogeneous up to per-term rounding
    s0 += v;
    s1 += v * w1;
    if (n > 2) s2 += v * w1 * (static_cast<double>(j) - 2.0) / (dn - 2.0);
  }
  PwmTriple out;
  out.a0 = s0 / dn;
  out.a1 = s1 / dn;
  out.a2 = n > 2 ? s2 / dn : 0.0;
  return out;
}

PwmTriple estimate_pwm(std::span<const double> sample) {
  for (double v : sample) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw UsageError("estimate_pwm: sample values must be positive and finite");
  }
  std::vector<double> z(sample.begin(), sample.end());
  std::sort(z.begin(), z.end());
  return estimate_pwm_sorted(z);
}

OmegaResult omega_ratio(const PwmTriple& pwm, int n) {
  OmegaResult r;
  r.n = n;
  const double denom = 2.0 * pwm.a1 - pwm.a0;
  if (!(std::fabs(denom) > kOmegaDenomGuard * pwm.a0)) {
    r.degenerate = true;
    return r;
  }
  r.omega = (3.0 * pwm.a2 - 2.0 * pwm.a1) / denom;
  if (!std::isfinite(r.omega)) r.degenerate = true;
  return r;
}

OmegaResult omega_ratio(std::span<const double> sample) {
  if (sample.size() < 3) {
    OmegaResult r;
    r.n = static_cast<int>(sample.size());
    r.degenerate = true;
    return r;
  }
  return omega_ratio(estimate_pwm(sample), static_cast<int>(sample.size()));
}

double omega_distance(double omega_i, double omega_j) {
  return std::fabs(omega_i - omega_j);
}

std::vector<int> OmegaField::active_sites() const {
  std::vector<int> idx;
  idx.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) {
    if (!degenerate[i]) idx.push_back(static_cast<int>(i));
  }
  return idx;
}

}  // namespace rfa
