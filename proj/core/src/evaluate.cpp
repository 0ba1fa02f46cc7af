#include "rfa/evaluate.hpp"

#include <algorithm>
#include <cmath>

#include "rfa/errors.hpp"

namespace rfa {

double ad_statistic_from_sorted_pit(std::span<const double> p) {
  const std::size_t n = p.size();
  if (n == 0) throw UsageError("ad_statistic: empty sample");
  const double dn = static_cast<double>(n);
  double s = 0.0;
  for (std::size_t j = 1; j <= n; ++j) {
    const double lo = std::clamp(p[j - 1], 1e-15, 1.0 - 1e-15);
    const double hi = std::clamp(p[n - j], 1e-15, 1.0 - 1e-15);
    s += (2.0 * static_cast<double>(j) - 1.0) * (std::log(lo) + std::log1p(-hi));
  }
  return -dn - s / dn;
}

AdTest anderson_darling_test(const Egpd& dist, double u, std::span<const double> holdout,
                             Rng& rng, int n_sims) {
  AdTest out;
  out.n = static_cast<int>(holdout.size());
  if (out.n < 20) throw UsageError("anderson_darling_test: holdout must have >= 20 values");

  std::vector<double> pit(holdout.size());
  for (std::size_t i = 0; i < holdout.size(); ++i) pit[i] = dist.cdf_truncated(holdout[i], u);
  std::sort(pit.begin(), pit.end());
  out.a2 = ad_statistic_from_sorted_pit(pit);

  // Null statistics: a sample drawn from the fitted distribution has PIT
  // values that are exactly iid uniforms, so simulate those directly.
  int geq = 0;
  std::vector<double> sim(holdout.size());
  for (int b = 0; b < n_sims; ++b) {
    for (auto& v : sim) v = rng.uniform_open01();
    std::sort(sim.begin(), sim.end());
    if (ad_statistic_from_sorted_pit(sim) >= out.a2) ++geq;
  }
  out.p_value = static_cast<double>(1 + geq) / static_cast<double>(n_sims + 1);
  out.reject_5pct = out.p_value <= 0.05;
  return out;
}

std::vector<std::string> spatial_subsample(std::vector<std::string> ids, double fraction,
                                           std::uint64_t seed) {
  if (!(fraction > 0.0) || fraction > 1.0)
    throw UsageError("spatial_subsample: fraction must be in (0, 1]");
  std::sort(ids.begin(), ids.end());
  const std::size_t n = ids.size();
  const auto m = static_cast<std::size_t>(
      std::min<double>(static_cast<double>(n), std::ceil(fraction * static_cast<double>(n))));

  Rng rng = Rng::stream(seed, "spatial-subsample", 0);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(ids[i], ids[j]);
  }
  ids.resize(m);
  std::sort(ids.begin(), ids.end());
  return ids;
}

int parameter_count(FitLevel level, int n_sites, int n_clusters) {
  switch (level) {
    case FitLevel::Local: return 3 * n_sites;
    case FitLevel::Semiregional: return 2 * n_sites + n_clusters;
    case FitLevel::Regional: return n_sites + 2 * n_clusters;
  }
  return 0;
}

double truncated_loglik(const Egpd& dist, double u, std::span<const double> values) {
  const double log_surv = std::log(dist.survival(u));
  double s = 0.0;
  for (double z : values) s += dist.log_pdf(z) - log_surv;
  return s;
}

std::vector<QqPair> qq_data(const Egpd& dist, double u, std::span<const double> holdout) {
  if (holdout.empty()) throw UsageError("qq_data: empty holdout");
  std::vector<double> sorted(holdout.begin(), holdout.end());
  std::sort(sorted.begin(), sorted.end());
  const double dn = static_cast<double>(sorted.size());
  std::vector<QqPair> out(sorted.size());
  for (std::size_t j = 0; j < sorted.size(); ++j) {
    const double p = (static_cast<double>(j) + 0.5) / dn;
    out[j].model = dist.quantile_truncated(p, u);
    out[j].empirical = sorted[j];
  }
  return out;
}

RlDiffSummary return_level_diff(std::span<const double> field_a, std::span<const double> field_b) {
  if (field_a.size() != field_b.size())
    throw UsageError("return_level_diff: fields must cover the same sites");
  RlDiffSummary out;
  out.rel_diff.resize(field_a.size());
  double abs_sum = 0.0;
  std::size_t within = 0;
  for (std::size_t i = 0; i < field_a.size(); ++i) {
    if (!(field_b[i] > 0.0))
      throw UsageError("return_level_diff: reference return level must be positive");
    const double rel = (field_a[i] - field_b[i]) / field_b[i];
    out.rel_diff[i] = rel;
    abs_sum += std::fabs(rel);
    if (std::fabs(rel) < 0.10) ++within;
  }
  if (!field_a.empty()) {
    out.frac_within_10pct = static_cast<double>(within) / static_cast<double>(field_a.size());
    out.mean_abs = abs_sum / static_cast<double>(field_a.size());
  }
  return out;
}

}  // namespace rfa
