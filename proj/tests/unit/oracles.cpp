#include "oracles.hpp"

#include <stdexcept>

namespace oracle {

namespace {

double simpson(const std::function<double(double)>& f, double a, double fa, double m, double fm,
               double b, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_step(const std::function<double(double)>& f, double a, double fa, double m,
                     double fm, double b, double fb, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(f, a, fa, lm, flm, m, fm);
  const double right = simpson(f, m, fm, rm, frm, b, fb);
  if (depth <= 0 || std::fabs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_step(f, a, fa, lm, flm, m, fm, left, tol * 0.5, depth - 1) +
         adaptive_step(f, m, fm, rm, frm, b, fb, right, tol * 0.5, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  return adaptive_step(f, a, fa, m, fm, b, fb, simpson(f, a, fa, m, fm, b, fb), tol, max_depth);
}

namespace {

// Direct EGPD formulas for the quadrature route; the upper-tail quantile is
// expressed through the survival w = 1 - p so the q -> 1 endpoint stays
// representable.
double egpd_cdf_ref(double z, double kappa, double sigma, double xi) {
  if (z <= 0.0) return 0.0;
  const double h = xi == 0.0 ? 1.0 - std::exp(-z / sigma)
                             : 1.0 - std::pow(1.0 + xi * z / sigma, -1.0 / xi);
  return std::pow(h, kappa);
}

double egpd_quantile_from_tail_ref(double w, double kappa, double sigma, double xi) {
  // g = (1 - w)^(1/kappa); one_minus_g computed without cancellation
  const double one_minus_g = -std::expm1(std::log1p(-w) / kappa);
  if (xi == 0.0) return -sigma * std::log(one_minus_g);
  return sigma / xi * (std::pow(one_minus_g, -xi) - 1.0);
}

}  // namespace

PwmRef egpd_truncated_pwms(double kappa, double sigma, double xi, double u) {
  const double fu = egpd_cdf_ref(u, kappa, sigma, xi);
  PwmRef out{};
  // alpha_i = int_0^1 Q_u(q) q^i dq has an integrable (1-q)^(-xi) endpoint.
  // Substituting q = 1 - t^(1/(1-xi)) makes the integrand bounded: the
  // Jacobian t^(1/(1-xi) - 1) exactly cancels the blow-up.
  const double e = 1.0 / (1.0 - xi);
  for (int i = 0; i <= 2; ++i) {
    const auto f = [&](double t) {
      const double te = std::pow(t, e);
      const double q = 1.0 - te;
      const double w = (1.0 - fu) * te;  // survival of the untruncated law
      const double z = egpd_quantile_from_tail_ref(w, kappa, sigma, xi);
      return z * std::pow(q, i) * e * std::pow(t, e - 1.0);
    };
    const double v = adaptive_simpson(f, 1e-14, 1.0, 1e-12);
    (i == 0 ? out.a0 : i == 1 ? out.a1 : out.a2) = v;
  }
  return out;
}

double egpd_truncated_mean(double kappa, double sigma, double xi, double u) {
  return egpd_truncated_pwms(kappa, sigma, xi, u).a0;
}

double brute_force_kmedoids_cost(std::span<const double> x, int k) {
  const int n = static_cast<int>(x.size());
  if (k > n) throw std::invalid_argument("brute force: k > n");
  std::vector<int> pick(static_cast<std::size_t>(k));
  double best = std::numeric_limits<double>::infinity();

  std::function<void(int, int)> rec = [&](int start, int chosen) {
    if (chosen == k) {
      double cost = 0.0;
      for (int i = 0; i < n; ++i) {
        double d = std::numeric_limits<double>::infinity();
        for (int j = 0; j < k; ++j)
          d = std::min(d, std::fabs(x[static_cast<std::size_t>(i)] -
                                    x[static_cast<std::size_t>(pick[static_cast<std::size_t>(j)])]));
        cost += d;
      }
      best = std::min(best, cost);
      return;
    }
    for (int i = start; i <= n - (k - chosen); ++i) {
      pick[static_cast<std::size_t>(chosen)] = i;
      rec(i + 1, chosen + 1);
    }
  };
  rec(0, 0);
  return best;
}

double adjusted_rand_index(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw std::invalid_argument("ARI: size mismatch");
  const int ka = *std::max_element(a.begin(), a.end()) + 1;
  const int kb = *std::max_element(b.begin(), b.end()) + 1;
  std::vector<std::vector<long long>> table(static_cast<std::size_t>(ka),
                                            std::vector<long long>(static_cast<std::size_t>(kb), 0));
  for (std::size_t i = 0; i < a.size(); ++i)
    table[static_cast<std::size_t>(a[i])][static_cast<std::size_t>(b[i])] += 1;

  auto choose2 = [](long long m) { return m * (m - 1) / 2; };
  long long sum_ij = 0, sum_a = 0, sum_b = 0;
  for (int i = 0; i < ka; ++i) {
    long long row = 0;
    for (int j = 0; j < kb; ++j) {
      sum_ij += choose2(table[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
      row += table[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    sum_a += choose2(row);
  }
  for (int j = 0; j < kb; ++j) {
    long long col = 0;
    for (int i = 0; i < ka; ++i) col += table[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    sum_b += choose2(col);
  }
  const long long total = choose2(static_cast<long long>(a.size()));
  const double expected = static_cast<double>(sum_a) * static_cast<double>(sum_b) /
                          static_cast<double>(total);
  const double max_index = 0.5 * (static_cast<double>(sum_a) + static_cast<double>(sum_b));
  return (static_cast<double>(sum_ij) - expected) / (max_index - expected);
}

}  // namespace oracle
