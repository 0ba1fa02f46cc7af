#include "rfa/fit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "rfa/errors.hpp"
#include "rfa/parallel.hpp"
#include "rfa/special.hpp"

namespace rfa {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// ---------------------------------------------------------------------------
// Tiny dense solve, n in {2, 3}: Gaussian elimination with partial pivoting.
// ---------------------------------------------------------------------------
template <int N>
bool solve_linear(std::array<std::array<double, N>, N> a, std::array<double, N>& b) {
  for (int col = 0; col < N; ++col) {
    int piv = col;
    for (int r = col + 1; r < N; ++r)
      if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
    if (std::fabs(a[piv][col]) < 1e-300) return false;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (int r = col + 1; r < N; ++r) {
      const double f = a[r][col] / a[col][col];
      for (int c = col; c < N; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  for (int col = N - 1; col >= 0; --col) {
    double s = b[col];
    for (int c = col + 1; c < N; ++c) s -= a[col][c] * b[c];
    b[col] = s / a[col][col];
  }
  return true;
}

// ---------------------------------------------------------------------------
// Projected Levenberg-Marquardt on log(alpha_model / alpha_target) residuals.
// Coordinates: theta = (log kappa, log sigma, xi). xi may sit on its bounds.
// ---------------------------------------------------------------------------

struct Box {
  std::array<double, 3> lo, hi;
  void clamp(std::array<double, 3>& t) const {
    for (int i = 0; i < 3; ++i) t[i] = std::clamp(t[i], lo[i], hi[i]);
  }
};

EgpdParams theta_to_params(const std::array<double, 3>& t) {
  return {std::exp(t[0]), std::exp(t[1]), t[2]};
}

struct LmOutcome {
  std::array<double, 3> theta{};
  double resid_inf = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool stationary = false;  // step shrank to nothing (root or boundary LS point)
};

/// residual_fn fills r[0..NR) given theta; returns false on numeric failure.
/// active[] marks the coordinates being optimized (others frozen).
template <int NR>
LmOutcome lm_minimize(const std::array<double, 3>& theta0, const std::array<bool, 3>& active,
                      const Box& box, int max_iter, double resid_tol,
                      const std::function<bool(const std::array<double, 3>&, std::array<double, NR>&)>& residual_fn) {
  LmOutcome out;
  out.theta = theta0;
  box.clamp(out.theta);

  std::array<double, NR> r{};
  if (!residual_fn(out.theta, r)) return out;
  auto norm2 = [](const std::array<double, NR>& v) {
    double s = 0;
    for (double x : v) s += x * x;
    return s;
  };
  auto norm_inf = [](const std::array<double, NR>& v) {
    double s = 0;
    for (double x : v) s = std::max(s, std::fabs(x));
    return s;
  };
  double f = norm2(r);
  out.resid_inf = norm_inf(r);

  int act_idx[3];
  int np = 0;
  for (int i = 0; i < 3; ++i)
    if (active[i]) act_idx[np++] = i;

  double lambda = 1e-3;
  for (int iter = 0; iter < max_iter; ++iter) {
    out.iterations = iter + 1;
    if (out.resid_inf < resid_tol) return out;

    // Finite-difference Jacobian on the active coordinates.
    std::array<std::array<double, NR>, 3> jac{};
    bool ok = true;
    for (int a = 0; a < np && ok; ++a) {
      const int j = act_idx[a];
      double h = 1e-6 * (1.0 + std::fabs(out.theta[j]));
      auto tp = out.theta;
      if (tp[j] + h > box.hi[j]) h = -h;
      tp[j] += h;
      std::array<double, NR> rp{};
      ok = residual_fn(tp, rp);
      if (!ok) break;
      for (int i = 0; i < NR; ++i) jac[a][i] = (rp[i] - r[i]) / h;
    }
    if (!ok) return out;

    // Normal equations on the active subspace.
    std::array<std::array<double, 3>, 3> jtj{};
    std::array<double, 3> jtr{};
    for (int a = 0; a < np; ++a) {
      for (int b2 = 0; b2 < np; ++b2) {
        double s = 0;
        for (int i = 0; i < NR; ++i) s += jac[a][i] * jac[b2][i];
        jtj[a][b2] = s;
      }
      double s = 0;
      for (int i = 0; i < NR; ++i) s += jac[a][i] * r[i];
      jtr[a] = s;
    }

    bool stepped = false;
    for (int attempt = 0; attempt < 14; ++attempt) {
      std::array<double, 3> rhs{};
      std::array<std::array<double, 3>, 3> m = jtj;
      for (int a = 0; a < np; ++a) {
        m[a][a] += lambda * std::max(jtj[a][a], 1e-12);
        rhs[a] = -jtr[a];
      }
      bool solved = false;
      if (np == 3) {
        std::array<std::array<double, 3>, 3> m3;
        std::array<double, 3> b3;
        for (int a = 0; a < 3; ++a) {
          b3[a] = rhs[a];
          for (int b2 = 0; b2 < 3; ++b2) m3[a][b2] = m[a][b2];
        }
        solved = solve_linear<3>(m3, b3);
        rhs = b3;
      } else {
        std::array<std::array<double, 2>, 2> m2{};
        std::array<double, 2> b2v{};
        for (int a = 0; a < 2; ++a) {
          b2v[a] = rhs[a];
          for (int b2 = 0; b2 < 2; ++b2) m2[a][b2] = m[a][b2];
        }
        solved = solve_linear<2>(m2, b2v);
        rhs[0] = b2v[0];
        rhs[1] = b2v[1];
      }
      if (!solved) {
        lambda *= 4.0;
        continue;
      }

      auto cand = out.theta;
      double step_norm = 0;
      for (int a = 0; a < np; ++a) {
        cand[act_idx[a]] += rhs[a];
        step_norm += rhs[a] * rhs[a];
      }
      box.clamp(cand);
      step_norm = 0;
      for (int i = 0; i < 3; ++i) {
        const double d = cand[i] - out.theta[i];
        step_norm += d * d;
      }
      step_norm = std::sqrt(step_norm);
      if (step_norm < 1e-12) {
        out.stationary = true;
        return out;
      }

      std::array<double, NR> rc{};
      if (residual_fn(cand, rc)) {
        const double fc = norm2(rc);
        if (fc < f) {
          out.theta = cand;
          r = rc;
          f = fc;
          out.resid_inf = norm_inf(r);
          lambda = std::max(lambda / 3.0, 1e-12);
          stepped = true;
          break;
        }
      }
      lambda *= 4.0;
    }
    if (!stepped) {
      out.stationary = true;
      return out;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Nelder-Mead for the likelihood fallback.
// ---------------------------------------------------------------------------

template <int D>
struct NmOutcome {
  std::array<double, D> x;
  double f = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
};

template <int D, typename F>
NmOutcome<D> nelder_mead(const std::array<double, D>& x0, const std::array<double, D>& step,
                         int max_iter, F&& fn) {
  constexpr double alpha = 1.0, gamma = 2.0, rho = 0.5, shrink = 0.5;
  std::array<std::array<double, D>, D + 1> simplex;
  std::array<double, D + 1> fv;
  simplex[0] = x0;
  for (int i = 0; i < D; ++i) {
    simplex[i + 1] = x0;
    simplex[i + 1][i] += step[i];
  }
  for (int i = 0; i <= D; ++i) fv[i] = fn(simplex[i]);

  NmOutcome<D> out;
  std::array<int, D + 1> ord;
  for (int iter = 0; iter < max_iter; ++iter) {
    out.iterations = iter + 1;
    std::iota(ord.begin(), ord.end(), 0);
    std::sort(ord.begin(), ord.end(), [&](int a, int b) { return fv[a] < fv[b]; });
    const int best = ord[0], worst = ord[D], second = ord[D - 1];
    if (std::fabs(fv[worst] - fv[best]) < 1e-11 * (1.0 + std::fabs(fv[best]))) {
      out.converged = true;
      break;
    }
    std::array<double, D> centroid{};
    for (int i = 0; i <= D; ++i) {
      if (i == worst) continue;
      for (int d = 0; d < D; ++d) centroid[d] += simplex[i][d] / D;
    }
    auto make = [&](double coef) {
      std::array<double, D> p;
      for (int d = 0; d < D; ++d) p[d] = centroid[d] + coef * (simplex[worst][d] - centroid[d]);
      return p;
    };
    const auto refl = make(-alpha);
    const double f_refl = fn(refl);
    if (f_refl < fv[ord[0]]) {
      const auto expd = make(-gamma);
      const double f_exp = fn(expd);
      if (f_exp < f_refl) {
        simplex[worst] = expd;
        fv[worst] = f_exp;
      } else {
        simplex[worst] = refl;
        fv[worst] = f_refl;
      }
    } else if (f_refl < fv[second]) {
      simplex[worst] = refl;
      fv[worst] = f_refl;
    } else {
      const auto contr = make(f_refl < fv[worst] ? -rho : rho);
      const double f_con = fn(contr);
      if (f_con < std::min(f_refl, fv[worst])) {
        simplex[worst] = contr;
        fv[worst] = f_con;
      } else {
        for (int i = 0; i <= D; ++i) {
          if (i == ord[0]) continue;
          for (int d = 0; d < D; ++d)
            simplex[i][d] = simplex[ord[0]][d] + shrink * (simplex[i][d] - simplex[ord[0]][d]);
          fv[i] = fn(simplex[i]);
        }
      }
    }
  }
  int best = 0;
  for (int i = 1; i <= D; ++i)
    if (fv[i] < fv[best]) best = i;
  out.x = simplex[best];
  out.f = fv[best];
  return out;
}

bool effectively_constant(std::span<const double> values) {
  auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  return (*mx - *mn) <= 1e-12 * std::max(1.0, *mx);
}

double logistic(double s) { return 1.0 / (1.0 + std::exp(-s)); }

}  // namespace

// ---------------------------------------------------------------------------

FitResult fit_pwm_match(const PwmTriple& target, const FitOptions& opts) {
  FitResult best;
  if (!(target.a0 > 0.0) || !(target.a1 > 0.0) || !(target.a2 > 0.0)) return best;

  const Box box{{std::log(opts.kappa_min), std::log(opts.sigma_min), 0.0},
                {std::log(opts.kappa_max), std::log(opts.sigma_max), opts.xi_max}};

  std::function<bool(const std::array<double, 3>&, std::array<double, 3>&)> resid =
      [&](const std::array<double, 3>& t, std::array<double, 3>& r) {
        const auto p = theta_to_params(t);
        const PwmTriple m = Egpd(p).pwm_truncated(opts.threshold_u);
        if (!(m.a0 > 0.0) || !(m.a1 > 0.0) || !(m.a2 > 0.0)) return false;
        r[0] = std::log(m.a0 / target.a0);
        r[1] = std::log(m.a1 / target.a1);
        r[2] = std::log(m.a2 / target.a2);
        return std::isfinite(r[0]) && std::isfinite(r[1]) && std::isfinite(r[2]);
      };

  // Starting points: a GPD-motivated guess from the omega ratio of the
  // targets, plus spread-out covers of the (kappa, xi) box.
  const double om = (3.0 * target.a2 - 2.0 * target.a1) / (2.0 * target.a1 - target.a0);
  const double xi_gpd = std::clamp(3.0 - 2.0 / std::max(om, 0.05), 0.0, 0.8);
  const double s0 = std::max(target.a0, 2.0 * opts.sigma_min);
  const std::array<std::array<double, 3>, 4> starts = {{
      {0.0, std::log(s0 * std::max(1.0 - xi_gpd, 0.1)), xi_gpd},
      {std::log(1.5), std::log(0.6 * s0), 0.15},
      {std::log(0.6), std::log(1.2 * s0), 0.05},
      {std::log(3.0), std::log(0.35 * s0), 0.3},
  }};

  bool have_any = false;
  for (const auto& t0 : starts) {
    const auto o =
        lm_minimize<3>(t0, {true, true, true}, box, opts.max_iterations, 0.1 * opts.resid_tol, resid);
    best.iterations += o.iterations;
    const bool ok =
        o.resid_inf < opts.resid_tol || (o.stationary && o.resid_inf <= opts.accept_tol);
    const bool better = !have_any || (ok && !best.converged) ||
                        (ok == best.converged && o.resid_inf < best.residual);
    if (better) {
      best.params = theta_to_params(o.theta);
      best.converged = ok;
      best.residual = o.resid_inf;
      have_any = true;
    }
    if (best.converged && best.residual < opts.resid_tol) break;
  }
  return best;
}

FitResult fit_pwm_match_fixed_xi(const PwmTriple& target, double xi_fixed,
                                 const EgpdParams& init, const FitOptions& opts) {
  FitResult out;
  if (!(target.a0 > 0.0) || !(target.a1 > 0.0)) return out;
  const double xi = std::clamp(xi_fixed, 0.0, opts.xi_max);

  const Box box{{std::log(opts.kappa_min), std::log(opts.sigma_min), xi},
                {std::log(opts.kappa_max), std::log(opts.sigma_max), xi}};

  std::function<bool(const std::array<double, 3>&, std::array<double, 2>&)> resid =
      [&](const std::array<double, 3>& t, std::array<double, 2>& r) {
        const PwmTriple m = Egpd(std::exp(t[0]), std::exp(t[1]), xi).pwm_truncated(opts.threshold_u);
        if (!(m.a0 > 0.0) || !(m.a1 > 0.0)) return false;
        r[0] = std::log(m.a0 / target.a0);
        r[1] = std::log(m.a1 / target.a1);
        return std::isfinite(r[0]) && std::isfinite(r[1]);
      };

  const std::array<double, 3> t0 = {std::log(std::clamp(init.kappa, opts.kappa_min, opts.kappa_max)),
                                    std::log(std::clamp(init.sigma, opts.sigma_min, opts.sigma_max)),
                                    xi};
  const auto o =
      lm_minimize<2>(t0, {true, true, false}, box, opts.max_iterations, 0.1 * opts.resid_tol, resid);
  out.params = {std::exp(o.theta[0]), std::exp(o.theta[1]), xi};
  out.iterations = o.iterations;
  out.residual = o.resid_inf;
  out.converged = o.resid_inf < opts.resid_tol || (o.stationary && o.resid_inf <= opts.accept_tol);
  return out;
}

FitResult fit_mle(std::span<const double> values, const EgpdParams& init, const FitOptions& opts) {
  FitResult out;
  out.used_mle_fallback = true;
  const double u = opts.threshold_u;
  const double inv_n = 1.0 / static_cast<double>(values.size());

  auto neg_mean_loglik = [&](const std::array<double, 3>& x) {
    const double kappa = std::clamp(std::exp(x[0]), opts.kappa_min, opts.kappa_max);
    const double sigma = std::clamp(std::exp(x[1]), opts.sigma_min, opts.sigma_max);
    const double xi = opts.xi_max * logistic(std::clamp(x[2], -40.0, 40.0));
    const Egpd d(kappa, sigma, xi);
    const double log_surv_u = std::log(d.survival(u));
    double s = 0.0;
    for (double z : values) s += d.log_pdf(z);
    const double val = -(s * inv_n - log_surv_u);
    return std::isfinite(val) ? val : 1e12;
  };

  const double xi0 = std::clamp(init.xi, 1e-3, opts.xi_max - 1e-3);
  const std::array<double, 3> x0 = {std::log(std::clamp(init.kappa, opts.kappa_min, opts.kappa_max)),
                                    std::log(std::clamp(init.sigma, opts.sigma_min, opts.sigma_max)),
                                    std::log(xi0 / (opts.xi_max - xi0))};
  const auto o = nelder_mead<3>(x0, {0.4, 0.4, 0.8}, 600, neg_mean_loglik);
  out.params = {std::clamp(std::exp(o.x[0]), opts.kappa_min, opts.kappa_max),
                std::clamp(std::exp(o.x[1]), opts.sigma_min, opts.sigma_max),
                opts.xi_max * logistic(std::clamp(o.x[2], -40.0, 40.0))};
  out.iterations = o.iterations;
  out.converged = o.converged && o.f < 1e11;
  return out;
}

FitResult fit_local(std::span<const double> values, const FitOptions& opts) {
  FitResult out;
  if (static_cast<int>(values.size()) < opts.min_sample) return out;
  if (effectively_constant(values)) return out;

  PwmTriple target;
  try {
    target = estimate_pwm(values);
  } catch (const UsageError&) {
    return out;
  }

  out = fit_pwm_match(target, opts);
  if (out.converged) return out;

  const EgpdParams init =
      out.params.sigma > 0 ? out.params : EgpdParams{1.0, std::max(target.a0, 1e-3), 0.1};
  FitResult mle = fit_mle(values, init, opts);
  mle.residual = out.residual;
  mle.iterations += out.iterations;
  return mle;
}

// ---------------------------------------------------------------------------

double regional_sigma_update(double kappa0, double xi0, double u, double mean_excess,
                             double sigma0) {
  if (!(kappa0 > 0.0) || !(xi0 >= 0.0) || xi0 >= 1.0 || !(sigma0 > 0.0) || !(mean_excess > u))
    return kNaN;
  const double xi = std::max(xi0, 1e-6);  // smooth xi -> 0 limit
  const double y_u = std::log1p(xi * (u / sigma0)) / xi;
  const double hs = std::exp(-y_u);   // 1 - H(u)
  const double x = -std::expm1(-y_u); // H_{xi_0}(u / sigma_0)
  if (!(x > 0.0) || !(x < 1.0)) return kNaN;
  const double fbar = -std::expm1(kappa0 * std::log(x));  // EGPD survival at u
  const double ib = inc_beta_upper_c(hs, kappa0, 1.0 - xi);
  const double denom = (kappa0 / fbar) * ib - 1.0;
  if (!(denom > 0.0) || !std::isfinite(denom)) return kNaN;
  return xi * mean_excess / denom;
}

SigmaIteration solve_regional_sigma(double kappa0, double xi0, double u, double mean_excess,
                                    double sigma_init, double eps, int cap) {
  SigmaIteration out;
  double sigma0 = sigma_init;
  for (int it = 1; it <= cap; ++it) {
    const double sigma_new = regional_sigma_update(kappa0, xi0, u, mean_excess, sigma0);
    out.iterations = it;
    if (!std::isfinite(sigma_new) || !(sigma_new > 0.0)) {
      out.sigma = sigma0;
      return out;
    }
    if (std::fabs(sigma_new - sigma0) < eps) {
      out.sigma = sigma_new;
      out.converged = true;
      return out;
    }
    sigma0 = sigma_new;
  }
  out.sigma = sigma0;
  return out;
}

// ---------------------------------------------------------------------------

std::vector<SiteFit> fit_local_all(const std::vector<std::vector<double>>& site_values,
                                   const FitOptions& opts) {
  std::vector<SiteFit> out(site_values.size());
  parallel_for(site_values.size(), opts.threads, [&](std::size_t i) {
    SiteFit& sf = out[i];
    sf.level = FitLevel::Local;
    sf.n_fit = static_cast<int>(site_values[i].size());
    const FitResult r = fit_local(site_values[i], opts);
    sf.params = r.params;
    sf.converged = r.converged;
    sf.fitted = r.converged;
    sf.used_fallback = r.used_mle_fallback;
    sf.iterations = r.iterations;
  });
  return out;
}

namespace {

struct ClusterMeans {
  std::vector<double> kappa, xi;
  std::vector<int> count;
};

ClusterMeans cluster_means(const std::vector<SiteFit>& local, const std::vector<int>& cluster,
                           int n_clusters) {
  ClusterMeans m;
  m.kappa.assign(static_cast<std::size_t>(n_clusters), 0.0);
  m.xi.assign(static_cast<std::size_t>(n_clusters), 0.0);
  m.count.assign(static_cast<std::size_t>(n_clusters), 0);
  for (std::size_t i = 0; i < local.size(); ++i) {
    const int c = cluster[i];
    if (c < 0 || c >= n_clusters) continue;
    if (!local[i].fitted || !local[i].converged) continue;
    m.kappa[static_cast<std::size_t>(c)] += local[i].params.kappa;
    m.xi[static_cast<std::size_t>(c)] += local[i].params.xi;
    m.count[static_cast<std::size_t>(c)] += 1;
  }
  for (int c = 0; c < n_clusters; ++c) {
    const auto uc = static_cast<std::size_t>(c);
    if (m.count[uc] == 0)
      throw NumericError("cluster " + std::to_string(c) + " has no converged local fit");
    m.kappa[uc] /= m.count[uc];
    m.xi[uc] /= m.count[uc];
  }
  return m;
}

}  // namespace

std::vector<SiteFit> fit_semiregional_all(const std::vector<std::vector<double>>& site_values,
                                          const std::vector<SiteFit>& local,
                                          const std::vector<int>& cluster, int n_clusters,
                                          const FitOptions& opts) {
  if (local.size() != site_values.size() || cluster.size() != site_values.size())
    throw UsageError("fit_semiregional_all: site arrays must have equal length");
  const ClusterMeans means = cluster_means(local, cluster, n_clusters);
  std::vector<SiteFit> out(site_values.size());
  parallel_for(site_values.size(), opts.threads, [&](std::size_t i) {
    SiteFit& sf = out[i];
    sf.level = FitLevel::Semiregional;
    sf.cluster = cluster[i];
    sf.n_fit = static_cast<int>(site_values[i].size());
    if (!local[i].fitted || cluster[i] < 0) return;  // stays unfitted
    const double xi0 = means.xi[static_cast<std::size_t>(cluster[i])];

    PwmTriple target;
    try {
      target = estimate_pwm(site_values[i]);
    } catch (const UsageError&) {
      return;
    }
    FitResult r = fit_pwm_match_fixed_xi(target, xi0, local[i].params, opts);
    if (!r.converged) {
      // likelihood fallback with xi frozen: profile over (kappa, sigma)
      const double u = opts.threshold_u;
      const auto& vals = site_values[i];
      const double inv_n = 1.0 / static_cast<double>(vals.size());
      auto nll = [&](const std::array<double, 2>& x) {
        const double kappa = std::clamp(std::exp(x[0]), opts.kappa_min, opts.kappa_max);
        const double sigma = std::clamp(std::exp(x[1]), opts.sigma_min, opts.sigma_max);
        const Egpd d(kappa, sigma, xi0);
        double s = 0.0;
        for (double z : vals) s += d.log_pdf(z);
        const double val = -(s * inv_n - std::log(d.survival(u)));
        return std::isfinite(val) ? val : 1e12;
      };
      const std::array<double, 2> x0 = {std::log(local[i].params.kappa),
                                        std::log(local[i].params.sigma)};
      const auto o = nelder_mead<2>(x0, {0.4, 0.4}, 400, nll);
      r.params = {std::clamp(std::exp(o.x[0]), opts.kappa_min, opts.kappa_max),
                  std::clamp(std::exp(o.x[1]), opts.sigma_min, opts.sigma_max), xi0};
      r.converged = o.converged && o.f < 1e11;
      r.used_mle_fallback = true;
      r.iterations += o.iterations;
    }
    sf.params = r.params;
    sf.fitted = r.converged;
    sf.converged = r.converged;
    sf.used_fallback = r.used_mle_fallback;
    sf.iterations = r.iterations;
  });
  return out;
}

RegionalModel fit_regional_all(const std::vector<std::vector<double>>& site_values,
                               const std::vector<SiteFit>& local,
                               const std::vector<int>& cluster, int n_clusters,
                               const FitOptions& opts) {
  if (local.size() != site_values.size() || cluster.size() != site_values.size())
    throw UsageError("fit_regional_all: site arrays must have equal length");
  const ClusterMeans means = cluster_means(local, cluster, n_clusters);
  RegionalModel model;
  model.kappa0 = means.kappa;
  model.xi0 = means.xi;
  model.threshold_u = opts.threshold_u;
  for (double xi0 : model.xi0) {
    if (xi0 >= 1.0) throw NumericError("regional xi_0 >= 1: divergent mean, cannot iterate");
  }
  model.site.resize(site_values.size());
  parallel_for(site_values.size(), opts.threads, [&](std::size_t i) {
    SiteFit& sf = model.site[i];
    sf.level = FitLevel::Regional;
    sf.cluster = cluster[i];
    sf.n_fit = static_cast<int>(site_values[i].size());
    if (!local[i].fitted || cluster[i] < 0 || site_values[i].empty()) return;
    const auto c = static_cast<std::size_t>(cluster[i]);
    const double m =
        std::accumulate(site_values[i].begin(), site_values[i].end(), 0.0) /
        static_cast<double>(site_values[i].size());
    const SigmaIteration it = solve_regional_sigma(means.kappa[c], means.xi[c], opts.threshold_u,
                                                   m, local[i].params.sigma);
    sf.params = {means.kappa[c], it.converged ? it.sigma : local[i].params.sigma, means.xi[c]};
    sf.fitted = true;
    sf.converged = it.converged;
    sf.iterations = it.iterations;
  });
  return model;
}

}  // namespace rfa
