#include "rfa/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rfa/errors.hpp"

namespace rfa {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int count_distinct(std::span<const double> x) {
  std::vector<double> v(x.begin(), x.end());
  std::sort(v.begin(), v.end());
  return static_cast<int>(std::unique(v.begin(), v.end()) - v.begin());
}

/// Nearest/second-nearest medoid caches. Ties go to the lowest medoid label.
struct MedoidCaches {
  std::vector<int> nearest;     // medoid label (position in sorted medoid list)
  std::vector<double> d1, d2;   // distance to nearest / second-nearest

  void recompute(std::span<const double> x, const std::vector<int>& medoids) {
    const std::size_t n = x.size();
    nearest.assign(n, 0);
    d1.assign(n, kInf);
    d2.assign(n, kInf);
    for (std::size_t i = 0; i < n; ++i) {
      double b1 = kInf, b2 = kInf;
      int lab = 0;
      for (std::size_t r = 0; r < medoids.size(); ++r) {
        const double d = std::fabs(x[i] - x[static_cast<std::size_t>(medoids[r])]);
        if (d < b1) {
          b2 = b1;
          b1 = d;
          lab = static_cast<int>(r);
        } else if (d < b2) {
          b2 = d;
        }
      }
      nearest[i] = lab;
      d1[i] = b1;
      d2[i] = b2;
    }
  }

  double total_cost() const { return std::accumulate(d1.begin(), d1.end(), 0.0); }
};

}  // namespace

std::vector<int> pam_build(std::span<const double> x, int k) {
  const std::size_t n = x.size();
  if (k < 1) throw UsageError("pam_build: k must be >= 1");
  if (static_cast<std::size_t>(k) > n) throw UsageError("pam_build: k exceeds number of points");
  if (k > count_distinct(x)) throw UsageError("pam_build: k exceeds number of distinct values");

  std::vector<int> medoids;
  medoids.reserve(static_cast<std::size_t>(k));

  // First medoid: minimizes total distance to all points. Evaluated from the
  // sorted order with prefix sums, O(n log n).
  {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return x[static_cast<std::size_t>(a)] < x[static_cast<std::size_t>(b)];
    });
    std::vector<double> prefix(n + 1, 0.0);
    for (std::size_t r = 0; r < n; ++r)
      prefix[r + 1] = prefix[r] + x[static_cast<std::size_t>(order[r])];
    double best_cost = kInf;
    int best_idx = -1;
    for (std::size_t r = 0; r < n; ++r) {
      const double v = x[static_cast<std::size_t>(order[r])];
      const double left = v * static_cast<double>(r + 1) - prefix[r + 1];
      const double right = (prefix[n] - prefix[r + 1]) - v * static_cast<double>(n - r - 1);
      const double cost = left + right;
      const int idx = order[r];
      if (cost < best_cost || (cost == best_cost && idx < best_idx)) {
        best_cost = cost;
        best_idx = idx;
      }
    }
    medoids.push_back(best_idx);
  }

  // Subsequent medoids: greedy, each maximizing the total cost reduction.
  std::vector<double> nearest(n);
  for (std::size_t i = 0; i < n; ++i)
    nearest[i] = std::fabs(x[i] - x[static_cast<std::size_t>(medoids[0])]);

  std::vector<char> is_medoid(n, 0);
  is_medoid[static_cast<std::size_t>(medoids[0])] = 1;

  while (static_cast<int>(medoids.size()) < k) {
    double best_gain = -1.0;
    int best_idx = -1;
    for (std::size_t c = 0; c < n; ++c) {
      if (is_medoid[c]) continue;
      const double vc = x[c];
      double gain = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = std::fabs(x[i] - vc);
        const double g = nearest[i] - d;
        gain += g > 0.0 ? g : 0.0;
      }
      if (gain > best_gain) {
        best_gain = gain;
        best_idx = static_cast<int>(c);
      }
    }
    medoids.push_back(best_idx);
    is_medoid[static_cast<std::size_t>(best_idx)] = 1;
    const double vm = x[static_cast<std::size_t>(best_idx)];
    for (std::size_t i = 0; i < n; ++i)
      nearest[i] = std::min(nearest[i], std::fabs(x[i] - vm));
  }

  // Selection order, not sorted: the k-prefix of a larger build is the build
  // for that k. pam_swap sorts on entry.
  return medoids;
}

Partition pam_swap(std::span<const double> x, std::vector<int> medoids, int max_sweeps) {
  const std::size_t n = x.size();
  const int k = static_cast<int>(medoids.size());
  if (k < 1 || static_cast<std::size_t>(k) > n) throw UsageError("pam_swap: bad medoid count");
  std::sort(medoids.begin(), medoids.end());

  std::vector<char> is_medoid(n, 0);
  for (int m : medoids) is_medoid[static_cast<std::size_t>(m)] = 1;

  MedoidCaches cache;
  cache.recompute(x, medoids);
  double cost = cache.total_cost();

  std::vector<double> delta(static_cast<std::size_t>(k));
  int sweep = 0;
  while (true) {
    if (sweep++ >= max_sweeps) {
      throw NumericError("pam_swap: no convergence after " + std::to_string(max_sweeps) +
                         " sweeps (cost " + std::to_string(cost) + ", k " + std::to_string(k) +
                         ", n " + std::to_string(n) + ")");
    }

    // Evaluate every swap via the cached distances: for candidate c,
    //   dTD(c, r) = g(c) + sum_{i in cluster r, d(i,c) >= d1_i} [min(d2_i, d(i,c)) - d1_i]
    // with g(c) = sum_i min(0, d(i,c) - d1_i). One pass over points per
    // candidate; no per-medoid distance recomputation.
    double best_dtd = 0.0;
    int best_c = -1, best_r = -1;
    for (std::size_t c = 0; c < n; ++c) {
      if (is_medoid[c]) continue;
      const double vc = x[c];
      double g = 0.0;
      std::fill(delta.begin(), delta.end(), 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        const double d = std::fabs(x[i] - vc);
        if (d < cache.d1[i]) {
          g += d - cache.d1[i];
        } else {
          const double t = std::min(cache.d2[i], d) - cache.d1[i];
          if (t != 0.0) delta[static_cast<std::size_t>(cache.nearest[i])] += t;
        }
      }
      for (int r = 0; r < k; ++r) {
        const double dtd = g + delta[static_cast<std::size_t>(r)];
        if (dtd < best_dtd) {
          best_dtd = dtd;
          best_c = static_cast<int>(c);
          best_r = r;
        }
      }
    }

    const double tol = 1e-12 * std::max(1.0, std::fabs(cost));
    if (best_c < 0 || best_dtd >= -tol) break;  // local minimum reached

    is_medoid[static_cast<std::size_t>(medoids[static_cast<std::size_t>(best_r)])] = 0;
    is_medoid[static_cast<std::size_t>(best_c)] = 1;
    medoids[static_cast<std::size_t>(best_r)] = best_c;
    std::sort(medoids.begin(), medoids.end());
    cache.recompute(x, medoids);
    cost = cache.total_cost();
  }

  Partition p;
  p.k = k;
  p.medoids = medoids;
  p.assignment.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) p.assignment[i] = cache.nearest[i];
  p.total_cost = cost;
  return p;
}

Partition pam_cluster(std::span<const double> x, int k, int max_sweeps) {
  Partition p = pam_swap(x, pam_build(x, k), max_sweeps);
  p.silhouette = silhouette_scores(x, p);
  return p;
}

std::vector<double> silhouette_scores(std::span<const double> x, const Partition& p) {
  const std::size_t n = x.size();
  const int k = p.k;
  std::vector<double> out(n, 0.0);
  if (k < 2) return out;

  // Per-cluster sorted values + prefix sums: mean |x_i - member| in O(log n).
  std::vector<std::vector<double>> sorted(static_cast<std::size_t>(k));
  std::vector<std::vector<double>> prefix(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < n; ++i)
    sorted[static_cast<std::size_t>(p.assignment[i])].push_back(x[i]);
  for (int c = 0; c < k; ++c) {
    auto& v = sorted[static_cast<std::size_t>(c)];
    std::sort(v.begin(), v.end());
    auto& pre = prefix[static_cast<std::size_t>(c)];
    pre.assign(v.size() + 1, 0.0);
    for (std::size_t r = 0; r < v.size(); ++r) pre[r + 1] = pre[r] + v[r];
  }
  auto sum_abs_dist = [&](int c, double v) {
    const auto& s = sorted[static_cast<std::size_t>(c)];
    const auto& pre = prefix[static_cast<std::size_t>(c)];
    const std::size_t m = s.size();
    const std::size_t r = static_cast<std::size_t>(std::upper_bound(s.begin(), s.end(), v) - s.begin());
    const double left = v * static_cast<double>(r) - pre[r];
    const double right = (pre[m] - pre[r]) - v * static_cast<double>(m - r);
    return left + right;
  };

  for (std::size_t i = 0; i < n; ++i) {
    const int own = p.assignment[i];
    const std::size_t own_size = sorted[static_cast<std::size_t>(own)].size();
    if (own_size <= 1) {
      out[i] = 0.0;  // singleton convention
      continue;
    }
    const double d_in = sum_abs_dist(own, x[i]) / static_cast<double>(own_size - 1);
    double d_foreign = kInf;
    for (int c = 0; c < k; ++c) {
      if (c == own || sorted[static_cast<std::size_t>(c)].empty()) continue;
      const double d =
          sum_abs_dist(c, x[i]) / static_cast<double>(sorted[static_cast<std::size_t>(c)].size());
      d_foreign = std::min(d_foreign, d);
    }
    if (!std::isfinite(d_foreign)) {
      out[i] = 0.0;
    } else if (d_foreign == 0.0) {
      out[i] = d_in == 0.0 ? 0.0 : -1.0;
    } else {
      out[i] = std::clamp(1.0 - d_in / d_foreign, -1.0, 1.0);
    }
  }
  return out;
}

namespace {

struct ClusterStats {
  std::vector<double> mean, var, scatter_l1, min_v, max_v;
  std::vector<int> count;
};

ClusterStats per_cluster_stats(std::span<const double> x, const Partition& p) {
  const auto k = static_cast<std::size_t>(p.k);
  ClusterStats s;
  s.mean.assign(k, 0.0);
  s.var.assign(k, 0.0);
  s.scatter_l1.assign(k, 0.0);
  s.min_v.assign(k, kInf);
  s.max_v.assign(k, -kInf);
  s.count.assign(k, 0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto c = static_cast<std::size_t>(p.assignment[i]);
    s.mean[c] += x[i];
    s.count[c] += 1;
    s.min_v[c] = std::min(s.min_v[c], x[i]);
    s.max_v[c] = std::max(s.max_v[c], x[i]);
  }
  for (std::size_t c = 0; c < k; ++c)
    if (s.count[c] > 0) s.mean[c] /= s.count[c];
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto c = static_cast<std::size_t>(p.assignment[i]);
    const double d = x[i] - s.mean[c];
    s.var[c] += d * d;
    s.scatter_l1[c] += std::fabs(d);
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (s.count[c] > 0) {
      s.var[c] /= s.count[c];
      s.scatter_l1[c] /= s.count[c];
    }
  }
  return s;
}

ValidityRow compute_indices(std::span<const double> x, const Partition& p) {
  const std::size_t n = x.size();
  const int k = p.k;
  ValidityRow row;
  row.k = k;

  const auto sil = silhouette_scores(x, p);
  row.mean_silhouette = std::accumulate(sil.begin(), sil.end(), 0.0) / static_cast<double>(n);

  const ClusterStats st = per_cluster_stats(x, p);

  // Dunn: min inter-cluster point distance / max intra-cluster diameter.
  // In 1-D the minimum separation is attained by sort-adjacent points with
  // different labels.
  {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return x[static_cast<std::size_t>(a)] < x[static_cast<std::size_t>(b)];
    });
    double min_sep = kInf;
    for (std::size_t r = 0; r + 1 < n; ++r) {
      const auto a = static_cast<std::size_t>(order[r]);
      const auto b = static_cast<std::size_t>(order[r + 1]);
      if (p.assignment[a] != p.assignment[b]) min_sep = std::min(min_sep, x[b] - x[a]);
    }
    double max_diam = 0.0;
    for (int c = 0; c < k; ++c) {
      const auto uc = static_cast<std::size_t>(c);
      if (st.count[uc] > 0) max_diam = std::max(max_diam, st.max_v[uc] - st.min_v[uc]);
    }
    row.dunn = max_diam > 0.0 ? min_sep / max_diam : kInf;
  }

  // Davies-Bouldin with centroid scatters: mean over clusters of the worst
  // (S_i + S_j) / |mean_i - mean_j|.
  {
    double acc = 0.0;
    for (int i = 0; i < k; ++i) {
      double worst = 0.0;
      for (int j = 0; j < k; ++j) {
        if (i == j) continue;
        const double sep =
            std::fabs(st.mean[static_cast<std::size_t>(i)] - st.mean[static_cast<std::size_t>(j)]);
        const double r = sep > 0.0
                             ? (st.scatter_l1[static_cast<std::size_t>(i)] +
                                st.scatter_l1[static_cast<std::size_t>(j)]) / sep
                             : kInf;
        worst = std::max(worst, r);
      }
      acc += worst;
    }
    row.davies_bouldin = acc / static_cast<double>(k);
  }

  // Xie-Beni: compactness over n times the minimal squared medoid separation.
  {
    double compact = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d =
          x[i] - x[static_cast<std::size_t>(p.medoids[static_cast<std::size_t>(p.assignment[i])])];
      compact += d * d;
    }
    double min_sep2 = kInf;
    for (int i = 0; i < k; ++i) {
      for (int j = i + 1; j < k; ++j) {
        const double d = x[static_cast<std::size_t>(p.medoids[static_cast<std::size_t>(i)])] -
                         x[static_cast<std::size_t>(p.medoids[static_cast<std::size_t>(j)])];
        min_sep2 = std::min(min_sep2, d * d);
      }
    }
    row.xie_beni = min_sep2 > 0.0 ? compact / (static_cast<double>(n) * min_sep2) : kInf;
  }

  // S_Dbw = Scat + Dens_bw with the standard-deviation neighbourhood radius.
  {
    double mean_all = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    double var_all = 0.0;
    for (double v : x) var_all += (v - mean_all) * (v - mean_all);
    var_all /= static_cast<double>(n);

    double scat = 0.0, var_sum = 0.0;
    for (int c = 0; c < k; ++c) {
      scat += var_all > 0.0 ? st.var[static_cast<std::size_t>(c)] / var_all : 0.0;
      var_sum += st.var[static_cast<std::size_t>(c)];
    }
    scat /= static_cast<double>(k);
    const double radius = std::sqrt(var_sum) / static_cast<double>(k);

    auto density = [&](double center, int ci, int cj) {
      int cnt = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const int a = p.assignment[i];
        if (a != ci && a != cj) continue;
        if (std::fabs(x[i] - center) <= radius) ++cnt;
      }
      return cnt;
    };
    double dens = 0.0;
    int pairs = 0;
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) {
        if (i == j) continue;
        const double vi = st.mean[static_cast<std::size_t>(i)];
        const double vj = st.mean[static_cast<std::size_t>(j)];
        const int di = density(vi, i, j);
        const int dj = density(vj, i, j);
        const int dij = density(0.5 * (vi + vj), i, j);
        const int den = std::max(di, dj);
        dens += den > 0 ? static_cast<double>(dij) / den : 0.0;
        ++pairs;
      }
    }
    row.s_dbw = scat + (pairs > 0 ? dens / pairs : 0.0);
  }

  row.ok = true;
  return row;
}

}  // namespace

std::vector<ValidityRow> validity_indices(std::span<const double> x, int k_min, int k_max,
                                          int max_sweeps) {
  if (k_min < 2 || k_max > 10 || k_min > k_max)
    throw UsageError("validity_indices: k range must lie within [2, 10]");
  std::vector<ValidityRow> rows;

  // Greedy BUILD is prefix-nested: compute it once at k_max when possible.
  std::vector<int> build_max;
  try {
    build_max = pam_build(x, k_max);
  } catch (const UsageError&) {
    // fall back to per-k BUILD below (k_max may exceed distinct values)
  }

  for (int k = k_min; k <= k_max; ++k) {
    ValidityRow row;
    row.k = k;
    try {
      std::vector<int> medoids;
      if (static_cast<int>(build_max.size()) >= k)
        medoids.assign(build_max.begin(), build_max.begin() + k);
      else
        medoids = pam_build(x, k);
      const Partition p = pam_swap(x, std::move(medoids), max_sweeps);
      row = compute_indices(x, p);
    } catch (const std::exception& e) {
      row.ok = false;
      row.note = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace rfa
