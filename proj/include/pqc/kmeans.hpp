#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "pqc/errors.hpp"
#include "pqc/rng.hpp"
#include "pqc/types.hpp"

namespace pqc {

template <typename T>
struct ClusterModel {
  Matrix<T> centers;  // c x d
  std::vector<int> assignments;
  Index c = 0;
  double objective = 0.0;
  std::vector<double> wss_history;  // J after each update step
  std::uint64_t seed = 0;
  int n_iter = 0;
};

struct KMeansConfig {
  Index k = 8;
  int n_init = 10;
  int max_iter = 300;
  double tol = 1e-6;
  std::uint64_t seed = 0;
};

/// Per-step objectives for monotonicity checks.
struct KMeansTrace {
  std::vector<double> after_assign;
  std::vector<double> after_update;
};

template <typename T>
double wss(const Matrix<T>& x, const Matrix<T>& centers,
           const std::vector<int>& assignments) {
  if (static_cast<Index>(assignments.size()) != x.rows())
    throw std::invalid_argument("wss: assignment length mismatch");
  double j = 0.0;
  for (Index i = 0; i < x.rows(); ++i)
    j += static_cast<double>(
        (x.row(i) - centers.row(assignments[static_cast<std::size_t>(i)]))
            .squaredNorm());
  return j;
}

namespace detail {

/// Nearest center per row, strict-less comparison so ties keep the lowest
/// center index.
template <typename T>
bool assign_nearest(const Matrix<T>& x, const Matrix<T>& centers,
                    std::vector<int>& assignments) {
  bool changed = false;
  for (Index i = 0; i < x.rows(); ++i) {
    int best = 0;
    T best_d = (x.row(i) - centers.row(0)).squaredNorm();
    for (Index c = 1; c < centers.rows(); ++c) {
      const T d = (x.row(i) - centers.row(c)).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(c);
      }
    }
    if (assignments[static_cast<std::size_t>(i)] != best) {
      assignments[static_cast<std::size_t>(i)] = best;
      changed = true;
    }
  }
  return changed;
}

}  // namespace detail

/// One Lloyd run from a uniform sample of k distinct rows.
template <typename T>
ClusterModel<T> kmeans_single(const Matrix<T>& x, Index k, std::uint64_t seed,
                              int max_iter = 300, double tol = 1e-6,
                              KMeansTrace* trace = nullptr) {
  const Index n = x.rows();
  if (k < 1) throw config_error("kmeans: k must be >= 1");
  if (k > n) throw config_error("kmeans: k exceeds sample count");

  SplitMix64 rng(seed);
  std::vector<Index> idx(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  for (Index j = 0; j < k; ++j)
    std::swap(idx[static_cast<std::size_t>(j)],
              idx[static_cast<std::size_t>(
                  j + static_cast<Index>(rng.below(
                          static_cast<std::uint64_t>(n - j))))]);

  ClusterModel<T> model;
  model.c = k;
  model.seed = seed;
  model.centers.resize(k, x.cols());
  for (Index c = 0; c < k; ++c)
    model.centers.row(c) = x.row(idx[static_cast<std::size_t>(c)]);
  model.assignments.assign(static_cast<std::size_t>(n), -1);

  std::vector<Index> counts(static_cast<std::size_t>(k));
  double prev_j = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iter; ++it) {
    const bool changed = detail::assign_nearest(x, model.centers, model.assignments);
    if (!changed && it > 0) break;
    if (trace)
      trace->after_assign.push_back(wss(x, model.centers, model.assignments));

    std::fill(counts.begin(), counts.end(), Index(0));
    for (int a : model.assignments) ++counts[static_cast<std::size_t>(a)];
    for (Index c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) continue;
      // Reseed with the farthest point drawn from a cluster that can spare it.
      Index far_i = -1;
      T far_d = T(-1);
      for (Index i = 0; i < n; ++i) {
        const int a = model.assignments[static_cast<std::size_t>(i)];
        if (counts[static_cast<std::size_t>(a)] < 2) continue;
        const T d = (x.row(i) - model.centers.row(a)).squaredNorm();
        if (d > far_d) {
          far_d = d;
          far_i = i;
        }
      }
      if (far_i < 0) throw numerical_error("kmeans: cannot reseed empty cluster");
      --counts[static_cast<std::size_t>(
          model.assignments[static_cast<std::size_t>(far_i)])];
      model.assignments[static_cast<std::size_t>(far_i)] = static_cast<int>(c);
      ++counts[static_cast<std::size_t>(c)];
    }

    model.centers.setZero();
    for (Index i = 0; i < n; ++i)
      model.centers.row(model.assignments[static_cast<std::size_t>(i)]) +=
          x.row(i);
    for (Index c = 0; c < k; ++c)
      model.centers.row(c) /= static_cast<T>(counts[static_cast<std::size_t>(c)]);

    const double j = wss(x, model.centers, model.assignments);
    model.wss_history.push_back(j);
    if (trace) trace->after_update.push_back(j);
    model.n_iter = it + 1;
    if (std::isfinite(prev_j) && std::abs(prev_j - j) <= tol * prev_j) break;
    prev_j = j;
  }
  model.objective = wss(x, model.centers, model.assignments);
  return model;
}

/// Best of n_init restarts by final objective; earlier restart wins ties.
template <typename T>
ClusterModel<T> kmeans_fit(const Matrix<T>& x, const KMeansConfig& cfg) {
  if (cfg.n_init < 1) throw config_error("kmeans: n_init must be >= 1");
  std::optional<ClusterModel<T>> best;
  for (int r = 0; r < cfg.n_init; ++r) {
    ClusterModel<T> m =
        kmeans_single(x, cfg.k, substream_seed(cfg.seed, static_cast<std::uint64_t>(r)),
                      cfg.max_iter, cfg.tol);
    if (!best || m.objective < best->objective) best = std::move(m);
  }
  best->seed = cfg.seed;
  return *std::move(best);
}

struct ElbowScan {
  std::vector<Index> ks;
  std::vector<double> wss;
  std::optional<Index> knee;  // absent when the range has fewer than 3 points
  double knee_strength = 0.0;  // max normalized second difference
  bool weak = false;           // strength below 0.05
};

/// Knee = interior k maximizing the second difference of the
/// min-max-normalized WSS curve; ties resolve to the smaller k.
inline void detect_knee(ElbowScan& scan, double weak_threshold = 0.05) {
  const std::size_t m = scan.wss.size();
  scan.knee.reset();
  scan.knee_strength = 0.0;
  scan.weak = false;
  if (m < 3) return;
  const double lo = *std::min_element(scan.wss.begin(), scan.wss.end());
  const double hi = *std::max_element(scan.wss.begin(), scan.wss.end());
  const double span = hi - lo;
  std::vector<double> w(m, 0.0);
  if (span > 0)
    for (std::size_t i = 0; i < m; ++i) w[i] = (scan.wss[i] - lo) / span;
  for (std::size_t i = 1; i + 1 < m; ++i) {
    const double d2 = w[i - 1] - 2.0 * w[i] + w[i + 1];
    if (!scan.knee || d2 > scan.knee_strength) {
      scan.knee = scan.ks[i];
      scan.knee_strength = d2;
    }
  }
  scan.weak = scan.knee_strength < weak_threshold;
}

template <typename T>
ElbowScan elbow_scan(const Matrix<T>& x, Index k_min, Index k_max,
                     const KMeansConfig& base = {}) {
  if (k_min < 1 || k_max < k_min) throw config_error("elbow: bad k range");
  if (k_max > x.rows()) throw config_error("elbow: k_max exceeds sample count");
  ElbowScan scan;
  for (Index k = k_min; k <= k_max; ++k) {
    KMeansConfig cfg = base;
    cfg.k = k;
    cfg.seed = substream_seed(base.seed, static_cast<std::uint64_t>(k));
    scan.ks.push_back(k);
    scan.wss.push_back(kmeans_fit(x, cfg).objective);
  }
  detect_knee(scan);
  return scan;
}

/// Rousseeuw silhouette; b(i) is the nearest-other-cluster mean distance,
/// singleton clusters score 0.
template <typename T>
std::pair<Vector<T>, double> silhouette(const Matrix<T>& x,
                                        const std::vector<int>& assignments) {
  const Index n = x.rows();
  if (static_cast<Index>(assignments.size()) != n)
    throw std::invalid_argument("silhouette: assignment length mismatch");
  int k = 0;
  for (int a : assignments) {
    if (a < 0) throw std::invalid_argument("silhouette: negative cluster id");
    k = std::max(k, a + 1);
  }
  std::vector<Index> counts(static_cast<std::size_t>(k), 0);
  for (int a : assignments) ++counts[static_cast<std::size_t>(a)];
  Index nonempty = 0;
  for (Index c : counts) nonempty += (c > 0) ? 1 : 0;
  if (nonempty < 2) throw std::invalid_argument("silhouette: need >= 2 clusters");

  Vector<T> s = Vector<T>::Zero(n);
  std::vector<double> cluster_sum(static_cast<std::size_t>(k));
  for (Index i = 0; i < n; ++i) {
    std::fill(cluster_sum.begin(), cluster_sum.end(), 0.0);
    for (Index j = 0; j < n; ++j) {
      if (j == i) continue;
      cluster_sum[static_cast<std::size_t>(assignments[static_cast<std::size_t>(j)])] +=
          static_cast<double>((x.row(i) - x.row(j)).norm());
    }
    const int own = assignments[static_cast<std::size_t>(i)];
    if (counts[static_cast<std::size_t>(own)] < 2) continue;  // singleton: s = 0
    const double a = cluster_sum[static_cast<std::size_t>(own)] /
                     static_cast<double>(counts[static_cast<std::size_t>(own)] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) {
      if (c == own || counts[static_cast<std::size_t>(c)] == 0) continue;
      b = std::min(b, cluster_sum[static_cast<std::size_t>(c)] /
                          static_cast<double>(counts[static_cast<std::size_t>(c)]));
    }
    const double denom = std::max(a, b);
    s[i] = denom > 0 ? static_cast<T>((b - a) / denom) : T(0);
  }
  return {s, static_cast<double>(s.sum()) / static_cast<double>(n)};
}

}  // namespace pqc
