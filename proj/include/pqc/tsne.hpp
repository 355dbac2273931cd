#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "pqc/errors.hpp"
#include "pqc/rng.hpp"
#include "pqc/types.hpp"

namespace pqc {

struct TsneConfig {
  double perplexity = 30.0;
  int iterations = 1000;
  double learning_rate = 200.0;
  double early_exaggeration = 12.0;
  int exaggeration_iters = 250;
  double momentum_initial = 0.5;
  double momentum_final = 0.8;
  int momentum_switch_iter = 250;
  std::uint64_t seed = 0;

  void check(Index n) const {
    if (n < 4) throw config_error("tsne: need at least 4 points");
    if (!(perplexity > 0) || perplexity >= static_cast<double>(n) / 3.0)
      throw config_error("tsne: perplexity must be positive and < n/3");
    if (iterations < 1 || !(learning_rate > 0) || !(early_exaggeration > 0))
      throw config_error("tsne: iterations, learning rate, exaggeration must be positive");
  }
};

struct Embedding {
  MatrixXd points;  // n x 2
  std::vector<double> kl_history;
};

namespace detail {

inline MatrixXd pairwise_sq_dists(const MatrixXd& x) {
  const VectorXd sq = x.rowwise().squaredNorm();
  MatrixXd d2 = -2.0 * x * x.transpose();
  d2.colwise() += sq;
  d2.rowwise() += sq.transpose();
  d2.diagonal().setZero();
  return d2.cwiseMax(0.0);
}

}  // namespace detail

/// Row-stochastic p_{j|i}: per-row precision found by binary search (at most
/// 64 halvings, tolerance 1e-5 on log-perplexity).
inline MatrixXd conditional_rows(const MatrixXd& x, double perplexity) {
  const Index n = x.rows();
  const MatrixXd d2 = detail::pairwise_sq_dists(x);
  const double target_h = std::log(perplexity);
  MatrixXd p = MatrixXd::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    double beta = 1.0;
    double lo = 0.0, hi = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 64; ++it) {
      double sum = 0.0, wsum = 0.0;
      for (Index j = 0; j < n; ++j) {
        if (j == i) continue;
        const double w = std::exp(-beta * d2(i, j));
        sum += w;
        wsum += w * d2(i, j);
      }
      if (sum <= 0.0) {  // beta overshot every neighbour to zero
        hi = beta;
        beta = (lo + hi) / 2.0;
        continue;
      }
      // Shannon entropy of the row in nats: H = log(sum) + beta * E[d2].
      const double h = std::log(sum) + beta * wsum / sum;
      if (std::abs(h - target_h) < 1e-5) break;
      if (h > target_h)
        lo = beta;
      else
        hi = beta;
      beta = std::isinf(hi) ? beta * 2.0 : (lo + hi) / 2.0;
    }
    double sum = 0.0;
    for (Index j = 0; j < n; ++j) {
      if (j == i) continue;
      p(i, j) = std::exp(-beta * d2(i, j));
      sum += p(i, j);
    }
    if (sum <= 0.0)
      throw numerical_error("tsne: affinity row " + std::to_string(i) +
                            " collapsed to zero");
    p.row(i) /= sum;
  }
  return p;
}

/// Symmetrized joint affinities P = (P + P^T) / 2n. Exact duplicate points
/// get a seeded jitter of scale 1e-10 first (with a warning) so every row
/// has finite perplexity.
inline MatrixXd joint_affinities(const MatrixXd& x, double perplexity,
                                 std::uint64_t seed,
                                 std::vector<std::string>* warnings = nullptr) {
  MatrixXd points = x;
  const Index n = points.rows();
  std::vector<Index> dups;
  for (Index i = 0; i < n && dups.size() < 16; ++i)
    for (Index j = 0; j < i; ++j)
      if ((points.row(i) - points.row(j)).squaredNorm() == 0.0) {
        dups.push_back(i);
        break;
      }
  if (!dups.empty()) {
    SplitMix64 rng(substream_seed(seed, 0x6a69747465ULL));
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < points.cols(); ++j)
        points(i, j) += 1e-10 * rng.normal();
    if (warnings)
      warnings->push_back("duplicate points detected; applied seeded jitter 1e-10");
  }
  const MatrixXd p = conditional_rows(points, perplexity);
  return (p + p.transpose()) / (2.0 * static_cast<double>(n));
}

/// KL(P || Q) for a given 2-D embedding, with Student-t Q.
inline double tsne_kl(const MatrixXd& p, const MatrixXd& y) {
  const Index n = y.rows();
  const MatrixXd w = (1.0 + detail::pairwise_sq_dists(y).array()).inverse();
  const double z = w.sum() - static_cast<double>(n);  // drop the diagonal 1s
  double kl = 0.0;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      if (j == i || p(i, j) <= 0.0) continue;
      const double q = std::max(w(i, j) / z, 1e-12);
      kl += p(i, j) * std::log(p(i, j) / q);
    }
  return kl;
}

/// dKL/dY: grad_i = 4 sum_j (p_ij - q_ij) w_ij (y_i - y_j).
inline MatrixXd tsne_grad(const MatrixXd& p, const MatrixXd& y) {
  const Index n = y.rows();
  const MatrixXd w = (1.0 + detail::pairwise_sq_dists(y).array()).inverse();
  const double z = w.sum() - static_cast<double>(n);
  MatrixXd grad = MatrixXd::Zero(n, y.cols());
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const double coeff = 4.0 * (p(i, j) - w(i, j) / z) * w(i, j);
      grad.row(i) += coeff * (y.row(i) - y.row(j));
    }
  return grad;
}

/// Gradient descent on KL(P||Q) with early exaggeration, a momentum switch,
/// and the reference per-coordinate adaptive gains (gain +0.2 when gradient
/// and velocity disagree in sign, x0.8 when they agree, floored at 0.01),
/// without which a learning rate of 200 oscillates on small inputs.
/// kl_history tracks the true (unexaggerated) objective; a rise past 10x the
/// running minimum aborts as divergence.
inline Embedding tsne_fit(const MatrixXd& x, const TsneConfig& cfg,
                          std::vector<std::string>* warnings = nullptr) {
  const Index n = x.rows();
  cfg.check(n);
  const MatrixXd p = joint_affinities(x, cfg.perplexity, cfg.seed, warnings);

  Embedding emb;
  SplitMix64 rng(substream_seed(cfg.seed, 0x74736e65ULL));
  emb.points.resize(n, 2);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < 2; ++j) emb.points(i, j) = 1e-4 * rng.normal();

  const MatrixXd p_ex = cfg.early_exaggeration * p;
  MatrixXd velocity = MatrixXd::Zero(n, 2);
  MatrixXd gains = MatrixXd::Ones(n, 2);
  double min_kl = std::numeric_limits<double>::infinity();
  for (int it = 0; it < cfg.iterations; ++it) {
    const bool exaggerate = it < cfg.exaggeration_iters;
    const MatrixXd grad = tsne_grad(exaggerate ? p_ex : p, emb.points);
    const double momentum =
        it < cfg.momentum_switch_iter ? cfg.momentum_initial : cfg.momentum_final;
    for (Index i = 0; i < gains.size(); ++i) {
      const bool same_sign = (grad.data()[i] > 0) == (velocity.data()[i] > 0);
      gains.data()[i] = std::max(0.01, same_sign ? gains.data()[i] * 0.8
                                                 : gains.data()[i] + 0.2);
    }
    velocity = momentum * velocity -
               cfg.learning_rate * gains.cwiseProduct(grad);
    emb.points += velocity;
    emb.points.rowwise() -= emb.points.colwise().mean();

    const double kl = tsne_kl(p, emb.points);
    if (!std::isfinite(kl))
      throw numerical_error("tsne: non-finite KL at iteration " +
                            std::to_string(it + 1));
    emb.kl_history.push_back(kl);
    min_kl = std::min(min_kl, kl);
    if (kl > 10.0 * min_kl && min_kl > 0.0)
      throw numerical_error(
          "tsne: diverged at iteration " + std::to_string(it + 1) + " (KL " +
          std::to_string(kl) + " vs minimum " + std::to_string(min_kl) + ")");
  }
  return emb;
}

}  // namespace pqc
