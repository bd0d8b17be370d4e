#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "priorshift/errors.hpp"
#include "priorshift/rng.hpp"
#include "priorshift/sample.hpp"

namespace priorshift {

enum class KernelKind { gaussian };

// K(x,y) = exp(-tau * ||x - y||^2). sup_bound_M = sup_x K(x,x), needed by the
// deviation bounds; it is 1 for the Gaussian kernel. Any kernel added later
// must declare its own finite sup bound.
struct KernelConfig {
  KernelKind kind = KernelKind::gaussian;
  double tau = 1.0;
  double sup_bound_M = 1.0;

  // Default bandwidth: tau = 1 / (number of features).
  static KernelConfig gaussian(double tau) {
    if (!(tau > 0.0)) throw InputError("kernel scale tau must be positive");
    return KernelConfig{KernelKind::gaussian, tau, 1.0};
  }
  static KernelConfig gaussian_default(Eigen::Index p) {
    if (p < 1) throw InputError("feature dimension must be positive");
    return gaussian(1.0 / static_cast<double>(p));
  }
};

// The six mean cross-kernel values among unlabeled (u), positive (p) and
// target (t) samples, plus sizes. Every estimator and bound downstream is a
// function of these alone.
struct EmbeddingStats {
  double s_uu = 0, s_pp = 0, s_tt = 0;
  double s_up = 0, s_ut = 0, s_pt = 0;
  Eigen::Index n = 0;        // unlabeled size
  Eigen::Index m = 0;        // positives size
  Eigen::Index n_prime = 0;  // target size
};

inline double eval_kernel(const KernelConfig& cfg,
                          const Eigen::Ref<const Eigen::RowVectorXd>& x,
                          const Eigen::Ref<const Eigen::RowVectorXd>& y) {
  if (x.size() != y.size()) {
    throw InputError("feature dimension mismatch: " + std::to_string(x.size()) +
                     " vs " + std::to_string(y.size()));
  }
  return std::exp(-cfg.tau * (x - y).squaredNorm());
}

namespace detail {

inline constexpr Eigen::Index kGramBlock = 256;

// Mean of K over all pairs (a_i, b_j), accumulated block-by-block in a fixed
// order so repeated runs are bit-identical. The n x m Gram matrix is never
// materialized; memory stays O(block^2).
inline double mean_cross_kernel_blocked(double tau,
                                        const Eigen::MatrixXd& a,
                                        const Eigen::MatrixXd& b) {
  const Eigen::Index na = a.rows(), nb = b.rows();
  const Eigen::VectorXd sq_a = a.rowwise().squaredNorm();
  const Eigen::VectorXd sq_b = b.rowwise().squaredNorm();

  double total = 0.0;
  Eigen::MatrixXd d2;
  for (Eigen::Index i0 = 0; i0 < na; i0 += kGramBlock) {
    const Eigen::Index bi = std::min(kGramBlock, na - i0);
    const auto a_blk = a.middleRows(i0, bi);
    for (Eigen::Index j0 = 0; j0 < nb; j0 += kGramBlock) {
      const Eigen::Index bj = std::min(kGramBlock, nb - j0);
      d2.noalias() = -2.0 * (a_blk * b.middleRows(j0, bj).transpose());
      d2.colwise() += sq_a.segment(i0, bi);
      d2.rowwise() += sq_b.segment(j0, bj).transpose();
      // Cancellation can push squared distances a hair below zero.
      total += (-tau * d2.cwiseMax(0.0)).array().exp().sum();
    }
  }
  return total / (static_cast<double>(na) * static_cast<double>(nb));
}

// Canonical argument order: by row count, then lexicographically by content.
// The mean is symmetric, so evaluating both argument orders through the same
// block schedule makes mean_cross_kernel(A,B) == mean_cross_kernel(B,A) exact.
inline bool matrix_precedes(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows()) return a.rows() < b.rows();
  const double* pa = a.data();
  const double* pb = b.data();
  const auto n = static_cast<std::size_t>(a.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (pa[i] != pb[i]) return pa[i] < pb[i];
  }
  return false;
}

}  // namespace detail

// <mean map(A), mean map(B)> = mean over all pairs of K(a_i, b_j).
inline double mean_cross_kernel(const KernelConfig& cfg, const Sample& a,
                                const Sample& b) {
  require_same_dim(a, b);
  if (detail::matrix_precedes(b.values, a.values)) {
    return detail::mean_cross_kernel_blocked(cfg.tau, b.values, a.values);
  }
  return detail::mean_cross_kernel_blocked(cfg.tau, a.values, b.values);
}

inline EmbeddingStats embedding_stats(const KernelConfig& cfg, const Sample& u,
                                      const Sample& pos, const Sample& tgt) {
  require_same_dim(u, pos);
  require_same_dim(u, tgt);
  EmbeddingStats s;
  s.s_uu = mean_cross_kernel(cfg, u, u);
  s.s_pp = mean_cross_kernel(cfg, pos, pos);
  s.s_tt = mean_cross_kernel(cfg, tgt, tgt);
  s.s_up = mean_cross_kernel(cfg, u, pos);
  s.s_ut = mean_cross_kernel(cfg, u, tgt);
  s.s_pt = mean_cross_kernel(cfg, pos, tgt);
  s.n = u.size();
  s.m = pos.size();
  s.n_prime = tgt.size();
  return s;
}

// ||mean map(unlabeled) - mean map(positives)||^2 = s_uu - 2 s_up + s_pp.
// A squared norm, so negative values beyond the cancellation tolerance mean
// the stats are inconsistent.
inline double squared_norm_diff(const EmbeddingStats& s) {
  const double d = s.s_uu - 2.0 * s.s_up + s.s_pp;
  if (d >= 0.0) return d;
  const double scale = s.s_uu + 2.0 * std::abs(s.s_up) + s.s_pp;
  if (d >= -1e-12 * scale) return 0.0;
  throw NumericalError("squared mean-map distance is negative beyond tolerance: " +
                       std::to_string(d));
}

// Optional bandwidth rule: tau = 1 / median of pairwise squared distances
// over at most `cap` pooled points (seeded uniform subsample above that).
inline double median_heuristic_tau(std::span<const Sample* const> samples,
                                   Eigen::Index cap = 1000,
                                   std::uint64_t seed = 0) {
  Eigen::Index total = 0;
  Eigen::Index p = 0;
  for (const Sample* s : samples) {
    total += s->size();
    p = s->dim();
  }
  if (total < 2) throw InputError("median heuristic needs at least two points");

  Eigen::MatrixXd pooled(total, p);
  Eigen::Index r = 0;
  for (const Sample* s : samples) {
    pooled.middleRows(r, s->size()) = s->values;
    r += s->size();
  }
  if (total > cap) {
    Rng rng(split_seed(seed, 0x6d656469));
    auto idx = sample_without_replacement(total, cap, rng);
    std::sort(idx.begin(), idx.end());
    Eigen::MatrixXd sub(cap, p);
    for (Eigen::Index i = 0; i < cap; ++i) sub.row(i) = pooled.row(idx[static_cast<std::size_t>(i)]);
    pooled = std::move(sub);
  }

  const Eigen::Index v = pooled.rows();
  std::vector<double> d2;
  d2.reserve(static_cast<std::size_t>(v) * static_cast<std::size_t>(v - 1) / 2);
  for (Eigen::Index i = 0; i < v; ++i) {
    for (Eigen::Index j = i + 1; j < v; ++j) {
      d2.push_back((pooled.row(i) - pooled.row(j)).squaredNorm());
    }
  }
  std::sort(d2.begin(), d2.end());
  const std::size_t k = d2.size();
  const double median = (k % 2 == 1) ? d2[k / 2] : 0.5 * (d2[k / 2 - 1] + d2[k / 2]);
  if (!(median > 0.0)) {
    // All subsampled points coincide; fall back to the dimension default.
    return 1.0 / static_cast<double>(p);
  }
  return 1.0 / median;
}

}  // namespace priorshift
