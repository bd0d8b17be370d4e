#pragma once

#include <Eigen/Dense>
#include <cfenv>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "priorshift/errors.hpp"
#include "priorshift/rng.hpp"
#include "priorshift/sample.hpp"

namespace priorshift {

// Synthetic benchmark family: negatives ~ N(0, I), source positives
// ~ N(shift, I), target positives ~ N(shift + g, I). g = 0 keeps the
// class-conditional distributions identical across populations; g != 0
// violates that assumption on purpose.
struct SyntheticConfig {
  Eigen::Index p = 10;
  Eigen::VectorXd shift;     // empty means all-ones of length p
  double disturbance_g = 0.0;
  double pi = 0.2;
  double pi_prime = 0.8;
  Eigen::Index n_source = 2000;
  Eigen::Index n_target = 2000;
  double c = 0.5;            // labeling frequency
  std::uint64_t seed = 0;

  Eigen::VectorXd shift_or_default() const {
    return shift.size() > 0 ? shift : Eigen::VectorXd::Ones(p);
  }

  void validate() const {
    if (p < 1) throw InputError("p must be positive");
    if (shift.size() > 0 && shift.size() != p) {
      throw InputError("shift vector length must equal p");
    }
    if (!(pi >= 0.0 && pi < 1.0)) throw InputError("pi must lie in [0, 1)");
    if (!(pi_prime >= 0.0 && pi_prime <= 1.0)) throw InputError("pi_prime must lie in [0, 1]");
    if (n_source < 1 || n_target < 1) throw InputError("sample sizes must be positive");
    if (!(c > 0.0 && c <= 1.0)) throw InputError("labeling frequency c must lie in (0, 1]");
  }
};

struct LabeledDataset {
  Eigen::MatrixXd features;
  std::vector<int> labels;  // +1 / -1

  Eigen::Index size() const noexcept { return features.rows(); }
  Eigen::Index positives() const noexcept {
    Eigen::Index k = 0;
    for (int y : labels) k += (y > 0);
    return k;
  }
};

struct PUDataset {
  Sample positives;
  Sample unlabeled;
  Sample target;
  double true_pi = std::numeric_limits<double>::quiet_NaN();
  double true_pi_prime = std::numeric_limits<double>::quiet_NaN();
};

// Round half to even; fractional sample sizes only come from real-valued
// formulas, so the rounding rule has to be pinned somewhere.
inline Eigen::Index round_half_even(double x) {
  return static_cast<Eigen::Index>(std::nearbyint(x));
}

namespace detail {

inline Eigen::MatrixXd gaussian_rows(Eigen::Index n, const Eigen::VectorXd& mean,
                                     Rng& rng) {
  Eigen::MatrixXd rows(n, mean.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < mean.size(); ++j) {
      rows(i, j) = mean[j] + rng.normal();
    }
  }
  return rows;
}

inline Sample take_rows(const Eigen::MatrixXd& src,
                        const std::vector<std::ptrdiff_t>& idx, SampleTag tag) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), src.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = src.row(idx[i]);
  }
  return Sample::make(std::move(out), tag);
}

}  // namespace detail

struct PuSampleSizes {
  Eigen::Index positives = 0;
  Eigen::Index unlabeled = 0;
};

// Sizes of the two PU draws. Both are scaled by A = 1 / (1 - c(1-pi)) so they
// total n in expectation: round(A c pi n) labeled positives and
// round(A (1-c) n) unlabeled rows.
inline PuSampleSizes pu_sample_sizes(double pi, double c, Eigen::Index n) {
  if (!(pi >= 0.0 && pi < 1.0)) throw InputError("pi must lie in [0, 1)");
  if (!(c > 0.0 && c <= 1.0)) throw InputError("labeling frequency c must lie in (0, 1]");
  if (n < 1) throw InputError("requested size n must be positive");
  if (c * (1.0 - pi) >= 1.0) {
    // Only c = 1 with pi = 0: everything would be labeled but no positives exist.
    throw InputError("PU scaling undefined for c = 1 with pi = 0");
  }
  const double scale_a = 1.0 / (1.0 - c * (1.0 - pi));
  return {round_half_even(scale_a * c * pi * static_cast<double>(n)),
          round_half_even(scale_a * (1.0 - c) * static_cast<double>(n))};
}

// Case-control PU structure with labeling frequency c: the labeled-positive
// sample is drawn uniformly from the positive rows, the unlabeled sample
// uniformly from all rows, with sizes from pu_sample_sizes. The two draws are
// independent, so the samples may overlap.
inline std::pair<Sample, Sample> make_pu_sample(const LabeledDataset& data,
                                                double pi, double c,
                                                Eigen::Index n,
                                                std::uint64_t seed) {
  const auto [want_pos, want_unl] = pu_sample_sizes(pi, c, n);

  std::vector<std::ptrdiff_t> pos_rows;
  for (std::size_t i = 0; i < data.labels.size(); ++i) {
    if (data.labels[i] > 0) pos_rows.push_back(static_cast<std::ptrdiff_t>(i));
  }
  const auto have_pos = static_cast<Eigen::Index>(pos_rows.size());
  if (have_pos < want_pos) {
    throw InputError("not enough positive rows for PU sampling: need " +
                     std::to_string(want_pos) + ", have " + std::to_string(have_pos) +
                     " (short by " + std::to_string(want_pos - have_pos) + ")");
  }
  if (data.size() < want_unl) {
    throw InputError("not enough rows for PU sampling: need " +
                     std::to_string(want_unl) + ", have " + std::to_string(data.size()) +
                     " (short by " + std::to_string(want_unl - data.size()) + ")");
  }
  if (want_pos < 1 || want_unl < 1) {
    throw InputError("PU sampling would produce an empty sample (positives " +
                     std::to_string(want_pos) + ", unlabeled " +
                     std::to_string(want_unl) + ")");
  }

  Rng rng_pos(split_seed(seed, 1));
  Rng rng_unl(split_seed(seed, 2));

  auto pos_pick = sample_without_replacement(have_pos, want_pos, rng_pos);
  std::vector<std::ptrdiff_t> pos_idx(pos_pick.size());
  for (std::size_t i = 0; i < pos_pick.size(); ++i) {
    pos_idx[i] = pos_rows[static_cast<std::size_t>(pos_pick[i])];
  }
  auto unl_idx = sample_without_replacement(data.size(), want_unl, rng_unl);

  return {detail::take_rows(data.features, pos_idx, SampleTag::source_positive),
          detail::take_rows(data.features, unl_idx, SampleTag::source_unlabeled)};
}

// Removes rows uniformly at random from the over-represented class only,
// until the positive fraction equals target_pi within one row. The other
// class is kept whole, so as much data as possible survives.
inline LabeledDataset downsample_to_prior(const LabeledDataset& data,
                                          double target_pi, std::uint64_t seed) {
  if (!(target_pi > 0.0 && target_pi < 1.0)) {
    throw InputError("target prior must lie in (0, 1)");
  }
  std::vector<std::ptrdiff_t> pos, neg;
  for (std::size_t i = 0; i < data.labels.size(); ++i) {
    (data.labels[i] > 0 ? pos : neg).push_back(static_cast<std::ptrdiff_t>(i));
  }
  if (pos.empty() || neg.empty()) {
    throw InputError("downsampling needs at least one row of each class");
  }

  const auto n_pos = static_cast<double>(pos.size());
  const auto n_neg = static_cast<double>(neg.size());
  const double current = n_pos / (n_pos + n_neg);

  Eigen::Index keep_pos = static_cast<Eigen::Index>(pos.size());
  Eigen::Index keep_neg = static_cast<Eigen::Index>(neg.size());
  if (current > target_pi) {
    keep_pos = round_half_even(target_pi * n_neg / (1.0 - target_pi));
  } else if (current < target_pi) {
    keep_neg = round_half_even((1.0 - target_pi) * n_pos / target_pi);
  } else {
    return data;
  }
  if (keep_pos < 1 || keep_neg < 1) {
    throw InputError("target prior " + std::to_string(target_pi) +
                     " unreachable without emptying a class");
  }
  if (keep_pos == static_cast<Eigen::Index>(pos.size()) &&
      keep_neg == static_cast<Eigen::Index>(neg.size())) {
    return data;
  }

  Rng rng(split_seed(seed, 3));
  std::vector<std::ptrdiff_t> kept;
  if (keep_pos < static_cast<Eigen::Index>(pos.size())) {
    auto pick = sample_without_replacement(static_cast<Eigen::Index>(pos.size()),
                                           keep_pos, rng);
    for (auto k : pick) kept.push_back(pos[static_cast<std::size_t>(k)]);
    kept.insert(kept.end(), neg.begin(), neg.end());
  } else {
    auto pick = sample_without_replacement(static_cast<Eigen::Index>(neg.size()),
                                           keep_neg, rng);
    kept = pos;
    for (auto k : pick) kept.push_back(neg[static_cast<std::size_t>(k)]);
  }
  std::sort(kept.begin(), kept.end());

  LabeledDataset out;
  out.features.resize(static_cast<Eigen::Index>(kept.size()), data.features.cols());
  out.labels.reserve(kept.size());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    out.features.row(static_cast<Eigen::Index>(i)) = data.features.row(kept[i]);
    out.labels.push_back(data.labels[static_cast<std::size_t>(kept[i])]);
  }
  return out;
}

// Labeled pool with per-row Bernoulli(pi) class draws: positives around
// `positive_mean`, negatives around the origin, unit covariance.
inline LabeledDataset gen_labeled_gaussian(const Eigen::VectorXd& positive_mean,
                                           double pi, Eigen::Index n,
                                           std::uint64_t seed) {
  if (n < 1) throw InputError("sample size must be positive");
  if (!(pi >= 0.0 && pi <= 1.0)) throw InputError("class prior must lie in [0, 1]");
  const Eigen::Index p = positive_mean.size();
  Rng rng(seed);
  LabeledDataset data;
  data.features.resize(n, p);
  data.labels.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const bool positive = rng.bernoulli(pi);
    for (Eigen::Index j = 0; j < p; ++j) {
      data.features(i, j) = (positive ? positive_mean[j] : 0.0) + rng.normal();
    }
    data.labels.push_back(positive ? 1 : -1);
  }
  return data;
}

// Full synthetic pipeline: labeled source pool (binomial class counts), PU
// structure on top of it, and an independent unlabeled target draw whose
// positive class is shifted by g. Bit-identical output for identical config.
inline PUDataset gen_synthetic(const SyntheticConfig& cfg) {
  cfg.validate();
  const Eigen::VectorXd shift = cfg.shift_or_default();
  const Eigen::VectorXd target_shift =
      shift + Eigen::VectorXd::Constant(cfg.p, cfg.disturbance_g);

  const LabeledDataset pool =
      gen_labeled_gaussian(shift, cfg.pi, cfg.n_source, split_seed(cfg.seed, 11));
  LabeledDataset target_pool = gen_labeled_gaussian(target_shift, cfg.pi_prime,
                                                    cfg.n_target,
                                                    split_seed(cfg.seed, 12));

  auto [positives, unlabeled] =
      make_pu_sample(pool, cfg.pi, cfg.c, cfg.n_source, split_seed(cfg.seed, 13));

  PUDataset out{std::move(positives), std::move(unlabeled),
                Sample::make(std::move(target_pool.features), SampleTag::target)};
  out.true_pi = cfg.pi;
  out.true_pi_prime = cfg.pi_prime;
  return out;
}

}  // namespace priorshift
