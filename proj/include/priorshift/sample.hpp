#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <initializer_list>
#include <string>

#include "priorshift/errors.hpp"

namespace priorshift {

enum class SampleTag { source_unlabeled, source_positive, target };

inline const char* to_string(SampleTag tag) noexcept {
  switch (tag) {
    case SampleTag::source_unlabeled: return "source_unlabeled";
    case SampleTag::source_positive: return "source_positive";
    case SampleTag::target: return "target";
  }
  return "?";
}

// A finite set of observations from one distribution, one row per point.
struct Sample {
  Eigen::MatrixXd values;  // n x p
  SampleTag tag = SampleTag::source_unlabeled;

  Eigen::Index size() const noexcept { return values.rows(); }
  Eigen::Index dim() const noexcept { return values.cols(); }

  static Sample make(Eigen::MatrixXd m, SampleTag tag) {
    if (m.rows() < 1 || m.cols() < 1) {
      throw InputError("sample '" + std::string(to_string(tag)) +
                       "' must contain at least one row and one feature");
    }
    if (!m.allFinite()) {
      throw InputError("sample '" + std::string(to_string(tag)) +
                       "' contains NaN or Inf entries");
    }
    return Sample{std::move(m), tag};
  }
};

inline void require_same_dim(const Sample& a, const Sample& b) {
  if (a.dim() != b.dim()) {
    throw InputError("feature dimension mismatch: " + std::to_string(a.dim()) +
                     " vs " + std::to_string(b.dim()));
  }
}

// Per-feature standardization with mean/sd pooled over all given samples.
// Near-constant features are left untouched.
inline void standardize_pooled(std::initializer_list<Sample*> samples) {
  Eigen::Index total = 0;
  Eigen::Index p = -1;
  for (const Sample* s : samples) {
    if (p < 0) p = s->dim();
    if (s->dim() != p) throw InputError("feature dimension mismatch across samples");
    total += s->size();
  }
  if (total == 0 || p <= 0) return;

  Eigen::VectorXd mean = Eigen::VectorXd::Zero(p);
  for (const Sample* s : samples) mean += s->values.colwise().sum().transpose();
  mean /= static_cast<double>(total);

  Eigen::VectorXd var = Eigen::VectorXd::Zero(p);
  for (const Sample* s : samples) {
    var += (s->values.rowwise() - mean.transpose()).array().square().colwise().sum().matrix().transpose();
  }
  var /= static_cast<double>(total);

  Eigen::VectorXd inv_sd(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double sd = std::sqrt(var[j]);
    inv_sd[j] = sd > 1e-12 ? 1.0 / sd : 1.0;
  }
  for (Sample* s : samples) {
    s->values = ((s->values.rowwise() - mean.transpose()).array().rowwise() *
                 inv_sd.transpose().array()).matrix();
  }
}

}  // namespace priorshift
