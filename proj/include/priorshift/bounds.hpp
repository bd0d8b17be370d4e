#pragma once

#include <cmath>
#include <string>

#include "priorshift/errors.hpp"
#include "priorshift/kernel.hpp"

namespace priorshift {

// Largest delta the concentration argument admits: exp(-(sqrt(2)+1)^2 / 2).
inline double delta_max() {
  static const double v = std::exp(-0.5 * (3.0 + 2.0 * std::sqrt(2.0)));
  return v;
}

enum class BoundKind { empirical_thm2, population_thm1 };

// A deviation bound on |raw estimate - true target prior| holding with
// probability at least 1 - 3*delta.
struct BoundReport {
  double delta = 0.0;
  double coverage = 0.0;  // 1 - 3*delta
  long long N = 0;        // min(n, m, n')
  double M = 0.0;         // sup_x K(x,x)
  double bound_value = 0.0;
  BoundKind kind = BoundKind::empirical_thm2;
};

namespace detail {

inline void check_delta(double delta) {
  if (!(delta > 0.0) || delta > delta_max()) {
    throw InvalidDeltaError("delta must lie in (0, " + std::to_string(delta_max()) +
                            "], got " + std::to_string(delta));
  }
}

}  // namespace detail

// Single-sample concentration radius 2 * sqrt((M/n) * log(1/delta)): the
// empirical mean map sits within this of the population one w.p. >= 1 - delta.
inline double concentration_radius(long long n, double delta, double M) {
  if (n < 1) throw InputError("sample size must be positive");
  if (!(M > 0.0)) throw InputError("kernel sup bound M must be positive");
  detail::check_delta(delta);
  return 2.0 * std::sqrt(M / static_cast<double>(n) * std::log(1.0 / delta));
}

// Fully data-dependent bound: 4 * sqrt((M/N) log(1/delta)) divided by the
// observed mean-map distance between unlabeled and positive samples.
inline BoundReport empirical_bound(const EmbeddingStats& stats,
                                   const KernelConfig& cfg, double delta) {
  detail::check_delta(delta);
  const double d = squared_norm_diff(stats);
  if (!(d > 1e-12)) throw DegenerateEmbeddingError();

  BoundReport report;
  report.delta = delta;
  report.coverage = 1.0 - 3.0 * delta;
  report.N = static_cast<long long>(std::min({stats.n, stats.m, stats.n_prime}));
  report.M = cfg.sup_bound_M;
  report.bound_value = 4.0 *
                       std::sqrt(report.M / static_cast<double>(report.N) *
                                 std::log(1.0 / delta)) /
                       std::sqrt(d);
  report.kind = BoundKind::empirical_thm2;
  return report;
}

// Population-level bound value 4 sqrt((M/N) log(1/delta)) / (alpha (1-pi) mmd).
// Does not check the sample-size condition; alpha = 1 recovers the empirical
// bound when mmd is the plug-in estimate.
inline double population_bound_value(double pi, double alpha, double delta,
                                     double M, long long N, double mmd_pm) {
  return 4.0 * std::sqrt(M / static_cast<double>(N) * std::log(1.0 / delta)) /
         (alpha * (1.0 - pi) * mmd_pm);
}

// Smallest N satisfying N >= 16 M log(1/delta) / ((1-alpha)^2 (1-pi)^2 mmd^2).
inline long long minimal_admissible_n(double pi, double alpha, double delta,
                                      double M, double mmd_pm) {
  const double rhs = 16.0 * M * std::log(1.0 / delta) /
                     ((1.0 - alpha) * (1.0 - alpha) * (1.0 - pi) * (1.0 - pi) *
                      mmd_pm * mmd_pm);
  return static_cast<long long>(std::ceil(rhs));
}

// Nonrandom bound in terms of the population mean-map distance between the
// negative and positive class-conditional distributions; requires the
// sample-size condition and reports the minimal admissible N when it fails.
inline BoundReport population_bound(double pi, double alpha, double delta,
                                    double M, long long N, double mmd_pm) {
  if (!(pi >= 0.0 && pi < 1.0)) throw InputError("pi must lie in [0, 1)");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
  if (!(M > 0.0)) throw InputError("kernel sup bound M must be positive");
  if (!(mmd_pm > 0.0)) throw InputError("mmd between class conditionals must be positive");
  if (N < 1) throw InputError("sample size must be positive");
  detail::check_delta(delta);

  const long long min_n = minimal_admissible_n(pi, alpha, delta, M, mmd_pm);
  if (N < min_n) {
    throw InsufficientSampleError(
        "sample-size condition fails: N = " + std::to_string(N) +
            " but at least " + std::to_string(min_n) + " is required",
        min_n);
  }

  BoundReport report;
  report.delta = delta;
  report.coverage = 1.0 - 3.0 * delta;
  report.N = N;
  report.M = M;
  report.bound_value = population_bound_value(pi, alpha, delta, M, N, mmd_pm);
  report.kind = BoundKind::population_thm1;
  return report;
}

// Plug-in estimate of ||mean map(P-) - mean map(P+)|| from observed stats:
// the unlabeled/positive mean-map distance scales by exactly (1-pi) at the
// population level. No finite-sample guarantee; reporting use only.
inline double estimate_mmd_pm(const EmbeddingStats& stats, double pi) {
  if (!(pi >= 0.0 && pi < 1.0)) throw InputError("pi must lie in [0, 1)");
  const double d = squared_norm_diff(stats);
  if (!(d > 1e-12)) throw DegenerateEmbeddingError();
  return std::sqrt(d) / (1.0 - pi);
}

}  // namespace priorshift
