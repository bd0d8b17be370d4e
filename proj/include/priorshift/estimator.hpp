#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "priorshift/errors.hpp"
#include "priorshift/kernel.hpp"
#include "priorshift/km2.hpp"
#include "priorshift/sample.hpp"

namespace priorshift {

enum class PiSource { known, km2_plugin };

inline const char* to_string(PiSource s) noexcept {
  return s == PiSource::known ? "known" : "km2_plugin";
}

// Closed-form target-prior estimate. `raw` is the unconstrained minimizer of
// the matching objective; `clipped` truncates it to [0, 1] for downstream use.
// The deviation bounds apply to `raw`.
struct PriorEstimate {
  double raw = 0.0;
  double clipped = 0.0;
  double denominator = 0.0;  // ||mean map(unlabeled) - mean map(positives)||
  double pi_used = 0.0;
  PiSource pi_source = PiSource::known;
};

namespace detail {

inline void check_pi(double pi) {
  if (!(pi >= 0.0 && pi < 1.0)) {
    throw InputError("source prior pi must lie in [0, 1), got " + std::to_string(pi));
  }
}

// Cross term <U - P, U - pi*P - (1-pi)*T> expanded in the six stats, with
// U, P, T the three empirical mean maps.
inline double cross_term(const EmbeddingStats& s, double pi) {
  return s.s_uu - pi * s.s_up - (1.0 - pi) * s.s_ut - s.s_up + pi * s.s_pp +
         (1.0 - pi) * s.s_pt;
}

// ||U - pi*P - (1-pi)*T||^2 expanded in the six stats.
inline double delta_sq_norm(const EmbeddingStats& s, double pi) {
  const double q = 1.0 - pi;
  return s.s_uu + pi * pi * s.s_pp + q * q * s.s_tt - 2.0 * pi * s.s_up -
         2.0 * q * s.s_ut + 2.0 * pi * q * s.s_pt;
}

}  // namespace detail

// Empirical matching objective
//   L(gamma) = || (1-gamma) [U - pi*P] - (1-pi) [T - gamma*P] ||^2
// as a quadratic gamma^2 D - 2 gamma C + E in the mean-map inner products.
// Convex for any valid stats (D is a squared norm).
inline double objective(const EmbeddingStats& stats, double pi, double gamma) {
  detail::check_pi(pi);
  const double d = stats.s_uu - 2.0 * stats.s_up + stats.s_pp;
  return gamma * gamma * d - 2.0 * gamma * detail::cross_term(stats, pi) +
         detail::delta_sq_norm(stats, pi);
}

// argmin of the objective: raw = C / D, the coefficient of projecting
// U - pi*P - (1-pi)*T onto U - P.
inline PriorEstimate tcpu_closed_form(const EmbeddingStats& stats, double pi,
                                      PiSource pi_source = PiSource::known,
                                      double eps_den = 1e-12) {
  detail::check_pi(pi);
  const double d = squared_norm_diff(stats);
  if (!(d > eps_den)) throw DegenerateEmbeddingError();

  PriorEstimate est;
  est.raw = detail::cross_term(stats, pi) / d;
  est.clipped = std::clamp(est.raw, 0.0, 1.0);
  est.denominator = std::sqrt(d);
  est.pi_used = pi;
  est.pi_source = pi_source;
  return est;
}

// Algebraically identical second form, kept for cross-checking:
//   raw = 1 - (1-pi) <U - P, T - P> / D.
inline double tcpu_closed_form_alt(const EmbeddingStats& stats, double pi,
                                   double eps_den = 1e-12) {
  detail::check_pi(pi);
  const double d = squared_norm_diff(stats);
  if (!(d > eps_den)) throw DegenerateEmbeddingError();
  const double tp = stats.s_ut - stats.s_up - stats.s_pt + stats.s_pp;
  return 1.0 - (1.0 - pi) * tp / d;
}

// Brute-force argmin over a grid; ties break toward the smaller gamma. Test
// oracle for the closed form; the default range should extend past [0, 1] so
// out-of-range raw values are confirmed rather than clamped.
inline double tcpu_grid_oracle(const EmbeddingStats& stats, double pi, double lo,
                               double hi, double step) {
  detail::check_pi(pi);
  if (!(lo < hi) || !(step > 0.0)) {
    throw InputError("grid requires lo < hi and positive step");
  }
  const auto count = static_cast<long long>(std::floor((hi - lo) / step + 1e-9)) + 1;
  double best_gamma = lo;
  double best_value = objective(stats, pi, lo);
  for (long long k = 1; k < count; ++k) {
    const double gamma = lo + static_cast<double>(k) * step;
    const double value = objective(stats, pi, gamma);
    if (value < best_value) {
      best_value = value;
      best_gamma = gamma;
    }
  }
  return best_gamma;
}

// How the source prior is supplied: a known value, or the KM2 hull estimator
// run on (unlabeled, positives).
struct PiSpec {
  bool plugin = false;
  double value = 0.0;

  static PiSpec known(double pi) { return PiSpec{false, pi}; }
  static PiSpec km2_plugin() { return PiSpec{true, 0.0}; }
};

inline PriorEstimate estimate_target_prior(const KernelConfig& cfg, const Sample& u,
                                           const Sample& pos, const Sample& tgt,
                                           const PiSpec& pi_spec,
                                           const KMConfig& km_cfg = KMConfig{}) {
  double pi = pi_spec.value;
  PiSource source = PiSource::known;
  if (pi_spec.plugin) {
    try {
      pi = km2_prior(cfg, km_cfg, u, pos);
    } catch (const Error& e) {
      throw PluginFailureError(std::string("km2 source-prior plug-in failed: ") + e.what());
    }
    source = PiSource::km2_plugin;
  } else {
    detail::check_pi(pi);
  }
  const EmbeddingStats stats = embedding_stats(cfg, u, pos, tgt);
  return tcpu_closed_form(stats, pi, source);
}

}  // namespace priorshift
