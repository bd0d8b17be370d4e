// Independent reference implementations used only by tests. Everything here
// is deliberately naive (plain double loops, direct formulas) so it shares no
// code path with the library.

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <initializer_list>
#include <limits>
#include <utility>
#include <vector>

#include "priorshift/sample.hpp"

namespace oracles {

inline double gauss(double tau, const Eigen::RowVectorXd& x, const Eigen::RowVectorXd& y) {
  return std::exp(-tau * (x - y).squaredNorm());
}

// Mean kernel over all pairs, plain double loop.
inline double naive_mean_kernel(double tau, const Eigen::MatrixXd& a,
                                const Eigen::MatrixXd& b) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.rows(); ++j) {
      total += gauss(tau, a.row(i), b.row(j));
    }
  }
  return total / (static_cast<double>(a.rows()) * static_cast<double>(b.rows()));
}

// || (1-gamma) [mean map(U) - pi mean map(P)] - (1-pi) [mean map(T) - gamma mean map(P)] ||^2
// evaluated as one weighted double loop over the concatenated points.
inline double naive_objective(double tau, const Eigen::MatrixXd& u,
                              const Eigen::MatrixXd& p, const Eigen::MatrixXd& t,
                              double pi, double gamma) {
  std::vector<std::pair<double, Eigen::RowVectorXd>> weighted;
  const double cu = (1.0 - gamma) / static_cast<double>(u.rows());
  const double cp = (gamma - pi) / static_cast<double>(p.rows());
  const double ct = -(1.0 - pi) / static_cast<double>(t.rows());
  for (Eigen::Index i = 0; i < u.rows(); ++i) weighted.emplace_back(cu, u.row(i));
  for (Eigen::Index i = 0; i < p.rows(); ++i) weighted.emplace_back(cp, p.row(i));
  for (Eigen::Index i = 0; i < t.rows(); ++i) weighted.emplace_back(ct, t.row(i));

  double total = 0.0;
  for (const auto& [wi, xi] : weighted) {
    for (const auto& [wj, xj] : weighted) {
      total += wi * wj * gauss(tau, xi, xj);
    }
  }
  return total;
}

// Exhaustive simplex-grid minimizer of sqrt(w'Gw - 2 w'b + c) for up to four
// vertices. Every grid point at the given resolution is evaluated; the inner
// coordinate uses the exact quadratic restriction to stay affordable.
inline double simplex_grid_min_distance(const Eigen::MatrixXd& gram,
                                        const Eigen::VectorXd& b, double c,
                                        double resolution) {
  const auto v = gram.rows();
  const auto steps = static_cast<long long>(std::llround(1.0 / resolution));
  const double inv = 1.0 / static_cast<double>(steps);

  auto value = [&](const Eigen::VectorXd& w) {
    return w.dot(gram * w) - 2.0 * w.dot(b) + c;
  };

  double best = std::numeric_limits<double>::infinity();
  if (v == 1) {
    best = gram(0, 0) - 2.0 * b(0) + c;
  } else if (v == 2) {
    for (long long k = 0; k <= steps; ++k) {
      Eigen::Vector2d w(static_cast<double>(k) * inv,
                        static_cast<double>(steps - k) * inv);
      best = std::min(best, value(w));
    }
  } else if (v == 3 || v == 4) {
    const Eigen::Index last = v - 1;
    const Eigen::Index prev = v - 2;
    // Restriction to w_prev = x, w_last = s - x is a quadratic in x.
    const double curvature =
        gram(prev, prev) - 2.0 * gram(prev, last) + gram(last, last);
    for (long long k1 = 0; k1 <= steps; ++k1) {
      const long long rem1 = steps - k1;
      for (long long k2 = 0; k2 <= (v == 4 ? rem1 : 0LL); ++k2) {
        const long long rem = v == 4 ? rem1 - k2 : rem1;
        Eigen::VectorXd w0 = Eigen::VectorXd::Zero(v);
        w0(0) = static_cast<double>(k1) * inv;
        if (v == 4) w0(1) = static_cast<double>(k2) * inv;
        w0(last) = static_cast<double>(rem) * inv;
        const double f0 = value(w0);
        const Eigen::VectorXd gw0 = gram * w0;
        const double slope = 2.0 * (gw0(prev) - gw0(last) - (b(prev) - b(last)));
        for (long long t = 0; t <= rem; ++t) {
          const double x = static_cast<double>(t) * inv;
          best = std::min(best, f0 + x * slope + x * x * curvature);
        }
      }
    }
  }
  return std::sqrt(std::max(best, 0.0));
}

// ||mean map(N(mu1, I)) - mean map(N(mu2, I))|| for K(x,y) = exp(-tau |x-y|^2),
// by the closed-form Gaussian integral E exp(-tau ||X - Y||^2)
// = (1 + 4 tau)^(-p/2) exp(-tau ||mu1 - mu2||^2 / (1 + 4 tau)).
inline double gaussian_population_mmd(double tau, int p, double mean_diff_sqnorm) {
  const double within = std::pow(1.0 + 4.0 * tau, -0.5 * p);
  const double cross = within * std::exp(-tau * mean_diff_sqnorm / (1.0 + 4.0 * tau));
  return std::sqrt(std::max(2.0 * (within - cross), 0.0));
}

inline double binomial_log_pmf(long long n, double p, long long k) {
  return std::lgamma(static_cast<double>(n) + 1.0) -
         std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0) +
         static_cast<double>(k) * std::log(p) +
         static_cast<double>(n - k) * std::log1p(-p);
}

// Central interval containing at least `mass` binomial probability:
// [smallest k with CDF >= (1-mass)/2, smallest k with CDF >= 1-(1-mass)/2].
inline std::pair<long long, long long> binomial_interval(long long n, double p,
                                                         double mass = 0.999) {
  const double tail = 0.5 * (1.0 - mass);
  double cdf = 0.0;
  long long lo = -1, hi = -1;
  for (long long k = 0; k <= n; ++k) {
    cdf += std::exp(binomial_log_pmf(n, p, k));
    if (lo < 0 && cdf >= tail) lo = k;
    if (hi < 0 && cdf >= 1.0 - tail) {
      hi = k;
      break;
    }
  }
  if (hi < 0) hi = n;
  if (lo < 0) lo = 0;
  return {lo, hi};
}

inline priorshift::Sample sample1d(std::initializer_list<double> xs,
                                   priorshift::SampleTag tag) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(xs.size()), 1);
  Eigen::Index i = 0;
  for (double x : xs) m(i++, 0) = x;
  return priorshift::Sample::make(std::move(m), tag);
}

inline double central_diff(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

}  // namespace oracles
