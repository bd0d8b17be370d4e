#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "priorshift/bounds.hpp"
#include "priorshift/rng.hpp"

using namespace priorshift;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

EmbeddingStats stats_with(double sq_norm_diff, Eigen::Index n, Eigen::Index m,
                          Eigen::Index n_prime) {
  EmbeddingStats s;
  s.s_uu = 0.5 * sq_norm_diff;
  s.s_pp = 0.5 * sq_norm_diff;
  s.s_up = 0.0;
  s.s_tt = 1.0;
  s.s_ut = 0.1;
  s.s_pt = 0.1;
  s.n = n;
  s.m = m;
  s.n_prime = n_prime;
  return s;
}

}  // namespace

TEST_CASE("delta_max is exp(-(sqrt(2)+1)^2/2) and is enforced") {
  CHECK_THAT(delta_max(), WithinRel(std::exp(-0.5 * (3.0 + 2.0 * std::sqrt(2.0))), 1e-15));
  CHECK(delta_max() > 0.054);
  CHECK(delta_max() < 0.055);

  const auto s = stats_with(0.25, 1000, 1000, 1000);
  const KernelConfig cfg;
  CHECK_NOTHROW(empirical_bound(s, cfg, delta_max()));
  CHECK_THROWS_AS(empirical_bound(s, cfg, 0.06), InvalidDeltaError);
  CHECK_THROWS_AS(empirical_bound(s, cfg, 0.0), InvalidDeltaError);
  CHECK_THROWS_AS(empirical_bound(s, cfg, -0.01), InvalidDeltaError);
  CHECK_THROWS_AS(concentration_radius(100, 0.055, 1.0), InvalidDeltaError);
}

TEST_CASE("empirical bound arithmetic") {
  // M = 1, N = 1000, delta = 0.05, denominator 0.5.
  const auto s = stats_with(0.25, 1200, 1000, 3000);
  const auto report = empirical_bound(s, KernelConfig{}, 0.05);

  CHECK(report.N == 1000);
  CHECK(report.M == 1.0);
  CHECK(report.coverage == 1.0 - 3.0 * 0.05);
  CHECK(report.kind == BoundKind::empirical_thm2);
  const double expected = 4.0 * std::sqrt(std::log(20.0) / 1000.0) / 0.5;
  CHECK_THAT(report.bound_value, WithinRel(expected, 1e-13));
  CHECK_THAT(report.bound_value, WithinAbs(0.43788, 1e-4));
}

TEST_CASE("quadrupling N halves the empirical bound exactly") {
  const auto s1 = stats_with(0.3, 500, 500, 500);
  const auto s4 = stats_with(0.3, 2000, 2000, 2000);
  const double b1 = empirical_bound(s1, KernelConfig{}, 0.05).bound_value;
  const double b4 = empirical_bound(s4, KernelConfig{}, 0.05).bound_value;
  CHECK(b1 == 2.0 * b4);
}

TEST_CASE("empirical bound monotonicity on a grid") {
  const double delta_lo = 0.01, delta_hi = 0.05;
  for (const Eigen::Index n : {100, 400, 1600}) {
    for (const double m : {0.5, 1.0, 2.0}) {
      KernelConfig cfg;
      cfg.sup_bound_M = m;
      const auto s = stats_with(0.25, n, n, n);
      const double here = empirical_bound(s, cfg, delta_hi).bound_value;

      const auto s_bigger = stats_with(0.25, 4 * n, 4 * n, 4 * n);
      CHECK(empirical_bound(s_bigger, cfg, delta_hi).bound_value < here);

      KernelConfig cfg_bigger_m = cfg;
      cfg_bigger_m.sup_bound_M = 2.0 * m;
      CHECK(empirical_bound(s, cfg_bigger_m, delta_hi).bound_value > here);

      CHECK(empirical_bound(s, cfg, delta_lo).bound_value > here);
    }
  }
}

TEST_CASE("empirical bound refuses a degenerate denominator") {
  const auto s = stats_with(0.0, 100, 100, 100);
  CHECK_THROWS_AS(empirical_bound(s, KernelConfig{}, 0.05), DegenerateEmbeddingError);
}

TEST_CASE("population bound sample-size condition") {
  // pi = 0.2, alpha = 0.5, delta = 0.05, M = 1, mmd = 1:
  // 16 log(20) / (0.25 * 0.64) = 299.57..., so the minimal N is 300.
  CHECK(minimal_admissible_n(0.2, 0.5, 0.05, 1.0, 1.0) == 300);

  CHECK_NOTHROW(population_bound(0.2, 0.5, 0.05, 1.0, 300, 1.0));
  try {
    population_bound(0.2, 0.5, 0.05, 1.0, 299, 1.0);
    FAIL("expected InsufficientSampleError");
  } catch (const InsufficientSampleError& e) {
    CHECK(e.minimal_n() == 300);
  }

  const auto report = population_bound(0.2, 0.5, 0.05, 1.0, 300, 1.0);
  CHECK(report.kind == BoundKind::population_thm1);
  CHECK(report.N == 300);
  CHECK_THAT(report.bound_value,
             WithinRel(4.0 * std::sqrt(std::log(20.0) / 300.0) / (0.5 * 0.8), 1e-13));
}

TEST_CASE("population bound trade-off in alpha") {
  double prev_bound = std::numeric_limits<double>::infinity();
  long long prev_min_n = 0;
  for (const double alpha : {0.3, 0.5, 0.7, 0.9}) {
    const long long min_n = minimal_admissible_n(0.2, alpha, 0.05, 1.0, 1.0);
    CHECK(min_n > prev_min_n);
    prev_min_n = min_n;
    const double bound = population_bound(0.2, alpha, 0.05, 1.0, 100000, 1.0).bound_value;
    CHECK(bound < prev_bound);
    prev_bound = bound;
  }
}

TEST_CASE("doubling mmd halves the bound and quarters the minimal N") {
  const double b1 = population_bound(0.2, 0.5, 0.05, 1.0, 100000, 1.0).bound_value;
  const double b2 = population_bound(0.2, 0.5, 0.05, 1.0, 100000, 2.0).bound_value;
  CHECK(b1 == 2.0 * b2);
  CHECK(minimal_admissible_n(0.2, 0.5, 0.05, 1.0, 2.0) == 75);
}

TEST_CASE("population bound input validation") {
  CHECK_THROWS_AS(population_bound(1.0, 0.5, 0.05, 1.0, 1000, 1.0), InputError);
  CHECK_THROWS_AS(population_bound(0.2, 0.0, 0.05, 1.0, 1000, 1.0), InputError);
  CHECK_THROWS_AS(population_bound(0.2, 1.0, 0.05, 1.0, 1000, 1.0), InputError);
  CHECK_THROWS_AS(population_bound(0.2, 0.5, 0.05, 0.0, 1000, 1.0), InputError);
  CHECK_THROWS_AS(population_bound(0.2, 0.5, 0.05, 1.0, 1000, 0.0), InputError);
  CHECK_THROWS_AS(population_bound(0.2, 0.5, 0.06, 1.0, 1000, 1.0), InvalidDeltaError);
}

TEST_CASE("concentration radius") {
  const double expected = 2.0 * std::sqrt(std::log(20.0) / 100.0);
  CHECK_THAT(concentration_radius(100, 0.05, 1.0), WithinRel(expected, 1e-14));
  CHECK(concentration_radius(100, 0.05, 4.0) == 2.0 * concentration_radius(100, 0.05, 1.0));
  CHECK(concentration_radius(400, 0.05, 1.0) == 0.5 * concentration_radius(100, 0.05, 1.0));
  CHECK_THROWS_AS(concentration_radius(0, 0.05, 1.0), InputError);
  CHECK_THROWS_AS(concentration_radius(100, 0.05, 0.0), InputError);
}

TEST_CASE("estimate_mmd_pm basics") {
  const auto s = stats_with(0.16, 100, 100, 100);
  CHECK(estimate_mmd_pm(s, 0.0) == std::sqrt(squared_norm_diff(s)));
  CHECK_THAT(estimate_mmd_pm(s, 0.5), WithinRel(2.0 * 0.4, 1e-13));
  CHECK_THROWS_AS(estimate_mmd_pm(stats_with(0.0, 10, 10, 10), 0.2),
                  DegenerateEmbeddingError);
}

TEST_CASE("estimate_mmd_pm on the hand instance") {
  const auto cfg = KernelConfig::gaussian(1.0);
  const auto u = oracles::sample1d({0.0, 2.0}, SampleTag::source_unlabeled);
  const auto p = oracles::sample1d({0.0}, SampleTag::source_positive);
  const auto t = oracles::sample1d({2.0}, SampleTag::target);
  const auto s = embedding_stats(cfg, u, p, t);
  CHECK_THAT(estimate_mmd_pm(s, 0.5),
             WithinRel(2.0 * std::sqrt(0.5 - 0.5 * std::exp(-4.0)), 1e-12));
  CHECK_THAT(estimate_mmd_pm(s, 0.5), WithinAbs(1.40120, 1e-4));
}

TEST_CASE("estimate_mmd_pm approaches the closed-form population value") {
  // Two 10-d Gaussians a unit vector of ones apart, pi = 0.2, tau = 1/10.
  const Eigen::Index n = 5000, p = 10;
  Rng rng(2024);
  Eigen::MatrixXd unlabeled(n, p), positives(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double mean_u = rng.bernoulli(0.2) ? 1.0 : 0.0;
    for (Eigen::Index j = 0; j < p; ++j) unlabeled(i, j) = mean_u + rng.normal();
    for (Eigen::Index j = 0; j < p; ++j) positives(i, j) = 1.0 + rng.normal();
  }
  const auto cfg = KernelConfig::gaussian_default(p);
  const auto u = Sample::make(std::move(unlabeled), SampleTag::source_unlabeled);
  const auto pos = Sample::make(std::move(positives), SampleTag::source_positive);
  const auto stats = embedding_stats(cfg, u, pos, Sample{pos.values, SampleTag::target});

  const double exact = oracles::gaussian_population_mmd(cfg.tau, 10, 10.0);
  const double plug_in = estimate_mmd_pm(stats, 0.2);
  CHECK(std::abs(plug_in - exact) <= 0.1 * exact);
}

TEST_CASE("population bound with plug-in mmd and alpha = 1 matches empirical bound") {
  Rng rng(31);
  for (int k = 0; k < 20; ++k) {
    const double d = 0.05 + rng.uniform01();
    const auto s = stats_with(d, 200 + static_cast<Eigen::Index>(rng.bounded(2000)),
                              150, 700);
    const double pi = 0.9 * rng.uniform01();
    const auto emp = empirical_bound(s, KernelConfig{}, 0.05);
    const double pop = population_bound_value(pi, 1.0, 0.05, 1.0, emp.N,
                                              estimate_mmd_pm(s, pi));
    CHECK_THAT(pop, WithinAbs(emp.bound_value, 1e-12));
  }
}
