#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <set>

#include "oracles.hpp"
#include "priorshift/datagen.hpp"
#include "priorshift/estimator.hpp"

using namespace priorshift;

namespace {

LabeledDataset two_class_pool(Eigen::Index n_pos, Eigen::Index n_neg,
                              std::uint64_t seed) {
  Rng rng(seed);
  LabeledDataset data;
  data.features.resize(n_pos + n_neg, 3);
  for (Eigen::Index i = 0; i < n_pos + n_neg; ++i) {
    const bool positive = i < n_pos;
    data.features(i, 0) = positive ? 1.0 : -1.0;  // class marker
    data.features(i, 1) = rng.normal();
    data.features(i, 2) = rng.normal();
    data.labels.push_back(positive ? 1 : -1);
  }
  return data;
}

}  // namespace

TEST_CASE("pu sample size formulas") {
  // c = 1, pi = 0.5: A = 2, all labeled, nothing unlabeled.
  auto sizes = pu_sample_sizes(0.5, 1.0, 1000);
  CHECK(sizes.positives == 1000);
  CHECK(sizes.unlabeled == 0);

  // c = 0.5, pi = 0.2: A = 5/3.
  sizes = pu_sample_sizes(0.2, 0.5, 1000);
  CHECK(sizes.positives == 167);
  CHECK(sizes.unlabeled == 833);

  // The two parts always recompose n within one row.
  for (const double c : {0.1, 0.25, 0.5, 0.75, 1.0}) {
    for (const double pi : {0.0, 0.1, 0.3, 0.5, 0.9}) {
      if (c == 1.0 && pi == 0.0) continue;  // undefined scaling, tested below
      for (const Eigen::Index n : {7LL, 100LL, 999LL, 2000LL}) {
        const auto s = pu_sample_sizes(pi, c, n);
        CHECK(std::abs(s.positives + s.unlabeled - n) <= 1);
      }
    }
  }

  CHECK_THROWS_AS(pu_sample_sizes(1.0, 0.5, 100), InputError);
  CHECK_THROWS_AS(pu_sample_sizes(0.2, 0.0, 100), InputError);
  CHECK_THROWS_AS(pu_sample_sizes(0.2, 1.5, 100), InputError);
  CHECK_THROWS_AS(pu_sample_sizes(0.0, 1.0, 100), InputError);
}

TEST_CASE("make_pu_sample draws positives from positive rows only") {
  const auto pool = two_class_pool(400, 600, 5);
  auto [positives, unlabeled] = make_pu_sample(pool, 0.4, 0.5, 1000, 42);

  const auto sizes = pu_sample_sizes(0.4, 0.5, 1000);
  CHECK(positives.size() == sizes.positives);
  CHECK(unlabeled.size() == sizes.unlabeled);
  CHECK(positives.tag == SampleTag::source_positive);
  CHECK(unlabeled.tag == SampleTag::source_unlabeled);

  for (Eigen::Index i = 0; i < positives.size(); ++i) {
    CHECK(positives.values(i, 0) == 1.0);
  }

  // Deterministic for a fixed seed.
  auto [p2, u2] = make_pu_sample(pool, 0.4, 0.5, 1000, 42);
  CHECK(p2.values == positives.values);
  CHECK(u2.values == unlabeled.values);
}

TEST_CASE("make_pu_sample reports deficits") {
  const auto pool = two_class_pool(50, 950, 6);
  // Needs round(A*c*pi*n) = 209 positives but only 50 exist.
  try {
    make_pu_sample(pool, 0.5, 0.5, 1000, 0);
    FAIL("expected InputError");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("short by") != std::string::npos);
  }

  // c = 1 leaves the unlabeled side empty, which cannot back an estimator.
  const auto big = two_class_pool(600, 400, 7);
  CHECK_THROWS_AS(make_pu_sample(big, 0.5, 1.0, 1000, 0), InputError);
}

TEST_CASE("unlabeled part of the PU sample has the right positive rate") {
  int inside = 0;
  const int runs = 20;
  for (int seed = 0; seed < runs; ++seed) {
    const auto pool = two_class_pool(300, 700, 100 + static_cast<std::uint64_t>(seed));
    auto [positives, unlabeled] =
        make_pu_sample(pool, 0.3, 0.5, 1000, static_cast<std::uint64_t>(seed));
    Eigen::Index count = 0;
    for (Eigen::Index i = 0; i < unlabeled.size(); ++i) {
      count += (unlabeled.values(i, 0) == 1.0);
    }
    const auto [lo, hi] = oracles::binomial_interval(unlabeled.size(), 0.3);
    inside += (count >= lo && count <= hi);
  }
  CHECK(inside >= runs - 1);
}

TEST_CASE("gen_labeled_gaussian class counts follow the binomial") {
  int inside = 0;
  const int runs = 20;
  for (int seed = 0; seed < runs; ++seed) {
    const auto pool = gen_labeled_gaussian(Eigen::VectorXd::Ones(10), 0.8, 2000,
                                           static_cast<std::uint64_t>(seed));
    const auto [lo, hi] = oracles::binomial_interval(2000, 0.8);
    inside += (pool.positives() >= lo && pool.positives() <= hi);
  }
  CHECK(inside >= runs - 1);
}

TEST_CASE("synthetic generator is deterministic and honors the means") {
  SyntheticConfig cfg;
  cfg.n_source = 800;
  cfg.n_target = 600;
  cfg.seed = 99;

  const auto a = gen_synthetic(cfg);
  const auto b = gen_synthetic(cfg);
  CHECK(a.positives.values == b.positives.values);
  CHECK(a.unlabeled.values == b.unlabeled.values);
  CHECK(a.target.values == b.target.values);
  CHECK(a.true_pi == 0.2);
  CHECK(a.true_pi_prime == 0.8);

  // Positive-class mean is the all-ones shift, per coordinate, at a loose
  // law-of-large-numbers tolerance.
  const Eigen::RowVectorXd mean = a.positives.values.colwise().mean();
  const double tol = 4.0 / std::sqrt(static_cast<double>(a.positives.size()));
  for (Eigen::Index j = 0; j < cfg.p; ++j) {
    CHECK(std::abs(mean[j] - 1.0) <= tol);
  }

  // All-positive target without disturbance: same generator as the source
  // positives, mean at the shift.
  SyntheticConfig all_pos = cfg;
  all_pos.pi_prime = 1.0;
  const auto t0 = gen_synthetic(all_pos);
  const Eigen::RowVectorXd t0mean = t0.target.values.colwise().mean();
  const double t0tol = 4.0 / std::sqrt(static_cast<double>(t0.target.size()));
  for (Eigen::Index j = 0; j < cfg.p; ++j) {
    CHECK(std::abs(t0mean[j] - 1.0) <= t0tol);
  }

  // All-positive target with a disturbance: mean sits at shift + g.
  SyntheticConfig shifted = all_pos;
  shifted.disturbance_g = -0.75;
  const auto d = gen_synthetic(shifted);
  const Eigen::RowVectorXd tmean = d.target.values.colwise().mean();
  const double ttol = 4.0 / std::sqrt(static_cast<double>(d.target.size()));
  for (Eigen::Index j = 0; j < cfg.p; ++j) {
    CHECK(std::abs(tmean[j] - 0.25) <= ttol);
  }
}

TEST_CASE("all-negative target drives the estimate to zero") {
  SyntheticConfig cfg;
  cfg.pi_prime = 0.0;
  cfg.n_source = 3000;
  cfg.n_target = 3000;
  cfg.seed = 4;
  const auto data = gen_synthetic(cfg);
  const auto kcfg = KernelConfig::gaussian_default(cfg.p);
  const auto est = estimate_target_prior(kcfg, data.unlabeled, data.positives,
                                         data.target, PiSpec::known(0.2));
  CHECK(std::abs(est.raw) <= 0.1);
}

TEST_CASE("downsampling to a smaller prior keeps all negatives") {
  const auto pool = two_class_pool(268, 500, 11);  // diabetes-like split
  const auto down = downsample_to_prior(pool, 0.2, 3);

  CHECK(down.positives() == 125);
  CHECK(down.size() == 625);

  // Negative rows survive untouched (same multiset of marker columns).
  Eigen::Index negatives = 0;
  for (int y : down.labels) negatives += (y < 0);
  CHECK(negatives == 500);
  const double freq = static_cast<double>(down.positives()) / static_cast<double>(down.size());
  CHECK(std::abs(freq - 0.2) <= 1.0 / static_cast<double>(down.size()));
}

TEST_CASE("downsampling to a larger prior keeps all positives") {
  const auto pool = two_class_pool(268, 500, 12);
  const auto down = downsample_to_prior(pool, 0.8, 3);
  CHECK(down.positives() == 268);
  CHECK(down.size() == 268 + 67);
}

TEST_CASE("downsampling edge cases") {
  const auto pool = two_class_pool(100, 400, 13);
  // Already at the target: unchanged.
  const auto same = downsample_to_prior(pool, 0.2, 3);
  CHECK(same.size() == pool.size());
  CHECK(same.features == pool.features);

  // Unreachable without emptying a class.
  const auto tiny = two_class_pool(1, 500, 14);
  CHECK_THROWS_AS(downsample_to_prior(tiny, 0.9, 3), InputError);
  CHECK_THROWS_AS(downsample_to_prior(pool, 0.0, 3), InputError);
  CHECK_THROWS_AS(downsample_to_prior(pool, 1.0, 3), InputError);

  // Deterministic for a fixed seed.
  const auto d1 = downsample_to_prior(pool, 0.5, 77);
  const auto d2 = downsample_to_prior(pool, 0.5, 77);
  CHECK(d1.features == d2.features);
}

TEST_CASE("downsampling accuracy over random cases") {
  Rng rng(2025);
  for (int trial = 0; trial < 25; ++trial) {
    const auto n_pos = 20 + static_cast<Eigen::Index>(rng.bounded(400));
    const auto n_neg = 20 + static_cast<Eigen::Index>(rng.bounded(400));
    const double target = 0.1 + 0.8 * rng.uniform01();
    const auto pool = two_class_pool(n_pos, n_neg, rng.next());
    LabeledDataset down;
    try {
      down = downsample_to_prior(pool, target, rng.next());
    } catch (const InputError&) {
      continue;
    }
    const double freq =
        static_cast<double>(down.positives()) / static_cast<double>(down.size());
    CHECK(std::abs(freq - target) <= 1.0 / static_cast<double>(down.size()));
    CHECK(down.size() <= pool.size());
  }
}

TEST_CASE("synthetic config validation") {
  SyntheticConfig cfg;
  cfg.pi = 1.0;
  CHECK_THROWS_AS(gen_synthetic(cfg), InputError);
  cfg = SyntheticConfig{};
  cfg.c = 0.0;
  CHECK_THROWS_AS(gen_synthetic(cfg), InputError);
  cfg = SyntheticConfig{};
  cfg.shift = Eigen::VectorXd::Ones(3);  // wrong length vs p = 10
  CHECK_THROWS_AS(gen_synthetic(cfg), InputError);
}
