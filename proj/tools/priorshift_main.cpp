// Command-line front end: single-shot estimation from CSV samples, bound
// arithmetic, synthetic data emission, and config-driven benchmarks.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "priorshift/priorshift.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitDegenerate = 2;

using priorshift::format_double;

void print_kv(const char* key, const std::string& value) {
  std::printf("%-16s %s\n", key, value.c_str());
}

int run_estimate(const std::string& positives_path, const std::string& unlabeled_path,
                 const std::string& target_path, std::optional<double> pi_known,
                 bool estimate_pi, std::optional<double> tau, bool median_heuristic,
                 double delta, bool standardize, bool as_json) {
  const auto t0 = std::chrono::steady_clock::now();

  auto positives = priorshift::Sample::make(priorshift::load_feature_csv(positives_path),
                                            priorshift::SampleTag::source_positive);
  auto unlabeled = priorshift::Sample::make(priorshift::load_feature_csv(unlabeled_path),
                                            priorshift::SampleTag::source_unlabeled);
  auto target = priorshift::Sample::make(priorshift::load_feature_csv(target_path),
                                         priorshift::SampleTag::target);
  if (standardize) {
    priorshift::standardize_pooled({&positives, &unlabeled, &target});
  }

  priorshift::KernelConfig kcfg;
  if (median_heuristic) {
    const priorshift::Sample* samples[] = {&unlabeled, &positives, &target};
    kcfg = priorshift::KernelConfig::gaussian(priorshift::median_heuristic_tau(samples));
  } else if (tau) {
    kcfg = priorshift::KernelConfig::gaussian(*tau);
  } else {
    kcfg = priorshift::KernelConfig::gaussian_default(target.dim());
  }

  priorshift::detail::check_delta(delta);

  double pi = 0.0;
  priorshift::PiSource source = priorshift::PiSource::known;
  if (estimate_pi) {
    pi = priorshift::km2_prior(kcfg, priorshift::KMConfig{}, unlabeled, positives);
    source = priorshift::PiSource::km2_plugin;
  } else {
    pi = *pi_known;
    priorshift::detail::check_pi(pi);
  }

  const auto stats = priorshift::embedding_stats(kcfg, unlabeled, positives, target);
  const auto est = priorshift::tcpu_closed_form(stats, pi, source);
  const auto bound = priorshift::empirical_bound(stats, kcfg, delta);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (as_json) {
    nlohmann::ordered_json j;
    j["estimate_raw"] = est.raw;
    j["estimate_clipped"] = est.clipped;
    j["pi_used"] = est.pi_used;
    j["pi_source"] = priorshift::to_string(est.pi_source);
    j["denominator"] = est.denominator;
    j["bound_value"] = bound.bound_value;
    j["coverage"] = bound.coverage;
    j["delta"] = bound.delta;
    j["N"] = bound.N;
    j["tau"] = kcfg.tau;
    j["n"] = stats.n;
    j["m"] = stats.m;
    j["n_prime"] = stats.n_prime;
    j["elapsed_s"] = elapsed;
    std::cout << j.dump(2) << '\n';
  } else {
    print_kv("estimate_raw", format_double(est.raw));
    print_kv("estimate_clipped", format_double(est.clipped));
    print_kv("pi_used", format_double(est.pi_used));
    print_kv("pi_source", priorshift::to_string(est.pi_source));
    print_kv("denominator", format_double(est.denominator));
    print_kv("bound_value", format_double(bound.bound_value));
    print_kv("coverage", format_double(bound.coverage));
    print_kv("delta", format_double(bound.delta));
    print_kv("N", std::to_string(bound.N));
    print_kv("tau", format_double(kcfg.tau));
    print_kv("sizes", std::to_string(stats.n) + "/" + std::to_string(stats.m) + "/" +
                          std::to_string(stats.n_prime));
    print_kv("elapsed_s", format_double(elapsed));
  }
  return kExitOk;
}

int run_bound(std::optional<double> denominator, long long n, long long m,
              long long n_prime, const std::string& positives_path,
              const std::string& unlabeled_path, const std::string& target_path,
              std::optional<double> tau, double delta, bool as_json) {
  priorshift::BoundReport report;
  double denom_norm = 0.0;

  if (denominator) {
    if (n < 1 || m < 1 || n_prime < 1) {
      throw priorshift::InputError("--denominator requires --n, --m and --n-prime");
    }
    if (!(*denominator > 0.0)) {
      throw priorshift::InputError("--denominator must be positive");
    }
    priorshift::EmbeddingStats stats;
    // Only the squared distance and the sizes matter for the bound.
    stats.s_uu = *denominator * *denominator;
    stats.s_up = 0.0;
    stats.s_pp = 0.0;
    stats.n = n;
    stats.m = m;
    stats.n_prime = n_prime;
    report = priorshift::empirical_bound(stats, priorshift::KernelConfig{}, delta);
    denom_norm = *denominator;
  } else if (!positives_path.empty() && !unlabeled_path.empty()) {
    auto positives = priorshift::Sample::make(priorshift::load_feature_csv(positives_path),
                                              priorshift::SampleTag::source_positive);
    auto unlabeled = priorshift::Sample::make(priorshift::load_feature_csv(unlabeled_path),
                                              priorshift::SampleTag::source_unlabeled);
    Eigen::Index np = 0;
    if (!target_path.empty()) {
      np = priorshift::load_feature_csv(target_path).rows();
    } else if (n_prime > 0) {
      np = n_prime;
    } else {
      throw priorshift::InputError("need --target or --n-prime for N = min(n, m, n')");
    }
    const auto kcfg = tau ? priorshift::KernelConfig::gaussian(*tau)
                          : priorshift::KernelConfig::gaussian_default(unlabeled.dim());
    priorshift::EmbeddingStats stats;
    stats.s_uu = priorshift::mean_cross_kernel(kcfg, unlabeled, unlabeled);
    stats.s_pp = priorshift::mean_cross_kernel(kcfg, positives, positives);
    stats.s_up = priorshift::mean_cross_kernel(kcfg, unlabeled, positives);
    stats.n = unlabeled.size();
    stats.m = positives.size();
    stats.n_prime = np;
    report = priorshift::empirical_bound(stats, kcfg, delta);
    denom_norm = std::sqrt(priorshift::squared_norm_diff(stats));
  } else {
    throw priorshift::InputError(
        "either --denominator with sizes or --positives/--unlabeled files are required");
  }

  if (as_json) {
    nlohmann::ordered_json j;
    j["bound_value"] = report.bound_value;
    j["coverage"] = report.coverage;
    j["delta"] = report.delta;
    j["N"] = report.N;
    j["M"] = report.M;
    j["denominator"] = denom_norm;
    std::cout << j.dump(2) << '\n';
  } else {
    print_kv("bound_value", format_double(report.bound_value));
    print_kv("coverage", format_double(report.coverage));
    print_kv("delta", format_double(report.delta));
    print_kv("N", std::to_string(report.N));
    print_kv("M", format_double(report.M));
    print_kv("denominator", format_double(denom_norm));
  }
  return kExitOk;
}

int run_simulate(const std::string& out_dir, const priorshift::SyntheticConfig& cfg) {
  std::filesystem::create_directories(out_dir);
  const auto data = priorshift::gen_synthetic(cfg);

  const auto pos_path = out_dir + "/positives.csv";
  const auto unl_path = out_dir + "/unlabeled.csv";
  const auto tgt_path = out_dir + "/target.csv";
  priorshift::write_feature_csv(pos_path, data.positives.values);
  priorshift::write_feature_csv(unl_path, data.unlabeled.values);
  priorshift::write_feature_csv(tgt_path, data.target.values);

  nlohmann::ordered_json meta;
  meta["pi"] = data.true_pi;
  meta["pi_prime"] = data.true_pi_prime;
  meta["c"] = cfg.c;
  meta["g"] = cfg.disturbance_g;
  meta["p"] = cfg.p;
  meta["seed"] = cfg.seed;
  meta["n_positives"] = data.positives.size();
  meta["n_unlabeled"] = data.unlabeled.size();
  meta["n_target"] = data.target.size();
  std::ofstream mf(out_dir + "/meta.json");
  mf << meta.dump(2) << '\n';

  std::printf("wrote %s (%lld rows)\n", pos_path.c_str(),
              static_cast<long long>(data.positives.size()));
  std::printf("wrote %s (%lld rows)\n", unl_path.c_str(),
              static_cast<long long>(data.unlabeled.size()));
  std::printf("wrote %s (%lld rows)\n", tgt_path.c_str(),
              static_cast<long long>(data.target.size()));
  std::printf("wrote %s\n", (out_dir + "/meta.json").c_str());
  return kExitOk;
}

int run_bench(const std::string& config_path, const std::string& output_csv,
              const std::string& output_summary, int threads) {
  auto cfg = priorshift::load_bench_config(config_path);
  if (!output_csv.empty()) cfg.output_csv = output_csv;
  if (!output_summary.empty()) cfg.output_summary = output_summary;
  if (threads > 0) cfg.base.threads = threads;

  const auto result = priorshift::run_bench(cfg);
  std::printf("wrote %s (%zu rows), %s\n", cfg.output_csv.c_str(), result.n_rows,
              cfg.output_summary.c_str());
  for (const auto& combo : result.summary["combos"]) {
    std::string params = "pi=" + format_double(combo["pi"].get<double>()) +
                         " pi_prime=" + format_double(combo["pi_prime"].get<double>());
    if (combo.contains("g")) params += " g=" + format_double(combo["g"].get<double>());
    for (const auto& m : combo["methods"]) {
      if (m.contains("mean_abs_error")) {
        std::printf("%-32s %-16s mean_abs_error %.4f +/- %.4f (se)\n", params.c_str(),
                    m["method"].get<std::string>().c_str(),
                    m["mean_abs_error"].get<double>(),
                    m["stderr_abs_error"].get<double>());
      } else {
        std::printf("%-32s %-16s all %d repetitions failed\n", params.c_str(),
                    m["method"].get<std::string>().c_str(),
                    m["repetitions_failed"].get<int>());
      }
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Target-class prior estimation for PU data under label shift"};
  app.require_subcommand(1);

  // estimate
  auto* est = app.add_subcommand("estimate", "Estimate the target-class prior from three feature CSVs");
  std::string positives_path, unlabeled_path, target_path;
  est->add_option("positives", positives_path, "CSV of labeled-positive sample")->required();
  est->add_option("unlabeled", unlabeled_path, "CSV of source unlabeled sample")->required();
  est->add_option("target", target_path, "CSV of target unlabeled sample")->required();
  double est_pi = 0.0;
  bool estimate_pi = false;
  auto* pi_opt = est->add_option("--pi", est_pi, "known source-class prior in [0, 1)");
  auto* est_pi_flag = est->add_flag("--estimate-pi", estimate_pi,
                                    "estimate the source prior with the KM2 hull method");
  pi_opt->excludes(est_pi_flag);
  est_pi_flag->excludes(pi_opt);
  double est_tau = 0.0;
  auto* tau_opt = est->add_option("--tau", est_tau, "Gaussian kernel scale (default 1/p)");
  bool est_median = false;
  est->add_flag("--median-heuristic", est_median,
                "set tau from the median pairwise squared distance");
  double est_delta = 0.05;
  est->add_option("--delta", est_delta, "bound confidence parameter (default 0.05)");
  bool est_standardize = false;
  est->add_flag("--standardize", est_standardize, "standardize features (pooled mean/sd)");
  bool est_json = false;
  est->add_flag("--json", est_json, "emit a single JSON document");

  // bound
  auto* bnd = app.add_subcommand("bound", "Evaluate the computable deviation bound");
  double bnd_denominator = 0.0;
  auto* denom_opt = bnd->add_option("--denominator", bnd_denominator,
                                    "mean-map distance between unlabeled and positives");
  long long bnd_n = 0, bnd_m = 0, bnd_np = 0;
  bnd->add_option("--n", bnd_n, "unlabeled sample size");
  bnd->add_option("--m", bnd_m, "positive sample size");
  bnd->add_option("--n-prime", bnd_np, "target sample size");
  std::string bnd_pos, bnd_unl, bnd_tgt;
  bnd->add_option("--positives", bnd_pos, "CSV to compute the denominator from");
  bnd->add_option("--unlabeled", bnd_unl, "CSV to compute the denominator from");
  bnd->add_option("--target", bnd_tgt, "CSV, used only for its row count");
  double bnd_tau = 0.0;
  auto* bnd_tau_opt = bnd->add_option("--tau", bnd_tau, "Gaussian kernel scale (default 1/p)");
  double bnd_delta = 0.05;
  bnd->add_option("--delta", bnd_delta, "bound confidence parameter (default 0.05)");
  bool bnd_json = false;
  bnd->add_flag("--json", bnd_json, "emit a single JSON document");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Write a synthetic PU dataset as CSV files");
  std::string sim_out = "simulated";
  sim->add_option("--out", sim_out, "output directory");
  priorshift::SyntheticConfig sim_cfg;
  sim->add_option("--pi", sim_cfg.pi, "source-class prior (default 0.2)");
  sim->add_option("--pi-prime", sim_cfg.pi_prime, "target-class prior (default 0.8)");
  sim->add_option("--c", sim_cfg.c, "labeling frequency (default 0.5)");
  long long sim_ns = 2000, sim_nt = 2000, sim_p = 10;
  sim->add_option("--n-source", sim_ns, "source pool size (default 2000)");
  sim->add_option("--n-target", sim_nt, "target sample size (default 2000)");
  sim->add_option("--p", sim_p, "feature dimension (default 10)");
  sim->add_option("--g", sim_cfg.disturbance_g,
                  "target positive-class mean disturbance (default 0)");
  std::uint64_t sim_seed = 0;
  sim->add_option("--seed", sim_seed, "RNG seed (default 0)");

  // bench
  auto* ben = app.add_subcommand("bench", "Run a benchmark described by a JSON config");
  std::string ben_config;
  ben->add_option("--config", ben_config, "JSON config file")->required();
  std::string ben_csv, ben_summary;
  ben->add_option("--output-csv", ben_csv, "override the results CSV path");
  ben->add_option("--output-summary", ben_summary, "override the summary JSON path");
  int ben_threads = 0;
  ben->add_option("--threads", ben_threads, "repetition-level worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (est->parsed()) {
      if (!estimate_pi && pi_opt->count() == 0) {
        std::fprintf(stderr, "error: exactly one of --pi or --estimate-pi is required\n");
        return kExitInput;
      }
      return run_estimate(positives_path, unlabeled_path, target_path,
                          pi_opt->count() ? std::optional<double>(est_pi) : std::nullopt,
                          estimate_pi,
                          tau_opt->count() ? std::optional<double>(est_tau) : std::nullopt,
                          est_median, est_delta, est_standardize, est_json);
    }
    if (bnd->parsed()) {
      return run_bound(denom_opt->count() ? std::optional<double>(bnd_denominator)
                                          : std::nullopt,
                       bnd_n, bnd_m, bnd_np, bnd_pos, bnd_unl, bnd_tgt,
                       bnd_tau_opt->count() ? std::optional<double>(bnd_tau) : std::nullopt,
                       bnd_delta, bnd_json);
    }
    if (sim->parsed()) {
      sim_cfg.n_source = sim_ns;
      sim_cfg.n_target = sim_nt;
      sim_cfg.p = sim_p;
      sim_cfg.seed = sim_seed;
      return run_simulate(sim_out, sim_cfg);
    }
    if (ben->parsed()) {
      return run_bench(ben_config, ben_csv, ben_summary, ben_threads);
    }
  } catch (const priorshift::DegenerateEmbeddingError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitDegenerate;
  } catch (const priorshift::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInput;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInput;
  }
  return kExitInput;
}
