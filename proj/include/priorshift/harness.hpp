#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <json.hpp>

#include "priorshift/bounds.hpp"
#include "priorshift/csv.hpp"
#include "priorshift/datagen.hpp"
#include "priorshift/errors.hpp"
#include "priorshift/estimator.hpp"
#include "priorshift/km2.hpp"

namespace priorshift {

enum class Method { tcpu_known_pi, tcpu_plugin_pi, km2_ls };

inline const char* to_string(Method m) noexcept {
  switch (m) {
    case Method::tcpu_known_pi: return "tcpu_known_pi";
    case Method::tcpu_plugin_pi: return "tcpu_plugin_pi";
    case Method::km2_ls: return "km2_ls";
  }
  return "?";
}

inline Method method_from_string(const std::string& s) {
  if (s == "tcpu_known_pi") return Method::tcpu_known_pi;
  if (s == "tcpu_plugin_pi") return Method::tcpu_plugin_pi;
  if (s == "km2_ls") return Method::km2_ls;
  throw InputError("unknown method '" + s +
                   "' (expected tcpu_known_pi, tcpu_plugin_pi or km2_ls)");
}

// Label-shift benchmark on one labeled CSV: each repetition re-splits the
// rows 50/50 into source and target pools, downsamples each to the requested
// prior and applies the PU sampling to the source half.
struct CsvScenario {
  std::string path;
  std::string label_column;
  std::string positive_value;
  double pi = 0.2;
  double pi_prime = 0.8;
  double c = 0.5;
};

struct ExperimentConfig {
  std::variant<SyntheticConfig, CsvScenario> scenario;
  std::vector<Method> methods{Method::tcpu_known_pi};
  int repetitions = 20;
  double delta = 0.05;
  std::uint64_t seed = 0;
  bool standardize = false;
  // elapsed_s is written as 0 unless set: wall time in the results CSV would
  // break the byte-identical determinism contract.
  bool record_timing = false;
  int threads = 1;
  std::optional<double> pi_override;  // supplied to tcpu_known_pi instead of the true pi
  std::optional<double> tau;          // kernel scale; default 1/p
  bool median_heuristic = false;
  KMConfig km;

  void validate() const {
    if (methods.empty()) throw InputError("at least one method is required");
    if (repetitions < 1) throw InputError("repetitions must be positive");
    if (threads < 0) throw InputError("threads must be nonnegative");
    detail::check_delta(delta);
  }
};

struct RunResult {
  Method method = Method::tcpu_known_pi;
  int rep = 0;
  double pi = std::numeric_limits<double>::quiet_NaN();  // pi used (supplied or plugged in)
  double pi_prime_true = std::numeric_limits<double>::quiet_NaN();
  double estimate_raw = std::numeric_limits<double>::quiet_NaN();
  double estimate_clipped = std::numeric_limits<double>::quiet_NaN();
  double abs_error = std::numeric_limits<double>::quiet_NaN();
  std::optional<double> bound;  // TCPU methods only
  double elapsed_s = 0.0;
  std::string error_msg;

  bool ok() const noexcept { return error_msg.empty(); }
};

struct MethodSummary {
  Method method = Method::tcpu_known_pi;
  int n_ok = 0;
  int n_failed = 0;
  double mean_abs_error = std::numeric_limits<double>::quiet_NaN();
  double stderr_abs_error = std::numeric_limits<double>::quiet_NaN();
  double mean_elapsed_s = 0.0;
};

struct ExperimentResult {
  std::vector<RunResult> rows;
  std::vector<MethodSummary> summary;
};

namespace detail {

inline KernelConfig resolve_kernel(const ExperimentConfig& cfg, const PUDataset& data,
                                   std::uint64_t rep_seed) {
  if (cfg.median_heuristic) {
    const Sample* samples[] = {&data.unlabeled, &data.positives, &data.target};
    return KernelConfig::gaussian(
        median_heuristic_tau(samples, 1000, split_seed(rep_seed, 21)));
  }
  if (cfg.tau) return KernelConfig::gaussian(*cfg.tau);
  return KernelConfig::gaussian_default(data.target.dim());
}

inline PUDataset make_dataset(const ExperimentConfig& cfg,
                              const LabeledDataset* csv_data,
                              std::uint64_t rep_seed) {
  if (const auto* syn = std::get_if<SyntheticConfig>(&cfg.scenario)) {
    SyntheticConfig per_rep = *syn;
    per_rep.seed = rep_seed;
    return gen_synthetic(per_rep);
  }
  const auto& sc = std::get<CsvScenario>(cfg.scenario);

  // Seeded 50/50 split, then prior control by downsampling each half.
  Rng rng(split_seed(rep_seed, 31));
  std::vector<std::ptrdiff_t> order(static_cast<std::size_t>(csv_data->size()));
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<std::ptrdiff_t>(i);
  shuffle(order, rng);
  const auto half = static_cast<std::size_t>(csv_data->size() / 2);

  auto build = [&](std::size_t begin, std::size_t end) {
    LabeledDataset part;
    part.features.resize(static_cast<Eigen::Index>(end - begin), csv_data->features.cols());
    part.labels.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i) {
      part.features.row(static_cast<Eigen::Index>(i - begin)) =
          csv_data->features.row(order[i]);
      part.labels.push_back(csv_data->labels[static_cast<std::size_t>(order[i])]);
    }
    return part;
  };
  LabeledDataset source = downsample_to_prior(build(0, half), sc.pi, split_seed(rep_seed, 32));
  LabeledDataset target = downsample_to_prior(build(half, order.size()), sc.pi_prime,
                                              split_seed(rep_seed, 33));

  auto [positives, unlabeled] =
      make_pu_sample(source, sc.pi, sc.c, source.size(), split_seed(rep_seed, 34));

  PUDataset out{std::move(positives), std::move(unlabeled),
                Sample::make(target.features, SampleTag::target)};
  out.true_pi = sc.pi;
  out.true_pi_prime = sc.pi_prime;
  return out;
}

inline RunResult run_method(const ExperimentConfig& cfg, Method method,
                            const PUDataset& data, const KernelConfig& kcfg,
                            int rep) {
  RunResult row;
  row.method = method;
  row.rep = rep;
  row.pi = data.true_pi;
  row.pi_prime_true = data.true_pi_prime;

  const auto t0 = std::chrono::steady_clock::now();
  try {
    switch (method) {
      case Method::tcpu_known_pi:
      case Method::tcpu_plugin_pi: {
        double pi = data.true_pi;
        PiSource source = PiSource::known;
        if (method == Method::tcpu_plugin_pi) {
          try {
            pi = km2_prior(kcfg, cfg.km, data.unlabeled, data.positives);
          } catch (const Error& e) {
            throw PluginFailureError(std::string("km2 source-prior plug-in failed: ") +
                                     e.what());
          }
          source = PiSource::km2_plugin;
        } else if (cfg.pi_override) {
          pi = *cfg.pi_override;
        }
        const EmbeddingStats stats =
            embedding_stats(kcfg, data.unlabeled, data.positives, data.target);
        const PriorEstimate est = tcpu_closed_form(stats, pi, source);
        row.pi = est.pi_used;
        row.estimate_raw = est.raw;
        row.estimate_clipped = est.clipped;
        row.bound = empirical_bound(stats, kcfg, cfg.delta).bound_value;
        break;
      }
      case Method::km2_ls: {
        const double est = km2_ls_target_prior(kcfg, cfg.km, data.target, data.positives);
        row.estimate_raw = est;
        row.estimate_clipped = est;
        break;
      }
    }
    row.abs_error = std::abs(row.pi_prime_true - row.estimate_raw);
  } catch (const Error& e) {
    row.error_msg = e.what();
  }
  row.elapsed_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return row;
}

inline std::vector<MethodSummary> summarize(const ExperimentConfig& cfg,
                                            const std::vector<RunResult>& rows) {
  std::vector<MethodSummary> out;
  for (Method m : cfg.methods) {
    MethodSummary s;
    s.method = m;
    std::vector<double> errors;
    double elapsed = 0.0;
    int count = 0;
    for (const auto& row : rows) {
      if (row.method != m) continue;
      ++count;
      elapsed += row.elapsed_s;
      if (row.ok()) {
        errors.push_back(row.abs_error);
      } else {
        ++s.n_failed;
      }
    }
    s.n_ok = static_cast<int>(errors.size());
    if (!errors.empty()) {
      double mean = 0.0;
      for (double e : errors) mean += e;
      mean /= static_cast<double>(errors.size());
      s.mean_abs_error = mean;
      if (errors.size() > 1) {
        double ss = 0.0;
        for (double e : errors) ss += (e - mean) * (e - mean);
        s.stderr_abs_error = std::sqrt(ss / static_cast<double>(errors.size() - 1)) /
                             std::sqrt(static_cast<double>(errors.size()));
      } else {
        s.stderr_abs_error = 0.0;
      }
    }
    if (count > 0) s.mean_elapsed_s = elapsed / count;
    out.push_back(s);
  }
  return out;
}

}  // namespace detail

// Runs every (repetition, method) cell. Each repetition draws fresh data from
// a seed derived from (seed, rep), so results do not depend on thread count;
// rows are sorted by (method, rep) before returning. Per-repetition failures
// are recorded in their rows, not thrown.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();

  std::optional<LabeledDataset> csv_data;
  if (const auto* sc = std::get_if<CsvScenario>(&cfg.scenario)) {
    csv_data = load_labeled_csv(sc->path, sc->label_column, sc->positive_value);
  }

  std::vector<std::vector<RunResult>> per_rep(static_cast<std::size_t>(cfg.repetitions));
  auto run_rep = [&](int rep) {
    auto& rows = per_rep[static_cast<std::size_t>(rep)];
    const std::uint64_t rep_seed = split_seed(cfg.seed, static_cast<std::uint64_t>(rep));
    PUDataset data;
    KernelConfig kcfg;
    try {
      data = detail::make_dataset(cfg, csv_data ? &*csv_data : nullptr, rep_seed);
      if (cfg.standardize) {
        standardize_pooled({&data.positives, &data.unlabeled, &data.target});
      }
      kcfg = detail::resolve_kernel(cfg, data, rep_seed);
    } catch (const Error& e) {
      // Data generation failed; every method of this repetition reports it.
      for (Method m : cfg.methods) {
        RunResult row;
        row.method = m;
        row.rep = rep;
        row.error_msg = e.what();
        rows.push_back(row);
      }
      return;
    }
    for (Method m : cfg.methods) {
      rows.push_back(detail::run_method(cfg, m, data, kcfg, rep));
    }
  };

  const int threads = cfg.threads > 0
                          ? cfg.threads
                          : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (threads <= 1 || cfg.repetitions == 1) {
    for (int rep = 0; rep < cfg.repetitions; ++rep) run_rep(rep);
  } else {
    std::vector<std::thread> pool;
    const int workers = std::min(threads, cfg.repetitions);
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (int rep = w; rep < cfg.repetitions; rep += workers) run_rep(rep);
      });
    }
    for (auto& t : pool) t.join();
  }

  ExperimentResult result;
  for (auto& rows : per_rep) {
    result.rows.insert(result.rows.end(), rows.begin(), rows.end());
  }
  std::sort(result.rows.begin(), result.rows.end(),
            [](const RunResult& a, const RunResult& b) {
              if (a.method != b.method) return static_cast<int>(a.method) < static_cast<int>(b.method);
              return a.rep < b.rep;
            });
  result.summary = detail::summarize(cfg, result.rows);
  return result;
}

// ---------------------------------------------------------------------------
// bench: config-file driven sweeps over the synthetic/csv parameters
// ---------------------------------------------------------------------------

struct BenchConfig {
  ExperimentConfig base;
  // Sweep values; empty means "not swept". Cross product, canonical order.
  std::vector<double> sweep_pi, sweep_pi_prime, sweep_c, sweep_g, sweep_pi_override;
  std::vector<Eigen::Index> sweep_n_source, sweep_n_target;
  std::string output_csv = "results.csv";
  std::string output_summary = "summary.json";
};

namespace detail {

struct Combo {
  double pi = 0, pi_prime = 0, c = 0, g = 0;
  Eigen::Index n_source = 0, n_target = 0;
  std::optional<double> pi_override;
};

inline std::vector<Combo> expand_combos(const BenchConfig& cfg) {
  Combo base;
  if (const auto* syn = std::get_if<SyntheticConfig>(&cfg.base.scenario)) {
    base = {syn->pi, syn->pi_prime, syn->c, syn->disturbance_g,
            syn->n_source, syn->n_target, cfg.base.pi_override};
  } else {
    const auto& sc = std::get<CsvScenario>(cfg.base.scenario);
    base = {sc.pi, sc.pi_prime, sc.c, 0.0, 0, 0, cfg.base.pi_override};
  }
  auto values = [](const std::vector<double>& sweep, double fallback) {
    return sweep.empty() ? std::vector<double>{fallback} : sweep;
  };
  auto sizes = [](const std::vector<Eigen::Index>& sweep, Eigen::Index fallback) {
    return sweep.empty() ? std::vector<Eigen::Index>{fallback} : sweep;
  };

  std::vector<Combo> combos;
  for (double pi : values(cfg.sweep_pi, base.pi))
    for (double pp : values(cfg.sweep_pi_prime, base.pi_prime))
      for (double c : values(cfg.sweep_c, base.c))
        for (double g : values(cfg.sweep_g, base.g))
          for (Eigen::Index ns : sizes(cfg.sweep_n_source, base.n_source))
            for (Eigen::Index nt : sizes(cfg.sweep_n_target, base.n_target)) {
              if (cfg.sweep_pi_override.empty()) {
                Combo cb{pi, pp, c, g, ns, nt, base.pi_override};
                combos.push_back(cb);
              } else {
                for (double po : cfg.sweep_pi_override) {
                  Combo cb{pi, pp, c, g, ns, nt, po};
                  combos.push_back(cb);
                }
              }
            }
  return combos;
}

inline ExperimentConfig apply_combo(const BenchConfig& cfg, const Combo& combo,
                                    std::uint64_t combo_seed) {
  ExperimentConfig out = cfg.base;
  out.seed = combo_seed;
  out.pi_override = combo.pi_override;
  if (auto* syn = std::get_if<SyntheticConfig>(&out.scenario)) {
    syn->pi = combo.pi;
    syn->pi_prime = combo.pi_prime;
    syn->c = combo.c;
    syn->disturbance_g = combo.g;
    syn->n_source = combo.n_source;
    syn->n_target = combo.n_target;
  } else {
    auto& sc = std::get<CsvScenario>(out.scenario);
    sc.pi = combo.pi;
    sc.pi_prime = combo.pi_prime;
    sc.c = combo.c;
  }
  return out;
}

inline std::string csv_safe(std::string s) {
  for (char& ch : s) {
    if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
  }
  return s;
}

inline std::string csv_value(double v) {
  return std::isnan(v) ? std::string() : format_double(v);
}

}  // namespace detail

// Extra columns are appended only for parameters actually swept and not
// already part of the base schema.
inline std::vector<std::string> bench_extra_columns(const BenchConfig& cfg) {
  std::vector<std::string> extra;
  if (!cfg.sweep_g.empty()) extra.emplace_back("g");
  if (!cfg.sweep_c.empty()) extra.emplace_back("c");
  if (!cfg.sweep_n_source.empty()) extra.emplace_back("n_source");
  if (!cfg.sweep_n_target.empty()) extra.emplace_back("n_target");
  if (!cfg.sweep_pi_override.empty()) extra.emplace_back("pi_override");
  return extra;
}

struct BenchResult {
  nlohmann::ordered_json summary;
  std::size_t n_rows = 0;
};

// Runs every combo x repetition x method cell, writes one CSV row per cell and
// a JSON summary. The CSV is byte-deterministic for a fixed config: derived
// seeds, sorted rows, fixed formatting, and a zeroed elapsed_s column unless
// record_timing is set.
inline BenchResult run_bench(const BenchConfig& cfg) {
  const auto combos = detail::expand_combos(cfg);
  const auto extra = bench_extra_columns(cfg);

  std::ofstream csv(cfg.output_csv);
  if (!csv) throw InputError("cannot write file: " + cfg.output_csv);
  csv << "method,rep,pi,pi_prime,estimate_raw,estimate_clipped,abs_error,bound,"
         "elapsed_s,error_msg";
  for (const auto& col : extra) csv << ',' << col;
  csv << '\n';

  nlohmann::ordered_json summary;
  summary["uncertainty"] = "standard_error_of_mean";
  summary["combos"] = nlohmann::ordered_json::array();

  std::size_t n_rows = 0;
  for (std::size_t ci = 0; ci < combos.size(); ++ci) {
    const auto& combo = combos[ci];
    const ExperimentConfig run_cfg =
        detail::apply_combo(cfg, combo, split_seed(cfg.base.seed, ci));
    const ExperimentResult result = run_experiment(run_cfg);

    for (const auto& row : result.rows) {
      csv << to_string(row.method) << ',' << row.rep << ','
          << detail::csv_value(row.pi) << ',' << detail::csv_value(row.pi_prime_true)
          << ',' << detail::csv_value(row.estimate_raw) << ','
          << detail::csv_value(row.estimate_clipped) << ','
          << detail::csv_value(row.abs_error) << ','
          << (row.bound ? format_double(*row.bound) : std::string()) << ','
          << (cfg.base.record_timing ? format_double(row.elapsed_s) : std::string("0"))
          << ',' << detail::csv_safe(row.error_msg);
      for (const auto& col : extra) {
        csv << ',';
        if (col == "g") csv << format_double(combo.g);
        else if (col == "c") csv << format_double(combo.c);
        else if (col == "n_source") csv << combo.n_source;
        else if (col == "n_target") csv << combo.n_target;
        else if (col == "pi_override" && combo.pi_override) csv << format_double(*combo.pi_override);
      }
      csv << '\n';
      ++n_rows;
    }

    nlohmann::ordered_json jc;
    jc["pi"] = combo.pi;
    jc["pi_prime"] = combo.pi_prime;
    jc["c"] = combo.c;
    jc["g"] = combo.g;
    if (combo.n_source > 0) jc["n_source"] = combo.n_source;
    if (combo.n_target > 0) jc["n_target"] = combo.n_target;
    if (combo.pi_override) jc["pi_override"] = *combo.pi_override;
    jc["methods"] = nlohmann::ordered_json::array();
    for (const auto& s : result.summary) {
      nlohmann::ordered_json jm;
      jm["method"] = to_string(s.method);
      jm["repetitions_ok"] = s.n_ok;
      jm["repetitions_failed"] = s.n_failed;
      if (s.n_ok > 0) {
        jm["mean_abs_error"] = s.mean_abs_error;
        jm["stderr_abs_error"] = s.stderr_abs_error;
      }
      jm["mean_elapsed_s"] = s.mean_elapsed_s;
      jc["methods"].push_back(jm);
    }
    summary["combos"].push_back(jc);
  }
  csv.flush();
  if (!csv) throw InputError("write failed: " + cfg.output_csv);

  if (!cfg.output_summary.empty()) {
    std::ofstream js(cfg.output_summary);
    if (!js) throw InputError("cannot write file: " + cfg.output_summary);
    js << summary.dump(2) << '\n';
  }
  return BenchResult{std::move(summary), n_rows};
}

// ---------------------------------------------------------------------------
// Flat JSON config parsing
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<double> sweepable(const nlohmann::json& j, const char* key,
                                     double* scalar_out) {
  if (!j.contains(key)) return {};
  const auto& v = j.at(key);
  if (v.is_array()) {
    auto values = v.get<std::vector<double>>();
    if (values.empty()) throw InputError(std::string("empty sweep array for ") + key);
    *scalar_out = values.front();
    return values.size() == 1 ? std::vector<double>{} : values;
  }
  *scalar_out = v.get<double>();
  return {};
}

inline std::vector<Eigen::Index> sweepable_size(const nlohmann::json& j, const char* key,
                                                Eigen::Index* scalar_out) {
  if (!j.contains(key)) return {};
  const auto& v = j.at(key);
  if (v.is_array()) {
    auto values = v.get<std::vector<Eigen::Index>>();
    if (values.empty()) throw InputError(std::string("empty sweep array for ") + key);
    *scalar_out = values.front();
    return values.size() == 1 ? std::vector<Eigen::Index>{} : values;
  }
  *scalar_out = v.get<Eigen::Index>();
  return {};
}

}  // namespace detail

inline BenchConfig parse_bench_config(const nlohmann::json& j) {
  BenchConfig cfg;

  const std::string scenario = j.value("scenario", std::string("synthetic"));
  if (scenario == "synthetic") {
    SyntheticConfig syn;
    syn.p = j.value("p", static_cast<Eigen::Index>(10));
    cfg.sweep_pi = detail::sweepable(j, "pi", &syn.pi);
    cfg.sweep_pi_prime = detail::sweepable(j, "pi_prime", &syn.pi_prime);
    cfg.sweep_c = detail::sweepable(j, "c", &syn.c);
    cfg.sweep_g = detail::sweepable(j, "g", &syn.disturbance_g);
    cfg.sweep_n_source = detail::sweepable_size(j, "n_source", &syn.n_source);
    cfg.sweep_n_target = detail::sweepable_size(j, "n_target", &syn.n_target);
    if (j.contains("shift")) {
      const auto shift = j.at("shift").get<std::vector<double>>();
      syn.shift = Eigen::Map<const Eigen::VectorXd>(shift.data(),
                                                    static_cast<Eigen::Index>(shift.size()));
    }
    cfg.base.scenario = syn;
  } else if (scenario == "csv") {
    CsvScenario sc;
    sc.path = j.at("csv_path").get<std::string>();
    sc.label_column = j.at("label_column").get<std::string>();
    sc.positive_value = j.at("positive_value").get<std::string>();
    cfg.sweep_pi = detail::sweepable(j, "pi", &sc.pi);
    cfg.sweep_pi_prime = detail::sweepable(j, "pi_prime", &sc.pi_prime);
    cfg.sweep_c = detail::sweepable(j, "c", &sc.c);
    cfg.base.scenario = sc;
  } else {
    throw InputError("scenario must be 'synthetic' or 'csv', got '" + scenario + "'");
  }

  if (j.contains("methods")) {
    cfg.base.methods.clear();
    for (const auto& m : j.at("methods")) {
      cfg.base.methods.push_back(method_from_string(m.get<std::string>()));
    }
  }
  cfg.base.repetitions = j.value("repetitions", 20);
  cfg.base.delta = j.value("delta", 0.05);
  cfg.base.seed = j.value("seed", static_cast<std::uint64_t>(0));
  cfg.base.standardize = j.value("standardize", false);
  cfg.base.record_timing = j.value("record_timing", false);
  cfg.base.threads = j.value("threads", 1);
  cfg.base.median_heuristic = j.value("median_heuristic", false);
  if (j.contains("tau")) cfg.base.tau = j.at("tau").get<double>();

  double po = 0.0;
  cfg.sweep_pi_override = detail::sweepable(j, "pi_override", &po);
  if (j.contains("pi_override") && cfg.sweep_pi_override.empty()) cfg.base.pi_override = po;

  if (j.contains("km_slope_threshold")) cfg.base.km.slope_threshold = j.at("km_slope_threshold").get<double>();
  if (j.contains("km_fw_max_iter")) cfg.base.km.fw_max_iter = j.at("km_fw_max_iter").get<int>();
  if (j.contains("km_fw_tol")) cfg.base.km.fw_tol = j.at("km_fw_tol").get<double>();
  if (j.contains("km_subsample_cap")) cfg.base.km.subsample_cap = j.at("km_subsample_cap").get<Eigen::Index>();

  cfg.output_csv = j.value("output_csv", std::string("results.csv"));
  cfg.output_summary = j.value("output_summary", std::string("summary.json"));
  return cfg;
}

inline BenchConfig load_bench_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("invalid JSON in " + path + ": " + e.what());
  }
  return parse_bench_config(j);
}

}  // namespace priorshift
