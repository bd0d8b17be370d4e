#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "priorshift/errors.hpp"
#include "priorshift/kernel.hpp"
#include "priorshift/rng.hpp"
#include "priorshift/sample.hpp"

namespace priorshift {

// Mixture-proportion estimation by projecting lam * mean(mix) +
// (1 - lam) * mean(comp) onto the convex hull of the pooled feature maps,
// sweeping lam over a grid and locating where the distance curve starts to
// climb. pi_hat = 1 - 1/lam_hat.
struct KMConfig {
  std::vector<double> lambda_grid = default_lambda_grid();
  int fw_max_iter = 500;
  double fw_tol = 1e-6;            // relative objective decrease
  double slope_threshold = 0.04;   // nu; frozen from a synthetic calibration sweep
  Eigen::Index subsample_cap = 4000;
  std::uint64_t subsample_seed = 0x6b6d3273ULL;

  static std::vector<double> default_lambda_grid() {
    std::vector<double> g;
    g.reserve(181);
    for (int k = 0; k <= 180; ++k) g.push_back(1.0 + 0.05 * k);
    return g;
  }

  void validate() const {
    if (lambda_grid.empty() || lambda_grid.front() != 1.0) {
      throw InputError("lambda grid must start at 1");
    }
    for (std::size_t i = 1; i < lambda_grid.size(); ++i) {
      if (!(lambda_grid[i] > lambda_grid[i - 1])) {
        throw InputError("lambda grid must be strictly increasing");
      }
    }
    if (fw_max_iter < 1) throw InputError("fw_max_iter must be positive");
    if (!(fw_tol > 0.0)) throw InputError("fw_tol must be positive");
    if (!(slope_threshold > 0.0)) throw InputError("slope_threshold must be positive");
    if (subsample_cap < 2) throw InputError("subsample_cap must be at least 2");
  }
};

struct DistanceCurve {
  std::vector<double> lambdas;
  std::vector<double> distances;
  std::vector<bool> weights_converged;
};

struct HullDistance {
  double distance = 0.0;
  bool converged = false;
  int iterations = 0;
};

struct Km2Result {
  double pi_hat = 0.0;
  double lambda_hat = 1.0;
  bool low_confidence = false;  // no slope on the curve exceeded the threshold
  DistanceCurve curve;
};

namespace detail {

// Quadratic data for min over simplex weights w of
//   || v(lam) - sum_i w_i phi(z_i) ||^2 = w'Gw - 2 w'b(lam) + c(lam)
// with v(lam) = lam * mean map(mix) + (1 - lam) * mean map(comp).
//
// Above the subsample cap the projection runs on a seeded uniform subsample
// of each sample (proportional split of the cap). Vertices and mean maps come
// from the same subsampled points, so the mix mean always lies in the hull
// and b_mix, b_comp and the three pairwise mean-kernel values are plain block
// aggregates of the one Gram matrix.
class HullProblem {
 public:
  HullProblem(const KernelConfig& cfg_k, const KMConfig& cfg_km,
              const Sample& mix, const Sample& comp) {
    require_same_dim(mix, comp);

    Eigen::MatrixXd mix_pts = mix.values;
    Eigen::MatrixXd comp_pts = comp.values;
    const Eigen::Index pooled = mix.size() + comp.size();
    if (pooled > cfg_km.subsample_cap) {
      const double share = static_cast<double>(cfg_km.subsample_cap) /
                           static_cast<double>(pooled);
      Eigen::Index k_mix = std::clamp<Eigen::Index>(
          static_cast<Eigen::Index>(std::llround(share * static_cast<double>(mix.size()))),
          1, cfg_km.subsample_cap - 1);
      mix_pts = subsample_rows(mix.values, k_mix, split_seed(cfg_km.subsample_seed, 1));
      comp_pts = subsample_rows(comp.values, cfg_km.subsample_cap - k_mix,
                                split_seed(cfg_km.subsample_seed, 2));
    }
    n_mix_ = mix_pts.rows();

    Eigen::MatrixXd vertices(n_mix_ + comp_pts.rows(), mix_pts.cols());
    vertices.topRows(n_mix_) = mix_pts;
    vertices.bottomRows(comp_pts.rows()) = comp_pts;
    n_vertices_ = vertices.rows();

    const Eigen::VectorXd sq = vertices.rowwise().squaredNorm();
    gram_.noalias() = -2.0 * (vertices * vertices.transpose());
    gram_.colwise() += sq;
    gram_.rowwise() += sq.transpose();
    gram_ = (-cfg_k.tau * gram_.cwiseMax(0.0)).array().exp();

    const Eigen::Index n_comp = n_vertices_ - n_mix_;
    b_mix_ = gram_.leftCols(n_mix_).rowwise().mean();
    b_comp_ = gram_.rightCols(n_comp).rowwise().mean();
    s_mm_ = b_mix_.head(n_mix_).mean();
    s_mc_ = b_comp_.head(n_mix_).mean();
    s_cc_ = b_comp_.tail(n_comp).mean();
  }

  // State of the Frank-Wolfe iterate; g = Gw and q = w'Gw are maintained
  // incrementally and are lambda-independent, so a grid sweep can reuse the
  // state from the previous lambda as a warm start.
  struct State {
    Eigen::VectorXd w;
    Eigen::VectorXd g;
    double q = 0.0;
  };

  // Uniform weights on the mix vertices: the exact minimizer at lam = 1
  // (f = (lam-1)^2 ||mean(mix) - mean(comp)||^2 there), and g, q come free
  // from the Gram block aggregates.
  State mix_uniform_state() const {
    State st;
    st.w = Eigen::VectorXd::Zero(n_vertices_);
    st.w.head(n_mix_).setConstant(1.0 / static_cast<double>(n_mix_));
    st.g = b_mix_;
    st.q = s_mm_;
    return st;
  }

  // Pairwise Frank-Wolfe with exact line search: each step moves weight from
  // the active vertex with the largest gradient coordinate toward the vertex
  // with the smallest one. The objective is quadratic, so the step size is
  // closed-form; the objective never increases, and pairwise steps avoid the
  // zigzag stall of classic FW at boundary optima. Stops at optimality
  // (nonpositive FW gap), on a sub-tolerance relative decrease of a full
  // step, or at max_iter.
  HullDistance solve(double lam, int max_iter, double tol, State& st,
                     std::vector<double>* objective_trace = nullptr) const {
    const Eigen::VectorXd b = lam * b_mix_ + (1.0 - lam) * b_comp_;
    const double c = lam * lam * s_mm_ + 2.0 * lam * (1.0 - lam) * s_mc_ +
                     (1.0 - lam) * (1.0 - lam) * s_cc_;

    double r = st.w.dot(b);
    double f = st.q - 2.0 * r + c;
    if (objective_trace) objective_trace->push_back(f);

    HullDistance out;
    int t = 0;
    for (; t < max_iter; ++t) {
      Eigen::Index s;
      (st.g - b).minCoeff(&s);
      if ((st.q - r) - (st.g[s] - b[s]) <= 0.0) {  // FW gap at this iterate
        out.converged = true;
        break;
      }

      // Largest gradient coordinate among active weights.
      Eigen::Index a = s;
      double worst = -std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < n_vertices_; ++i) {
        if (st.w[i] > 0.0) {
          const double grad_i = st.g[i] - b[i];
          if (grad_i > worst) {
            worst = grad_i;
            a = i;
          }
        }
      }
      const double pair_gap = (st.g[a] - b[a]) - (st.g[s] - b[s]);
      if (pair_gap <= 0.0) {
        out.converged = true;
        break;
      }
      const double curv = gram_(s, s) - 2.0 * gram_(s, a) + gram_(a, a);
      const double eta_max = st.w[a];
      const double eta = curv > 0.0 ? std::min(eta_max, pair_gap / curv) : eta_max;
      const bool drop_step = eta >= eta_max;

      st.q += 2.0 * eta * (st.g[s] - st.g[a]) + eta * eta * curv;
      r += eta * (b[s] - b[a]);
      st.g += eta * (gram_.col(s) - gram_.col(a));
      st.w[s] += eta;
      st.w[a] = drop_step ? 0.0 : st.w[a] - eta;

      const double f_new = st.q - 2.0 * r + c;
      if (objective_trace) objective_trace->push_back(f_new);
      const double decrease = f - f_new;
      f = f_new;
      // Drop steps can make arbitrarily small progress without being near
      // the optimum; only a line-search-limited step may trigger the stop.
      if (!drop_step && decrease <= tol * std::max(std::abs(f) + decrease, 1e-30)) {
        out.converged = true;
        ++t;
        break;
      }
    }
    out.iterations = t;
    out.distance = std::sqrt(std::max(f, 0.0));
    return out;
  }

  HullDistance solve_fresh(double lam, int max_iter, double tol,
                           std::vector<double>* objective_trace = nullptr) const {
    State st = mix_uniform_state();
    return solve(lam, max_iter, tol, st, objective_trace);
  }

  Eigen::Index n_vertices() const noexcept { return n_vertices_; }

 private:
  static Eigen::MatrixXd subsample_rows(const Eigen::MatrixXd& src, Eigen::Index k,
                                        std::uint64_t seed) {
    if (k >= src.rows()) return src;
    Rng rng(seed);
    auto idx = sample_without_replacement(src.rows(), k, rng);
    std::sort(idx.begin(), idx.end());
    Eigen::MatrixXd out(k, src.cols());
    for (Eigen::Index i = 0; i < k; ++i) {
      out.row(i) = src.row(idx[static_cast<std::size_t>(i)]);
    }
    return out;
  }

  Eigen::MatrixXd gram_;
  Eigen::VectorXd b_mix_, b_comp_;
  double s_mm_ = 0, s_mc_ = 0, s_cc_ = 0;
  Eigen::Index n_vertices_ = 0, n_mix_ = 0;
};

}  // namespace detail

inline HullDistance hull_distance(const KernelConfig& cfg_k, const KMConfig& cfg_km,
                                  const Sample& mix, const Sample& comp, double lam) {
  cfg_km.validate();
  if (!(lam >= 1.0)) throw InputError("lambda must be at least 1");
  detail::HullProblem problem(cfg_k, cfg_km, mix, comp);
  return problem.solve_fresh(lam, cfg_km.fw_max_iter, cfg_km.fw_tol);
}

// Ascending sweep with warm starts: the Frank-Wolfe state is lambda
// independent, so each grid point continues from the previous solution.
inline DistanceCurve distance_curve(const KernelConfig& cfg_k, const KMConfig& cfg_km,
                                    const Sample& mix, const Sample& comp) {
  cfg_km.validate();
  detail::HullProblem problem(cfg_k, cfg_km, mix, comp);
  DistanceCurve curve;
  curve.lambdas = cfg_km.lambda_grid;
  curve.distances.reserve(curve.lambdas.size());
  curve.weights_converged.reserve(curve.lambdas.size());
  auto state = problem.mix_uniform_state();
  for (const double lam : curve.lambdas) {
    const HullDistance hd = problem.solve(lam, cfg_km.fw_max_iter, cfg_km.fw_tol, state);
    curve.distances.push_back(hd.distance);
    curve.weights_converged.push_back(hd.converged);
  }
  return curve;
}

// lam_hat = smallest grid lambda whose forward-difference slope exceeds the
// threshold. d(1) = 0 by construction (the mix mean map lies in the hull), so
// the curve sits at its sampling-noise floor until the combination leaves the
// hull and then climbs roughly linearly. The scan starts at the second
// segment: the first one only measures the jump from the exact-zero point to
// the noise floor.
inline Km2Result km2_prior_detailed(const KernelConfig& cfg_k, const KMConfig& cfg_km,
                                    const Sample& unlabeled, const Sample& positives) {
  Km2Result result;
  result.curve = distance_curve(cfg_k, cfg_km, unlabeled, positives);

  const auto& lam = result.curve.lambdas;
  const auto& dist = result.curve.distances;
  result.low_confidence = true;
  result.lambda_hat = lam.back();
  for (std::size_t i = 1; i + 1 < lam.size(); ++i) {
    const double slope = (dist[i + 1] - dist[i]) / (lam[i + 1] - lam[i]);
    if (slope > cfg_km.slope_threshold) {
      result.lambda_hat = lam[i];
      result.low_confidence = false;
      break;
    }
  }
  result.pi_hat = std::clamp(1.0 - 1.0 / result.lambda_hat, 0.0,
                             std::nextafter(1.0, 0.0));
  return result;
}

inline double km2_prior(const KernelConfig& cfg_k, const KMConfig& cfg_km,
                        const Sample& unlabeled, const Sample& positives) {
  return km2_prior_detailed(cfg_k, cfg_km, unlabeled, positives).pi_hat;
}

// Same procedure with (target, positives): the positive class is shared
// between populations, so the hull projection applies to the target mixture
// unchanged.
inline double km2_ls_target_prior(const KernelConfig& cfg_k, const KMConfig& cfg_km,
                                  const Sample& target, const Sample& positives) {
  return km2_prior_detailed(cfg_k, cfg_km, target, positives).pi_hat;
}

}  // namespace priorshift
