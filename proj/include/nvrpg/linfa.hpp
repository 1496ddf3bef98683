#pragma once

#include <cmath>
#include <cstdio>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "nvrpg/dp.hpp"
#include "nvrpg/estimators.hpp"
#include "nvrpg/exact_logger.hpp"
#include "nvrpg/features.hpp"
#include "nvrpg/mdp.hpp"
#include "nvrpg/policy.hpp"
#include "nvrpg/schedule.hpp"
#include "nvrpg/train_log.hpp"
#include "nvrpg/utility.hpp"

namespace nvrpg {

/// Unbiased stochastic gradient of the occupancy regression loss:
/// 2 (<phi(s,a), omega> - lam_hat) phi(s,a).
inline std::vector<double> stochastic_reg_grad(std::span<const double> omega, int s, int a,
                                               double lam_hat, const FeatureMap& phi) {
  if (int(omega.size()) != phi.dim)
    throw std::invalid_argument("stochastic_reg_grad: omega dimension mismatch");
  const double residual = 2.0 * (phi.dot(s, a, omega) - lam_hat);
  auto row = phi.at(s, a);
  std::vector<double> grad(phi.dim);
  for (int k = 0; k < phi.dim; ++k) grad[k] = residual * row[k];
  return grad;
}

/// SGD iterate plus the running average of the post-initialization iterates
/// omega_1..omega_K.
struct RegressionState {
  std::vector<double> omega;
  std::vector<double> average;
  int iterations = 0;

  explicit RegressionState(int dim) : omega(dim, 0.0), average(dim, 0.0) {}

  void step_taken() {
    ++iterations;
    const double w = 1.0 / iterations;
    for (std::size_t k = 0; k < omega.size(); ++k) average[k] += w * (omega[k] - average[k]);
  }
};

enum class OccupancyProbe { truncated, geometric };

struct SgdFitOptions {
  int iterations = 1000;       // K
  double beta = 0.0;           // 0 -> default 1/(8 B^2)
  int horizon = 1;             // H for the truncated probe and the loss
  OccupancyProbe probe = OccupancyProbe::truncated;
  bool sample_states_uniformly = false;  // default: s ~ rho
};

/// Averaged SGD on the occupancy regression: per iteration draw s ~ rho
/// (or uniformly), a ~ Uniform(A), probe lambda at (s,a) with one rollout and
/// take one step from omega_0 = 0. Returns omega_bar = (1/K) sum_k omega_k.
/// env_steps, when given, accumulates the exact number of sampled
/// state-action pairs.
inline std::vector<double> sgd_occupancy_fit(const TabularMdp& mdp, const PolicyTable& policy,
                                             const FeatureMap& phi, const SgdFitOptions& opts,
                                             Rng& rng, long long* env_steps = nullptr) {
  if (opts.iterations < 1) throw std::invalid_argument("sgd_occupancy_fit: K must be >= 1");
  const double beta =
      opts.beta > 0.0 ? opts.beta : 1.0 / (8.0 * phi.norm_bound * phi.norm_bound);
  const detail::TransitionCdf cdf(mdp);
  RegressionState state(phi.dim);
  std::vector<double> uniform_states;
  if (opts.sample_states_uniformly) uniform_states.assign(mdp.num_states, 1.0);

  for (int k = 0; k < opts.iterations; ++k) {
    const int s = opts.sample_states_uniformly ? rng.categorical(uniform_states)
                                               : rng.categorical(mdp.initial_dist);
    int a = int(rng.next_double() * mdp.num_actions);
    if (a >= mdp.num_actions) a = mdp.num_actions - 1;

    double lam_hat = 0.0;
    if (opts.probe == OccupancyProbe::truncated) {
      lam_hat = mc_truncated_occupancy_at(mdp, cdf, policy, s, a, opts.horizon, rng);
      if (env_steps != nullptr) *env_steps += opts.horizon;
    } else {
      // geometric probe estimates (1-gamma) * lambda; undo the normalization
      const int random_horizon = rng.geometric(mdp.gamma);
      int st = rng.categorical(mdp.initial_dist);
      int at = rng.categorical(policy.row(st));
      for (int h = 0; h < random_horizon; ++h) {
        st = rng.categorical_cdf(cdf.row(std::size_t(sa_index(st, at, mdp.num_actions))));
        at = rng.categorical(policy.row(st));
      }
      lam_hat = (st == s && at == a) ? 1.0 / (1.0 - mdp.gamma) : 0.0;
      if (env_steps != nullptr) *env_steps += random_horizon + 1;
    }

    const double residual = 2.0 * beta * (phi.dot(s, a, state.omega) - lam_hat);
    auto row = phi.at(s, a);
    for (int k2 = 0; k2 < phi.dim; ++k2) state.omega[k2] -= residual * row[k2];
    state.step_taken();
  }
  return state.average;
}

/// Exact population regression loss
/// L_theta(omega) = sum_s rho(s) (1/|A|) sum_a (lambda_H(s,a) - <phi(s,a), omega>)^2,
/// evaluated from the DP truncated occupancy. Test-time oracle, tabular only.
inline double regression_loss(const TabularMdp& mdp, const PolicyTable& policy,
                              std::span<const double> omega, const FeatureMap& phi, int horizon) {
  const OccupancyVector lam = exact_occupancy_truncated(mdp, policy, horizon);
  double loss = 0.0;
  for (int s = 0; s < mdp.num_states; ++s) {
    if (mdp.initial_dist[s] == 0.0) continue;
    double state_term = 0.0;
    for (int a = 0; a < mdp.num_actions; ++a) {
      const double err = lam.at(s, a) - phi.dot(s, a, omega);
      state_term += err * err;
    }
    loss += mdp.initial_dist[s] * state_term / mdp.num_actions;
  }
  return loss;
}

struct LinfaConfig {
  int T = 100;
  int batch = 8;        // N outer trajectories per iteration
  int sgd_iterations = 1000;  // K
  double alpha = 0.1;   // constant, unnormalized outer step
  double beta = 0.0;    // 0 -> 1/(8 B^2)
  std::optional<int> horizon_override;
  std::uint64_t seed = 0;
  OccupancyProbe probe = OccupancyProbe::truncated;
  bool sample_states_uniformly = false;
  bool use_exact_fit = false;  // replace the SGD fit by the DP truncated occupancy
  int exact_log_stride = 1;
  bool keep_iterates = false;
};

/// Stochastic PG with the occupancy measure replaced by its fitted linear
/// model. Per outer iteration: refit omega under the current policy, form the
/// utility gradient lazily at queried pairs only, then take one unnormalized
/// batch-mean PG step using the previous iteration's reward (one-step lag,
/// as the recursion requires; the pre-loop fit seeds that lag).
inline TrainLog run_linfa_pg(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                             std::vector<double> theta0, const UtilitySpec& utility,
                             const FeatureMap& phi, const LinfaConfig& cfg) {
  if (cfg.T < 1 || cfg.batch < 1) throw std::invalid_argument("run_linfa_pg: T and N >= 1");
  if (!(cfg.alpha > 0.0)) throw std::invalid_argument("run_linfa_pg: alpha must be positive");
  if (phi.num_states != mdp.num_states || phi.num_actions != mdp.num_actions)
    throw std::invalid_argument("run_linfa_pg: feature map shape mismatch");
  const int H = cfg.horizon_override ? *cfg.horizon_override : default_horizon(cfg.T, mdp.gamma);
  const detail::TransitionCdf cdf(mdp);
  const double gamma = mdp.gamma;

  double rho_min = 1.0;
  for (double p : mdp.initial_dist) rho_min = std::min(rho_min, p);
  if (rho_min <= 0.0 && !cfg.sample_states_uniformly && !cfg.use_exact_fit)
    std::fprintf(stderr,
                 "run_linfa_pg: initial distribution has zero-mass states; "
                 "the regression never sees them\n");

  TrainLog log;
  detail::ExactLogger exact{&mdp, &policy, &utility, cfg.exact_log_stride, false};

  Rng rng(cfg.seed);
  std::vector<double> theta = std::move(theta0);
  if (int(theta.size()) != policy.dim())
    throw std::invalid_argument("run_linfa_pg: theta dimension mismatch");
  long long steps = 0;

  SgdFitOptions fit_opts;
  fit_opts.iterations = cfg.sgd_iterations;
  fit_opts.beta = cfg.beta;
  fit_opts.horizon = H;
  fit_opts.probe = cfg.probe;
  fit_opts.sample_states_uniformly = cfg.sample_states_uniformly;

  // Fitted occupancy model: either <phi, omega> or the exact DP values.
  struct Fit {
    std::vector<double> omega;        // empty when exact
    std::vector<double> exact_values; // dense lambda_H when exact
  };
  auto make_fit = [&](const PolicyTable& tbl) {
    Fit fit;
    if (cfg.use_exact_fit) {
      fit.exact_values = exact_occupancy_truncated(mdp, tbl, H).values;
    } else {
      fit.omega = sgd_occupancy_fit(mdp, tbl, phi, fit_opts, rng, &steps);
    }
    return fit;
  };
  auto lam_at = [&](const Fit& fit, int s, int a) {
    return fit.omega.empty() ? fit.exact_values[sa_index(s, a, mdp.num_actions)]
                             : phi.dot(s, a, fit.omega);
  };

  // Lazy utility-gradient accessor; the row sums needed by the log-barrier
  // gradient are memoized per fit.
  struct LazyReward {
    std::vector<double> row_sum;
    std::vector<char> ready;
  };
  LazyReward lazy{std::vector<double>(mdp.num_states, 0.0),
                  std::vector<char>(mdp.num_states, 0)};
  auto reward_at = [&](const Fit& fit, int s, int a) {
    if (utility.kind == UtilitySpec::Kind::linear)
      return utility.reward[sa_index(s, a, mdp.num_actions)];
    if (!lazy.ready[s]) {
      double total = 0.0;
      for (int b = 0; b < mdp.num_actions; ++b) total += lam_at(fit, s, b);
      lazy.row_sum[s] = total;
      lazy.ready[s] = 1;
    }
    return utility_grad_at(utility, sa_index(s, a, mdp.num_actions), lazy.row_sum[s]);
  };

  PolicyTable tbl = policy.table(theta);
  Fit prev_fit = make_fit(tbl);  // seeds r_{-1}

  std::vector<Trajectory> batch(cfg.batch);
  for (int t = 0; t < cfg.T; ++t) {
    tbl = policy.table(theta);
    Fit fit = make_fit(tbl);

    RegressionDiagRow diag;
    diag.t = t;
    diag.k = cfg.use_exact_fit ? 0 : cfg.sgd_iterations;
    const bool diag_row =
        cfg.exact_log_stride > 0 && (t % cfg.exact_log_stride == 0 || t == cfg.T - 1);

    for (int i = 0; i < cfg.batch; ++i) {
      batch[i] = sample_trajectory(mdp, cdf, tbl, H, rng);
      steps += H;
    }

    // r_{t-1}: gradient of the utility at the previous fit
    std::fill(lazy.ready.begin(), lazy.ready.end(), 0);
    std::vector<double> g_mean(policy.dim(), 0.0);
    bool failed = false;
    try {
      for (int i = 0; i < cfg.batch; ++i) {
        const std::vector<double> g = pg_estimate_with(
            batch[i], policy, theta, [&](int s, int a) { return reward_at(prev_fit, s, a); },
            gamma);
        for (int j = 0; j < policy.dim(); ++j) g_mean[j] += g[j];
      }
    } catch (const std::runtime_error& err) {
      log.aborted = true;
      log.abort_reason = err.what();
      failed = true;
    }
    if (failed) break;
    for (int j = 0; j < policy.dim(); ++j) g_mean[j] /= cfg.batch;

    if (diag_row && !cfg.use_exact_fit) {
      diag.final_avg_loss = regression_loss(mdp, tbl, fit.omega, phi, H);
      const OccupancyVector lam_exact = exact_occupancy_truncated(mdp, tbl, H);
      double residual = 0.0;
      int count = 0;
      std::vector<char> seen(std::size_t(mdp.num_states) * mdp.num_actions, 0);
      for (const auto& traj : batch)
        for (const auto& [s, a] : traj.steps) {
          const int idx = sa_index(s, a, mdp.num_actions);
          if (seen[idx]) continue;
          seen[idx] = 1;
          residual += std::abs(lam_at(fit, s, a) - lam_exact.values[idx]);
          ++count;
        }
      diag.fit_residual_at_visited = count > 0 ? residual / count : 0.0;
    } else if (cfg.use_exact_fit) {
      diag.final_avg_loss = 0.0;
      diag.fit_residual_at_visited = 0.0;
    }
    log.regression_rows.push_back(diag);

    TrainRow row;
    row.t = t;
    row.steps = steps;
    row.alpha = cfg.alpha;
    row.d_norm = norm2(g_mean);
    exact.fill(row, theta, t, cfg.T - 1);
    log.rows.push_back(row);

    if (row.d_norm == 0.0) ++log.zero_direction_events;
    for (int j = 0; j < policy.dim(); ++j) theta[j] += cfg.alpha * g_mean[j];
    if (cfg.keep_iterates) log.iterates.push_back(theta);
    prev_fit = std::move(fit);
  }

  log.final_theta = theta;
  log.total_env_steps = steps;
  return log;
}

}  // namespace nvrpg
