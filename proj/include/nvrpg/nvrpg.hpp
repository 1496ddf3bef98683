#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nvrpg/dp.hpp"
#include "nvrpg/estimators.hpp"
#include "nvrpg/exact_logger.hpp"
#include "nvrpg/gaussian.hpp"
#include "nvrpg/mdp.hpp"
#include "nvrpg/occupancy.hpp"
#include "nvrpg/policy.hpp"
#include "nvrpg/rng.hpp"
#include "nvrpg/schedule.hpp"
#include "nvrpg/train_log.hpp"
#include "nvrpg/utility.hpp"

namespace nvrpg {

/// Exact gradient of theta -> F(lambda(theta)) on a tabular MDP, assembled
/// from the DP oracles: grad = sum_{s,a} lambda(s,a) Q(s,a) score(s,a) with
/// the reward channel set to grad_lambda F at the exact occupancy.
inline std::vector<double> exact_objective_gradient(const TabularMdp& mdp,
                                                    const SoftmaxPolicy& policy,
                                                    std::span<const double> theta,
                                                    const UtilitySpec& utility) {
  const PolicyTable tbl = policy.table(theta);
  const OccupancyVector lam = exact_occupancy_infinite(mdp, tbl);
  const RewardVector r = utility_grad(utility, lam);
  const std::vector<double> q = exact_q_values(mdp, tbl, r);
  std::vector<double> grad(policy.dim(), 0.0);
  for (int s = 0; s < mdp.num_states; ++s)
    for (int a = 0; a < mdp.num_actions; ++a) {
      const double mass = lam.at(s, a) * q[sa_index(s, a, mdp.num_actions)];
      if (mass != 0.0) policy.add_scaled_score(theta, s, a, mass, grad);
    }
  return grad;
}

/// Serializable mid-run state of the variance-reduced loops; together with
/// the config it pins an exact resume point.
struct RunState {
  int next_t = 1;  // loop index about to execute
  std::vector<double> theta;       // theta_{next_t}
  std::vector<double> theta_prev;  // theta_{next_t - 1}
  std::vector<double> lambda;      // recursive occupancy estimate (general only)
  std::vector<double> d;           // momentum direction d_{next_t - 1}
  std::vector<double> r_prev;      // reward r_{next_t - 1} (general only)
  std::vector<double> r_prev2;     // reward r_{next_t - 2} (general only)
  std::array<std::uint64_t, 4> rng_state{};
  long long steps = 0;
};

/// Normalized variance-reduced PG for general utilities. One trajectory per
/// iteration; recursive momentum on both the occupancy estimate and the
/// policy gradient; every parameter move has length alpha_t.
///
/// Passing `resume` continues a checkpointed run (the log then covers only
/// the remaining iterations); `final_state` receives the end-of-run state.
/// `stop_before` pauses the loop ahead of that iteration index, so a run can
/// be split into resumable segments.
inline TrainLog run_nvrpg_general(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                                  std::vector<double> theta0, const UtilitySpec& utility,
                                  const NvrpgConfig& cfg, const RunState* resume = nullptr,
                                  RunState* final_state = nullptr, int stop_before = -1) {
  const int H = horizon_for(cfg, mdp.gamma);
  const int num_pairs = mdp.num_states * mdp.num_actions;
  const detail::TransitionCdf cdf(mdp);
  const PolicyConstants constants = policy.constants();
  const double gamma = mdp.gamma;

  TrainLog log;
  detail::ExactLogger exact{&mdp, &policy, &utility, cfg.exact_log_stride, cfg.log_exact_grad};

  Rng rng(cfg.seed);
  std::vector<double> theta, theta_prev, d;
  OccupancyVector lam = make_occupancy(OccupancyKind::estimate, mdp.num_states, mdp.num_actions);
  std::vector<double> lam_tau(num_pairs);
  RewardVector r_prev, r_prev2;
  long long steps = 0;
  int start_t = 1;

  if (resume != nullptr) {
    theta = resume->theta;
    theta_prev = resume->theta_prev;
    lam.values = resume->lambda;
    d = resume->d;
    r_prev = resume->r_prev;
    r_prev2 = resume->r_prev2;
    rng.set_state(resume->rng_state);
    steps = resume->steps;
    start_t = resume->next_t;
  } else {
    theta = std::move(theta0);
    if (int(theta.size()) != policy.dim())
      throw std::invalid_argument("run_nvrpg_general: theta dimension mismatch");
    const Trajectory tau0 = sample_trajectory(mdp, cdf, policy.table(theta), H, rng);
    steps += H;
    occupancy_estimate_into(tau0, gamma, mdp.num_actions, lam.values);
    r_prev = utility_grad(utility, lam);  // r_0; the listing also sets r_{-1} = r_0
    r_prev2 = r_prev;
    d = pg_estimate(tau0, policy, theta, r_prev, gamma);

    TrainRow row;
    row.t = 0;
    row.steps = steps;
    row.alpha = step_size(cfg);
    row.d_norm = norm2(d);
    exact.fill(row, theta, 0, cfg.T - 1);
    log.rows.push_back(row);

    if (row.d_norm == 0.0) ++log.zero_direction_events;
    theta_prev = theta;
    theta = normalized_step(theta, d, step_size(cfg));
    if (cfg.keep_iterates) log.iterates.push_back(theta);
  }

  const int end_t = (stop_before >= 1 && stop_before <= cfg.T - 1) ? stop_before - 1 : cfg.T - 1;
  for (int t = start_t; t <= end_t; ++t) {
    const auto [alpha_t, eta_t] = schedule_at(cfg, t);
    const PolicyTable tbl = policy.table(theta);
    const Trajectory tau = sample_trajectory(mdp, cdf, tbl, H, rng);
    steps += H;

    const double w = is_weight(tau, policy, theta_prev, theta);
    const double bound = is_weight_bound(constants, H, step_size(cfg, t - 1));

    occupancy_estimate_into(tau, gamma, mdp.num_actions, lam_tau);
    for (int i = 0; i < num_pairs; ++i) {
      lam.values[i] = eta_t * lam_tau[i] + (1.0 - eta_t) * (lam.values[i] + lam_tau[i] * (1.0 - w));
      log.lambda_min_entry = std::min(log.lambda_min_entry, lam.values[i]);
    }

    RewardVector r_new;
    try {
      r_new = utility_grad(utility, lam);
    } catch (const std::runtime_error& err) {
      log.aborted = true;
      log.abort_reason = err.what();
      break;
    }

    const std::vector<double> g_curr = pg_estimate(tau, policy, theta, r_prev, gamma);
    const std::vector<double> g_prev = pg_estimate(tau, policy, theta_prev, r_prev2, gamma);
    for (int i = 0; i < policy.dim(); ++i) {
      const double v = g_curr[i] - w * g_prev[i];
      d[i] = eta_t * g_curr[i] + (1.0 - eta_t) * (d[i] + v);
    }
    r_prev2 = std::move(r_prev);
    r_prev = std::move(r_new);

    TrainRow row;
    row.t = t;
    row.steps = steps;
    row.alpha = alpha_t;
    row.eta = eta_t;
    row.d_norm = norm2(d);
    row.is_weight = w;
    row.is_bound = bound;
    exact.fill(row, theta, t, cfg.T - 1);
    log.rows.push_back(row);

    if (row.d_norm == 0.0) ++log.zero_direction_events;
    theta_prev = theta;
    theta = normalized_step(theta, d, alpha_t);
    if (cfg.keep_iterates) log.iterates.push_back(theta);
  }

  log.final_theta = theta;
  log.total_env_steps = steps;
  if (final_state != nullptr) {
    final_state->next_t = log.aborted ? 0 : end_t + 1;
    final_state->theta = std::move(theta);
    final_state->theta_prev = std::move(theta_prev);
    final_state->lambda = lam.values;
    final_state->d = std::move(d);
    final_state->r_prev = std::move(r_prev);
    final_state->r_prev2 = std::move(r_prev2);
    final_state->rng_state = rng.state();
    final_state->steps = steps;
  }
  return log;
}

/// Simplified variance-reduced loop for the cumulative-reward objective:
/// the reward vector is fixed, so no occupancy tracking is needed.
inline TrainLog run_nvrpg_standard(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                                   std::vector<double> theta0, const RewardVector& reward,
                                   const NvrpgConfig& cfg, const RunState* resume = nullptr,
                                   RunState* final_state = nullptr, int stop_before = -1) {
  if (reward.size() != std::size_t(mdp.num_states) * mdp.num_actions)
    throw std::invalid_argument("run_nvrpg_standard: reward dimension mismatch");
  const int H = horizon_for(cfg, mdp.gamma);
  const detail::TransitionCdf cdf(mdp);
  const PolicyConstants constants = policy.constants();
  const double gamma = mdp.gamma;
  const UtilitySpec linear_utility = UtilitySpec::linear(reward);

  TrainLog log;
  detail::ExactLogger exact{&mdp, &policy, &linear_utility, cfg.exact_log_stride,
                            cfg.log_exact_grad};

  Rng rng(cfg.seed);
  std::vector<double> theta, theta_prev, d;
  long long steps = 0;
  int start_t = 1;

  if (resume != nullptr) {
    theta = resume->theta;
    theta_prev = resume->theta_prev;
    d = resume->d;
    rng.set_state(resume->rng_state);
    steps = resume->steps;
    start_t = resume->next_t;
  } else {
    theta = std::move(theta0);
    if (int(theta.size()) != policy.dim())
      throw std::invalid_argument("run_nvrpg_standard: theta dimension mismatch");
    const Trajectory tau0 = sample_trajectory(mdp, cdf, policy.table(theta), H, rng);
    steps += H;
    d = pg_estimate(tau0, policy, theta, reward, gamma);

    TrainRow row;
    row.t = 0;
    row.steps = steps;
    row.alpha = step_size(cfg);
    row.d_norm = norm2(d);
    exact.fill(row, theta, 0, cfg.T - 1);
    log.rows.push_back(row);

    if (row.d_norm == 0.0) ++log.zero_direction_events;
    theta_prev = theta;
    theta = normalized_step(theta, d, step_size(cfg));
    if (cfg.keep_iterates) log.iterates.push_back(theta);
  }

  const int end_t = (stop_before >= 1 && stop_before <= cfg.T - 1) ? stop_before - 1 : cfg.T - 1;
  for (int t = start_t; t <= end_t; ++t) {
    const auto [alpha_t, eta_t] = schedule_at(cfg, t);
    const PolicyTable tbl = policy.table(theta);
    const Trajectory tau = sample_trajectory(mdp, cdf, tbl, H, rng);
    steps += H;

    const double w = is_weight(tau, policy, theta_prev, theta);
    const double bound = is_weight_bound(constants, H, step_size(cfg, t - 1));

    const std::vector<double> g_curr = pg_estimate(tau, policy, theta, reward, gamma);
    const std::vector<double> g_prev = pg_estimate(tau, policy, theta_prev, reward, gamma);
    for (int i = 0; i < policy.dim(); ++i) {
      const double v = g_curr[i] - w * g_prev[i];
      d[i] = eta_t * g_curr[i] + (1.0 - eta_t) * (d[i] + v);
    }

    TrainRow row;
    row.t = t;
    row.steps = steps;
    row.alpha = alpha_t;
    row.eta = eta_t;
    row.d_norm = norm2(d);
    row.is_weight = w;
    row.is_bound = bound;
    exact.fill(row, theta, t, cfg.T - 1);
    log.rows.push_back(row);

    if (row.d_norm == 0.0) ++log.zero_direction_events;
    theta_prev = theta;
    theta = normalized_step(theta, d, alpha_t);
    if (cfg.keep_iterates) log.iterates.push_back(theta);
  }

  log.final_theta = theta;
  log.total_env_steps = steps;
  if (final_state != nullptr) {
    final_state->next_t = end_t + 1;
    final_state->theta = std::move(theta);
    final_state->theta_prev = std::move(theta_prev);
    final_state->d = std::move(d);
    final_state->rng_state = rng.state();
    final_state->steps = steps;
  }
  return log;
}

/// Gaussian-policy variant on the continuous chain (cumulative reward only).
/// J is evaluated by grid quadrature at the logging stride; no deterministic
/// IS ceiling exists for Gaussian policies, so is_bound stays empty.
inline TrainLog run_nvrpg_standard(const ContinuousChain& chain, const GaussianPolicy& policy,
                                   std::vector<double> theta0, const NvrpgConfig& cfg) {
  const int H = horizon_for(cfg, chain.gamma);
  TrainLog log;
  Rng rng(cfg.seed);
  std::vector<double> theta = std::move(theta0);
  if (int(theta.size()) != policy.dim())
    throw std::invalid_argument("run_nvrpg_standard: theta dimension mismatch");
  std::vector<double> theta_prev, d;
  long long steps = 0;

  auto log_exact = [&](TrainRow& row, int t) {
    if (cfg.exact_log_stride <= 0) return;
    if (t % cfg.exact_log_stride != 0 && t != cfg.T - 1) return;
    row.j_exact = quadrature_return(chain, policy, theta);
    row.f_exact = row.j_exact;
  };

  {
    const ContinuousTrajectory tau0 = sample_trajectory(chain, policy, theta, H, rng);
    steps += H;
    d = pg_estimate(tau0, policy, theta, chain);
    TrainRow row;
    row.t = 0;
    row.steps = steps;
    row.alpha = step_size(cfg);
    row.d_norm = norm2(d);
    log_exact(row, 0);
    log.rows.push_back(row);
    if (row.d_norm == 0.0) ++log.zero_direction_events;
    theta_prev = theta;
    theta = normalized_step(theta, d, step_size(cfg));
    if (cfg.keep_iterates) log.iterates.push_back(theta);
  }

  for (int t = 1; t <= cfg.T - 1; ++t) {
    const auto [alpha_t, eta_t] = schedule_at(cfg, t);
    const ContinuousTrajectory tau = sample_trajectory(chain, policy, theta, H, rng);
    steps += H;
    const double w = is_weight(tau, policy, theta_prev, theta);
    const std::vector<double> g_curr = pg_estimate(tau, policy, theta, chain);
    const std::vector<double> g_prev = pg_estimate(tau, policy, theta_prev, chain);
    for (int i = 0; i < policy.dim(); ++i) {
      const double v = g_curr[i] - w * g_prev[i];
      d[i] = eta_t * g_curr[i] + (1.0 - eta_t) * (d[i] + v);
    }
    TrainRow row;
    row.t = t;
    row.steps = steps;
    row.alpha = alpha_t;
    row.eta = eta_t;
    row.d_norm = norm2(d);
    row.is_weight = w;
    log_exact(row, t);
    log.rows.push_back(row);
    if (row.d_norm == 0.0) ++log.zero_direction_events;
    theta_prev = theta;
    theta = normalized_step(theta, d, alpha_t);
    if (cfg.keep_iterates) log.iterates.push_back(theta);
  }

  log.final_theta = theta;
  log.total_env_steps = steps;
  return log;
}

/// Un-variance-reduced baseline: batch-mean occupancy and gradient estimates,
/// plain (unnormalized) constant-step ascent.
struct VanillaPgConfig {
  int T = 100;
  int batch = 10;
  double step = 0.1;
  std::optional<int> horizon_override;
  std::uint64_t seed = 0;
  int exact_log_stride = 1;
  bool log_exact_grad = false;
  bool keep_iterates = false;
};

inline TrainLog run_vanilla_pg(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                               std::vector<double> theta0, const UtilitySpec& utility,
                               const VanillaPgConfig& cfg) {
  if (cfg.T < 1 || cfg.batch < 1) throw std::invalid_argument("run_vanilla_pg: T and batch >= 1");
  if (!(cfg.step > 0.0)) throw std::invalid_argument("run_vanilla_pg: step must be positive");
  const int H = cfg.horizon_override ? *cfg.horizon_override : default_horizon(cfg.T, mdp.gamma);
  const int num_pairs = mdp.num_states * mdp.num_actions;
  const detail::TransitionCdf cdf(mdp);
  const double gamma = mdp.gamma;

  TrainLog log;
  detail::ExactLogger exact{&mdp, &policy, &utility, cfg.exact_log_stride, cfg.log_exact_grad};

  Rng rng(cfg.seed);
  std::vector<double> theta = std::move(theta0);
  if (int(theta.size()) != policy.dim())
    throw std::invalid_argument("run_vanilla_pg: theta dimension mismatch");
  long long steps = 0;

  OccupancyVector lam = make_occupancy(OccupancyKind::estimate, mdp.num_states, mdp.num_actions);
  std::vector<double> lam_tau(num_pairs);
  std::vector<Trajectory> batch(cfg.batch);

  for (int t = 0; t < cfg.T; ++t) {
    const PolicyTable tbl = policy.table(theta);
    std::fill(lam.values.begin(), lam.values.end(), 0.0);
    for (int i = 0; i < cfg.batch; ++i) {
      batch[i] = sample_trajectory(mdp, cdf, tbl, H, rng);
      steps += H;
      occupancy_estimate_into(batch[i], gamma, mdp.num_actions, lam_tau);
      for (int j = 0; j < num_pairs; ++j) lam.values[j] += lam_tau[j];
    }
    for (int j = 0; j < num_pairs; ++j) lam.values[j] /= cfg.batch;

    RewardVector r;
    try {
      r = utility_grad(utility, lam);
    } catch (const std::runtime_error& err) {
      log.aborted = true;
      log.abort_reason = err.what();
      break;
    }

    std::vector<double> g_mean(policy.dim(), 0.0);
    for (int i = 0; i < cfg.batch; ++i) {
      const std::vector<double> g = pg_estimate(batch[i], policy, theta, r, gamma);
      for (int j = 0; j < policy.dim(); ++j) g_mean[j] += g[j];
    }
    for (int j = 0; j < policy.dim(); ++j) g_mean[j] /= cfg.batch;

    TrainRow row;
    row.t = t;
    row.steps = steps;
    row.alpha = cfg.step;
    row.d_norm = norm2(g_mean);
    exact.fill(row, theta, t, cfg.T - 1);
    log.rows.push_back(row);

    if (row.d_norm == 0.0) ++log.zero_direction_events;
    for (int j = 0; j < policy.dim(); ++j) theta[j] += cfg.step * g_mean[j];
    if (cfg.keep_iterates) log.iterates.push_back(theta);
  }

  log.final_theta = theta;
  log.total_env_steps = steps;
  return log;
}

/// Uniform post-hoc draw from the kept iterates {theta_1, ..., theta_T}.
inline const std::vector<double>& select_uniform_iterate(const TrainLog& log, Rng& rng) {
  if (log.iterates.empty())
    throw std::invalid_argument("select_uniform_iterate: run kept no iterates");
  const std::size_t n = log.iterates.size();
  std::size_t k = std::size_t(rng.next_double() * double(n));
  if (k >= n) k = n - 1;
  return log.iterates[k];
}

}  // namespace nvrpg
