#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "nvrpg/mdp.hpp"
#include "nvrpg/occupancy.hpp"
#include "nvrpg/policy.hpp"
#include "nvrpg/rng.hpp"

namespace nvrpg {

/// Single-trajectory occupancy estimate lambda(tau) = sum_h gamma^h e_{s_h,a_h}.
/// Entry sum is (1-gamma^H)/(1-gamma) exactly, with at most H nonzeros.
inline OccupancyVector occupancy_estimate(const Trajectory& tau, double gamma, int num_states,
                                          int num_actions) {
  OccupancyVector lam = make_occupancy(OccupancyKind::sampled, num_states, num_actions,
                                       tau.horizon());
  double discount = 1.0;
  for (const auto& [s, a] : tau.steps) {
    lam.values[sa_index(s, a, num_actions)] += discount;
    discount *= gamma;
  }
  return lam;
}

/// In-place variant reusing a dense buffer (hot path of the training loops).
inline void occupancy_estimate_into(const Trajectory& tau, double gamma, int num_actions,
                                    std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  double discount = 1.0;
  for (const auto& [s, a] : tau.steps) {
    out[sa_index(s, a, num_actions)] += discount;
    discount *= gamma;
  }
}

/// Truncated policy gradient estimate with a reward looked up per pair:
/// g(tau, theta, r) = sum_t (sum_{h=t}^{H-1} gamma^h r(s_h,a_h)) score(s_t,a_t),
/// assembled in one backward pass over the reward suffix sums.
template <class RewardAt>
std::vector<double> pg_estimate_with(const Trajectory& tau, const SoftmaxPolicy& policy,
                                     std::span<const double> theta, RewardAt&& reward_at,
                                     double gamma) {
  const int horizon = tau.horizon();
  std::vector<double> suffixes(horizon);
  double discount = 1.0;
  std::vector<double> discounted(horizon);
  for (int t = 0; t < horizon; ++t) {
    const auto& [s, a] = tau.steps[t];
    discounted[t] = discount * reward_at(s, a);
    discount *= gamma;
  }
  double suffix = 0.0;
  for (int t = horizon - 1; t >= 0; --t) {
    suffix += discounted[t];
    suffixes[t] = suffix;
  }
  std::vector<double> g(policy.dim(), 0.0);
  for (int t = 0; t < horizon; ++t) {
    if (suffixes[t] == 0.0) continue;
    policy.add_scaled_score(theta, tau.steps[t].first, tau.steps[t].second, suffixes[t], g);
  }
  return g;
}

inline std::vector<double> pg_estimate(const Trajectory& tau, const SoftmaxPolicy& policy,
                                       std::span<const double> theta, const RewardVector& reward,
                                       double gamma) {
  if (reward.size() != std::size_t(policy.num_states()) * policy.num_actions())
    throw std::invalid_argument("pg_estimate: reward dimension mismatch");
  return pg_estimate_with(
      tau, policy, theta,
      [&](int s, int a) { return reward[sa_index(s, a, policy.num_actions())]; }, gamma);
}

/// IS weight w = prod_h pi_new(a_h|s_h) / pi_old(a_h|s_h), computed as exp of
/// summed log ratios. Strictly positive and finite for softmax policies.
inline double is_weight(const Trajectory& tau, const SoftmaxPolicy& policy,
                        std::span<const double> theta_new, std::span<const double> theta_old) {
  double log_ratio = 0.0;
  for (const auto& [s, a] : tau.steps)
    log_ratio += policy.log_prob(theta_new, s, a) - policy.log_prob(theta_old, s, a);
  if (!std::isfinite(log_ratio)) throw std::runtime_error("is_weight: non-finite log ratio");
  return std::exp(log_ratio);
}

/// One-rollout Monte-Carlo probe of the truncated occupancy at a single pair:
/// sum_{t<H} gamma^t 1{s_t=s, a_t=a}. Unbiased for lambda_H(s,a).
inline double mc_truncated_occupancy_at(const TabularMdp& mdp, const PolicyTable& policy, int s,
                                        int a, int horizon, Rng& rng) {
  if (s < 0 || s >= mdp.num_states || a < 0 || a >= mdp.num_actions)
    throw std::invalid_argument("mc_truncated_occupancy_at: pair out of range");
  Trajectory tau = sample_trajectory(mdp, policy, horizon, rng);
  double estimate = 0.0;
  double discount = 1.0;
  for (const auto& [st, at] : tau.steps) {
    if (st == s && at == a) estimate += discount;
    discount *= mdp.gamma;
  }
  return estimate;
}

/// Allocation-free probe over prebuilt cumulative transition rows; draw
/// order matches the Trajectory-based overload.
inline double mc_truncated_occupancy_at(const TabularMdp& mdp, const detail::TransitionCdf& cdf,
                                        const PolicyTable& policy, int s, int a, int horizon,
                                        Rng& rng) {
  double estimate = 0.0;
  double discount = 1.0;
  int state = rng.categorical(mdp.initial_dist);
  for (int t = 0; t < horizon; ++t) {
    int action = rng.categorical(policy.row(state));
    if (state == s && action == a) estimate += discount;
    discount *= mdp.gamma;
    if (t + 1 < horizon)
      state = rng.categorical_cdf(cdf.row(std::size_t(sa_index(state, action, mdp.num_actions))));
  }
  return estimate;
}

/// Minibatch average of the truncated probe.
inline double mc_truncated_occupancy_at(const TabularMdp& mdp, const PolicyTable& policy, int s,
                                        int a, int horizon, int batch_size, Rng& rng) {
  if (batch_size < 1) throw std::invalid_argument("mc_truncated_occupancy_at: batch_size >= 1");
  double total = 0.0;
  for (int i = 0; i < batch_size; ++i)
    total += mc_truncated_occupancy_at(mdp, policy, s, a, horizon, rng);
  return total / batch_size;
}

/// Geometric-horizon probe of the untruncated occupancy: draw
/// H ~ Geom(1-gamma) on {0,1,...}, roll out H steps and return
/// 1{s_H=s, a_H=a}. Expectation is (1-gamma) * lambda(s,a).
inline double geometric_occupancy_at(const TabularMdp& mdp, const PolicyTable& policy, int s, int a,
                                     Rng& rng) {
  if (s < 0 || s >= mdp.num_states || a < 0 || a >= mdp.num_actions)
    throw std::invalid_argument("geometric_occupancy_at: pair out of range");
  const int random_horizon = rng.geometric(mdp.gamma);
  int state = rng.categorical(mdp.initial_dist);
  int action = rng.categorical(policy.row(state));
  for (int h = 0; h < random_horizon; ++h) {
    state = rng.categorical(transition_row(mdp, state, action));
    action = rng.categorical(policy.row(state));
  }
  return (state == s && action == a) ? 1.0 : 0.0;
}

}  // namespace nvrpg
