#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "nvrpg/gridworld.hpp"
#include "nvrpg/mdp.hpp"
#include "nvrpg/occupancy.hpp"

namespace nvrpg {

// Exact dynamic-programming oracles. These serve as ground truth in tests,
// acceptance runs and per-iteration logging; nothing here touches an RNG.

/// State-to-state kernel P_pi(s'|s) = sum_a pi(a|s) P(s'|s,a).
inline std::vector<double> policy_kernel(const TabularMdp& mdp, const PolicyTable& policy) {
  const int n = mdp.num_states;
  std::vector<double> kernel(std::size_t(n) * n, 0.0);
  for (int s = 0; s < n; ++s) {
    for (int a = 0; a < mdp.num_actions; ++a) {
      const double pa = policy.probs[sa_index(s, a, mdp.num_actions)];
      if (pa == 0.0) continue;
      auto row = transition_row(mdp, s, a);
      for (int sp = 0; sp < n; ++sp) kernel[std::size_t(s) * n + sp] += pa * row[sp];
    }
  }
  return kernel;
}

/// Discounted state-action occupancy truncated at horizon H, by forward
/// recursion over the state distribution: d_{t+1}(s') = sum_{s,a} d_t(s) pi(a|s) P(s'|s,a).
inline OccupancyVector exact_occupancy_truncated(const TabularMdp& mdp, const PolicyTable& policy,
                                                 int horizon) {
  if (horizon < 1) throw std::invalid_argument("exact_occupancy_truncated: horizon must be >= 1");
  const int n = mdp.num_states;
  const int m = mdp.num_actions;
  OccupancyVector lam = make_occupancy(OccupancyKind::exact_truncated, n, m, horizon);
  std::vector<double> dist = mdp.initial_dist;
  std::vector<double> next(n);
  double discount = 1.0;
  for (int t = 0; t < horizon; ++t) {
    for (int s = 0; s < n; ++s) {
      if (dist[s] == 0.0) continue;
      for (int a = 0; a < m; ++a)
        lam.at(s, a) += discount * dist[s] * policy.probs[sa_index(s, a, m)];
    }
    if (t + 1 == horizon) break;
    std::fill(next.begin(), next.end(), 0.0);
    for (int s = 0; s < n; ++s) {
      if (dist[s] == 0.0) continue;
      for (int a = 0; a < m; ++a) {
        const double mass = dist[s] * policy.probs[sa_index(s, a, m)];
        if (mass == 0.0) continue;
        auto row = transition_row(mdp, s, a);
        for (int sp = 0; sp < n; ++sp) next[sp] += mass * row[sp];
      }
    }
    dist.swap(next);
    discount *= mdp.gamma;
  }
  return lam;
}

/// Infinite-horizon occupancy via the linear fixed point
/// (I - gamma P_pi^T) d = rho, then lambda(s,a) = d(s) pi(a|s).
inline OccupancyVector exact_occupancy_infinite(const TabularMdp& mdp, const PolicyTable& policy) {
  const int n = mdp.num_states;
  const std::vector<double> kernel = policy_kernel(mdp, policy);
  Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n);
  for (int s = 0; s < n; ++s)
    for (int sp = 0; sp < n; ++sp) system(sp, s) -= mdp.gamma * kernel[std::size_t(s) * n + sp];
  Eigen::VectorXd rho(n);
  for (int s = 0; s < n; ++s) rho(s) = mdp.initial_dist[s];
  Eigen::VectorXd dist = system.partialPivLu().solve(rho);

  OccupancyVector lam = make_occupancy(OccupancyKind::exact_infinite, n, mdp.num_actions);
  for (int s = 0; s < n; ++s)
    for (int a = 0; a < mdp.num_actions; ++a)
      lam.at(s, a) = dist(s) * policy.probs[sa_index(s, a, mdp.num_actions)];
  return lam;
}

/// Expected discounted return <lambda^pi, r> from the infinite-horizon oracle.
inline double exact_return(const TabularMdp& mdp, const PolicyTable& policy,
                           const RewardVector& reward) {
  if (reward.size() != std::size_t(mdp.num_states) * mdp.num_actions)
    throw std::invalid_argument("exact_return: reward dimension mismatch");
  OccupancyVector lam = exact_occupancy_infinite(mdp, policy);
  double value = 0.0;
  for (std::size_t i = 0; i < reward.size(); ++i) value += lam.values[i] * reward[i];
  return value;
}

struct ValueIterationResult {
  std::vector<double> values;  // V*(s)
  double optimal_return = 0.0; // J* = sum_s rho(s) V*(s)
  int iterations = 0;
};

/// Bellman-optimality iteration to sup-norm tolerance tol.
inline ValueIterationResult value_iteration(const TabularMdp& mdp, const RewardVector& reward,
                                            double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("value_iteration: tol must be positive");
  if (reward.size() != std::size_t(mdp.num_states) * mdp.num_actions)
    throw std::invalid_argument("value_iteration: reward dimension mismatch");
  const int n = mdp.num_states;
  std::vector<double> values(n, 0.0), next(n);
  // residual eps implies sup-norm error eps*gamma/(1-gamma); iterate until
  // the implied error is below tol
  const double stop = tol * (1.0 - mdp.gamma) / mdp.gamma;
  int iter = 0;
  for (;; ++iter) {
    double residual = 0.0;
    for (int s = 0; s < n; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < mdp.num_actions; ++a) {
        double q = reward[sa_index(s, a, mdp.num_actions)];
        auto row = transition_row(mdp, s, a);
        for (int sp = 0; sp < n; ++sp) q += mdp.gamma * row[sp] * values[sp];
        best = std::max(best, q);
      }
      next[s] = best;
      residual = std::max(residual, std::abs(best - values[s]));
    }
    values.swap(next);
    if (residual <= stop || iter > 1000000) break;
  }
  double j_star = 0.0;
  for (int s = 0; s < n; ++s) j_star += mdp.initial_dist[s] * values[s];
  return {std::move(values), j_star, iter + 1};
}

/// Policy value V^pi for a fixed reward via direct linear solve.
inline std::vector<double> exact_policy_values(const TabularMdp& mdp, const PolicyTable& policy,
                                               const RewardVector& reward) {
  const int n = mdp.num_states;
  const std::vector<double> kernel = policy_kernel(mdp, policy);
  Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n);
  for (int s = 0; s < n; ++s)
    for (int sp = 0; sp < n; ++sp) system(s, sp) -= mdp.gamma * kernel[std::size_t(s) * n + sp];
  Eigen::VectorXd r_pi(n);
  for (int s = 0; s < n; ++s) {
    double rs = 0.0;
    for (int a = 0; a < mdp.num_actions; ++a)
      rs += policy.probs[sa_index(s, a, mdp.num_actions)] * reward[sa_index(s, a, mdp.num_actions)];
    r_pi(s) = rs;
  }
  Eigen::VectorXd v = system.partialPivLu().solve(r_pi);
  return std::vector<double>(v.data(), v.data() + n);
}

/// Q^pi(s,a) = r(s,a) + gamma sum_{s'} P(s'|s,a) V^pi(s').
inline std::vector<double> exact_q_values(const TabularMdp& mdp, const PolicyTable& policy,
                                          const RewardVector& reward) {
  const std::vector<double> values = exact_policy_values(mdp, policy, reward);
  std::vector<double> q(reward.size());
  for (int s = 0; s < mdp.num_states; ++s)
    for (int a = 0; a < mdp.num_actions; ++a) {
      double qa = reward[sa_index(s, a, mdp.num_actions)];
      auto row = transition_row(mdp, s, a);
      for (int sp = 0; sp < mdp.num_states; ++sp) qa += mdp.gamma * row[sp] * values[sp];
      q[sa_index(s, a, mdp.num_actions)] = qa;
    }
  return q;
}

}  // namespace nvrpg
