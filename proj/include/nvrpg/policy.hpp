#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "nvrpg/mdp.hpp"

namespace nvrpg {

/// Uniform bounds on the feature gradients of the softmax energy:
/// l_psi bounds ||grad psi|| and L_psi bounds ||grad^2 psi||. For the linear
/// parametrizations shipped here L_psi is exactly 0.
struct PolicyConstants {
  double l_psi = 1.0;
  double L_psi = 0.0;
};

/// Softmax policy pi(a|s) = exp(psi(s,a;theta)) / sum_a' exp(psi(s,a';theta)).
///
/// Two energy parametrizations: tabular (psi = theta_{s,a}, d = |S||A|) and
/// linear features (psi = <feat(s,a), theta>). Probabilities are computed in
/// the log domain with max-subtraction; scores reuse the same stabilized
/// probabilities. The class holds structure only; theta is always passed in,
/// so parameters stay immutable values.
class SoftmaxPolicy {
 public:
  /// Tabular softmax over num_states x num_actions.
  SoftmaxPolicy(int num_states, int num_actions)
      : num_states_(num_states), num_actions_(num_actions), dim_(num_states * num_actions) {
    if (num_states <= 0 || num_actions <= 0)
      throw std::invalid_argument("softmax policy: positive state/action counts required");
  }

  /// Linear-feature softmax: features is (|S|*|A|) x dim row-major.
  SoftmaxPolicy(int num_states, int num_actions, int dim, std::vector<double> features)
      : num_states_(num_states),
        num_actions_(num_actions),
        dim_(dim),
        features_(std::move(features)) {
    if (features_.size() != std::size_t(num_states) * num_actions * dim)
      throw std::invalid_argument("softmax policy: feature matrix has wrong size");
  }

  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }
  int dim() const { return dim_; }
  bool tabular() const { return features_.empty(); }

  PolicyConstants constants() const {
    if (tabular()) return {1.0, 0.0};
    double max_norm = 0.0;
    for (int i = 0; i < num_states_ * num_actions_; ++i) {
      double sq = 0.0;
      for (int k = 0; k < dim_; ++k) sq += feature(i, k) * feature(i, k);
      max_norm = std::max(max_norm, std::sqrt(sq));
    }
    return {max_norm, 0.0};
  }

  double energy(std::span<const double> theta, int s, int a) const {
    if (tabular()) return theta[sa_index(s, a, num_actions_)];
    const int idx = sa_index(s, a, num_actions_);
    double e = 0.0;
    for (int k = 0; k < dim_; ++k) e += feature(idx, k) * theta[k];
    return e;
  }

  /// pi(.|s); sums to 1 within 1e-12 and is strictly positive for finite theta.
  void action_distribution(std::span<const double> theta, int s, std::span<double> out) const {
    double max_e = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < num_actions_; ++a) {
      out[a] = energy(theta, s, a);
      max_e = std::max(max_e, out[a]);
    }
    double total = 0.0;
    for (int a = 0; a < num_actions_; ++a) {
      out[a] = std::exp(out[a] - max_e);
      total += out[a];
    }
    for (int a = 0; a < num_actions_; ++a) out[a] /= total;
  }

  std::vector<double> action_distribution(std::span<const double> theta, int s) const {
    std::vector<double> probs(num_actions_);
    action_distribution(theta, s, probs);
    return probs;
  }

  double log_prob(std::span<const double> theta, int s, int a) const {
    double max_e = -std::numeric_limits<double>::infinity();
    for (int b = 0; b < num_actions_; ++b) max_e = std::max(max_e, energy(theta, s, b));
    double total = 0.0;
    for (int b = 0; b < num_actions_; ++b) total += std::exp(energy(theta, s, b) - max_e);
    return energy(theta, s, a) - max_e - std::log(total);
  }

  /// grad_theta log pi(a|s) = grad psi(s,a) - sum_a' pi(a'|s) grad psi(s,a').
  void score(std::span<const double> theta, int s, int a, std::span<double> out) const {
    std::fill(out.begin(), out.end(), 0.0);
    add_scaled_score(theta, s, a, 1.0, out);
  }

  std::vector<double> score(std::span<const double> theta, int s, int a) const {
    std::vector<double> g(dim_, 0.0);
    add_scaled_score(theta, s, a, 1.0, g);
    return g;
  }

  /// acc += coeff * score(s,a); sparse for the tabular case.
  void add_scaled_score(std::span<const double> theta, int s, int a, double coeff,
                        std::span<double> acc) const {
    thread_local std::vector<double> probs;
    probs.resize(num_actions_);
    action_distribution(theta, s, probs);
    if (tabular()) {
      const int base = s * num_actions_;
      acc[base + a] += coeff;
      for (int b = 0; b < num_actions_; ++b) acc[base + b] -= coeff * probs[b];
      return;
    }
    const int idx = sa_index(s, a, num_actions_);
    for (int k = 0; k < dim_; ++k) acc[k] += coeff * feature(idx, k);
    for (int b = 0; b < num_actions_; ++b) {
      const double w = coeff * probs[b];
      const int idx_b = sa_index(s, b, num_actions_);
      for (int k = 0; k < dim_; ++k) acc[k] -= w * feature(idx_b, k);
    }
  }

  /// Dense pi(a|s) table for all states.
  PolicyTable table(std::span<const double> theta) const {
    PolicyTable tbl;
    tbl.num_states = num_states_;
    tbl.num_actions = num_actions_;
    tbl.probs.resize(std::size_t(num_states_) * num_actions_);
    for (int s = 0; s < num_states_; ++s)
      action_distribution(theta, s,
                          std::span<double>(tbl.probs.data() + std::size_t(s) * num_actions_,
                                            std::size_t(num_actions_)));
    return tbl;
  }

  std::vector<double> zero_theta() const { return std::vector<double>(dim_, 0.0); }

 private:
  double feature(int pair_idx, int k) const { return features_[std::size_t(pair_idx) * dim_ + k]; }

  int num_states_;
  int num_actions_;
  int dim_;
  std::vector<double> features_;  // empty => tabular
};

/// theta + alpha * direction/||direction||; returns theta unchanged when the
/// direction is exactly zero. Non-finite directions are rejected.
inline std::vector<double> normalized_step(std::span<const double> theta,
                                           std::span<const double> direction, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("normalized_step: alpha must be positive");
  if (theta.size() != direction.size())
    throw std::invalid_argument("normalized_step: dimension mismatch");
  double sq = 0.0;
  for (double d : direction) {
    if (!std::isfinite(d)) throw std::runtime_error("normalized_step: non-finite direction");
    sq += d * d;
  }
  std::vector<double> next(theta.begin(), theta.end());
  if (sq == 0.0) return next;  // zero direction: keep the iterate
  const double scale = alpha / std::sqrt(sq);
  for (std::size_t i = 0; i < next.size(); ++i) next[i] += scale * direction[i];
  return next;
}

/// Deterministic ceiling exp(2*H*l_psi*alpha) on any realized IS weight
/// between consecutive normalized iterates at step size alpha.
inline double is_weight_bound(const PolicyConstants& constants, int horizon, double alpha) {
  if (horizon < 0 || alpha < 0.0 || constants.l_psi < 0.0)
    throw std::invalid_argument("is_weight_bound: nonnegative inputs required");
  return std::exp(2.0 * horizon * constants.l_psi * alpha);
}

}  // namespace nvrpg
