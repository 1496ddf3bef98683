#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "nvrpg/gridworld.hpp"
#include "nvrpg/occupancy.hpp"

namespace nvrpg {

/// Objective over occupancy vectors: either linear F(lambda) = <r, lambda>
/// (standard cumulative reward) or the log-barrier exploration objective
/// F(lambda) = sum_s log(sum_a lambda_{s,a} + sigma).
///
/// The smoothness metadata mirrors the constants used by the step-size
/// analysis: l_lambda bounds ||grad F||_inf, L_lambda and L_lambda_inf are
/// the 2-norm and 1-norm Lipschitz constants of the gradient. They are
/// derived analytically over the feasible set and recorded for diagnostics,
/// not enforced.
struct UtilitySpec {
  enum class Kind { linear, log_barrier };

  Kind kind = Kind::linear;
  RewardVector reward;  // linear only
  double sigma = 0.0;   // log_barrier only
  int num_actions = 0;  // log_barrier row width

  double l_lambda = 0.0;
  double L_lambda = 0.0;
  double L_lambda_inf = 0.0;

  static UtilitySpec linear(RewardVector r) {
    UtilitySpec u;
    u.kind = Kind::linear;
    double max_abs = 0.0;
    for (double v : r) {
      if (!std::isfinite(v)) throw std::invalid_argument("utility: reward entries must be finite");
      max_abs = std::max(max_abs, std::abs(v));
    }
    u.reward = std::move(r);
    u.l_lambda = max_abs;
    return u;
  }

  static UtilitySpec log_barrier(double sigma, int num_actions) {
    if (!(sigma > 0.0)) throw std::invalid_argument("utility: log_barrier sigma must be positive");
    if (num_actions <= 0) throw std::invalid_argument("utility: log_barrier needs action count");
    UtilitySpec u;
    u.kind = Kind::log_barrier;
    u.sigma = sigma;
    u.num_actions = num_actions;
    u.l_lambda = 1.0 / sigma;
    // Hessian rows are bounded by 1/sigma^2; a state-row 1-norm picks up a
    // sqrt|A| factor in the 2-norm constant.
    u.L_lambda = std::sqrt(double(num_actions)) / (sigma * sigma);
    u.L_lambda_inf = 1.0 / (sigma * sigma);
    return u;
  }

  bool linear_kind() const { return kind == Kind::linear; }
};

/// F(lambda). Rejects negative occupancy entries.
inline double utility_value(const UtilitySpec& u, const OccupancyVector& lam) {
  for (double v : lam.values)
    if (v < 0.0) throw std::invalid_argument("utility_value: negative occupancy entry");
  if (u.kind == UtilitySpec::Kind::linear) {
    if (u.reward.size() != lam.values.size())
      throw std::invalid_argument("utility_value: dimension mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < u.reward.size(); ++i) total += u.reward[i] * lam.values[i];
    return total;
  }
  double total = 0.0;
  for (int s = 0; s < lam.num_states; ++s) total += std::log(lam.state_row_sum(s) + u.sigma);
  return total;
}

/// grad_lambda F as a reward vector. For log_barrier, entry (s,a) equals
/// 1/(sum_a' lambda_{s,a'} + sigma); transiently negative estimate entries
/// are tolerated as long as every state-row sum stays above -sigma/2, which
/// keeps the gradient finite. Below that the run is aborted.
inline RewardVector utility_grad(const UtilitySpec& u, const OccupancyVector& lam) {
  if (u.kind == UtilitySpec::Kind::linear) {
    if (u.reward.size() != lam.values.size())
      throw std::invalid_argument("utility_grad: dimension mismatch");
    return u.reward;
  }
  RewardVector grad(lam.values.size());
  for (int s = 0; s < lam.num_states; ++s) {
    const double row = lam.state_row_sum(s);
    if (row < -u.sigma / 2.0)
      throw std::runtime_error("utility_grad: state-row sum " + std::to_string(row) +
                               " fell below -sigma/2");
    const double g = 1.0 / (row + u.sigma);
    for (int a = 0; a < lam.num_actions; ++a) grad[sa_index(s, a, lam.num_actions)] = g;
  }
  return grad;
}

/// Gradient entry at one pair from a row-sum accessor, for pipelines that
/// never materialize the full occupancy vector. `pair_index` is sa_index(s,a).
inline double utility_grad_at(const UtilitySpec& u, int pair_index, double state_row_sum) {
  if (u.kind == UtilitySpec::Kind::linear) return u.reward[pair_index];
  const double denom = state_row_sum + u.sigma;
  if (!(denom > 0.0))
    throw std::runtime_error("utility_grad_at: fitted state-row sum " +
                             std::to_string(state_row_sum) + " makes the gradient non-finite");
  return 1.0 / denom;
}

}  // namespace nvrpg
