#pragma once

#include <span>
#include <vector>

#include "nvrpg/dp.hpp"
#include "nvrpg/mdp.hpp"
#include "nvrpg/policy.hpp"
#include "nvrpg/train_log.hpp"
#include "nvrpg/utility.hpp"

namespace nvrpg {

inline double norm2(std::span<const double> v) {
  double sq = 0.0;
  for (double x : v) sq += x * x;
  return std::sqrt(sq);
}

namespace detail {

/// Fills the exact-oracle columns of a log row every `stride` iterations
/// (and always on the final one). Tabular MDPs only.
struct ExactLogger {
  const TabularMdp* mdp = nullptr;
  const SoftmaxPolicy* policy = nullptr;
  const UtilitySpec* utility = nullptr;
  int stride = 1;
  bool with_grad = false;

  void fill(TrainRow& row, std::span<const double> theta, int t, int last_t) const {
    if (stride <= 0 || mdp == nullptr) return;
    if (t % stride != 0 && t != last_t) return;
    const PolicyTable tbl = policy->table(theta);
    const OccupancyVector lam = exact_occupancy_infinite(*mdp, tbl);
    row.f_exact = utility_value(*utility, lam);
    if (utility->linear_kind()) row.j_exact = row.f_exact;
    if (with_grad) {
      const RewardVector r = utility_grad(*utility, lam);
      const std::vector<double> q = exact_q_values(*mdp, tbl, r);
      std::vector<double> grad(policy->dim(), 0.0);
      for (int s = 0; s < mdp->num_states; ++s)
        for (int a = 0; a < mdp->num_actions; ++a) {
          const double mass = lam.at(s, a) * q[sa_index(s, a, mdp->num_actions)];
          if (mass != 0.0) policy->add_scaled_score(theta, s, a, mass, grad);
        }
      row.grad_norm_exact = norm2(grad);
    }
  }
};

}  // namespace detail
}  // namespace nvrpg
