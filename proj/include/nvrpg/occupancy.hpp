#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "nvrpg/mdp.hpp"

namespace nvrpg {

/// Provenance tag of an occupancy vector. The tag pins which mass identity
/// the entries must satisfy:
///   exact_infinite      sum = 1/(1-gamma)
///   exact_truncated(H)  sum = (1-gamma^H)/(1-gamma)
///   sampled(H)          sum = (1-gamma^H)/(1-gamma), at most H nonzeros
///   estimate            no constraint (recursive estimates may dip below 0)
enum class OccupancyKind { exact_infinite, exact_truncated, sampled, estimate };

struct OccupancyVector {
  OccupancyKind kind = OccupancyKind::estimate;
  int horizon = 0;  // meaningful for exact_truncated and sampled
  int num_states = 0;
  int num_actions = 0;
  std::vector<double> values;  // s*A+a

  double& at(int s, int a) { return values[sa_index(s, a, num_actions)]; }
  double at(int s, int a) const { return values[sa_index(s, a, num_actions)]; }

  double sum() const {
    double total = 0.0;
    for (double v : values) total += v;
    return total;
  }

  /// Discounted mass of state s across all actions.
  double state_row_sum(int s) const {
    double total = 0.0;
    for (int a = 0; a < num_actions; ++a) total += at(s, a);
    return total;
  }
};

inline OccupancyVector make_occupancy(OccupancyKind kind, int num_states, int num_actions,
                                      int horizon = 0) {
  OccupancyVector lam;
  lam.kind = kind;
  lam.horizon = horizon;
  lam.num_states = num_states;
  lam.num_actions = num_actions;
  lam.values.assign(std::size_t(num_states) * num_actions, 0.0);
  return lam;
}

/// Checks the kind-specific mass identity and nonnegativity (estimate vectors
/// are exempt from both). Throws invalid_argument on violation.
inline void validate(const OccupancyVector& lam, double gamma, double tol = 1e-9) {
  if (lam.kind == OccupancyKind::estimate) return;
  for (double v : lam.values)
    if (v < 0.0) throw std::invalid_argument("occupancy: negative entry");
  const double total = lam.sum();
  double expected = 0.0;
  if (lam.kind == OccupancyKind::exact_infinite) {
    expected = 1.0 / (1.0 - gamma);
  } else {
    expected = (1.0 - std::pow(gamma, lam.horizon)) / (1.0 - gamma);
  }
  if (std::abs(total - expected) > tol)
    throw std::invalid_argument("occupancy: mass identity violated");
}

}  // namespace nvrpg
