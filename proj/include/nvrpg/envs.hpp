#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nvrpg/gaussian.hpp"
#include "nvrpg/gridworld.hpp"
#include "nvrpg/mdp.hpp"

namespace nvrpg {

// Built-in experiment environments. Hyperparameters here (gamma, slip, maps)
// are artifact defaults recorded in config echoes, not benchmark constants.

/// Two-state, two-action chain with an analytically tractable occupancy;
/// the oracle workhorse of the statistical test suites.
inline TabularMdp chain_2state(double gamma = 0.9) {
  TabularMdp mdp;
  mdp.num_states = 2;
  mdp.num_actions = 2;
  mdp.gamma = gamma;
  mdp.initial_dist = {0.7, 0.3};
  mdp.transition.assign(2 * 2 * 2, 0.0);
  auto set = [&](int s, int a, int sp, double p) {
    mdp.transition[std::size_t(sa_index(s, a, 2)) * 2 + sp] = p;
  };
  set(0, 0, 0, 0.7); set(0, 0, 1, 0.3);
  set(0, 1, 0, 0.2); set(0, 1, 1, 0.8);
  set(1, 0, 0, 0.5); set(1, 0, 1, 0.5);
  set(1, 1, 0, 0.1); set(1, 1, 1, 0.9);
  validate(mdp);
  return mdp;
}

inline RewardVector chain_2state_reward() { return {0.0, 0.0, 1.0, 1.0}; }

/// Deterministic 5x5 gridworld with a rewarding absorbing goal in the last
/// cell and uniform starts; the standard-RL benchmark.
inline GridBuild gridworld_5x5_reward(double gamma = 0.9) {
  GridSpec spec;
  spec.rows = 5;
  spec.cols = 5;
  spec.goals = {24};
  spec.slip = 0.0;
  spec.gamma = gamma;
  spec.uniform_start = true;
  return build_gridworld(spec);
}

/// Slippery 8x8 lake: classic hole layout, slip defaults to 1/3 (intended
/// move 2/3, each perpendicular 1/6). General-utility benchmark.
inline GridBuild gridworld_8x8_slippery(double gamma = 0.9, double slip = 1.0 / 3.0,
                                        bool uniform_start = false) {
  const std::vector<std::string> map = {
      "SFFFFFFF",
      "FFFFFFFF",
      "FFFHFFFF",
      "FFFFFHFF",
      "FFFHFFFF",
      "FHHFFFHF",
      "FHFFHFHF",
      "FFFHFFFG",
  };
  GridSpec spec = grid_from_map(map, slip, gamma);
  spec.uniform_start = uniform_start;
  return build_gridworld(spec);
}

/// Hole-free slippery 8x8 grid with a corner start: pure exploration
/// instance. The reward channel is all zeros.
inline GridBuild gridworld_8x8_open(double gamma = 0.9, double slip = 1.0 / 3.0,
                                    bool uniform_start = false) {
  GridSpec spec;
  spec.rows = 8;
  spec.cols = 8;
  spec.slip = slip;
  spec.gamma = gamma;
  spec.start_cell = 0;
  spec.uniform_start = uniform_start;
  return build_gridworld(spec);
}

inline ContinuousChain continuous_chain_1d() { return ContinuousChain{}; }

struct BuiltinEnv {
  TabularMdp mdp;
  RewardVector reward;
};

/// Lookup by config name; continuous_chain_1d is not tabular and is resolved
/// separately by the harness.
inline std::optional<BuiltinEnv> builtin_env(const std::string& name, double gamma, double slip,
                                             bool uniform_start) {
  if (name == "chain_2state") return BuiltinEnv{chain_2state(gamma), chain_2state_reward()};
  if (name == "gridworld_5x5_reward") {
    GridBuild g = gridworld_5x5_reward(gamma);
    return BuiltinEnv{std::move(g.mdp), std::move(g.reward)};
  }
  if (name == "gridworld_8x8_slippery") {
    GridBuild g = gridworld_8x8_slippery(gamma, slip, uniform_start);
    return BuiltinEnv{std::move(g.mdp), std::move(g.reward)};
  }
  if (name == "gridworld_8x8_open") {
    GridBuild g = gridworld_8x8_open(gamma, slip, uniform_start);
    return BuiltinEnv{std::move(g.mdp), std::move(g.reward)};
  }
  return std::nullopt;
}

}  // namespace nvrpg
