#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "nvrpg/mdp.hpp"

namespace nvrpg {

using RewardVector = std::vector<double>;

/// Slippery gridworld description. Actions are up/down/left/right; the agent
/// moves in the intended direction with probability 1-slip and in each
/// perpendicular direction with probability slip/2. Bumping a wall keeps the
/// agent in place. Hole and goal cells absorb: either each self-loops under
/// every action, or (with terminal_sink) they all route into one extra
/// zero-reward sink state. The reward channel pays 1 on every (goal, action)
/// pair, so a self-looping goal keeps collecting reward while a sink-routed
/// one pays on the step that leaves it.
struct GridSpec {
  int rows = 0;
  int cols = 0;
  std::vector<int> holes;  // cell = r*cols + c
  std::vector<int> goals;
  double slip = 0.0;
  double gamma = 0.9;
  int start_cell = 0;          // ignored when uniform_start
  bool uniform_start = false;  // uniform over non-hole, non-goal cells
  bool terminal_sink = false;  // shared absorbing terminal as state rows*cols
};

struct GridBuild {
  TabularMdp mdp;
  RewardVector reward;  // 1 at (goal, a), 0 elsewhere
};

inline constexpr int kGridActions = 4;  // up, down, left, right

inline GridBuild build_gridworld(const GridSpec& spec) {
  if (spec.rows <= 0 || spec.cols <= 0) throw std::invalid_argument("gridworld: empty grid");
  if (spec.slip < 0.0 || spec.slip > 1.0) throw std::invalid_argument("gridworld: slip must be in [0,1]");
  const int n = spec.rows * spec.cols;
  auto in_grid = [&](int cell) { return cell >= 0 && cell < n; };
  for (int c : spec.holes)
    if (!in_grid(c)) throw std::invalid_argument("gridworld: hole outside grid");
  for (int c : spec.goals)
    if (!in_grid(c)) throw std::invalid_argument("gridworld: goal outside grid");
  if (!spec.uniform_start && !in_grid(spec.start_cell))
    throw std::invalid_argument("gridworld: start outside grid");

  std::vector<bool> absorbing(n, false);
  for (int c : spec.holes) absorbing[c] = true;
  for (int c : spec.goals) absorbing[c] = true;

  const int num_states = spec.terminal_sink ? n + 1 : n;
  const int sink = n;  // valid only with terminal_sink

  TabularMdp mdp;
  mdp.num_states = num_states;
  mdp.num_actions = kGridActions;
  mdp.gamma = spec.gamma;
  mdp.transition.assign(std::size_t(num_states) * kGridActions * num_states, 0.0);

  // displacement per action: up, down, left, right
  const int dr[kGridActions] = {-1, 1, 0, 0};
  const int dc[kGridActions] = {0, 0, -1, 1};
  auto move = [&](int cell, int dir) {
    int r = cell / spec.cols + dr[dir];
    int c = cell % spec.cols + dc[dir];
    if (r < 0 || r >= spec.rows || c < 0 || c >= spec.cols) return cell;  // wall bump
    return r * spec.cols + c;
  };
  // perpendicular directions of each action
  const int perp[kGridActions][2] = {{2, 3}, {2, 3}, {0, 1}, {0, 1}};

  for (int cell = 0; cell < n; ++cell) {
    for (int a = 0; a < kGridActions; ++a) {
      double* row =
          mdp.transition.data() + std::size_t(sa_index(cell, a, kGridActions)) * num_states;
      if (absorbing[cell]) {
        row[spec.terminal_sink ? sink : cell] = 1.0;
        continue;
      }
      row[move(cell, a)] += 1.0 - spec.slip;
      row[move(cell, perp[a][0])] += spec.slip / 2.0;
      row[move(cell, perp[a][1])] += spec.slip / 2.0;
    }
  }
  if (spec.terminal_sink)
    for (int a = 0; a < kGridActions; ++a)
      mdp.transition[std::size_t(sa_index(sink, a, kGridActions)) * num_states + sink] = 1.0;

  if (spec.uniform_start) {
    int free_cells = 0;
    for (int c = 0; c < n; ++c)
      if (!absorbing[c]) ++free_cells;
    if (free_cells == 0) throw std::invalid_argument("gridworld: no free start cells");
    mdp.initial_dist.assign(num_states, 0.0);
    for (int c = 0; c < n; ++c)
      if (!absorbing[c]) mdp.initial_dist[c] = 1.0 / free_cells;
  } else {
    mdp.initial_dist.assign(num_states, 0.0);
    mdp.initial_dist[spec.start_cell] = 1.0;
  }

  RewardVector reward(std::size_t(num_states) * kGridActions, 0.0);
  for (int g : spec.goals)
    for (int a = 0; a < kGridActions; ++a) reward[sa_index(g, a, kGridActions)] = 1.0;

  validate(mdp);
  return {std::move(mdp), std::move(reward)};
}

/// Parses a FrozenLake-style map: 'S' start, 'F' frozen, 'H' hole, 'G' goal.
inline GridSpec grid_from_map(const std::vector<std::string>& map, double slip, double gamma) {
  GridSpec spec;
  spec.rows = int(map.size());
  spec.cols = spec.rows > 0 ? int(map[0].size()) : 0;
  spec.slip = slip;
  spec.gamma = gamma;
  for (int r = 0; r < spec.rows; ++r) {
    if (int(map[r].size()) != spec.cols) throw std::invalid_argument("grid_from_map: ragged map");
    for (int c = 0; c < spec.cols; ++c) {
      int cell = r * spec.cols + c;
      switch (map[r][c]) {
        case 'S': spec.start_cell = cell; break;
        case 'F': break;
        case 'H': spec.holes.push_back(cell); break;
        case 'G': spec.goals.push_back(cell); break;
        default: throw std::invalid_argument("grid_from_map: unknown cell type");
      }
    }
  }
  return spec;
}

}  // namespace nvrpg
