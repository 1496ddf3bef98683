#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "nvrpg/rng.hpp"

namespace nvrpg {

/// Row index of the state-action pair (s,a) in every |S|*|A| vector.
inline int sa_index(int s, int a, int num_actions) { return s * num_actions + a; }

/// Finite discounted MDP with dense transition table P(s'|s,a).
///
/// Rows are stored contiguously as cumulative sums so trajectory sampling is a
/// single uniform draw plus a CDF walk per step.
struct TabularMdp {
  int num_states = 0;
  int num_actions = 0;
  double gamma = 0.0;
  std::vector<double> transition;    // (s*A+a)*S + s' -> P(s'|s,a)
  std::vector<double> initial_dist;  // rho
};

inline std::span<const double> transition_row(const TabularMdp& mdp, int s, int a) {
  return {mdp.transition.data() + std::size_t(sa_index(s, a, mdp.num_actions)) * mdp.num_states,
          std::size_t(mdp.num_states)};
}

/// Throws invalid_argument unless rows and rho are stochastic within 1e-12
/// and gamma lies in (0,1).
inline void validate(const TabularMdp& mdp) {
  if (mdp.num_states <= 0 || mdp.num_actions <= 0)
    throw std::invalid_argument("mdp: state and action counts must be positive");
  if (!(mdp.gamma > 0.0 && mdp.gamma < 1.0))
    throw std::invalid_argument("mdp: gamma must be in (0,1)");
  if (mdp.transition.size() != std::size_t(mdp.num_states) * mdp.num_actions * mdp.num_states)
    throw std::invalid_argument("mdp: transition table has wrong size");
  if (mdp.initial_dist.size() != std::size_t(mdp.num_states))
    throw std::invalid_argument("mdp: initial distribution has wrong size");
  for (int s = 0; s < mdp.num_states; ++s) {
    for (int a = 0; a < mdp.num_actions; ++a) {
      double row_sum = 0.0;
      for (double p : transition_row(mdp, s, a)) {
        if (p < 0.0) throw std::invalid_argument("mdp: negative transition probability");
        row_sum += p;
      }
      if (std::abs(row_sum - 1.0) > 1e-12)
        throw std::invalid_argument("mdp: transition row (" + std::to_string(s) + "," +
                                    std::to_string(a) + ") sums to " + std::to_string(row_sum));
    }
  }
  double rho_sum = 0.0;
  for (double p : mdp.initial_dist) {
    if (p < 0.0) throw std::invalid_argument("mdp: negative initial probability");
    rho_sum += p;
  }
  if (std::abs(rho_sum - 1.0) > 1e-12) throw std::invalid_argument("mdp: rho does not sum to 1");
}

/// Sampled rollout of exactly `horizon` (state, action) pairs.
struct Trajectory {
  std::vector<std::pair<int, int>> steps;
  int horizon() const { return int(steps.size()); }
};

/// Dense action-probability table, row-stochastic per state.
struct PolicyTable {
  int num_states = 0;
  int num_actions = 0;
  std::vector<double> probs;  // s*A+a -> pi(a|s)

  std::span<const double> row(int s) const {
    return {probs.data() + std::size_t(s) * num_actions, std::size_t(num_actions)};
  }
};

namespace detail {

// Cumulative transition rows; built once per MDP and reused across rollouts.
struct TransitionCdf {
  int num_states = 0;
  std::vector<double> rows;  // (s*A+a)*S + s' -> cumulative P

  explicit TransitionCdf(const TabularMdp& mdp)
      : num_states(mdp.num_states), rows(mdp.transition.size()) {
    const std::size_t n_rows = std::size_t(mdp.num_states) * mdp.num_actions;
    for (std::size_t r = 0; r < n_rows; ++r) {
      double acc = 0.0;
      for (int sp = 0; sp < mdp.num_states; ++sp) {
        acc += mdp.transition[r * mdp.num_states + sp];
        rows[r * mdp.num_states + sp] = acc;
      }
    }
  }

  std::span<const double> row(std::size_t sa) const {
    return {rows.data() + sa * num_states, std::size_t(num_states)};
  }
};

}  // namespace detail

/// Rolls out s0 ~ rho, a_t ~ pi(.|s_t), s_{t+1} ~ P(.|s_t,a_t) for exactly
/// `horizon` pairs. Identical seeds give identical trajectories.
inline Trajectory sample_trajectory(const TabularMdp& mdp, const PolicyTable& policy, int horizon,
                                    Rng& rng) {
  if (horizon <= 0) throw std::invalid_argument("sample_trajectory: horizon must be >= 1");
  Trajectory tau;
  tau.steps.reserve(horizon);
  int s = rng.categorical(mdp.initial_dist);
  for (int t = 0; t < horizon; ++t) {
    int a = rng.categorical(policy.row(s));
    tau.steps.emplace_back(s, a);
    if (t + 1 < horizon) s = rng.categorical(transition_row(mdp, s, a));
  }
  return tau;
}

/// Variant over prebuilt CDF rows for hot loops; draws in the same order as
/// the span-based overload but walks cumulative rows.
inline Trajectory sample_trajectory(const TabularMdp& mdp, const detail::TransitionCdf& cdf,
                                    const PolicyTable& policy, int horizon, Rng& rng) {
  if (horizon <= 0) throw std::invalid_argument("sample_trajectory: horizon must be >= 1");
  Trajectory tau;
  tau.steps.reserve(horizon);
  int s = rng.categorical(mdp.initial_dist);
  for (int t = 0; t < horizon; ++t) {
    int a = rng.categorical(policy.row(s));
    tau.steps.emplace_back(s, a);
    if (t + 1 < horizon) s = rng.categorical_cdf(cdf.row(std::size_t(sa_index(s, a, mdp.num_actions))));
  }
  return tau;
}

/// Loads an MDP definition file: JSON with fields num_states, num_actions,
/// gamma, rho (array) and transitions (list of {s,a,s_next,p}); triples not
/// listed are probability zero. Validates row-stochasticity on load.
inline TabularMdp load_mdp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("load_mdp: cannot open " + path);
  nlohmann::json doc = nlohmann::json::parse(in);
  TabularMdp mdp;
  mdp.num_states = doc.at("num_states").get<int>();
  mdp.num_actions = doc.at("num_actions").get<int>();
  mdp.gamma = doc.at("gamma").get<double>();
  mdp.initial_dist = doc.at("rho").get<std::vector<double>>();
  if (mdp.num_states <= 0 || mdp.num_actions <= 0)
    throw std::invalid_argument("load_mdp: state and action counts must be positive");
  mdp.transition.assign(std::size_t(mdp.num_states) * mdp.num_actions * mdp.num_states, 0.0);
  for (const auto& rec : doc.at("transitions")) {
    int s = rec.at("s").get<int>();
    int a = rec.at("a").get<int>();
    int sp = rec.at("s_next").get<int>();
    double p = rec.at("p").get<double>();
    if (s < 0 || s >= mdp.num_states || a < 0 || a >= mdp.num_actions || sp < 0 ||
        sp >= mdp.num_states)
      throw std::invalid_argument("load_mdp: transition record out of range");
    mdp.transition[std::size_t(sa_index(s, a, mdp.num_actions)) * mdp.num_states + sp] = p;
  }
  validate(mdp);
  return mdp;
}

inline void save_mdp(const TabularMdp& mdp, const std::string& path) {
  nlohmann::json doc;
  doc["num_states"] = mdp.num_states;
  doc["num_actions"] = mdp.num_actions;
  doc["gamma"] = mdp.gamma;
  doc["rho"] = mdp.initial_dist;
  nlohmann::json list = nlohmann::json::array();
  for (int s = 0; s < mdp.num_states; ++s)
    for (int a = 0; a < mdp.num_actions; ++a) {
      auto row = transition_row(mdp, s, a);
      for (int sp = 0; sp < mdp.num_states; ++sp)
        if (row[sp] != 0.0) list.push_back({{"s", s}, {"a", a}, {"s_next", sp}, {"p", row[sp]}});
    }
  doc["transitions"] = std::move(list);
  std::ofstream out(path);
  out << doc.dump(2) << "\n";
}

}  // namespace nvrpg
