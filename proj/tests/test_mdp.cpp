#include <catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "nvrpg/envs.hpp"
#include "nvrpg/gridworld.hpp"
#include "nvrpg/mdp.hpp"
#include "nvrpg/policy.hpp"
#include "oracles.hpp"

using namespace nvrpg;

namespace {

TabularMdp single_state_mdp(double gamma) {
  TabularMdp mdp;
  mdp.num_states = 1;
  mdp.num_actions = 1;
  mdp.gamma = gamma;
  mdp.transition = {1.0};
  mdp.initial_dist = {1.0};
  return mdp;
}

PolicyTable uniform_policy(int num_states, int num_actions) {
  PolicyTable tbl;
  tbl.num_states = num_states;
  tbl.num_actions = num_actions;
  tbl.probs.assign(std::size_t(num_states) * num_actions, 1.0 / num_actions);
  return tbl;
}

}  // namespace

TEST_CASE("mdp validation rejects malformed inputs") {
  TabularMdp mdp = single_state_mdp(0.9);
  REQUIRE_NOTHROW(validate(mdp));

  TabularMdp bad_gamma = mdp;
  bad_gamma.gamma = 1.0;
  REQUIRE_THROWS_AS(validate(bad_gamma), std::invalid_argument);

  TabularMdp bad_row = mdp;
  bad_row.transition = {0.5};
  REQUIRE_THROWS_AS(validate(bad_row), std::invalid_argument);

  TabularMdp bad_rho = mdp;
  bad_rho.initial_dist = {0.7};
  REQUIRE_THROWS_AS(validate(bad_rho), std::invalid_argument);
}

TEST_CASE("sample_trajectory on trivial dynamics") {
  Rng rng(1);
  const TabularMdp mdp = single_state_mdp(0.9);
  const PolicyTable pi = uniform_policy(1, 1);
  const Trajectory tau = sample_trajectory(mdp, pi, 3, rng);
  REQUIRE(tau.horizon() == 3);
  for (const auto& [s, a] : tau.steps) {
    REQUIRE(s == 0);
    REQUIRE(a == 0);
  }
  REQUIRE_THROWS_AS(sample_trajectory(mdp, pi, 0, rng), std::invalid_argument);
}

TEST_CASE("sample_trajectory follows deterministic cycle") {
  TabularMdp mdp;
  mdp.num_states = 2;
  mdp.num_actions = 1;
  mdp.gamma = 0.9;
  mdp.transition = {0.0, 1.0, 1.0, 0.0};  // 0 -> 1 -> 0
  mdp.initial_dist = {1.0, 0.0};
  validate(mdp);
  Rng rng(7);
  const Trajectory tau = sample_trajectory(mdp, uniform_policy(2, 1), 4, rng);
  const std::vector<std::pair<int, int>> expected = {{0, 0}, {1, 0}, {0, 0}, {1, 0}};
  REQUIRE(tau.steps == expected);
}

TEST_CASE("sample_trajectory is seed-reproducible and matches the cdf overload") {
  const TabularMdp mdp = chain_2state(0.9);
  const PolicyTable pi = uniform_policy(2, 2);
  Rng a(42), b(42), c(42);
  const detail::TransitionCdf cdf(mdp);
  const Trajectory t1 = sample_trajectory(mdp, pi, 50, a);
  const Trajectory t2 = sample_trajectory(mdp, pi, 50, b);
  const Trajectory t3 = sample_trajectory(mdp, cdf, pi, 50, c);
  REQUIRE(t1.steps == t2.steps);
  REQUIRE(t1.steps == t3.steps);
}

TEST_CASE("transition frequencies match the kernel") {
  // P(1|0,0)=0.3: empirical frequency of s_1 = 1 within a binomial CI
  TabularMdp mdp;
  mdp.num_states = 2;
  mdp.num_actions = 1;
  mdp.gamma = 0.9;
  mdp.transition = {0.7, 0.3, 0.0, 1.0};
  mdp.initial_dist = {1.0, 0.0};
  validate(mdp);
  Rng rng(3);
  const PolicyTable pi = uniform_policy(2, 1);
  const int n = 100000;
  oracle::RunningMean freq;
  for (int i = 0; i < n; ++i) {
    const Trajectory tau = sample_trajectory(mdp, pi, 2, rng);
    freq.add(tau.steps[1].first == 1 ? 1.0 : 0.0);
  }
  REQUIRE(freq.z_against(0.3) <= 4.0);
}

TEST_CASE("gridworld builder") {
  SECTION("1x1 grid is a single absorbing state") {
    GridSpec spec;
    spec.rows = spec.cols = 1;
    spec.gamma = 0.9;
    const GridBuild g = build_gridworld(spec);
    REQUIRE(g.mdp.num_states == 1);
    for (int a = 0; a < kGridActions; ++a)
      REQUIRE(transition_row(g.mdp, 0, a)[0] == Catch::Approx(1.0));
  }
  SECTION("2x2 no slip moves deterministically") {
    GridSpec spec;
    spec.rows = spec.cols = 2;
    spec.gamma = 0.9;
    const GridBuild g = build_gridworld(spec);
    // action 3 = right from cell 0 lands in cell 1
    REQUIRE(transition_row(g.mdp, 0, 3)[1] == Catch::Approx(1.0));
  }
  SECTION("4x4 slip=1/3 matches the hand-enumerated three-outcome model") {
    GridSpec spec;
    spec.rows = spec.cols = 4;
    spec.gamma = 0.9;
    spec.slip = 1.0 / 3.0;
    const GridBuild g = build_gridworld(spec);
    validate(g.mdp);
    // from cell 5 (interior), action right: intended 6 w.p. 2/3,
    // perpendicular up (1) and down (9) w.p. 1/6 each
    auto row = transition_row(g.mdp, 5, 3);
    REQUIRE(row[6] == Catch::Approx(2.0 / 3.0));
    REQUIRE(row[1] == Catch::Approx(1.0 / 6.0));
    REQUIRE(row[9] == Catch::Approx(1.0 / 6.0));
    // edge cell 0, action up bumps the wall: intended mass stays at 0
    auto edge = transition_row(g.mdp, 0, 0);
    REQUIRE(edge[0] == Catch::Approx(2.0 / 3.0 + 1.0 / 6.0));
    REQUIRE(edge[1] == Catch::Approx(1.0 / 6.0));
  }
  SECTION("goal outside the grid is rejected") {
    GridSpec spec;
    spec.rows = spec.cols = 2;
    spec.goals = {9};
    REQUIRE_THROWS_AS(build_gridworld(spec), std::invalid_argument);
  }
  SECTION("goal cells absorb and pay 1 under every action") {
    const GridBuild g = gridworld_5x5_reward();
    for (int a = 0; a < kGridActions; ++a) {
      REQUIRE(transition_row(g.mdp, 24, a)[24] == Catch::Approx(1.0));
      REQUIRE(g.reward[sa_index(24, a, kGridActions)] == Catch::Approx(1.0));
    }
    REQUIRE(g.mdp.initial_dist[24] == 0.0);
  }
  SECTION("terminal sink routes every absorbing cell to one extra state") {
    GridSpec spec;
    spec.rows = spec.cols = 3;
    spec.holes = {4};
    spec.goals = {8};
    spec.gamma = 0.9;
    spec.terminal_sink = true;
    const GridBuild g = build_gridworld(spec);
    REQUIRE(g.mdp.num_states == 10);
    for (int a = 0; a < kGridActions; ++a) {
      REQUIRE(transition_row(g.mdp, 4, a)[9] == Catch::Approx(1.0));
      REQUIRE(transition_row(g.mdp, 8, a)[9] == Catch::Approx(1.0));
      REQUIRE(transition_row(g.mdp, 9, a)[9] == Catch::Approx(1.0));
    }
    validate(g.mdp);
  }
}

TEST_CASE("mdp file round trip and validation") {
  const TabularMdp mdp = chain_2state(0.8);
  const auto dir = std::filesystem::temp_directory_path() / "nvrpg_mdp_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "chain.json").string();
  save_mdp(mdp, path);
  const TabularMdp loaded = load_mdp(path);
  REQUIRE(loaded.num_states == mdp.num_states);
  REQUIRE(loaded.num_actions == mdp.num_actions);
  REQUIRE(loaded.gamma == mdp.gamma);
  REQUIRE(oracle::max_abs_diff(loaded.transition, mdp.transition) == 0.0);
  REQUIRE(oracle::max_abs_diff(loaded.initial_dist, mdp.initial_dist) == 0.0);

  // a non-stochastic file must be rejected
  const std::string bad_path = (dir / "bad.json").string();
  std::ofstream bad(bad_path);
  bad << R"({"num_states":1,"num_actions":1,"gamma":0.9,"rho":[1.0],
             "transitions":[{"s":0,"a":0,"s_next":0,"p":0.5}]})";
  bad.close();
  REQUIRE_THROWS_AS(load_mdp(bad_path), std::invalid_argument);
}

TEST_CASE("rng geometric draw matches its analytic mean") {
  Rng rng(99);
  const double gamma = 0.9;
  oracle::RunningMean mean;
  for (int i = 0; i < 200000; ++i) mean.add(double(rng.geometric(gamma)));
  REQUIRE(mean.z_against(gamma / (1.0 - gamma)) <= 4.0);
}
