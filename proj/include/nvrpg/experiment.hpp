#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "nvrpg/config.hpp"
#include "nvrpg/csv.hpp"
#include "nvrpg/envs.hpp"
#include "nvrpg/features.hpp"
#include "nvrpg/gaussian.hpp"
#include "nvrpg/linfa.hpp"
#include "nvrpg/nvrpg.hpp"

namespace nvrpg {

// Experiment orchestration: config resolution with documented defaults,
// seeded per-run CSVs and a quantile summary across seeds.

inline const std::vector<std::string>& known_config_keys() {
  static const std::vector<std::string> keys = {
      "env.name",        "env.mdp_file",   "env.gamma",       "env.slip",
      "env.uniform_start",
      "algo.name",       "algo.batch",     "algo.step",
      "utility.kind",    "utility.sigma",  "utility.reward_file",
      "schedule.T",      "schedule.alpha0", "schedule.kind",  "schedule.a",
      "schedule.H",
      "linfa.N",         "linfa.K",        "linfa.beta",      "linfa.alpha",
      "linfa.features",  "linfa.tile",     "linfa.proj_dim",  "linfa.probe",
      "linfa.uniform_sampling",
      "policy.sigma",    "policy.degree",
      "log.exact_stride", "log.exact_grad", "log.keep_iterates",
      "seeds",           "out",
  };
  return keys;
}

/// Fills every unset key with its documented default so the echoed config is
/// complete, then validates the key set.
inline Config resolve_config(const Config& user) {
  user.check_known_keys(known_config_keys());
  Config cfg = user;
  auto fill = [&](const std::string& key, const std::string& value) {
    if (!cfg.has(key)) cfg.set(key, value);
  };
  fill("env.name", "chain_2state");
  fill("env.gamma", "0.9");
  fill("env.slip", "0.3333333333333333");
  fill("env.uniform_start", "false");
  fill("algo.name", "nvrpg_general");
  fill("algo.batch", "10");
  fill("algo.step", "0.1");
  fill("utility.kind", "linear");
  fill("utility.sigma", "0.125");
  fill("schedule.T", "1000");
  fill("schedule.alpha0", "1.0");
  fill("schedule.kind", "fos");
  fill("schedule.a", "0.9");
  fill("linfa.N", "16");
  fill("linfa.K", "1000");
  fill("linfa.beta", "0");
  fill("linfa.alpha", "0.1");
  fill("linfa.features", "one_hot");
  fill("linfa.tile", "2");
  fill("linfa.proj_dim", "32");
  fill("linfa.probe", "truncated");
  fill("linfa.uniform_sampling", "false");
  fill("policy.sigma", "1.0");
  fill("policy.degree", "1");
  fill("log.exact_stride", "1");
  fill("log.exact_grad", "false");
  fill("log.keep_iterates", "false");
  fill("seeds", "1");
  fill("out", "runs/out");
  return cfg;
}

inline RewardVector load_reward_file(const std::string& path, std::size_t expected) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("reward file: cannot open " + path);
  RewardVector r;
  double v;
  while (in >> v) r.push_back(v);
  if (r.size() != expected)
    throw std::invalid_argument("reward file: expected " + std::to_string(expected) +
                                " entries, got " + std::to_string(r.size()));
  return r;
}

/// Executes one seed of the resolved config and returns its log.
inline TrainLog run_single_seed(const Config& cfg, std::uint64_t seed) {
  const std::string algo = cfg.require("algo.name");
  const std::string env_name = cfg.require("env.name");
  const double gamma = cfg.get_double("env.gamma", 0.9);
  const int exact_stride = int(cfg.get_int("log.exact_stride", 1));
  const bool exact_grad = cfg.get_bool("log.exact_grad", false);
  const bool keep_iterates = cfg.get_bool("log.keep_iterates", false);

  NvrpgConfig run;
  run.T = int(cfg.get_int("schedule.T", 1000));
  run.alpha0 = cfg.get_double("schedule.alpha0", 1.0);
  const std::string sched = cfg.get("schedule.kind", "fos");
  if (sched == "fos")
    run.schedule = ScheduleKind::fos;
  else if (sched == "fos_tv")
    run.schedule = ScheduleKind::fos_tv;
  else if (sched == "global")
    run.schedule = ScheduleKind::global;
  else
    throw std::invalid_argument("config: schedule.kind must be fos, fos_tv or global");
  run.global_exponent = cfg.get_double("schedule.a", 0.9);
  if (cfg.has("schedule.H")) run.horizon_override = int(cfg.get_int("schedule.H", 0));
  run.seed = seed;
  run.exact_log_stride = exact_stride;
  run.log_exact_grad = exact_grad;
  run.keep_iterates = keep_iterates;

  if (env_name == "continuous_chain_1d") {
    if (algo != "nvrpg_standard")
      throw std::invalid_argument("config: continuous_chain_1d supports only nvrpg_standard");
    ContinuousChain chain = continuous_chain_1d();
    chain.gamma = gamma;
    const GaussianPolicy policy(int(cfg.get_int("policy.degree", 1)),
                                cfg.get_double("policy.sigma", 1.0));
    return run_nvrpg_standard(chain, policy, std::vector<double>(policy.dim(), 0.0), run);
  }

  TabularMdp mdp;
  RewardVector env_reward;
  if (cfg.has("env.mdp_file")) {
    mdp = load_mdp(cfg.require("env.mdp_file"));
    env_reward.assign(std::size_t(mdp.num_states) * mdp.num_actions, 0.0);
  } else {
    auto env = builtin_env(env_name, gamma, cfg.get_double("env.slip", 1.0 / 3.0),
                           cfg.get_bool("env.uniform_start", false));
    if (!env) throw std::invalid_argument("config: unknown env.name '" + env_name + "'");
    mdp = std::move(env->mdp);
    env_reward = std::move(env->reward);
  }

  RewardVector reward = env_reward;
  if (cfg.has("utility.reward_file"))
    reward = load_reward_file(cfg.require("utility.reward_file"),
                              std::size_t(mdp.num_states) * mdp.num_actions);

  UtilitySpec utility = UtilitySpec::linear(reward);
  const std::string utility_kind = cfg.get("utility.kind", "linear");
  if (utility_kind == "log_barrier")
    utility = UtilitySpec::log_barrier(cfg.get_double("utility.sigma", 0.125), mdp.num_actions);
  else if (utility_kind != "linear")
    throw std::invalid_argument("config: utility.kind must be linear or log_barrier");

  const SoftmaxPolicy policy(mdp.num_states, mdp.num_actions);
  std::vector<double> theta0(policy.dim(), 0.0);

  if (algo == "nvrpg_general") return run_nvrpg_general(mdp, policy, theta0, utility, run);
  if (algo == "nvrpg_standard") {
    if (utility_kind != "linear")
      throw std::invalid_argument("config: nvrpg_standard needs a linear utility");
    return run_nvrpg_standard(mdp, policy, theta0, reward, run);
  }
  if (algo == "vanilla_pg") {
    VanillaPgConfig vcfg;
    vcfg.T = run.T;
    vcfg.batch = int(cfg.get_int("algo.batch", 10));
    vcfg.step = cfg.get_double("algo.step", 0.1);
    vcfg.horizon_override = run.horizon_override;
    vcfg.seed = seed;
    vcfg.exact_log_stride = exact_stride;
    vcfg.log_exact_grad = exact_grad;
    vcfg.keep_iterates = keep_iterates;
    return run_vanilla_pg(mdp, policy, theta0, utility, vcfg);
  }
  if (algo == "linfa_pg") {
    LinfaConfig lcfg;
    lcfg.T = run.T;
    lcfg.batch = int(cfg.get_int("linfa.N", 16));
    lcfg.sgd_iterations = int(cfg.get_int("linfa.K", 1000));
    lcfg.beta = cfg.get_double("linfa.beta", 0.0);
    lcfg.alpha = cfg.get_double("linfa.alpha", 0.1);
    lcfg.horizon_override = run.horizon_override;
    lcfg.seed = seed;
    lcfg.exact_log_stride = exact_stride;
    lcfg.keep_iterates = keep_iterates;
    const std::string probe = cfg.get("linfa.probe", "truncated");
    if (probe == "truncated")
      lcfg.probe = OccupancyProbe::truncated;
    else if (probe == "geometric")
      lcfg.probe = OccupancyProbe::geometric;
    else
      throw std::invalid_argument("config: linfa.probe must be truncated or geometric");
    lcfg.sample_states_uniformly = cfg.get_bool("linfa.uniform_sampling", false);

    const std::string feat = cfg.get("linfa.features", "one_hot");
    FeatureMap phi;
    if (feat == "one_hot") {
      phi = one_hot_features(mdp);
    } else if (feat == "tile") {
      // tile coding assumes the builtin gridworld layouts
      int rows = 0, cols = 0;
      if (env_name == "gridworld_5x5_reward") rows = cols = 5;
      else if (env_name == "gridworld_8x8_slippery" || env_name == "gridworld_8x8_open")
        rows = cols = 8;
      else throw std::invalid_argument("config: tile features need a gridworld env");
      phi = tile_features(rows, cols, mdp.num_actions, int(cfg.get_int("linfa.tile", 2)));
    } else if (feat == "random_projection") {
      phi = random_projection_features(mdp, int(cfg.get_int("linfa.proj_dim", 32)), seed ^ 0x9e37ULL);
    } else {
      throw std::invalid_argument("config: unknown linfa.features '" + feat + "'");
    }
    return run_linfa_pg(mdp, policy, theta0, utility, phi, lcfg);
  }
  throw std::invalid_argument("config: unknown algo.name '" + algo + "'");
}

struct ExperimentResult {
  std::vector<std::uint64_t> seeds;
  std::vector<TrainLog> logs;
  std::string out_dir;
  bool any_aborted = false;
};

inline int worker_count() {
  if (const char* env = std::getenv("NVRPG_WORKERS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return 1;
}

/// Runs every seed (concurrently up to NVRPG_WORKERS), writes one CSV per
/// seed plus the resolved config echo and a quantile summary.
inline ExperimentResult run_experiment(const Config& user_cfg,
                                       const std::string& out_override = "") {
  Config cfg = resolve_config(user_cfg);
  if (!out_override.empty()) cfg.set("out", out_override);
  const std::string out_dir = cfg.require("out");
  std::filesystem::create_directories(out_dir);

  {
    std::ofstream echo(out_dir + "/resolved_config.cfg");
    echo << cfg.serialize();
  }

  ExperimentResult result;
  result.out_dir = out_dir;
  result.seeds = cfg.get_seed_list("seeds", {1});
  result.logs.resize(result.seeds.size());

  const int workers = worker_count();
  std::vector<std::exception_ptr> errors(result.seeds.size());
  std::size_t next = 0;
  while (next < result.seeds.size()) {
    const std::size_t chunk = std::min<std::size_t>(workers, result.seeds.size() - next);
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < chunk; ++i) {
      const std::size_t idx = next + i;
      pool.emplace_back([&, idx] {
        try {
          result.logs[idx] = run_single_seed(cfg, result.seeds[idx]);
        } catch (...) {
          errors[idx] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    next += chunk;
  }
  for (const std::exception_ptr& err : errors)
    if (err) std::rethrow_exception(err);

  const bool regression_columns = cfg.require("algo.name") == "linfa_pg";
  for (std::size_t i = 0; i < result.seeds.size(); ++i) {
    write_train_log_csv(result.logs[i], cfg, out_dir + "/seed_" + std::to_string(result.seeds[i]) + ".csv",
                        regression_columns);
    result.any_aborted = result.any_aborted || result.logs[i].aborted;
  }

  // summary: per-iteration quartiles across seeds
  std::size_t rows = result.logs.empty() ? 0 : result.logs[0].rows.size();
  for (const TrainLog& log : result.logs) rows = std::min(rows, log.rows.size());
  std::ofstream summary(out_dir + "/summary.csv");
  summary << "t,steps,F_q25,F_median,F_q75,J_q25,J_median,J_q75\n";
  for (std::size_t i = 0; i < rows; ++i) {
    std::vector<double> f_vals, j_vals;
    for (const TrainLog& log : result.logs) {
      f_vals.push_back(log.rows[i].f_exact);
      j_vals.push_back(log.rows[i].j_exact);
    }
    summary << result.logs[0].rows[i].t << ',' << result.logs[0].rows[i].steps << ','
            << csv_double(quantile(f_vals, 0.25)) << ',' << csv_double(quantile(f_vals, 0.5))
            << ',' << csv_double(quantile(f_vals, 0.75)) << ','
            << csv_double(quantile(j_vals, 0.25)) << ',' << csv_double(quantile(j_vals, 0.5))
            << ',' << csv_double(quantile(j_vals, 0.75)) << '\n';
  }
  return result;
}

}  // namespace nvrpg
