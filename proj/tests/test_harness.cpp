#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "nvrpg/config.hpp"
#include "nvrpg/csv.hpp"
#include "nvrpg/experiment.hpp"
#include "oracles.hpp"

using namespace nvrpg;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::filesystem::path fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "nvrpg_harness" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("config parsing") {
  const Config cfg = Config::from_string(
      "# comment\n"
      "env.name = chain_2state\n"
      "schedule.T=25\n"
      "  seeds = 3, 5 ,9\n");
  REQUIRE(cfg.require("env.name") == "chain_2state");
  REQUIRE(cfg.get_int("schedule.T", 0) == 25);
  REQUIRE(cfg.get_seed_list("seeds", {}) == std::vector<std::uint64_t>{3, 5, 9});
  REQUIRE(cfg.get("missing", "fallback") == "fallback");
  REQUIRE_THROWS_AS(Config::from_string("not a pair\n"), std::invalid_argument);
  REQUIRE_THROWS_AS(cfg.require("absent"), std::invalid_argument);
  REQUIRE_THROWS_AS(Config::from_string("schedule.T = abc\n").get_int("schedule.T", 0),
                    std::invalid_argument);
}

TEST_CASE("unknown config keys are rejected with the key name") {
  Config cfg = Config::from_string("env.nmae = chain_2state\n");
  try {
    resolve_config(cfg);
    FAIL("expected an exception");
  } catch (const std::invalid_argument& err) {
    REQUIRE(std::string(err.what()).find("env.nmae") != std::string::npos);
  }
}

TEST_CASE("unknown env and algorithm names fail with the offending value") {
  Config cfg = Config::from_string(
      "env.name = nowhere\nschedule.T = 2\nlog.exact_stride = 0\n");
  const Config resolved = resolve_config(cfg);
  try {
    run_single_seed(resolved, 1);
    FAIL("expected an exception");
  } catch (const std::invalid_argument& err) {
    REQUIRE(std::string(err.what()).find("nowhere") != std::string::npos);
  }
}

TEST_CASE("experiment output layout and determinism") {
  const auto dir = fresh_dir("determinism");
  Config cfg = Config::from_string(
      "env.name = chain_2state\n"
      "algo.name = nvrpg_general\n"
      "utility.kind = log_barrier\n"
      "schedule.T = 12\n"
      "schedule.alpha0 = 0.1\n"
      "seeds = 1,2,3\n");
  cfg.set("out", (dir / "a").string());
  const ExperimentResult first = run_experiment(cfg);
  cfg.set("out", (dir / "b").string());
  const ExperimentResult second = run_experiment(cfg);

  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    const std::string name = "seed_" + std::to_string(seed) + ".csv";
    const std::string a = slurp((dir / "a" / name).string());
    REQUIRE(!a.empty());
    REQUIRE(a == slurp((dir / "b" / name).string()));
  }
  REQUIRE(slurp((dir / "a" / "summary.csv").string()) ==
          slurp((dir / "b" / "summary.csv").string()));
  REQUIRE(std::filesystem::exists(dir / "a" / "resolved_config.cfg"));
  REQUIRE(first.logs.size() == 3);
  REQUIRE(!second.any_aborted);
}

TEST_CASE("csv schema and row count") {
  const auto dir = fresh_dir("schema");
  Config cfg = Config::from_string(
      "env.name = chain_2state\n"
      "algo.name = nvrpg_standard\n"
      "schedule.T = 1\n"
      "seeds = 7\n");
  cfg.set("out", dir.string());
  run_experiment(cfg);
  const CsvTable table = read_csv((dir / "seed_7.csv").string());
  REQUIRE(table.columns ==
          std::vector<std::string>{"t", "steps", "alpha_t", "eta_t", "F_exact", "J_exact",
                                   "grad_norm_exact", "d_norm", "is_weight", "is_bound",
                                   "schema_version"});
  REQUIRE(table.rows.size() == 1);  // T=1: exactly one data row
  REQUIRE(table.rows[0][table.column_index("schema_version")] == kCsvSchemaVersion);

  // metadata block carries the resolved config
  const std::string text = slurp((dir / "seed_7.csv").string());
  REQUIRE(text.find("# env.name=chain_2state") != std::string::npos);
  REQUIRE(text.find("# schema_version=1") != std::string::npos);
}

TEST_CASE("linfa runs append regression diagnostic columns") {
  const auto dir = fresh_dir("linfa_cols");
  Config cfg = Config::from_string(
      "env.name = chain_2state\n"
      "algo.name = linfa_pg\n"
      "utility.kind = log_barrier\n"
      "schedule.T = 3\n"
      "schedule.H = 8\n"
      "linfa.N = 2\n"
      "linfa.K = 20\n"
      "seeds = 1\n");
  cfg.set("out", dir.string());
  run_experiment(cfg);
  const CsvTable table = read_csv((dir / "seed_1.csv").string());
  REQUIRE(table.column_index("reg_K") >= 0);
  REQUIRE(table.column_index("reg_final_avg_loss") >= 0);
  REQUIRE(table.column_index("reg_fit_residual_at_visited") >= 0);
  REQUIRE(table.rows.size() == 3);
  REQUIRE(table.rows[0][table.column_index("reg_K")] == 20);
}

TEST_CASE("summary quantiles match an independent recomputation") {
  const auto dir = fresh_dir("summary");
  Config cfg = Config::from_string(
      "env.name = chain_2state\n"
      "algo.name = nvrpg_general\n"
      "utility.kind = log_barrier\n"
      "schedule.T = 9\n"
      "schedule.alpha0 = 0.1\n"
      "seeds = 1,2,3,4,5\n");
  cfg.set("out", dir.string());
  run_experiment(cfg);

  std::vector<CsvTable> tables;
  for (std::uint64_t seed = 1; seed <= 5; ++seed)
    tables.push_back(read_csv((dir / ("seed_" + std::to_string(seed) + ".csv")).string()));
  const CsvTable summary = read_csv((dir / "summary.csv").string());
  REQUIRE(summary.rows.size() == 9);

  const int f_col = tables[0].column_index("F_exact");
  for (std::size_t row = 0; row < summary.rows.size(); ++row) {
    std::vector<double> f_vals;
    for (const CsvTable& t : tables) f_vals.push_back(t.rows[row][f_col]);
    auto expect = [&](const char* col, double p) {
      const double recomputed = quantile(f_vals, p);
      REQUIRE(std::abs(summary.rows[row][summary.column_index(col)] - recomputed) <= 1e-12);
    };
    expect("F_q25", 0.25);
    expect("F_median", 0.5);
    expect("F_q75", 0.75);
  }
}

TEST_CASE("csv doubles survive a write-read round trip") {
  REQUIRE(csv_double(kUnset) == "");
  const double value = 0.12345678901234567;
  REQUIRE(std::stod(csv_double(value)) == value);
  const double tiny = 3.0e-15;
  REQUIRE(std::stod(csv_double(tiny)) == tiny);
}

TEST_CASE("gaussian chain config runs through the harness") {
  const auto dir = fresh_dir("gaussian");
  Config cfg = Config::from_string(
      "env.name = continuous_chain_1d\n"
      "algo.name = nvrpg_standard\n"
      "schedule.T = 10\n"
      "log.exact_stride = 5\n"
      "seeds = 2\n");
  cfg.set("out", dir.string());
  const ExperimentResult result = run_experiment(cfg);
  REQUIRE(result.logs[0].rows.size() == 10);
  Config bad = cfg;
  bad.set("algo.name", "nvrpg_general");
  REQUIRE_THROWS_AS(run_experiment(bad), std::invalid_argument);
}
