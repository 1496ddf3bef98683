#include <catch_amalgamated.hpp>

#include <cmath>

#include "nvrpg/dp.hpp"
#include "nvrpg/envs.hpp"
#include "nvrpg/features.hpp"
#include "nvrpg/linfa.hpp"
#include "oracles.hpp"

using namespace nvrpg;

namespace {

std::vector<double> random_vec(int dim, Rng& rng, double scale = 1.0) {
  std::vector<double> v(dim);
  for (double& x : v) x = rng.normal(0.0, scale);
  return v;
}

}  // namespace

TEST_CASE("feature maps") {
  const TabularMdp mdp = chain_2state(0.9);
  SECTION("one-hot metadata") {
    const FeatureMap phi = one_hot_features(mdp);
    REQUIRE(phi.dim == 4);
    REQUIRE(phi.norm_bound == 1.0);
    REQUIRE(phi.min_covariance_eig.has_value());
    REQUIRE(*phi.min_covariance_eig == Catch::Approx(0.3 / 2.0));
    std::vector<double> omega = {1.0, 2.0, 3.0, 4.0};
    REQUIRE(phi.dot(1, 0, omega) == 3.0);
  }
  SECTION("tile features group cells") {
    const FeatureMap phi = tile_features(4, 4, 2, 2);
    REQUIRE(phi.dim == 2 * 2 * 2);
    // cells 0 and 1 share the top-left tile
    std::vector<double> omega(phi.dim, 0.0);
    omega[0] = 5.0;
    REQUIRE(phi.dot(0, 0, omega) == phi.dot(1, 0, omega));
    REQUIRE(phi.norm_bound == 1.0);
  }
  SECTION("random projections are seeded and bounded") {
    const FeatureMap a = random_projection_features(mdp, 3, 99);
    const FeatureMap b = random_projection_features(mdp, 3, 99);
    REQUIRE(a.data == b.data);
    REQUIRE(a.norm_bound > 0.0);
    REQUIRE_FALSE(a.min_covariance_eig.has_value());
  }
}

TEST_CASE("stochastic_reg_grad") {
  const TabularMdp mdp = chain_2state(0.9);
  const FeatureMap phi = one_hot_features(mdp);
  SECTION("zero residual gives the zero vector") {
    std::vector<double> omega = {0.5, 0.0, 0.0, 0.0};
    const std::vector<double> g = stochastic_reg_grad(omega, 0, 0, 0.5, phi);
    for (double v : g) REQUIRE(v == 0.0);
  }
  SECTION("one-hot arithmetic") {
    const std::vector<double> g =
        stochastic_reg_grad(std::vector<double>(4, 0.0), 1, 0, 1.0, phi);
    REQUIRE(g[sa_index(1, 0, 2)] == -2.0);
    REQUIRE(g[0] == 0.0);
  }
  SECTION("dimension mismatch is rejected") {
    REQUIRE_THROWS_AS(stochastic_reg_grad(std::vector<double>(3, 0.0), 0, 0, 0.5, phi),
                      std::invalid_argument);
  }
  SECTION("unbiased for the exhaustive-enumeration gradient") {
    const SoftmaxPolicy policy(2, 2);
    Rng rng(41);
    const PolicyTable tbl = policy.table(random_vec(policy.dim(), rng, 0.5));
    const int H = 12;
    const OccupancyVector lam = exact_occupancy_truncated(mdp, tbl, H);
    const std::vector<double> omega = random_vec(phi.dim, rng, 0.3);
    std::vector<double> target(phi.dim, 0.0);
    for (int s = 0; s < 2; ++s)
      for (int a = 0; a < 2; ++a) {
        const double weight = mdp.initial_dist[s] / 2.0;
        const double residual = 2.0 * (phi.dot(s, a, omega) - lam.at(s, a));
        auto row = phi.at(s, a);
        for (int k = 0; k < phi.dim; ++k) target[k] += weight * residual * row[k];
      }
    std::vector<oracle::RunningMean> means(phi.dim);
    for (int i = 0; i < 60000; ++i) {
      const int s = rng.categorical(mdp.initial_dist);
      int a = int(rng.next_double() * 2);
      if (a >= 2) a = 1;
      const double probe = mc_truncated_occupancy_at(mdp, tbl, s, a, H, rng);
      const std::vector<double> g = stochastic_reg_grad(omega, s, a, probe, phi);
      for (int k = 0; k < phi.dim; ++k) means[k].add(g[k]);
    }
    for (int k = 0; k < phi.dim; ++k) REQUIRE(means[k].z_against(target[k]) <= 4.0);
  }
}

TEST_CASE("sgd_occupancy_fit") {
  const TabularMdp mdp = chain_2state(0.9);
  const SoftmaxPolicy policy(2, 2);
  const FeatureMap phi = one_hot_features(mdp);
  const PolicyTable tbl = policy.table(policy.zero_theta());
  const int H = 15;

  SECTION("K = 1 matches the closed-form single step") {
    SgdFitOptions opts;
    opts.iterations = 1;
    opts.horizon = H;
    Rng rng(50);
    const std::vector<double> omega = sgd_occupancy_fit(mdp, tbl, phi, opts, rng);
    // replay the same draws
    Rng replay(50);
    const int s = replay.categorical(mdp.initial_dist);
    int a = int(replay.next_double() * 2);
    if (a >= 2) a = 1;
    const double probe = mc_truncated_occupancy_at(mdp, tbl, s, a, H, replay);
    const double beta = 1.0 / 8.0;  // B = 1
    std::vector<double> expected(4, 0.0);
    expected[sa_index(s, a, 2)] = 2.0 * beta * probe;
    REQUIRE(oracle::max_abs_diff(omega, expected) <= 1e-15);
  }
  SECTION("K = 0 is rejected") {
    SgdFitOptions opts;
    opts.iterations = 0;
    Rng rng(1);
    REQUIRE_THROWS_AS(sgd_occupancy_fit(mdp, tbl, phi, opts, rng), std::invalid_argument);
  }
  SECTION("long fits land near the DP occupancy at well-covered pairs") {
    SgdFitOptions opts;
    opts.iterations = 10000;
    opts.horizon = H;
    Rng rng(51);
    const std::vector<double> omega = sgd_occupancy_fit(mdp, tbl, phi, opts, rng);
    const OccupancyVector lam = exact_occupancy_truncated(mdp, tbl, H);
    for (int s = 0; s < 2; ++s) {
      if (mdp.initial_dist[s] < 0.1) continue;
      for (int a = 0; a < 2; ++a)
        REQUIRE(std::abs(phi.dot(s, a, omega) - lam.at(s, a)) <= 0.05);
    }
  }
  SECTION("geometric probe variant fits the untruncated occupancy") {
    SgdFitOptions opts;
    opts.iterations = 20000;
    opts.horizon = H;
    opts.probe = OccupancyProbe::geometric;
    Rng rng(52);
    long long steps = 0;
    const std::vector<double> omega = sgd_occupancy_fit(mdp, tbl, phi, opts, rng, &steps);
    REQUIRE(steps > 0);
    const OccupancyVector lam = exact_occupancy_infinite(mdp, tbl);
    for (int s = 0; s < 2; ++s)
      for (int a = 0; a < 2; ++a)
        REQUIRE(std::abs(phi.dot(s, a, omega) - lam.at(s, a)) <= 0.2);
  }
}

TEST_CASE("regression_loss") {
  const TabularMdp mdp = chain_2state(0.9);
  const SoftmaxPolicy policy(2, 2);
  const PolicyTable tbl = policy.table(policy.zero_theta());
  const FeatureMap phi = one_hot_features(mdp);
  const int H = 10;
  const OccupancyVector lam = exact_occupancy_truncated(mdp, tbl, H);

  SECTION("perfect fit has zero loss") {
    REQUIRE(regression_loss(mdp, tbl, lam.values, phi, H) <= 1e-18);
  }
  SECTION("omega = 0 equals the direct weighted sum of squares") {
    double expected = 0.0;
    for (int s = 0; s < 2; ++s)
      for (int a = 0; a < 2; ++a)
        expected += mdp.initial_dist[s] / 2.0 * lam.at(s, a) * lam.at(s, a);
    REQUIRE(regression_loss(mdp, tbl, std::vector<double>(4, 0.0), phi, H) ==
            Catch::Approx(expected).epsilon(1e-14));
  }
  SECTION("rank-deficient features floor at the projection residual") {
    // duplicate feature: both actions of a state share one coordinate.
    // needs a non-uniform policy so the per-action occupancies differ.
    std::vector<double> theta_skewed = {0.9, -0.4, -0.3, 0.7};
    const PolicyTable skewed = policy.table(theta_skewed);
    const OccupancyVector lam_skewed = exact_occupancy_truncated(mdp, skewed, H);
    FeatureMap coarse;
    coarse.num_states = 2;
    coarse.num_actions = 2;
    coarse.dim = 2;
    coarse.data = {1, 0, 1, 0, 0, 1, 0, 1};  // phi(s,a) = e_s
    coarse.norm_bound = 1.0;
    // best omega per state minimizes sum_a (lam(s,a) - x)^2 -> mean over actions
    std::vector<double> best = {(lam_skewed.at(0, 0) + lam_skewed.at(0, 1)) / 2.0,
                                (lam_skewed.at(1, 0) + lam_skewed.at(1, 1)) / 2.0};
    double residual = 0.0;
    for (int s = 0; s < 2; ++s)
      for (int a = 0; a < 2; ++a) {
        const double err = lam_skewed.at(s, a) - best[s];
        residual += mdp.initial_dist[s] / 2.0 * err * err;
      }
    REQUIRE(residual > 0.0);
    const double loss = regression_loss(mdp, skewed, best, coarse, H);
    REQUIRE(loss == Catch::Approx(residual).epsilon(1e-12));
    // any perturbation is worse
    REQUIRE(regression_loss(mdp, skewed, std::vector<double>{best[0] + 0.05, best[1]}, coarse,
                            H) > loss);
  }
}

TEST_CASE("run_linfa_pg") {
  const TabularMdp mdp = chain_2state(0.9);
  const SoftmaxPolicy policy(2, 2);
  const FeatureMap phi = one_hot_features(mdp);
  const UtilitySpec utility = UtilitySpec::log_barrier(0.125, 2);

  SECTION("exact-fit mode matches a hand-rolled no-approximation reference") {
    LinfaConfig cfg;
    cfg.T = 40;
    cfg.batch = 3;
    cfg.alpha = 0.2;
    cfg.sgd_iterations = 5;
    cfg.seed = 60;
    cfg.use_exact_fit = true;
    cfg.horizon_override = 12;
    cfg.exact_log_stride = 0;
    const TrainLog log = run_linfa_pg(mdp, policy, policy.zero_theta(), utility, phi, cfg);

    // reference: same listing with the exact truncated occupancy as the fit
    Rng rng(60);
    const detail::TransitionCdf cdf(mdp);
    std::vector<double> theta = policy.zero_theta();
    const int H = 12;
    OccupancyVector lam_prev = exact_occupancy_truncated(mdp, policy.table(theta), H);
    for (int t = 0; t < cfg.T; ++t) {
      const PolicyTable tbl = policy.table(theta);
      const OccupancyVector lam_t = exact_occupancy_truncated(mdp, tbl, H);
      const RewardVector r_lag = utility_grad(utility, lam_prev);
      std::vector<double> g_mean(policy.dim(), 0.0);
      for (int i = 0; i < cfg.batch; ++i) {
        const Trajectory tau = sample_trajectory(mdp, cdf, tbl, H, rng);
        const std::vector<double> g = pg_estimate(tau, policy, theta, r_lag, mdp.gamma);
        for (int j = 0; j < policy.dim(); ++j) g_mean[j] += g[j];
      }
      for (int j = 0; j < policy.dim(); ++j) theta[j] += cfg.alpha * g_mean[j] / cfg.batch;
      lam_prev = lam_t;
    }
    REQUIRE(oracle::max_abs_diff(log.final_theta, theta) <= 1e-10);
  }
  SECTION("accounting: fits plus batches, with the pre-loop fit included") {
    LinfaConfig cfg;
    cfg.T = 3;
    cfg.batch = 2;
    cfg.sgd_iterations = 7;
    cfg.alpha = 0.1;
    cfg.seed = 61;
    cfg.horizon_override = 9;
    cfg.exact_log_stride = 0;
    const TrainLog log = run_linfa_pg(mdp, policy, policy.zero_theta(), utility, phi, cfg);
    // (T+1) fits of K probes, each an H-step rollout, plus T*N trajectories
    const long long expected = (3LL + 1) * 7 * 9 + 3LL * 2 * 9;
    REQUIRE(log.total_env_steps == expected);
    REQUIRE(log.regression_rows.size() == 3);
    REQUIRE(log.regression_rows[0].k == 7);
  }
  SECTION("diagnostics track the fit quality") {
    LinfaConfig cfg;
    cfg.T = 5;
    cfg.batch = 4;
    cfg.sgd_iterations = 3000;
    cfg.alpha = 0.1;
    cfg.seed = 62;
    cfg.horizon_override = 10;
    cfg.exact_log_stride = 1;
    const TrainLog log = run_linfa_pg(mdp, policy, policy.zero_theta(), utility, phi, cfg);
    for (const RegressionDiagRow& diag : log.regression_rows) {
      REQUIRE(!std::isnan(diag.final_avg_loss));
      REQUIRE(diag.final_avg_loss >= 0.0);
      REQUIRE(diag.final_avg_loss <= 0.5);
      REQUIRE(!std::isnan(diag.fit_residual_at_visited));
    }
  }
}
