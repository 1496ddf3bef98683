#pragma once

#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "nvrpg/dp.hpp"
#include "nvrpg/envs.hpp"
#include "nvrpg/estimators.hpp"
#include "nvrpg/gaussian.hpp"
#include "nvrpg/linfa.hpp"
#include "nvrpg/nvrpg.hpp"

namespace nvrpg {

// The audit command: executes the statistical and algebraic invariants of
// each module against a sampling budget and reports measured statistic vs
// tolerance, one line per check.

struct AuditResult {
  std::string name;
  bool pass = false;
  double statistic = 0.0;  // measured value (z-score, max error, ...)
  double tolerance = 0.0;
  std::string detail;
};

namespace audit_detail {

inline double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

/// Welford accumulator for per-coordinate z-scores of a sample mean.
struct MeanTracker {
  std::vector<double> mean, m2;
  long long n = 0;

  explicit MeanTracker(std::size_t dim) : mean(dim, 0.0), m2(dim, 0.0) {}

  void add(std::span<const double> x) {
    ++n;
    for (std::size_t i = 0; i < mean.size(); ++i) {
      const double delta = x[i] - mean[i];
      mean[i] += delta / double(n);
      m2[i] += delta * (x[i] - mean[i]);
    }
  }

  /// max_i |mean_i - target_i| / stderr_i; coordinates with ~zero variance
  /// fall back to an absolute comparison at 1e-12.
  double max_z(std::span<const double> target) const {
    double worst = 0.0;
    for (std::size_t i = 0; i < mean.size(); ++i) {
      const double var = n > 1 ? m2[i] / double(n - 1) : 0.0;
      const double se = std::sqrt(var / double(n));
      const double err = std::abs(mean[i] - target[i]);
      worst = std::max(worst, se > 1e-300 ? err / se : (err > 1e-12 ? 1e9 : 0.0));
    }
    return worst;
  }
};

inline std::vector<double> random_theta(int dim, Rng& rng, double scale = 1.0) {
  std::vector<double> theta(dim);
  for (double& v : theta) v = rng.normal(0.0, scale);
  return theta;
}

}  // namespace audit_detail

inline std::vector<AuditResult> audit_estimators(long long budget) {
  using namespace audit_detail;
  std::vector<AuditResult> results;
  const TabularMdp mdp = chain_2state(0.9);
  const SoftmaxPolicy policy(2, 2);
  Rng rng(20240);
  const std::vector<double> theta = random_theta(policy.dim(), rng);
  const PolicyTable tbl = policy.table(theta);
  const int H = 15;
  const OccupancyVector lam_exact = exact_occupancy_truncated(mdp, tbl, H);

  {  // lambda(tau) unbiased for the truncated occupancy, entrywise
    MeanTracker tracker(lam_exact.values.size());
    for (long long i = 0; i < budget; ++i) {
      const Trajectory tau = sample_trajectory(mdp, tbl, H, rng);
      const OccupancyVector lam = occupancy_estimate(tau, mdp.gamma, 2, 2);
      tracker.add(lam.values);
    }
    const double z = tracker.max_z(lam_exact.values);
    results.push_back({"estimators/occupancy_estimate_unbiased", z <= 4.0, z, 4.0,
                       "max |z| over entries at n=" + std::to_string(budget)});
  }
  {  // mass identity of lambda(tau)
    double worst = 0.0;
    const double expected = (1.0 - std::pow(mdp.gamma, H)) / (1.0 - mdp.gamma);
    for (int i = 0; i < 200; ++i) {
      const Trajectory tau = sample_trajectory(mdp, tbl, H, rng);
      const OccupancyVector lam = occupancy_estimate(tau, mdp.gamma, 2, 2);
      worst = std::max(worst, std::abs(lam.sum() - expected));
    }
    results.push_back({"estimators/occupancy_estimate_mass", worst <= 1e-9, worst, 1e-9,
                       "entry sum vs (1-gamma^H)/(1-gamma)"});
  }
  {  // E[g(tau,theta,r)] = [d lambda_H / d theta]^T r, via finite differences
    RewardVector reward = {0.3, -0.8, 1.1, 0.4};
    std::vector<double> target(policy.dim());
    const double eps = 1e-5;
    for (int i = 0; i < policy.dim(); ++i) {
      std::vector<double> hi = theta, lo = theta;
      hi[i] += eps;
      lo[i] -= eps;
      const OccupancyVector lam_hi = exact_occupancy_truncated(mdp, policy.table(hi), H);
      const OccupancyVector lam_lo = exact_occupancy_truncated(mdp, policy.table(lo), H);
      double v_hi = 0.0, v_lo = 0.0;
      for (std::size_t j = 0; j < reward.size(); ++j) {
        v_hi += lam_hi.values[j] * reward[j];
        v_lo += lam_lo.values[j] * reward[j];
      }
      target[i] = (v_hi - v_lo) / (2.0 * eps);
    }
    MeanTracker tracker(policy.dim());
    for (long long i = 0; i < budget; ++i) {
      const Trajectory tau = sample_trajectory(mdp, tbl, H, rng);
      tracker.add(pg_estimate(tau, policy, theta, reward, mdp.gamma));
    }
    const double z = tracker.max_z(target);
    results.push_back({"estimators/pg_estimate_unbiased", z <= 4.0, z, 4.0,
                       "vs finite-difference Jacobian-vector oracle"});
  }
  {  // E[w] = 1 under the old policy; perturbation sized like consecutive
     // iterates so the weight distribution is light-tailed enough for a
     // reliable 4-sigma mean test
    std::vector<double> theta_new = theta;
    for (double& v : theta_new) v += rng.normal(0.0, 0.05);
    MeanTracker tracker(1);
    for (long long i = 0; i < budget; ++i) {
      const Trajectory tau = sample_trajectory(mdp, tbl, H, rng);
      const double w = is_weight(tau, policy, theta_new, theta);
      tracker.add(std::span<const double>(&w, 1));
    }
    const double one = 1.0;
    const double z = tracker.max_z(std::span<const double>(&one, 1));
    results.push_back({"estimators/is_weight_mean_one", z <= 4.0, z, 4.0,
                       "mean IS weight over trajectories from the old policy"});
  }
  {  // truncated probe unbiased at a pair
    MeanTracker tracker(1);
    for (long long i = 0; i < budget; ++i) {
      const double probe = mc_truncated_occupancy_at(mdp, tbl, 1, 0, H, rng);
      tracker.add(std::span<const double>(&probe, 1));
    }
    const double target = lam_exact.at(1, 0);
    const double z = tracker.max_z(std::span<const double>(&target, 1));
    results.push_back({"estimators/mc_truncated_probe_unbiased", z <= 4.0, z, 4.0,
                       "probe at pair (1,0) vs DP oracle"});
  }
  {  // geometric probe mean = (1-gamma) lambda
    const OccupancyVector lam_inf = exact_occupancy_infinite(mdp, tbl);
    MeanTracker tracker(1);
    for (long long i = 0; i < budget; ++i) {
      const double probe = geometric_occupancy_at(mdp, tbl, 1, 0, rng);
      tracker.add(std::span<const double>(&probe, 1));
    }
    const double target = (1.0 - mdp.gamma) * lam_inf.at(1, 0);
    const double z = tracker.max_z(std::span<const double>(&target, 1));
    results.push_back({"estimators/geometric_probe_mean", z <= 4.0, z, 4.0,
                       "mean indicator vs (1-gamma)*lambda at pair (1,0)"});
  }
  {  // backward pass equals the naive double sum
    double worst = 0.0;
    RewardVector reward = {0.3, -0.8, 1.1, 0.4};
    for (int rep = 0; rep < 100; ++rep) {
      const std::vector<double> th = random_theta(policy.dim(), rng);
      const Trajectory tau = sample_trajectory(mdp, policy.table(th), H, rng);
      const std::vector<double> fast = pg_estimate(tau, policy, th, reward, mdp.gamma);
      std::vector<double> naive(policy.dim(), 0.0);
      for (int t = 0; t < H; ++t) {
        double inner = 0.0;
        for (int h = t; h < H; ++h)
          inner += std::pow(mdp.gamma, h) *
                   reward[sa_index(tau.steps[h].first, tau.steps[h].second, 2)];
        policy.add_scaled_score(th, tau.steps[t].first, tau.steps[t].second, inner, naive);
      }
      for (int i = 0; i < policy.dim(); ++i)
        worst = std::max(worst, std::abs(fast[i] - naive[i]));
    }
    results.push_back({"estimators/pg_backward_equals_naive", worst <= 1e-10, worst, 1e-10,
                       "O(H) backward pass vs O(H^2) double sum"});
  }
  return results;
}

inline std::vector<AuditResult> audit_policy(long long budget) {
  using namespace audit_detail;
  std::vector<AuditResult> results;
  Rng rng(20241);
  const SoftmaxPolicy policy(3, 4);

  {  // probability simplex at moderate logits
    double worst = 0.0;
    for (int rep = 0; rep < 200; ++rep) {
      const std::vector<double> theta = random_theta(policy.dim(), rng, 2.0);
      for (int s = 0; s < 3; ++s) {
        const std::vector<double> probs = policy.action_distribution(theta, s);
        double total = 0.0;
        for (double p : probs) {
          if (!(p > 0.0)) worst = std::max(worst, 1.0);
          total += p;
        }
        worst = std::max(worst, std::abs(total - 1.0));
      }
    }
    results.push_back({"policy/distribution_simplex", worst <= 1e-12, worst, 1e-12,
                       "sums to 1, strictly positive at random theta"});
  }
  {  // extreme logits: no overflow, and the log-domain path stays finite
    // (probabilities this small underflow to +0 in doubles; log_prob carries
    // the information instead)
    double worst = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
      const std::vector<double> theta = random_theta(policy.dim(), rng, 500.0);
      for (int s = 0; s < 3; ++s) {
        const std::vector<double> probs = policy.action_distribution(theta, s);
        double total = 0.0;
        for (int a = 0; a < 4; ++a) {
          if (!std::isfinite(probs[a]) || probs[a] < 0.0) worst = std::max(worst, 1.0);
          if (!std::isfinite(policy.log_prob(theta, s, a)) ||
              policy.log_prob(theta, s, a) > 1e-12)
            worst = std::max(worst, 1.0);
          total += probs[a];
        }
        worst = std::max(worst, std::abs(total - 1.0));
      }
    }
    results.push_back({"policy/extreme_logit_stability", worst <= 1e-12, worst, 1e-12,
                       "finite probabilities and log-probabilities at |logit| ~ 500"});
  }
  {  // E_a[score] = 0 exactly
    double worst = 0.0;
    for (int rep = 0; rep < 200; ++rep) {
      const std::vector<double> theta = random_theta(policy.dim(), rng, 2.0);
      for (int s = 0; s < 3; ++s) {
        const std::vector<double> probs = policy.action_distribution(theta, s);
        std::vector<double> acc(policy.dim(), 0.0);
        for (int a = 0; a < 4; ++a) policy.add_scaled_score(theta, s, a, probs[a], acc);
        worst = std::max(worst, max_abs(acc));
      }
    }
    results.push_back({"policy/score_zero_mean", worst <= 1e-12, worst, 1e-12,
                       "sum_a pi(a|s) score(s,a) over random theta"});
  }
  {  // score vs central finite differences of log pi
    double worst_rel = 0.0;
    const double eps = 1e-6;
    for (int rep = 0; rep < 200; ++rep) {
      const std::vector<double> theta = random_theta(policy.dim(), rng, 1.5);
      const int s = rep % 3, a = rep % 4;
      const std::vector<double> g = policy.score(theta, s, a);
      for (int i = 0; i < policy.dim(); ++i) {
        std::vector<double> hi = theta, lo = theta;
        hi[i] += eps;
        lo[i] -= eps;
        const double fd = (policy.log_prob(hi, s, a) - policy.log_prob(lo, s, a)) / (2.0 * eps);
        const double scale = std::max(1.0, std::abs(fd));
        worst_rel = std::max(worst_rel, std::abs(g[i] - fd) / scale);
      }
    }
    results.push_back({"policy/score_matches_fd", worst_rel <= 1e-5, worst_rel, 1e-5,
                       "central differences, step 1e-6"});
  }
  {  // normalized step length
    double worst = 0.0;
    for (int rep = 0; rep < 200; ++rep) {
      const std::vector<double> theta = random_theta(12, rng, 3.0);
      const std::vector<double> dir = random_theta(12, rng, 5.0);
      const double alpha = 0.01 + rng.next_double();
      const std::vector<double> next = normalized_step(theta, dir, alpha);
      std::vector<double> delta(12);
      for (int i = 0; i < 12; ++i) delta[i] = next[i] - theta[i];
      worst = std::max(worst, std::abs(norm2(delta) - alpha));
    }
    results.push_back({"policy/normalized_step_length", worst <= 1e-12, worst, 1e-12,
                       "||theta' - theta|| = alpha for nonzero directions"});
  }
  {  // realized IS weights respect the deterministic ceiling
    const TabularMdp mdp = chain_2state(0.9);
    const SoftmaxPolicy tab(2, 2);
    const PolicyConstants constants = tab.constants();
    double worst_margin = -1e300;
    const int H = 25;
    for (int rep = 0; rep < 500; ++rep) {
      std::vector<double> theta = random_theta(tab.dim(), rng, 1.0);
      const std::vector<double> dir = random_theta(tab.dim(), rng, 1.0);
      const double alpha = 0.005 + 0.2 * rng.next_double();
      const std::vector<double> theta_next = normalized_step(theta, dir, alpha);
      const Trajectory tau = sample_trajectory(mdp, tab.table(theta_next), H, rng);
      const double w = is_weight(tau, tab, theta, theta_next);
      const double bound = is_weight_bound(constants, H, alpha);
      worst_margin = std::max(worst_margin, w - bound);
    }
    results.push_back({"policy/is_weight_within_bound", worst_margin <= 0.0, worst_margin, 0.0,
                       "max (w - exp(2 H l_psi alpha)) over random normalized pairs"});
  }
  {  // gaussian score identities
    const GaussianPolicy gp(1, 0.7);
    double worst = 0.0;
    const double eps = 1e-6;
    for (int rep = 0; rep < 200; ++rep) {
      const std::vector<double> theta = random_theta(gp.dim(), rng, 1.0);
      const double s = rng.next_double();
      const double a = gp.mean(theta, s) + 2.0 * rng.normal(0.0, 1.0);
      const std::vector<double> g = gp.score(theta, s, a);
      for (int i = 0; i < gp.dim(); ++i) {
        std::vector<double> hi = theta, lo = theta;
        hi[i] += eps;
        lo[i] -= eps;
        const double fd = (gp.log_density(hi, s, a) - gp.log_density(lo, s, a)) / (2.0 * eps);
        const double scale = std::max(1.0, std::abs(fd));
        worst = std::max(worst, std::abs(g[i] - fd) / scale);
      }
    }
    results.push_back({"policy/gaussian_score_matches_fd", worst <= 1e-5, worst, 1e-5,
                       "central differences of the log density"});
    // sampling is centered at the parametrized mean
    MeanTracker tracker(1);
    const std::vector<double> theta0(gp.dim(), 0.0);
    const long long n = std::max<long long>(budget, 1000);
    for (long long i = 0; i < n; ++i) {
      const double draw = gp.sample(theta0, 0.5, rng);
      tracker.add(std::span<const double>(&draw, 1));
    }
    const double zero = 0.0;
    const double z = tracker.max_z(std::span<const double>(&zero, 1));
    results.push_back({"policy/gaussian_sample_mean", z <= 4.0, z, 4.0,
                       "empirical mean of draws at theta = 0"});
  }
  return results;
}

inline std::vector<AuditResult> audit_algorithms(long long /*budget*/) {
  using namespace audit_detail;
  std::vector<AuditResult> results;
  const TabularMdp mdp = chain_2state(0.9);
  const SoftmaxPolicy policy(2, 2);
  const std::vector<double> theta0(policy.dim(), 0.0);

  {  // sample accounting and step-length exactness over a full run
    NvrpgConfig cfg;
    cfg.T = 300;
    cfg.alpha0 = 1.0;
    cfg.seed = 7;
    cfg.exact_log_stride = 0;
    cfg.keep_iterates = true;
    const UtilitySpec utility = UtilitySpec::log_barrier(0.125, mdp.num_actions);
    const TrainLog log = run_nvrpg_general(mdp, policy, theta0, utility, cfg);
    const int H = horizon_for(cfg, mdp.gamma);
    const bool steps_ok = log.total_env_steps == (long long)cfg.T * H;
    results.push_back({"algorithms/sample_accounting", steps_ok,
                       double(log.total_env_steps), double(cfg.T) * H,
                       "total env steps = T * H"});

    double worst_len = 0.0;
    std::vector<double> prev = theta0;
    for (std::size_t i = 0; i < log.iterates.size(); ++i) {
      std::vector<double> delta(policy.dim());
      for (int j = 0; j < policy.dim(); ++j) delta[j] = log.iterates[i][j] - prev[j];
      const double alpha = log.rows[i].alpha;
      if (log.rows[i].d_norm > 0.0)
        worst_len = std::max(worst_len, std::abs(norm2(delta) - alpha));
      prev = log.iterates[i];
    }
    results.push_back({"algorithms/normalized_move_length", worst_len <= 1e-12, worst_len, 1e-12,
                       "||theta_{t+1}-theta_t|| = alpha_t at every step"});

    double worst_violation = -1e300;
    for (const TrainRow& row : log.rows)
      if (!std::isnan(row.is_weight))
        worst_violation = std::max(worst_violation, row.is_weight - row.is_bound);
    results.push_back({"algorithms/is_bound_zero_violations", worst_violation <= 0.0,
                       worst_violation, 0.0, "max (w_t - bound) over the run"});
  }
  {  // linear utility: general and standard loops coincide
    NvrpgConfig cfg;
    cfg.T = 200;
    cfg.seed = 11;
    cfg.exact_log_stride = 0;
    const RewardVector reward = chain_2state_reward();
    const TrainLog a = run_nvrpg_general(mdp, policy, theta0, UtilitySpec::linear(reward), cfg);
    const TrainLog b = run_nvrpg_standard(mdp, policy, theta0, reward, cfg);
    double worst = 0.0;
    for (int i = 0; i < policy.dim(); ++i)
      worst = std::max(worst, std::abs(a.final_theta[i] - b.final_theta[i]));
    results.push_back({"algorithms/linear_utility_reduction", worst <= 1e-12, worst, 1e-12,
                       "per-coordinate agreement of final iterates"});
  }
  {  // stationarity trend: longer runs end with smaller average exact gradient
    const UtilitySpec utility = UtilitySpec::log_barrier(0.125, mdp.num_actions);
    auto mean_grad_norm = [&](int T) {
      double total = 0.0;
      int count = 0;
      for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        NvrpgConfig cfg;
        cfg.T = T;
        cfg.seed = seed;
        cfg.exact_log_stride = std::max(1, T / 50);
        cfg.log_exact_grad = true;
        const TrainLog log = run_nvrpg_general(mdp, policy, theta0, utility, cfg);
        for (const TrainRow& row : log.rows)
          if (!std::isnan(row.grad_norm_exact)) {
            total += row.grad_norm_exact;
            ++count;
          }
      }
      return total / count;
    };
    const double short_run = mean_grad_norm(200);
    const double long_run = mean_grad_norm(1600);
    results.push_back({"algorithms/gradient_norm_trend", long_run < short_run,
                       long_run, short_run,
                       "mean exact grad norm, T=1600 vs T=200 (direction only)"});
  }
  return results;
}

inline std::vector<AuditResult> audit_linfa(long long budget) {
  using namespace audit_detail;
  std::vector<AuditResult> results;
  const TabularMdp mdp = chain_2state(0.9);
  const SoftmaxPolicy policy(2, 2);
  Rng rng(20242);
  const std::vector<double> theta = random_theta(policy.dim(), rng, 0.5);
  const PolicyTable tbl = policy.table(theta);
  const FeatureMap phi = one_hot_features(mdp);
  const int H = 15;
  const OccupancyVector lam_exact = exact_occupancy_truncated(mdp, tbl, H);

  {  // stochastic regression gradient is unbiased for grad L
    std::vector<double> omega = random_theta(phi.dim, rng, 0.3);
    // exact gradient by enumeration over (s,a) with the DP occupancy
    std::vector<double> target(phi.dim, 0.0);
    for (int s = 0; s < 2; ++s)
      for (int a = 0; a < 2; ++a) {
        const double weight = mdp.initial_dist[s] / 2.0;
        const double residual = 2.0 * (phi.dot(s, a, omega) - lam_exact.at(s, a));
        auto row = phi.at(s, a);
        for (int k = 0; k < phi.dim; ++k) target[k] += weight * residual * row[k];
      }
    MeanTracker tracker(phi.dim);
    for (long long i = 0; i < budget; ++i) {
      const int s = rng.categorical(mdp.initial_dist);
      int a = int(rng.next_double() * 2);
      if (a >= 2) a = 1;
      const double probe = mc_truncated_occupancy_at(mdp, tbl, s, a, H, rng);
      tracker.add(stochastic_reg_grad(omega, s, a, probe, phi));
    }
    const double z = tracker.max_z(target);
    results.push_back({"linfa/reg_grad_unbiased", z <= 4.0, z, 4.0,
                       "vs exhaustive-enumeration gradient of L_theta"});
  }
  {  // one-hot features represent the occupancy exactly
    const double loss = regression_loss(mdp, tbl, lam_exact.values, phi, H);
    results.push_back({"linfa/one_hot_zero_approx_error", loss <= 1e-18, loss, 1e-18,
                       "population loss at the exactly-constructed optimum"});
  }
  {  // averaged SGD reaches the occupancy at every well-covered pair
    SgdFitOptions opts;
    opts.iterations = 10000;
    opts.horizon = H;
    Rng fit_rng(5);
    const std::vector<double> omega = sgd_occupancy_fit(mdp, tbl, phi, opts, fit_rng);
    double worst = 0.0;
    for (int s = 0; s < 2; ++s) {
      if (mdp.initial_dist[s] < 0.1) continue;
      for (int a = 0; a < 2; ++a)
        worst = std::max(worst, std::abs(phi.dot(s, a, omega) - lam_exact.at(s, a)));
    }
    results.push_back({"linfa/averaged_sgd_fit_accuracy", worst <= 0.05, worst, 0.05,
                       "max |fit - DP| over pairs with rho-mass >= 0.1, K=1e4"});
  }
  {  // excess loss decays roughly like 1/K
    std::vector<double> log_k, log_loss;
    for (int K : {1000, 2000, 4000, 8000}) {
      double total = 0.0;
      const int reps = 24;
      for (int rep = 0; rep < reps; ++rep) {
        SgdFitOptions opts;
        opts.iterations = K;
        opts.horizon = H;
        Rng fit_rng(1000 + rep);
        const std::vector<double> omega = sgd_occupancy_fit(mdp, tbl, phi, opts, fit_rng);
        total += regression_loss(mdp, tbl, omega, phi, H);
      }
      log_k.push_back(std::log(double(K)));
      log_loss.push_back(std::log(total / reps));
    }
    double mean_x = 0.0, mean_y = 0.0;
    for (std::size_t i = 0; i < log_k.size(); ++i) {
      mean_x += log_k[i];
      mean_y += log_loss[i];
    }
    mean_x /= double(log_k.size());
    mean_y /= double(log_k.size());
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < log_k.size(); ++i) {
      num += (log_k[i] - mean_x) * (log_loss[i] - mean_y);
      den += (log_k[i] - mean_x) * (log_k[i] - mean_x);
    }
    const double slope = num / den;
    const bool pass = slope >= -1.3 && slope <= -0.7;
    results.push_back({"linfa/averaged_sgd_rate", pass, slope, -1.0,
                       "log-log slope of excess loss vs K in [-1.3, -0.7]"});
  }
  return results;
}

inline std::vector<AuditResult> audit_invariants(const std::string& scope, long long budget) {
  std::vector<AuditResult> results;
  auto append = [&](std::vector<AuditResult> more) {
    for (auto& r : more) results.push_back(std::move(r));
  };
  bool matched = false;
  if (scope == "estimators" || scope == "all") {
    append(audit_estimators(budget));
    matched = true;
  }
  if (scope == "policy" || scope == "all") {
    append(audit_policy(budget));
    matched = true;
  }
  if (scope == "algorithms" || scope == "all") {
    append(audit_algorithms(budget));
    matched = true;
  }
  if (scope == "linfa" || scope == "all") {
    append(audit_linfa(budget));
    matched = true;
  }
  if (!matched)
    throw std::invalid_argument(
        "audit: scope must be one of estimators|policy|algorithms|linfa|all");
  return results;
}

inline int print_audit_report(const std::vector<AuditResult>& results) {
  int failures = 0;
  for (const AuditResult& r : results) {
    std::printf("%-45s %s  statistic=%.6g tolerance=%.6g  (%s)\n", r.name.c_str(),
                r.pass ? "PASS" : "FAIL", r.statistic, r.tolerance, r.detail.c_str());
    if (!r.pass) ++failures;
  }
  std::printf("%d/%zu checks passed\n", int(results.size()) - failures, results.size());
  return failures == 0 ? 0 : 1;
}

}  // namespace nvrpg
