#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "nvrpg/rng.hpp"

namespace nvrpg {

/// Gaussian policy over a 1-D continuous state: a ~ N(<phi(s), theta>, sigma^2)
/// with a fixed standard deviation. Used only in the cumulative-reward pathway.
class GaussianPolicy {
 public:
  /// Polynomial state features phi(s) = (1, s, s^2, ...) of the given degree.
  GaussianPolicy(int degree, double sigma) : dim_(degree + 1), sigma_(sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("gaussian policy: sigma must be positive");
    if (degree < 0) throw std::invalid_argument("gaussian policy: degree must be >= 0");
  }

  int dim() const { return dim_; }
  double sigma() const { return sigma_; }

  void state_features(double s, std::span<double> out) const {
    double p = 1.0;
    for (int k = 0; k < dim_; ++k) {
      out[k] = p;
      p *= s;
    }
  }

  double mean(std::span<const double> theta, double s) const {
    double m = 0.0, p = 1.0;
    for (int k = 0; k < dim_; ++k) {
      m += theta[k] * p;
      p *= s;
    }
    return m;
  }

  double sample(std::span<const double> theta, double s, Rng& rng) const {
    return rng.normal(mean(theta, s), sigma_);
  }

  double log_density(std::span<const double> theta, double s, double a) const {
    const double z = (a - mean(theta, s)) / sigma_;
    return -0.5 * z * z - std::log(sigma_) - 0.91893853320467274178;  // log sqrt(2 pi)
  }

  /// grad_theta log pi(a|s) = (a - mu_theta(s)) / sigma^2 * phi(s).
  std::vector<double> score(std::span<const double> theta, double s, double a) const {
    std::vector<double> g(dim_, 0.0);
    add_scaled_score(theta, s, a, 1.0, g);
    return g;
  }

  void add_scaled_score(std::span<const double> theta, double s, double a, double coeff,
                        std::span<double> acc) const {
    const double w = coeff * (a - mean(theta, s)) / (sigma_ * sigma_);
    double p = 1.0;
    for (int k = 0; k < dim_; ++k) {
      acc[k] += w * p;
      p *= s;
    }
  }

 private:
  int dim_;
  double sigma_;
};

/// Rollout over a continuous state space: (state, action) pairs.
struct ContinuousTrajectory {
  std::vector<std::pair<double, double>> steps;
  int horizon() const { return int(steps.size()); }
};

/// Toy 1-D chain on [0,1]: x' = clamp(x + kappa*a, 0, 1), reward
/// r(x,a) = x - action_cost * a^2, start uniform on [x0_lo, x0_hi].
/// Moderate rightward drift is optimal; the quadratic action cost keeps
/// runaway means from ever being stationary. The exact return is computable
/// by fine-grid quadrature over the Gaussian action.
struct ContinuousChain {
  double gamma = 0.9;
  double kappa = 0.25;
  double x0_lo = 0.0;
  double x0_hi = 0.2;
  double action_cost = 0.05;

  double step(double x, double a) const { return std::clamp(x + kappa * a, 0.0, 1.0); }
  double reward(double x, double a) const { return x - action_cost * a * a; }
};

inline ContinuousTrajectory sample_trajectory(const ContinuousChain& chain,
                                              const GaussianPolicy& policy,
                                              std::span<const double> theta, int horizon,
                                              Rng& rng) {
  if (horizon <= 0) throw std::invalid_argument("sample_trajectory: horizon must be >= 1");
  ContinuousTrajectory tau;
  tau.steps.reserve(horizon);
  double x = chain.x0_lo + (chain.x0_hi - chain.x0_lo) * rng.next_double();
  for (int t = 0; t < horizon; ++t) {
    double a = policy.sample(theta, x, rng);
    tau.steps.emplace_back(x, a);
    x = chain.step(x, a);
  }
  return tau;
}

/// Truncated REINFORCE estimate for the chain:
/// g = sum_t (sum_{h>=t} gamma^h r(x_h,a_h)) * score(x_t, a_t).
inline std::vector<double> pg_estimate(const ContinuousTrajectory& tau, const GaussianPolicy& policy,
                                       std::span<const double> theta, const ContinuousChain& chain) {
  const int horizon = tau.horizon();
  std::vector<double> g(policy.dim(), 0.0);
  double suffix = 0.0;
  std::vector<double> discounts(horizon);
  double d = 1.0;
  for (int t = 0; t < horizon; ++t) {
    discounts[t] = d;
    d *= chain.gamma;
  }
  std::vector<double> suffixes(horizon);
  for (int t = horizon - 1; t >= 0; --t) {
    suffix += discounts[t] * chain.reward(tau.steps[t].first, tau.steps[t].second);
    suffixes[t] = suffix;
  }
  for (int t = 0; t < horizon; ++t)
    policy.add_scaled_score(theta, tau.steps[t].first, tau.steps[t].second, suffixes[t], g);
  return g;
}

/// Likelihood ratio of the trajectory's actions under theta_new vs theta_old.
inline double is_weight(const ContinuousTrajectory& tau, const GaussianPolicy& policy,
                        std::span<const double> theta_new, std::span<const double> theta_old) {
  double log_ratio = 0.0;
  for (const auto& [s, a] : tau.steps)
    log_ratio += policy.log_density(theta_new, s, a) - policy.log_density(theta_old, s, a);
  if (!std::isfinite(log_ratio)) throw std::runtime_error("is_weight: non-finite log ratio");
  return std::exp(log_ratio);
}

/// Exact J(theta) on a fine state grid: cell-to-cell kernel from Gaussian
/// CDF differences (clipping mass folded into the boundary cells), then
/// discounted evaluation by fixed-point iteration.
inline double quadrature_return(const ContinuousChain& chain, const GaussianPolicy& policy,
                                std::span<const double> theta, int grid_cells = 401,
                                double tol = 1e-10) {
  const int m = grid_cells;
  const double width = 1.0 / m;
  auto cell_center = [&](int i) { return (i + 0.5) * width; };
  auto norm_cdf = [](double z) { return 0.5 * std::erfc(-z / 1.4142135623730950488); };

  // kernel(i,j) = P(x' in cell j | x = center_i)
  std::vector<double> kernel(std::size_t(m) * m, 0.0);
  for (int i = 0; i < m; ++i) {
    const double x = cell_center(i);
    const double mu = x + chain.kappa * policy.mean(theta, x);
    const double sd = std::abs(chain.kappa) * policy.sigma();
    double prev = norm_cdf((0.0 - mu) / sd);  // mass clipped to x'=0 lands in cell 0
    for (int j = 0; j < m; ++j) {
      const double hi = (j + 1 == m) ? 1.0 : norm_cdf(((j + 1) * width - mu) / sd);
      kernel[std::size_t(i) * m + j] = hi - prev;
      prev = hi;
    }
    kernel[std::size_t(i) * m + (m - 1)] += 1.0 - prev;  // clipped to x'=1
  }

  // expected one-step reward under the policy: E[r(x,a)] = x - c (mu^2 + sigma^2)
  std::vector<double> mean_reward(m);
  for (int i = 0; i < m; ++i) {
    const double x = cell_center(i);
    const double mu = policy.mean(theta, x);
    mean_reward[i] = x - chain.action_cost * (mu * mu + policy.sigma() * policy.sigma());
  }

  std::vector<double> values(m, 0.0), next(m);
  for (;;) {
    double residual = 0.0;
    for (int i = 0; i < m; ++i) {
      double v = mean_reward[i];
      const double* row = kernel.data() + std::size_t(i) * m;
      double cont = 0.0;
      for (int j = 0; j < m; ++j) cont += row[j] * values[j];
      v += chain.gamma * cont;
      next[i] = v;
      residual = std::max(residual, std::abs(v - values[i]));
    }
    values.swap(next);
    if (residual <= tol) break;
  }
  // start distribution uniform on [x0_lo, x0_hi]
  double j_val = 0.0, mass = 0.0;
  for (int i = 0; i < m; ++i) {
    const double lo = i * width, hi = (i + 1) * width;
    const double overlap = std::max(0.0, std::min(hi, chain.x0_hi) - std::max(lo, chain.x0_lo));
    if (overlap > 0.0) {
      j_val += overlap * values[i];
      mass += overlap;
    }
  }
  return j_val / mass;
}

}  // namespace nvrpg
