#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>

namespace nvrpg {

/// Step-size / momentum schedules:
///   fos     alpha_t = alpha0 / T^{2/3},     eta_t = (2/(t+1))^{2/3}
///   fos_tv  alpha_t = alpha0 / max(t,1),    eta_t = (2/(t+1))^{2/3}
///   global  alpha_t = alpha0 / (T+1)^a,     eta_t = 2/(t+1)
/// eta_1 = 1 under all three, so the momentum recursion starts from a fresh
/// estimate. fos_tv is the time-varying-step variant that trades the constant
/// horizon-tuned step for a 1/t decay.
enum class ScheduleKind { fos, fos_tv, global };

struct NvrpgConfig {
  int T = 100;
  double alpha0 = 1.0;
  ScheduleKind schedule = ScheduleKind::fos;
  double global_exponent = 0.9;  // a in (0,1), global schedule only
  std::optional<int> horizon_override;
  std::uint64_t seed = 0;

  bool keep_iterates = false;
  int exact_log_stride = 1;   // 0 disables exact-oracle columns
  bool log_exact_grad = false;
};

/// alpha_t; t = 0 covers the initialization step (fos_tv treats it as t = 1).
inline double step_size(const NvrpgConfig& cfg, int t = 0) {
  if (cfg.T < 1) throw std::invalid_argument("schedule: T must be >= 1");
  if (!(cfg.alpha0 > 0.0)) throw std::invalid_argument("schedule: alpha0 must be positive");
  switch (cfg.schedule) {
    case ScheduleKind::fos:
      return cfg.alpha0 / std::pow(double(cfg.T), 2.0 / 3.0);
    case ScheduleKind::fos_tv:
      return cfg.alpha0 / double(std::max(t, 1));
    case ScheduleKind::global:
      if (!(cfg.global_exponent > 0.0 && cfg.global_exponent < 1.0))
        throw std::invalid_argument("schedule: global exponent must be in (0,1)");
      return cfg.alpha0 / std::pow(double(cfg.T) + 1.0, cfg.global_exponent);
  }
  throw std::logic_error("schedule: unknown kind");
}

/// (alpha_t, eta_t) for 1 <= t <= T.
inline std::pair<double, double> schedule_at(const NvrpgConfig& cfg, int t) {
  if (t < 1 || t > cfg.T) throw std::invalid_argument("schedule: t out of range");
  const double eta_base = 2.0 / (double(t) + 1.0);
  const double eta = cfg.schedule == ScheduleKind::global ? eta_base
                                                          : std::pow(eta_base, 2.0 / 3.0);
  return {step_size(cfg, t), eta};
}

/// Default truncation rule H = ceil(log(T+1)/(1-gamma)); always >= 1.
inline int default_horizon(int T, double gamma) {
  const double h = std::log(double(T) + 1.0) / (1.0 - gamma);
  return std::max(1, int(std::ceil(h)));
}

inline int horizon_for(const NvrpgConfig& cfg, double gamma) {
  if (cfg.horizon_override) {
    if (*cfg.horizon_override < 1) throw std::invalid_argument("schedule: horizon must be >= 1");
    return *cfg.horizon_override;
  }
  return default_horizon(cfg.T, gamma);
}

}  // namespace nvrpg
