#pragma once

#include <limits>
#include <string>
#include <vector>

namespace nvrpg {

inline constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

/// One logged optimization step. Unset metrics stay NaN and render as empty
/// CSV cells.
struct TrainRow {
  int t = 0;
  long long steps = 0;       // cumulative environment interactions
  double alpha = kUnset;     // step size used to produce theta_{t+1}
  double eta = kUnset;       // momentum weight (NaN where the listing has none)
  double f_exact = kUnset;   // F(lambda(theta_t)) via the DP oracle, tabular only
  double j_exact = kUnset;   // <lambda(theta_t), r> for linear objectives
  double grad_norm_exact = kUnset;
  double d_norm = kUnset;    // norm of the update direction
  double is_weight = kUnset; // realized IS weight at this iteration
  double is_bound = kUnset;  // deterministic ceiling exp(2 H l_psi alpha_{t-1})
};

/// Per-outer-iteration regression diagnostics of the function-approximation
/// pathway.
struct RegressionDiagRow {
  int t = 0;
  int k = 0;                 // SGD iterations spent on the fit
  double final_avg_loss = kUnset;          // exact population loss of the fit
  double fit_residual_at_visited = kUnset; // mean |fit - exact| over visited pairs
};

struct TrainLog {
  std::vector<TrainRow> rows;
  std::vector<RegressionDiagRow> regression_rows;
  std::vector<double> final_theta;
  std::vector<std::vector<double>> iterates;  // theta_1..theta_T when kept
  long long total_env_steps = 0;
  int zero_direction_events = 0;
  // smallest entry the recursive occupancy estimate ever reached; the
  // recursion may dip transiently below zero (exactly 0 when eta_t = 1)
  double lambda_min_entry = 0.0;
  bool aborted = false;
  std::string abort_reason;
};

}  // namespace nvrpg
