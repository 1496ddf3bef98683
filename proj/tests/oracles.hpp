#pragma once

// Test-side oracles, deliberately independent of the library implementations
// they check: a hand-rolled pivoted Gaussian elimination (vs the Eigen solve
// inside dp.hpp), BFS shortest paths for gridworld values and simple
// statistics helpers for the Monte-Carlo suites.

#include <cmath>
#include <cstddef>
#include <queue>
#include <span>
#include <stdexcept>
#include <vector>

namespace oracle {

/// Solves A x = b by Gaussian elimination with partial pivoting.
inline std::vector<double> solve_linear(std::vector<double> a, std::vector<double> b) {
  const std::size_t n = b.size();
  if (a.size() != n * n) throw std::invalid_argument("solve_linear: shape mismatch");
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col])) pivot = r;
    if (a[pivot * n + col] == 0.0) throw std::runtime_error("solve_linear: singular matrix");
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a[pivot * n + c], a[col * n + c]);
      std::swap(b[pivot], b[col]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double factor = a[r * n + col] / a[col * n + col];
      if (factor == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a[r * n + c] -= factor * a[col * n + c];
      b[r] -= factor * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t ri = n; ri-- > 0;) {
    double acc = b[ri];
    for (std::size_t c = ri + 1; c < n; ++c) acc -= a[ri * n + c] * x[c];
    x[ri] = acc / a[ri * n + ri];
  }
  return x;
}

/// Discounted state distribution d = (I - gamma P_pi^T)^{-1} rho for a
/// state-to-state kernel given row-major as kernel[s*n + s'].
inline std::vector<double> discounted_state_distribution(const std::vector<double>& kernel,
                                                         const std::vector<double>& rho,
                                                         double gamma) {
  const std::size_t n = rho.size();
  std::vector<double> system(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) system[i * n + i] = 1.0;
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t sp = 0; sp < n; ++sp) system[sp * n + s] -= gamma * kernel[s * n + sp];
  return solve_linear(std::move(system), rho);
}

/// BFS grid distances to the nearest goal, ignoring holes (for deterministic
/// gridworlds without holes).
inline std::vector<int> grid_distances(int rows, int cols, const std::vector<int>& goals) {
  std::vector<int> dist(std::size_t(rows) * cols, -1);
  std::queue<int> frontier;
  for (int g : goals) {
    dist[g] = 0;
    frontier.push(g);
  }
  while (!frontier.empty()) {
    const int cell = frontier.front();
    frontier.pop();
    const int r = cell / cols, c = cell % cols;
    const int moves[4][2] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};
    for (const auto& m : moves) {
      const int nr = r + m[0], nc = c + m[1];
      if (nr < 0 || nr >= rows || nc < 0 || nc >= cols) continue;
      const int next = nr * cols + nc;
      if (dist[next] == -1) {
        dist[next] = dist[cell] + 1;
        frontier.push(next);
      }
    }
  }
  return dist;
}

struct RunningMean {
  double mean = 0.0;
  double m2 = 0.0;
  long long n = 0;

  void add(double x) {
    ++n;
    const double delta = x - mean;
    mean += delta / double(n);
    m2 += delta * (x - mean);
  }

  double std_error() const {
    if (n < 2) return 0.0;
    return std::sqrt(m2 / double(n - 1) / double(n));
  }

  /// |mean - target| in standard errors (very small variance falls back to an
  /// absolute 1e-12 comparison).
  double z_against(double target) const {
    const double se = std_error();
    const double err = std::abs(mean - target);
    if (se > 1e-300) return err / se;
    return err > 1e-12 ? 1e9 : 0.0;
  }
};

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

}  // namespace oracle
