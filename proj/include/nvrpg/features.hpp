#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "nvrpg/mdp.hpp"
#include "nvrpg/rng.hpp"

namespace nvrpg {

/// Dense feature map phi: (s,a) -> R^m, stored row-major per pair so tabular
/// scale stays exactly testable. norm_bound is the exhaustively computed
/// max ||phi(s,a)||; min_covariance_eig carries the smallest eigenvalue of
/// E[phi phi^T] under s ~ rho, a ~ Uniform(A) where it is known analytically
/// (only the one-hot map ships with that guarantee).
struct FeatureMap {
  int dim = 0;
  int num_states = 0;
  int num_actions = 0;
  std::vector<double> data;  // (s*A+a)*dim + k
  double norm_bound = 0.0;
  std::optional<double> min_covariance_eig;

  std::span<const double> at(int s, int a) const {
    return {data.data() + std::size_t(sa_index(s, a, num_actions)) * dim, std::size_t(dim)};
  }

  double dot(int s, int a, std::span<const double> omega) const {
    auto phi = at(s, a);
    double value = 0.0;
    for (int k = 0; k < dim; ++k) value += phi[k] * omega[k];
    return value;
  }

  void compute_norm_bound() {
    norm_bound = 0.0;
    for (int i = 0; i < num_states * num_actions; ++i) {
      double sq = 0.0;
      for (int k = 0; k < dim; ++k) {
        const double v = data[std::size_t(i) * dim + k];
        sq += v * v;
      }
      norm_bound = std::max(norm_bound, std::sqrt(sq));
    }
  }
};

/// Exact representation: m = |S|*|A|, B = 1, covariance eigenvalue
/// min_s rho(s)/|A|.
inline FeatureMap one_hot_features(const TabularMdp& mdp) {
  FeatureMap phi;
  phi.num_states = mdp.num_states;
  phi.num_actions = mdp.num_actions;
  phi.dim = mdp.num_states * mdp.num_actions;
  phi.data.assign(std::size_t(phi.dim) * phi.dim, 0.0);
  for (int i = 0; i < phi.dim; ++i) phi.data[std::size_t(i) * phi.dim + i] = 1.0;
  phi.norm_bound = 1.0;
  double rho_min = 1.0;
  for (double p : mdp.initial_dist) rho_min = std::min(rho_min, p);
  phi.min_covariance_eig = rho_min / mdp.num_actions;
  return phi;
}

/// Coarse tile coding on a grid layout: cells are grouped into tile x tile
/// blocks and the feature is one-hot over (block, action). Deliberately
/// rank-deficient relative to the tabular map, so the best linear fit has a
/// positive residual.
inline FeatureMap tile_features(int rows, int cols, int num_actions, int tile) {
  if (tile < 1) throw std::invalid_argument("tile_features: tile must be >= 1");
  const int tile_rows = (rows + tile - 1) / tile;
  const int tile_cols = (cols + tile - 1) / tile;
  FeatureMap phi;
  phi.num_states = rows * cols;
  phi.num_actions = num_actions;
  phi.dim = tile_rows * tile_cols * num_actions;
  phi.data.assign(std::size_t(phi.num_states) * num_actions * phi.dim, 0.0);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      for (int a = 0; a < num_actions; ++a) {
        const int s = r * cols + c;
        const int block = (r / tile) * tile_cols + (c / tile);
        const int k = block * num_actions + a;
        phi.data[std::size_t(sa_index(s, a, num_actions)) * phi.dim + k] = 1.0;
      }
  phi.norm_bound = 1.0;
  return phi;
}

/// Seeded Gaussian random projection of the one-hot map into m dimensions.
inline FeatureMap random_projection_features(const TabularMdp& mdp, int dim, std::uint64_t seed) {
  if (dim < 1) throw std::invalid_argument("random_projection_features: dim must be >= 1");
  FeatureMap phi;
  phi.num_states = mdp.num_states;
  phi.num_actions = mdp.num_actions;
  phi.dim = dim;
  const int pairs = mdp.num_states * mdp.num_actions;
  phi.data.resize(std::size_t(pairs) * dim);
  Rng rng(seed);
  const double scale = 1.0 / std::sqrt(double(dim));
  for (double& v : phi.data) v = scale * rng.normal(0.0, 1.0);
  phi.compute_norm_bound();
  return phi;
}

}  // namespace nvrpg
