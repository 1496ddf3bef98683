#include <catch_amalgamated.hpp>

#include <cmath>

#include "nvrpg/occupancy.hpp"
#include "nvrpg/rng.hpp"
#include "nvrpg/utility.hpp"
#include "oracles.hpp"

using namespace nvrpg;

namespace {

OccupancyVector occupancy_from(std::vector<double> values, int num_states, int num_actions) {
  OccupancyVector lam = make_occupancy(OccupancyKind::estimate, num_states, num_actions);
  lam.values = std::move(values);
  return lam;
}

OccupancyVector random_nonneg(int num_states, int num_actions, Rng& rng, double scale = 2.0) {
  OccupancyVector lam = make_occupancy(OccupancyKind::estimate, num_states, num_actions);
  for (double& v : lam.values) v = scale * rng.next_double();
  return lam;
}

}  // namespace

TEST_CASE("utility values") {
  SECTION("linear with unit reward sums the occupancy") {
    const UtilitySpec u = UtilitySpec::linear(RewardVector(6, 1.0));
    OccupancyVector lam = occupancy_from({1, 2, 3, 1, 2, 1}, 3, 2);
    REQUIRE(utility_value(u, lam) == Catch::Approx(10.0));
    REQUIRE(u.l_lambda == 1.0);
  }
  SECTION("log barrier at zero occupancy") {
    const UtilitySpec u = UtilitySpec::log_barrier(0.125, 2);
    OccupancyVector lam = occupancy_from(std::vector<double>(6, 0.0), 3, 2);
    REQUIRE(utility_value(u, lam) == Catch::Approx(3.0 * std::log(0.125)).epsilon(1e-13));
  }
  SECTION("log barrier uniform mass") {
    const UtilitySpec u = UtilitySpec::log_barrier(0.125, 2);
    const double m = 0.8;
    OccupancyVector lam = occupancy_from(std::vector<double>(4, m), 2, 2);
    REQUIRE(utility_value(u, lam) ==
            Catch::Approx(2.0 * std::log(2.0 * m + 0.125)).epsilon(1e-13));
  }
  SECTION("negative entries are rejected") {
    const UtilitySpec u = UtilitySpec::log_barrier(0.125, 2);
    OccupancyVector lam = occupancy_from({0.1, -0.2, 0.3, 0.4}, 2, 2);
    REQUIRE_THROWS_AS(utility_value(u, lam), std::invalid_argument);
  }
  SECTION("construction guards") {
    REQUIRE_THROWS_AS(UtilitySpec::log_barrier(0.0, 2), std::invalid_argument);
    REQUIRE_THROWS_AS(UtilitySpec::linear({1.0, std::nan("")}), std::invalid_argument);
  }
}

TEST_CASE("utility gradients") {
  Rng rng(12);
  SECTION("linear gradient is the reward, independent of lambda") {
    const RewardVector r = {0.5, -1.5, 2.0, 0.0};
    const UtilitySpec u = UtilitySpec::linear(r);
    for (int rep = 0; rep < 10; ++rep) {
      OccupancyVector lam = random_nonneg(2, 2, rng);
      REQUIRE(utility_grad(u, lam) == r);
    }
  }
  SECTION("log barrier at zero occupancy is 1/sigma everywhere") {
    const UtilitySpec u = UtilitySpec::log_barrier(0.125, 2);
    OccupancyVector lam = occupancy_from(std::vector<double>(4, 0.0), 2, 2);
    for (double g : utility_grad(u, lam)) REQUIRE(g == Catch::Approx(8.0));
  }
  SECTION("gradient matches central finite differences at 200 random points") {
    const UtilitySpec u = UtilitySpec::log_barrier(0.125, 3);
    const double eps = 1e-6;
    for (int rep = 0; rep < 200; ++rep) {
      OccupancyVector lam = random_nonneg(2, 3, rng);
      const RewardVector grad = utility_grad(u, lam);
      for (std::size_t i = 0; i < lam.values.size(); ++i) {
        OccupancyVector hi = lam, lo = lam;
        hi.values[i] += eps;
        lo.values[i] -= eps;
        const double fd = (utility_value(u, hi) - utility_value(u, lo)) / (2 * eps);
        REQUIRE(std::abs(grad[i] - fd) <= 1e-5 * std::max(1.0, std::abs(fd)));
      }
    }
  }
  SECTION("log-barrier gradient is bounded by 1/sigma and constant per state") {
    const UtilitySpec u = UtilitySpec::log_barrier(0.125, 2);
    for (int rep = 0; rep < 100; ++rep) {
      OccupancyVector lam = random_nonneg(3, 2, rng);
      const RewardVector grad = utility_grad(u, lam);
      for (int s = 0; s < 3; ++s) {
        REQUIRE(grad[sa_index(s, 0, 2)] == grad[sa_index(s, 1, 2)]);
        REQUIRE(grad[sa_index(s, 0, 2)] <= u.l_lambda);
        REQUIRE(grad[sa_index(s, 0, 2)] > 0.0);
      }
    }
  }
  SECTION("row sums below -sigma/2 abort") {
    const UtilitySpec u = UtilitySpec::log_barrier(0.125, 2);
    OccupancyVector lam = occupancy_from({-0.2, 0.1, 0.0, 0.0}, 2, 2);
    REQUIRE_THROWS_AS(utility_grad(u, lam), std::runtime_error);
  }
  SECTION("lazy per-pair gradient agrees with the dense one") {
    const UtilitySpec u = UtilitySpec::log_barrier(0.125, 2);
    for (int rep = 0; rep < 20; ++rep) {
      OccupancyVector lam = random_nonneg(3, 2, rng);
      const RewardVector grad = utility_grad(u, lam);
      for (int s = 0; s < 3; ++s)
        for (int a = 0; a < 2; ++a)
          REQUIRE(utility_grad_at(u, sa_index(s, a, 2), lam.state_row_sum(s)) ==
                  Catch::Approx(grad[sa_index(s, a, 2)]).epsilon(1e-15));
    }
  }
}

TEST_CASE("log barrier is concave along random segments") {
  Rng rng(77);
  const UtilitySpec u = UtilitySpec::log_barrier(0.125, 2);
  for (int rep = 0; rep < 200; ++rep) {
    OccupancyVector a = random_nonneg(3, 2, rng);
    OccupancyVector b = random_nonneg(3, 2, rng);
    const double t = rng.next_double();
    OccupancyVector mix = make_occupancy(OccupancyKind::estimate, 3, 2);
    for (std::size_t i = 0; i < mix.values.size(); ++i)
      mix.values[i] = t * a.values[i] + (1.0 - t) * b.values[i];
    REQUIRE(utility_value(u, mix) >=
            t * utility_value(u, a) + (1.0 - t) * utility_value(u, b) - 1e-10);
  }
}
