#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "test_support.hpp"
#include "unifit/bisection.hpp"
#include "unifit/feasibility.hpp"
#include "unifit/model.hpp"

using namespace unifit;
using test_support::expected_iterations;
using test_support::random_dataset;
using test_support::random_weights;
using test_support::replay_bracket;

namespace {

Dataset three_point_line() {
  return Dataset::from_samples({Sample{{0.0}, 0.0}, Sample{{1.0}, 1.0}, Sample{{2.0}, 0.0}});
}

}  // namespace

TEST_CASE("starting bracket") {
  const Activation a(0.01);
  CHECK(initial_bounds(Dataset::from_samples({Sample{{0.1}, 1.0}, Sample{{0.2}, 2.0}}), a) ==
        std::pair<double, double>{0.0, 2.0});
  CHECK(initial_bounds(Dataset::from_samples({Sample{{0.1}, -5.0}, Sample{{0.2}, 3.0}}),
                       a) == std::pair<double, double>{0.0, 5.0});
  CHECK(initial_bounds(Dataset::from_samples({Sample{{0.1}, 0.0}, Sample{{0.2}, 0.0}}), a) ==
        std::pair<double, double>{0.0, 0.0});
  CHECK_THROWS_AS(initial_bounds(Dataset(1), a), std::invalid_argument);
}

TEST_CASE("all-zero targets terminate immediately with the zero witness") {
  const Dataset z = Dataset::from_samples({Sample{{0.1}, 0.0}, Sample{{0.2}, 0.0}});
  const BisectionReport report = train_uniform(z, BisectionConfig{});
  CHECK(report.converged);
  CHECK(report.iterations == 0);
  CHECK(report.upper == 0.0);
  CHECK(report.weights.bias == 0.0);
  CHECK(report.weights.weights == std::vector<double>{0.0});
}

TEST_CASE("exactly representable targets collapse the bracket onto zero") {
  std::mt19937_64 rng(21);
  const Activation a(0.01);
  for (int i = 0; i < 5; ++i) {
    const std::size_t n = 1 + rng() % 3;
    const WeightVector planted = random_weights(rng, n);
    Dataset z(n);
    for (int s = 0; s < 6; ++s) {
      Sample sample;
      sample.features.resize(n);
      for (double& v : sample.features) v = test_support::uniform(rng, -2.0, 2.0);
      sample.target = activate(a, pre_activation(planted, sample.features));
      z.add(std::move(sample));
    }
    const BisectionConfig cfg;
    const BisectionReport report = train_uniform(z, cfg);
    CHECK(report.converged);
    CHECK(report.lower == 0.0);  // every midpoint is feasible
    CHECK(report.upper < cfg.epsilon);
    for (const BisectionStep& step : report.trace) CHECK(step.feasible);
  }
}

TEST_CASE("three-point example matches the frozen brute-force optimum") {
  // Optimal value 0.5: the equioscillating affine fit on the positive branch.
  const BisectionConfig cfg;
  const BisectionReport report = train_uniform(three_point_line(), cfg);
  CHECK(report.converged);
  const double midpoint = (report.lower + report.upper) / 2.0;
  CHECK(std::fabs(midpoint - 0.5) <= cfg.epsilon + 1e-3);
}

TEST_CASE("iteration count follows the halving formula") {
  // u0 = 2, epsilon = 1e-5: 2 / 2^17 >= 1e-5 > 2 / 2^18, so 18 iterations.
  const Dataset z = Dataset::from_samples({Sample{{0.5}, 1.0}, Sample{{1.5}, 2.0}});
  const BisectionConfig cfg;
  const BisectionReport report = train_uniform(z, cfg);
  CHECK(report.initial_upper == 2.0);
  CHECK(report.iterations == 18);
  CHECK(report.iterations == expected_iterations(report.initial_upper, cfg.epsilon));
}

TEST_CASE("bracket halves geometrically and stays monotone") {
  std::mt19937_64 rng(22);
  for (int i = 0; i < 10; ++i) {
    const Dataset z = random_dataset(rng, 1, 2 + rng() % 5);
    const BisectionConfig cfg;
    const BisectionReport report = train_uniform(z, cfg);
    const auto replay = replay_bracket(report);
    CHECK(replay.monotone);
    CHECK(replay.midpoints_interior);
    CHECK(replay.endpoints_match);
    CHECK(replay.worst_gap_error < 1e-12);
    CHECK(report.iterations == expected_iterations(report.initial_upper, cfg.epsilon));
    CHECK(report.lower <= report.upper);
    CHECK(report.upper - report.lower < cfg.epsilon);
  }
}

TEST_CASE("final bracket endpoints are certified by the feasibility trace") {
  std::mt19937_64 rng(23);
  const Activation a(0.01);
  const Dataset z = random_dataset(rng, 1, 5);
  const BisectionReport report = train_uniform(z, BisectionConfig{});
  REQUIRE(report.converged);

  // upper was some feasible midpoint (or u0); re-solving confirms it
  CHECK(solve_feasibility(build_constraints(z, a, report.upper), 1).feasible());
  // lower, when it moved off zero, was an infeasible midpoint
  if (report.lower > 0.0) {
    CHECK_FALSE(solve_feasibility(build_constraints(z, a, report.lower), 1).feasible());
  }
}

TEST_CASE("stored weights achieve the certified level") {
  std::mt19937_64 rng(24);
  const Activation a(0.01);
  for (int i = 0; i < 10; ++i) {
    const Dataset z = random_dataset(rng, 2, 3 + rng() % 4);
    const BisectionReport report = train_uniform(z, BisectionConfig{});
    REQUIRE(report.converged);
    double certified = report.initial_upper;  // w = 0 certifies u0
    for (const BisectionStep& step : report.trace) {
      if (step.feasible) certified = step.midpoint;
    }
    const double slack = 1e-6 * (1.0 + certified);
    CHECK(uniform_loss(report.weights, a, z) <= certified + slack);
  }
}

TEST_CASE("iteration cap returns a flagged report instead of failing silently") {
  const Dataset z = Dataset::from_samples({Sample{{0.5}, 1.0}, Sample{{1.5}, 2.0}});
  BisectionConfig cfg;
  cfg.max_iterations = 3;
  const BisectionReport report = train_uniform(z, cfg);
  CHECK_FALSE(report.converged);
  CHECK(report.iterations == 3);
  CHECK(report.upper - report.lower >= cfg.epsilon);
  CHECK(report.upper - report.lower == doctest::Approx(2.0 / 8.0));
}

TEST_CASE("configuration validation") {
  const Dataset z = Dataset::from_samples({Sample{{0.5}, 1.0}});
  BisectionConfig cfg;
  cfg.epsilon = 0.0;
  CHECK_THROWS_AS(train_uniform(z, cfg), std::invalid_argument);
  cfg = BisectionConfig{};
  cfg.max_iterations = 0;
  CHECK_THROWS_AS(train_uniform(z, cfg), std::invalid_argument);
  cfg = BisectionConfig{};
  cfg.alpha = 0.0;
  CHECK_THROWS_AS(train_uniform(z, cfg), std::invalid_argument);
  CHECK_THROWS_AS(train_uniform(Dataset(1), BisectionConfig{}), std::invalid_argument);
}
