#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "test_support.hpp"
#include "unifit/gradient_descent.hpp"
#include "unifit/model.hpp"

using namespace unifit;
using test_support::random_dataset;
using test_support::random_weights;

namespace {

// 1-feature toy set: two separated clusters, labels 0 and 1.
Dataset toy_two_clusters() {
  return Dataset::from_samples({
      Sample{{-2.0}, 0.0}, Sample{{-1.8}, 0.0}, Sample{{-2.2}, 0.0},
      Sample{{2.0}, 1.0}, Sample{{1.8}, 1.0}, Sample{{2.2}, 1.0},
  });
}

double norm(const WeightVector& w) {
  double sq = w.bias * w.bias;
  for (double v : w.weights) sq += v * v;
  return std::sqrt(sq);
}

}  // namespace

TEST_CASE("gradient vanishes at a perfect fit") {
  const Activation a(0.01);
  const Dataset z =
      Dataset::from_samples({Sample{{1.0}, 1.0}, Sample{{2.0}, 2.0}, Sample{{3.0}, 3.0}});
  const WeightVector g = mse_gradient(WeightVector(0.0, {1.0}), a, z);
  CHECK(g.bias == 0.0);
  CHECK(g.weights[0] == 0.0);
}

TEST_CASE("hand-computed single-sample gradient") {
  // x = (1), y = 0, w = (0; 1): u = 1, residual -1, gradient (2, 2)
  const Activation a(0.01);
  const Dataset z = Dataset::from_samples({Sample{{1.0}, 0.0}});
  const WeightVector g = mse_gradient(WeightVector(0.0, {1.0}), a, z);
  CHECK(g.bias == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(g.weights[0] == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("gradient matches central finite differences away from the kink") {
  std::mt19937_64 rng(31);
  const Activation a(0.01);
  int checked = 0;
  while (checked < 30) {
    const std::size_t n = 1 + rng() % 3;
    const Dataset z = random_dataset(rng, n, 2 + rng() % 5);
    const WeightVector w = random_weights(rng, n);
    bool smooth = true;
    for (const Sample& s : z.samples()) {
      if (std::fabs(pre_activation(w, s.features)) <= 1e-3) smooth = false;
    }
    if (!smooth) continue;
    ++checked;
    const WeightVector g = mse_gradient(w, a, z);
    const WeightVector fd = oracles::fd_mse_gradient(w, a, z, 1e-6);
    double err_sq = (g.bias - fd.bias) * (g.bias - fd.bias);
    for (std::size_t j = 0; j < n; ++j) {
      err_sq += (g.weights[j] - fd.weights[j]) * (g.weights[j] - fd.weights[j]);
    }
    CHECK(std::sqrt(err_sq) <= 1e-5 * std::max(1.0, norm(g)));
  }
}

TEST_CASE("defaults cut the toy-set loss by at least ninety percent") {
  const Activation a(0.01);
  const Dataset z = toy_two_clusters();
  GdConfig cfg;
  cfg.init_seed = 5;
  // reproduce the initialization to measure the starting loss
  GdConfig init_only = cfg;
  init_only.epochs = 0;
  const double initial = mse_loss(train_mse(z, init_only, a), a, z);
  const double final_loss = mse_loss(train_mse(z, cfg, a), a, z);
  CHECK(final_loss < 0.1 * initial);
}

TEST_CASE("zero epochs return the initialization unchanged") {
  const Activation a(0.01);
  const Dataset z = toy_two_clusters();
  GdConfig cfg;
  cfg.epochs = 0;
  cfg.init_seed = 9;
  const WeightVector w1 = train_mse(z, cfg, a);
  const WeightVector w2 = train_mse(z, cfg, a);
  CHECK(w1.bias == w2.bias);
  CHECK(w1.weights == w2.weights);
  CHECK(std::fabs(w1.bias) <= cfg.init_scale);
  for (double v : w1.weights) CHECK(std::fabs(v) <= cfg.init_scale);
}

TEST_CASE("a pathological learning rate raises the divergence diagnostic") {
  const Activation a(0.01);
  GdConfig cfg;
  cfg.learning_rate = 1e6;
  CHECK_THROWS_AS(train_mse(toy_two_clusters(), cfg, a), ConvergenceError);
}

TEST_CASE("fixed seed gives a bit-identical trajectory") {
  const Activation a(0.01);
  GdConfig cfg;
  cfg.epochs = 50;
  cfg.init_seed = 1234;
  const WeightVector w1 = train_mse(toy_two_clusters(), cfg, a);
  const WeightVector w2 = train_mse(toy_two_clusters(), cfg, a);
  CHECK(w1.bias == w2.bias);
  CHECK(w1.weights == w2.weights);
}

TEST_CASE("loss is nonincreasing across epochs at the default step size") {
  const Activation a(0.01);
  const Dataset z = toy_two_clusters();
  GdConfig cfg;
  cfg.epochs = 0;
  cfg.init_seed = 77;
  WeightVector w = train_mse(z, cfg, a);
  double last = mse_loss(w, a, z);
  const GdConfig defaults;
  for (int epoch = 0; epoch < 200; ++epoch) {
    const WeightVector g = mse_gradient(w, a, z);
    w.bias -= defaults.learning_rate * g.bias;
    for (std::size_t j = 0; j < w.size(); ++j) {
      w.weights[j] -= defaults.learning_rate * g.weights[j];
    }
    const double current = mse_loss(w, a, z);
    CHECK(current <= last + 1e-12 * (1.0 + last));
    last = current;
  }
}

TEST_CASE("standardization tames badly scaled features and maps weights back") {
  const Activation a(0.01);
  // one huge-scale feature would need a microscopic raw learning rate
  Dataset z(2);
  std::mt19937_64 rng(32);
  for (int i = 0; i < 10; ++i) {
    const double cls = i < 5 ? 0.0 : 1.0;
    z.add(Sample{{(cls * 2.0 - 1.0) * 4000.0 + test_support::uniform(rng, -100.0, 100.0),
                  test_support::uniform(rng, -1.0, 1.0)},
                 cls});
  }
  GdConfig cfg;
  cfg.standardize = true;
  cfg.epochs = 800;
  cfg.learning_rate = 1e-2;
  const WeightVector w = train_mse(z, cfg, a);
  // returned weights act on raw features
  CHECK(mse_loss(w, a, z) < 0.5);
}
