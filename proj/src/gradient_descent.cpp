#include "unifit/gradient_descent.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "unifit/model.hpp"

namespace unifit {

namespace {

struct Standardizer {
  std::vector<double> mean;
  std::vector<double> sd;

  static Standardizer fit(const Dataset& z) {
    const std::size_t n = z.feature_count();
    Standardizer s{std::vector<double>(n, 0.0), std::vector<double>(n, 1.0)};
    for (const Sample& sample : z.samples()) {
      for (std::size_t j = 0; j < n; ++j) s.mean[j] += sample.features[j];
    }
    for (double& v : s.mean) v /= static_cast<double>(z.size());
    std::vector<double> var(n, 0.0);
    for (const Sample& sample : z.samples()) {
      for (std::size_t j = 0; j < n; ++j) {
        const double d = sample.features[j] - s.mean[j];
        var[j] += d * d;
      }
    }
    for (std::size_t j = 0; j < n; ++j) {
      const double sd = std::sqrt(var[j] / static_cast<double>(z.size()));
      s.sd[j] = sd > 1e-12 ? sd : 1.0;  // constant features pass through
    }
    return s;
  }

  Dataset apply(const Dataset& z) const {
    Dataset out(z.feature_count());
    for (const Sample& sample : z.samples()) {
      Sample t = sample;
      for (std::size_t j = 0; j < t.features.size(); ++j) {
        t.features[j] = (t.features[j] - mean[j]) / sd[j];
      }
      out.add(std::move(t));
    }
    return out;
  }

  // Maps weights trained on standardized features back to raw space.
  WeightVector unapply(const WeightVector& w) const {
    WeightVector out(w.size());
    out.bias = w.bias;
    for (std::size_t j = 0; j < w.size(); ++j) {
      out.weights[j] = w.weights[j] / sd[j];
      out.bias -= w.weights[j] * mean[j] / sd[j];
    }
    return out;
  }
};

}  // namespace

WeightVector mse_gradient(const WeightVector& w, const Activation& a, const Dataset& z) {
  if (z.empty()) throw std::invalid_argument("dataset is empty");
  if (w.size() != z.feature_count()) {
    throw std::invalid_argument("weight/feature dimension mismatch");
  }
  WeightVector grad(z.feature_count());
  for (const Sample& s : z.samples()) {
    const double u = pre_activation(w, s.features);
    const double out = activate(a, u);
    const double slope = u < 0.0 ? a.alpha() : 1.0;  // right derivative at u = 0
    const double factor = -2.0 * (s.target - out) * slope;
    grad.bias += factor;
    for (std::size_t j = 0; j < s.features.size(); ++j) {
      grad.weights[j] += factor * s.features[j];
    }
  }
  return grad;
}

WeightVector train_mse(const Dataset& z, const GdConfig& cfg, const Activation& a) {
  if (z.empty()) throw std::invalid_argument("dataset is empty");
  if (!std::isfinite(cfg.learning_rate) || cfg.learning_rate <= 0.0) {
    throw std::invalid_argument("learning_rate must be positive");
  }
  if (cfg.epochs < 0) throw std::invalid_argument("epochs must be nonnegative");
  if (!std::isfinite(cfg.init_scale) || cfg.init_scale < 0.0) {
    throw std::invalid_argument("init_scale must be nonnegative");
  }

  std::mt19937_64 rng(cfg.init_seed);
  std::uniform_real_distribution<double> dist(-cfg.init_scale, cfg.init_scale);
  WeightVector w(z.feature_count());
  w.bias = cfg.init_scale > 0.0 ? dist(rng) : 0.0;
  for (double& v : w.weights) v = cfg.init_scale > 0.0 ? dist(rng) : 0.0;

  Standardizer scaler;
  const Dataset* train = &z;
  Dataset scaled(0);
  if (cfg.standardize) {
    scaler = Standardizer::fit(z);
    scaled = scaler.apply(z);
    train = &scaled;
  }

  const double initial = mse_loss(w, a, *train);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const WeightVector grad = mse_gradient(w, a, *train);
    w.bias -= cfg.learning_rate * grad.bias;
    for (std::size_t j = 0; j < w.size(); ++j) {
      w.weights[j] -= cfg.learning_rate * grad.weights[j];
    }
    const double current = mse_loss(w, a, *train);
    if (!std::isfinite(current) || (initial > 0.0 && current > 1e6 * initial)) {
      throw ConvergenceError("gradient descent diverged at epoch " +
                             std::to_string(epoch + 1) + ": loss " +
                             std::to_string(current) + " vs initial " +
                             std::to_string(initial) +
                             " (reduce the learning rate)");
    }
  }

  return cfg.standardize ? scaler.unapply(w) : w;
}

}  // namespace unifit
