#include "unifit/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace unifit {

namespace {

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw std::invalid_argument(std::string(what) + " must be finite");
  }
}

void require_nonempty(const Dataset& z) {
  if (z.empty()) throw std::invalid_argument("dataset is empty");
}

void require_dims(const WeightVector& w, const Dataset& z) {
  if (w.size() != z.feature_count()) {
    throw std::invalid_argument("weight dimension " + std::to_string(w.size()) +
                                " does not match feature count " +
                                std::to_string(z.feature_count()));
  }
}

}  // namespace

WeightVector::WeightVector(double bias_value, std::vector<double> weight_values)
    : bias(bias_value), weights(std::move(weight_values)) {
  require_finite(bias, "bias");
  for (double v : weights) require_finite(v, "weight");
}

Activation::Activation(double alpha) : alpha_(alpha) {
  if (!std::isfinite(alpha) || alpha <= 0.0 || alpha >= 1.0) {
    throw std::invalid_argument(
        "activation slope must satisfy 0 < alpha < 1 (got " + std::to_string(alpha) +
        "); slopes outside that range are not invertible piecewise-linear units");
  }
}

Dataset::Dataset(std::size_t feature_count) : feature_count_(feature_count) {}

Dataset Dataset::from_samples(std::vector<Sample> samples) {
  if (samples.empty()) {
    throw std::invalid_argument("from_samples requires at least one sample");
  }
  Dataset z(samples.front().features.size());
  for (Sample& s : samples) z.add(std::move(s));
  return z;
}

void Dataset::add(Sample sample) {
  if (sample.features.size() != feature_count_) {
    throw std::invalid_argument("sample has " + std::to_string(sample.features.size()) +
                                " features, dataset expects " +
                                std::to_string(feature_count_));
  }
  for (double v : sample.features) require_finite(v, "feature");
  require_finite(sample.target, "target");
  if (std::find(class_labels_.begin(), class_labels_.end(), sample.target) ==
      class_labels_.end()) {
    class_labels_.push_back(sample.target);
  }
  samples_.push_back(std::move(sample));
}

std::size_t Dataset::count_of_class(double label) const {
  std::size_t count = 0;
  for (const Sample& s : samples_) {
    if (s.target == label) ++count;
  }
  return count;
}

double activate(const Activation& a, double t) {
  require_finite(t, "activation input");
  return t > 0.0 ? t : a.alpha() * t;
}

double activate_inverse(const Activation& a, double s) {
  require_finite(s, "activation inverse input");
  return s > 0.0 ? s : s / a.alpha();
}

double pre_activation(const WeightVector& w, const std::vector<double>& x) {
  if (w.size() != x.size()) {
    throw std::invalid_argument("weight dimension " + std::to_string(w.size()) +
                                " does not match input dimension " +
                                std::to_string(x.size()));
  }
  double acc = w.bias;
  for (std::size_t j = 0; j < x.size(); ++j) acc += w.weights[j] * x[j];
  return acc;
}

double forward(const WeightVector& w, const Activation& a, const std::vector<double>& x) {
  return activate(a, pre_activation(w, x));
}

double uniform_loss(const WeightVector& w, const Activation& a, const Dataset& z) {
  require_nonempty(z);
  require_dims(w, z);
  double worst = 0.0;
  for (const Sample& s : z.samples()) {
    worst = std::max(worst, std::fabs(s.target - forward(w, a, s.features)));
  }
  return worst;
}

double uniform_loss_maxrep(const WeightVector& w, const Activation& a, const Dataset& z) {
  require_nonempty(z);
  require_dims(w, z);
  double worst = -std::numeric_limits<double>::infinity();
  for (const Sample& s : z.samples()) {
    const double out = forward(w, a, s.features);
    worst = std::max(worst, std::max(s.target - out, out - s.target));
  }
  return worst;
}

double mse_loss(const WeightVector& w, const Activation& a, const Dataset& z) {
  require_nonempty(z);
  require_dims(w, z);
  double sum = 0.0;
  for (const Sample& s : z.samples()) {
    const double r = s.target - forward(w, a, s.features);
    sum += r * r;
  }
  return sum;
}

WeightVector lerp(double lambda, const WeightVector& x, const WeightVector& y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("weight vectors have different dimensions");
  }
  WeightVector out(x.size());
  out.bias = lambda * x.bias + (1.0 - lambda) * y.bias;
  for (std::size_t j = 0; j < x.size(); ++j) {
    out.weights[j] = lambda * x.weights[j] + (1.0 - lambda) * y.weights[j];
  }
  return out;
}

bool is_quasiconvex_on_segment(const std::function<double(const WeightVector&)>& f,
                               const WeightVector& w_a, const WeightVector& w_b,
                               int num_lambda) {
  if (w_a.size() != w_b.size()) {
    throw std::invalid_argument("segment endpoints have different dimensions");
  }
  if (num_lambda < 2) throw std::invalid_argument("num_lambda must be at least 2");

  const double endpoint_max = std::max(f(w_a), f(w_b));
  const double slack = 1e-9 * (1.0 + std::fabs(endpoint_max));
  for (int j = 0; j < num_lambda; ++j) {
    const double lambda = static_cast<double>(j) / (num_lambda - 1);
    if (f(lerp(lambda, w_a, w_b)) > endpoint_max + slack) return false;
  }
  return true;
}

}  // namespace unifit
