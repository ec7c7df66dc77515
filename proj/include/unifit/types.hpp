#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace unifit {

/// Problem with an input file or a config that does not match the data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Training failed to converge or diverged.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Outlier removal would discard every sample.
class DegenerateRemovalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One labeled record: feature vector plus numeric class target.
struct Sample {
  std::vector<double> features;
  double target = 0.0;
};

/// Bias w0 plus one weight per feature; the optimization variable.
struct WeightVector {
  double bias = 0.0;
  std::vector<double> weights;

  WeightVector() = default;
  explicit WeightVector(std::size_t n) : weights(n, 0.0) {}
  WeightVector(double bias_value, std::vector<double> weight_values);

  std::size_t size() const { return weights.size(); }
};

/// Leaky ReLU with negative-side slope alpha.
/// Requires 0 < alpha < 1 so the function is strictly increasing and
/// invertible; alpha = 0 (plain ReLU) is rejected at construction.
class Activation {
 public:
  explicit Activation(double alpha = 0.01);
  double alpha() const { return alpha_; }

 private:
  double alpha_;
};

/// Ordered collection of samples with a fixed feature dimension.
/// Sample order is stable: subset builders address "first k" positions.
class Dataset {
 public:
  explicit Dataset(std::size_t feature_count);

  /// Builds from a nonempty sample list; the first sample fixes the dimension.
  static Dataset from_samples(std::vector<Sample> samples);

  /// Appends a sample; rejects dimension mismatches and non-finite values.
  void add(Sample sample);

  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  std::size_t feature_count() const { return feature_count_; }

  const Sample& operator[](std::size_t i) const { return samples_[i]; }
  const std::vector<Sample>& samples() const { return samples_; }

  /// Distinct target values in order of first appearance.
  const std::vector<double>& class_labels() const { return class_labels_; }

  std::size_t count_of_class(double label) const;

 private:
  std::size_t feature_count_;
  std::vector<Sample> samples_;
  std::vector<double> class_labels_;
};

}  // namespace unifit
