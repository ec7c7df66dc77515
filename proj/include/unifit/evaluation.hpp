#pragma once

#include <cstddef>
#include <vector>

#include "unifit/types.hpp"

namespace unifit {

/// Actual-by-predicted counts. Rows are the actual class, columns the
/// predicted class, both in ascending label order.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::vector<double> labels);
  static ConfusionMatrix from_counts(std::vector<double> labels,
                                     std::vector<std::vector<long>> counts);

  void record(double actual, double predicted);

  const std::vector<double>& labels() const { return labels_; }
  std::size_t classes() const { return labels_.size(); }
  long count(std::size_t actual_idx, std::size_t predicted_idx) const;
  long total() const;
  long correct() const;  // diagonal sum
  double accuracy() const;

 private:
  std::size_t index_of(double label) const;

  std::vector<double> labels_;  // ascending
  std::vector<long> counts_;    // row-major classes x classes
};

/// Nearest class label to the network output; ties go to the smaller label.
double classify(const WeightVector& w, const Activation& a, const std::vector<double>& x,
                const std::vector<double>& class_labels);

/// Classifies every test sample against the model's label set. Test labels
/// outside class_labels are an error.
ConfusionMatrix evaluate(const WeightVector& w, const Activation& a, const Dataset& test,
                         const std::vector<double>& class_labels);

}  // namespace unifit
