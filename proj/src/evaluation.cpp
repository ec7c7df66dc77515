#include "unifit/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "unifit/model.hpp"

namespace unifit {

namespace {

std::vector<double> sorted_unique(std::vector<double> labels) {
  if (labels.empty()) throw std::invalid_argument("class label set is empty");
  for (double v : labels) {
    if (!std::isfinite(v)) throw std::invalid_argument("class labels must be finite");
  }
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  return labels;
}

}  // namespace

ConfusionMatrix::ConfusionMatrix(std::vector<double> labels)
    : labels_(sorted_unique(std::move(labels))),
      counts_(labels_.size() * labels_.size(), 0) {}

ConfusionMatrix ConfusionMatrix::from_counts(std::vector<double> labels,
                                             std::vector<std::vector<long>> counts) {
  ConfusionMatrix cm(std::move(labels));
  const std::size_t k = cm.classes();
  if (counts.size() != k) throw std::invalid_argument("count grid has wrong row count");
  for (std::size_t i = 0; i < k; ++i) {
    if (counts[i].size() != k) {
      throw std::invalid_argument("count grid has wrong column count");
    }
    for (std::size_t j = 0; j < k; ++j) {
      if (counts[i][j] < 0) throw std::invalid_argument("counts must be nonnegative");
      cm.counts_[i * k + j] = counts[i][j];
    }
  }
  return cm;
}

std::size_t ConfusionMatrix::index_of(double label) const {
  const auto it = std::lower_bound(labels_.begin(), labels_.end(), label);
  if (it == labels_.end() || *it != label) {
    throw DataError("label " + std::to_string(label) +
                    " is not among the model's class labels");
  }
  return static_cast<std::size_t>(it - labels_.begin());
}

void ConfusionMatrix::record(double actual, double predicted) {
  counts_[index_of(actual) * classes() + index_of(predicted)] += 1;
}

long ConfusionMatrix::count(std::size_t actual_idx, std::size_t predicted_idx) const {
  return counts_.at(actual_idx * classes() + predicted_idx);
}

long ConfusionMatrix::total() const {
  long sum = 0;
  for (long c : counts_) sum += c;
  return sum;
}

long ConfusionMatrix::correct() const {
  long sum = 0;
  for (std::size_t i = 0; i < classes(); ++i) sum += count(i, i);
  return sum;
}

double ConfusionMatrix::accuracy() const {
  const long n = total();
  if (n == 0) throw std::logic_error("confusion matrix is empty");
  return static_cast<double>(correct()) / static_cast<double>(n);
}

double classify(const WeightVector& w, const Activation& a, const std::vector<double>& x,
                const std::vector<double>& class_labels) {
  const std::vector<double> labels = sorted_unique(class_labels);
  const double out = forward(w, a, x);
  double best = labels.front();
  double best_distance = std::fabs(out - best);
  for (std::size_t i = 1; i < labels.size(); ++i) {
    const double distance = std::fabs(out - labels[i]);
    if (distance < best_distance) {  // ties keep the smaller label
      best_distance = distance;
      best = labels[i];
    }
  }
  return best;
}

ConfusionMatrix evaluate(const WeightVector& w, const Activation& a, const Dataset& test,
                         const std::vector<double>& class_labels) {
  if (test.empty()) throw std::invalid_argument("test dataset is empty");
  ConfusionMatrix cm(class_labels);
  for (const Sample& s : test.samples()) {
    cm.record(s.target, classify(w, a, s.features, class_labels));
  }
  return cm;
}

}  // namespace unifit
