#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <vector>

#include "unifit/bisection.hpp"
#include "unifit/types.hpp"

namespace unifit {

/// Reads a UCR-style text file: one record per line, first field the class
/// label, remaining fields the feature values. Tab or comma delimiter,
/// detected per file. Ragged rows, non-numeric fields and empty files are
/// reported with line numbers.
Dataset read_ucr(const std::filesystem::path& path);

/// Writes tab-separated text with shortest round-trip float formatting, so
/// read_ucr(write_ucr(z)) reproduces z exactly. The file is written
/// atomically (temp file + rename).
void write_ucr(const Dataset& z, const std::filesystem::path& path);

struct SubsetSpec {
  enum class Mode { full, swap, first_k_per_class, random_k };

  Mode mode = Mode::full;
  std::map<double, std::size_t> counts;  // first_k_per_class: label -> count
  std::size_t total = 0;                 // random_k
  std::uint64_t seed = 0;                // random_k
};

/// full / swap return the dataset unchanged (the swap of train and test roles
/// is applied by the experiment runner when it sees mode == swap).
/// first_k_per_class takes the first counts[c] samples of each listed class
/// in original order; random_k draws `total` samples uniformly without
/// replacement, keeping original relative order.
Dataset build_subset(const Dataset& z, const SubsetSpec& spec);

struct OutlierSpec {
  enum class Method { tolerance, top_k };

  Method method = Method::tolerance;
  double tolerance = 0.0;         // remove d_i >= max_j d_j - tolerance
  std::size_t k = 0;              // remove the k largest deviations
  bool allow_degenerate = false;  // permit removing every sample
};

struct OutlierReport {
  BisectionReport training;
  std::vector<double> deviations;  // per original sample index
  double max_deviation = 0.0;
  double threshold = 0.0;          // cut value actually applied
  std::vector<std::size_t> removed_indices;
};

struct OutlierSplit {
  Dataset kept;
  Dataset removed;
  OutlierReport report;
};

/// Trains the uniform model on z, computes each sample's absolute deviation
/// under the trained weights, and removes the maximal-deviation samples per
/// the spec. tolerance mode refuses to empty the dataset unless
/// allow_degenerate is set. top_k ties are broken by original index, lower
/// index removed first.
OutlierSplit remove_outliers(const Dataset& z, const BisectionConfig& cfg,
                             const OutlierSpec& spec);

/// Two-class (or k-class) Gaussian clusters spaced `separation` apart along
/// the normalized all-ones direction, one cluster per map entry; the map key
/// is the class label and target value. Deterministic per seed.
Dataset generate_synthetic(std::size_t n, const std::map<double, std::size_t>& per_class,
                           double separation, double noise, std::uint64_t seed);

}  // namespace unifit
