#include "unifit/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>

#include "unifit/experiment.hpp"  // atomic_write_file
#include "unifit/model.hpp"

namespace unifit {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_field(std::string_view field, std::size_t line_no, std::size_t field_no) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty()) {
    throw DataError("line " + std::to_string(line_no) + ", field " +
                    std::to_string(field_no) + ": not a number: '" +
                    std::string(field) + "'");
  }
  if (!std::isfinite(value)) {
    throw DataError("line " + std::to_string(line_no) + ", field " +
                    std::to_string(field_no) + ": non-finite value");
  }
  return value;
}

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

Dataset read_ucr(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open dataset file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string content = buf.str();

  char delimiter = '\0';
  std::size_t expected_fields = 0;
  std::size_t records = 0;
  Dataset dataset(0);

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= content.size()) {
    const std::size_t eol = content.find('\n', pos);
    std::string_view line(content.data() + pos,
                          (eol == std::string::npos ? content.size() : eol) - pos);
    pos = (eol == std::string::npos) ? content.size() + 1 : eol + 1;
    ++line_no;
    if (trim(line).empty()) continue;

    if (delimiter == '\0') {
      if (line.find('\t') != std::string_view::npos) {
        delimiter = '\t';
      } else if (line.find(',') != std::string_view::npos) {
        delimiter = ',';
      } else {
        throw DataError("line " + std::to_string(line_no) +
                        ": cannot detect delimiter (expected tab or comma)");
      }
    }

    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t cut = line.find(delimiter, start);
      fields.push_back(line.substr(start, cut == std::string_view::npos
                                              ? std::string_view::npos
                                              : cut - start));
      if (cut == std::string_view::npos) break;
      start = cut + 1;
    }
    if (fields.size() < 2) {
      throw DataError("line " + std::to_string(line_no) + ": record has no feature values");
    }
    if (expected_fields == 0) {
      expected_fields = fields.size();
      dataset = Dataset(expected_fields - 1);
    } else if (fields.size() != expected_fields) {
      throw DataError("line " + std::to_string(line_no) + ": expected " +
                      std::to_string(expected_fields - 1) + " features, found " +
                      std::to_string(fields.size() - 1));
    }

    Sample s;
    s.target = parse_field(fields[0], line_no, 1);
    s.features.reserve(fields.size() - 1);
    for (std::size_t f = 1; f < fields.size(); ++f) {
      s.features.push_back(parse_field(fields[f], line_no, f + 1));
    }
    dataset.add(std::move(s));
    ++records;
  }

  if (records == 0) throw DataError("empty dataset file: " + path.string());
  std::clog << "read_ucr: " << path.string() << ": "
            << (delimiter == '\t' ? "tab" : "comma") << "-separated, " << records
            << " records, " << dataset.feature_count() << " features\n";
  return dataset;
}

void write_ucr(const Dataset& z, const std::filesystem::path& path) {
  std::string out;
  out.reserve(z.size() * (z.feature_count() + 1) * 12);
  for (const Sample& s : z.samples()) {
    out += format_double(s.target);
    for (double v : s.features) {
      out += '\t';
      out += format_double(v);
    }
    out += '\n';
  }
  atomic_write_file(path, out);
}

Dataset build_subset(const Dataset& z, const SubsetSpec& spec) {
  switch (spec.mode) {
    case SubsetSpec::Mode::full:
    case SubsetSpec::Mode::swap:
      return z;

    case SubsetSpec::Mode::first_k_per_class: {
      for (const auto& [label, count] : spec.counts) {
        const std::size_t available = z.count_of_class(label);
        if (available < count) {
          throw DataError("subset requests " + std::to_string(count) +
                          " samples of class " + format_double(label) + " but only " +
                          std::to_string(available) + " are available");
        }
      }
      Dataset out(z.feature_count());
      std::map<double, std::size_t> taken;
      for (const Sample& s : z.samples()) {
        const auto it = spec.counts.find(s.target);
        if (it == spec.counts.end()) continue;
        if (taken[s.target] >= it->second) continue;
        ++taken[s.target];
        out.add(s);
      }
      return out;
    }

    case SubsetSpec::Mode::random_k: {
      if (spec.total > z.size()) {
        throw DataError("subset requests " + std::to_string(spec.total) +
                        " samples but the dataset has " + std::to_string(z.size()));
      }
      std::vector<std::size_t> indices(z.size());
      std::iota(indices.begin(), indices.end(), 0);
      std::mt19937_64 rng(spec.seed);
      for (std::size_t i = 0; i < spec.total; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, indices.size() - 1);
        std::swap(indices[i], indices[pick(rng)]);
      }
      indices.resize(spec.total);
      std::sort(indices.begin(), indices.end());  // keep original relative order
      Dataset out(z.feature_count());
      for (std::size_t i : indices) out.add(z[i]);
      return out;
    }
  }
  throw std::invalid_argument("unknown subset mode");
}

OutlierSplit remove_outliers(const Dataset& z, const BisectionConfig& cfg,
                             const OutlierSpec& spec) {
  if (z.empty()) throw std::invalid_argument("dataset is empty");
  if (spec.method == OutlierSpec::Method::tolerance &&
      (!std::isfinite(spec.tolerance) || spec.tolerance < 0.0)) {
    throw std::invalid_argument("tolerance must be nonnegative");
  }
  if (spec.method == OutlierSpec::Method::top_k && spec.k > z.size()) {
    throw std::invalid_argument("k = " + std::to_string(spec.k) +
                                " exceeds the dataset size " + std::to_string(z.size()));
  }

  OutlierReport report;
  report.training = train_uniform(z, cfg);
  if (!report.training.converged) {
    throw ConvergenceError("outlier removal aborted: the uniform training did not "
                           "converge within max_iterations");
  }

  const Activation act(cfg.alpha);
  report.deviations.reserve(z.size());
  for (const Sample& s : z.samples()) {
    report.deviations.push_back(
        std::fabs(s.target - forward(report.training.weights, act, s.features)));
  }
  report.max_deviation =
      *std::max_element(report.deviations.begin(), report.deviations.end());

  std::vector<char> removed_mask(z.size(), 0);
  if (spec.method == OutlierSpec::Method::tolerance) {
    report.threshold = report.max_deviation - spec.tolerance;
    for (std::size_t i = 0; i < z.size(); ++i) {
      if (report.deviations[i] >= report.threshold) removed_mask[i] = 1;
    }
    const auto removal_count = static_cast<std::size_t>(
        std::count(removed_mask.begin(), removed_mask.end(), 1));
    if (removal_count == z.size() && !spec.allow_degenerate) {
      throw DegenerateRemovalError(
          "every sample is within the tolerance of the maximal deviation (max = " +
          std::to_string(report.max_deviation) +
          "); removing all of them would empty the training set. Set "
          "allow_degenerate to force this.");
    }
  } else {
    std::vector<std::size_t> order(z.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (report.deviations[a] != report.deviations[b]) {
        return report.deviations[a] > report.deviations[b];
      }
      return a < b;  // ties: lower index removed first
    });
    for (std::size_t i = 0; i < spec.k; ++i) removed_mask[order[i]] = 1;
    report.threshold = spec.k > 0 ? report.deviations[order[spec.k - 1]] : 0.0;
  }

  OutlierSplit split{Dataset(z.feature_count()), Dataset(z.feature_count()),
                     std::move(report)};
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (removed_mask[i]) {
      split.removed.add(z[i]);
      split.report.removed_indices.push_back(i);
    } else {
      split.kept.add(z[i]);
    }
  }
  return split;
}

Dataset generate_synthetic(std::size_t n, const std::map<double, std::size_t>& per_class,
                           double separation, double noise, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("feature dimension must be at least 1");
  if (per_class.empty()) throw std::invalid_argument("per_class map is empty");
  for (const auto& [label, count] : per_class) {
    if (!std::isfinite(label)) throw std::invalid_argument("class label must be finite");
    if (count < 1) throw std::invalid_argument("per-class count must be at least 1");
  }
  if (!std::isfinite(separation) || !std::isfinite(noise) || noise < 0.0) {
    throw std::invalid_argument("separation must be finite and noise nonnegative");
  }

  const double unit = 1.0 / std::sqrt(static_cast<double>(n));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Dataset out(n);
  const double half = (static_cast<double>(per_class.size()) - 1.0) / 2.0;
  std::size_t class_index = 0;
  for (const auto& [label, count] : per_class) {
    const double offset = (static_cast<double>(class_index) - half) * separation * unit;
    for (std::size_t i = 0; i < count; ++i) {
      Sample s;
      s.target = label;
      s.features.resize(n);
      for (double& v : s.features) v = offset + noise * gauss(rng);
      out.add(std::move(s));
    }
    ++class_index;
  }
  return out;
}

}  // namespace unifit
