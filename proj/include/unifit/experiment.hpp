#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "unifit/bisection.hpp"
#include "unifit/data.hpp"
#include "unifit/evaluation.hpp"
#include "unifit/gradient_descent.hpp"
#include "unifit/types.hpp"

namespace unifit {

/// One declarative experiment: data source, subset protocol, optional
/// outlier removal, and the arms to train. Loaded from a JSON file.
struct ExperimentConfig {
  struct Files {
    std::filesystem::path train_file;
    std::filesystem::path test_file;
  };

  struct Synthetic {
    std::size_t n = 2;
    std::map<double, std::size_t> train_per_class;
    std::map<double, std::size_t> test_per_class;
    double separation = 4.0;
    double noise = 0.5;
    std::uint64_t train_seed = 1;
    std::uint64_t test_seed = 2;
  };

  std::string name;
  std::optional<Files> files;
  std::optional<Synthetic> synthetic;
  SubsetSpec subset;
  int repetitions = 1;  // >1 varies the random_k seed as seed+rep
  std::optional<OutlierSpec> outlier_removal;
  std::optional<BisectionConfig> uniform_arm;
  std::optional<GdConfig> mse_arm;
  double mse_alpha = 0.01;  // activation slope for the MSE arm
  std::string output;       // default report base path (optional)
};

struct UniformDiagnostics {
  int iterations = 0;
  double lower = 0.0;
  double upper = 0.0;
  long total_pivots = 0;
};

struct ArmResult {
  std::string arm;  // "uniform" or "mse"
  double train_loss = 0.0;
  double accuracy = 0.0;
  ConfusionMatrix confusion{std::vector<double>{0.0}};
  double wall_seconds = 0.0;
  std::optional<UniformDiagnostics> uniform;
};

struct RepetitionResult {
  std::uint64_t subset_seed = 0;
  std::size_t train_size = 0;
  std::size_t removed_outliers = 0;
  std::vector<ArmResult> arms;
};

struct ExperimentReport {
  nlohmann::json config_echo;
  std::size_t test_size = 0;
  std::vector<RepetitionResult> repetitions;
  std::map<std::string, double> mean_accuracy;  // arm -> mean over repetitions
};

/// Replaces ${DATA_DIR} in file paths; data_dir falls back to the
/// UNIFIT_DATA_DIR environment variable.
ExperimentConfig load_experiment_config(const std::filesystem::path& path,
                                        const std::string& data_dir = "");
ExperimentConfig parse_experiment_config(const nlohmann::json& j,
                                         const std::string& data_dir = "");

/// Canonical serialization of the parsed config (used as the report echo).
nlohmann::json config_to_json(const ExperimentConfig& cfg);

ExperimentReport run_experiment(const ExperimentConfig& cfg);

nlohmann::json report_to_json(const ExperimentReport& report);
std::string report_to_text(const ExperimentReport& report);

/// Writes <base>.json and <base>.txt atomically (temp file + rename).
void write_report_files(const ExperimentReport& report, const std::filesystem::path& base);

/// Atomic text file write used for all report and dataset outputs.
void atomic_write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace unifit
