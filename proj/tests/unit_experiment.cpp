#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "report_compare.hpp"
#include "unifit/evaluation.hpp"
#include "unifit/experiment.hpp"
#include "unifit/model.hpp"

using namespace unifit;
using nlohmann::json;

namespace {

json synthetic_config() {
  return json::parse(R"({
    "name": "synthetic_check",
    "synthetic": {
      "n": 3,
      "train_per_class": {"0": 12, "1": 12},
      "test_per_class": {"0": 40, "1": 40},
      "separation": 5.0,
      "noise": 0.6,
      "train_seed": 21,
      "test_seed": 22
    },
    "subset": {"mode": "full"},
    "arms": {
      "uniform": {"epsilon": 1e-5, "alpha": 0.01, "max_iterations": 200},
      "mse": {"alpha": 0.01, "learning_rate": 0.002, "epochs": 300, "init_seed": 3,
              "init_scale": 0.01, "standardize": false}
    }
  })");
}

}  // namespace

TEST_CASE("nearest-label decision rule") {
  const Activation a(0.01);
  SUBCASE("output 0.9 goes to class 1") {
    const WeightVector w(0.9, {0.0});
    CHECK(classify(w, a, {0.0}, {0.0, 1.0}) == 1.0);
  }
  SUBCASE("exact midpoint ties to the smaller label") {
    const WeightVector w(0.5, {0.0});
    CHECK(classify(w, a, {0.0}, {0.0, 1.0}) == 0.0);
  }
  SUBCASE("extrapolated output snaps to the nearest label") {
    const WeightVector w(-300.0, {0.0});  // sigma(-300) = -3
    CHECK(forward(w, a, {0.0}) == doctest::Approx(-3.0));
    CHECK(classify(w, a, {0.0}, {1.0, 2.0}) == 1.0);
  }
  SUBCASE("label order in the argument does not matter") {
    const WeightVector w(0.9, {0.0});
    CHECK(classify(w, a, {0.0}, {1.0, 0.0}) == 1.0);
  }
  SUBCASE("empty label set is rejected") {
    CHECK_THROWS_AS(classify(WeightVector(1), a, {0.0}, {}), std::invalid_argument);
  }
}

TEST_CASE("confusion matrix arithmetic") {
  SUBCASE("published-style counts") {
    const ConfusionMatrix cm =
        ConfusionMatrix::from_counts({1.0, 2.0}, {{108, 25}, {13, 224}});
    CHECK(cm.total() == 370);
    CHECK(cm.correct() == 332);
    CHECK(cm.accuracy() == doctest::Approx(332.0 / 370.0));
    CHECK(cm.accuracy() == doctest::Approx(0.897297).epsilon(1e-5));
  }
  SUBCASE("record and index order") {
    ConfusionMatrix cm(std::vector<double>{2.0, 1.0});  // sorted internally
    cm.record(1.0, 1.0);
    cm.record(1.0, 2.0);
    cm.record(2.0, 2.0);
    CHECK(cm.labels() == std::vector<double>{1.0, 2.0});
    CHECK(cm.count(0, 0) == 1);
    CHECK(cm.count(0, 1) == 1);
    CHECK(cm.count(1, 1) == 1);
    CHECK(cm.accuracy() == doctest::Approx(2.0 / 3.0));
    CHECK_THROWS_AS(cm.record(3.0, 1.0), DataError);
  }
}

TEST_CASE("evaluation counts misclassifications by hand") {
  const Activation a(0.01);
  // identity-ish model: forward(x) = x for positive x
  const WeightVector w(0.0, {1.0});
  // six points, two planted on the wrong side of the 0.5 midpoint
  const Dataset test = Dataset::from_samples({
      Sample{{0.1}, 0.0}, Sample{{0.2}, 0.0}, Sample{{0.9}, 1.0},
      Sample{{0.8}, 1.0}, Sample{{0.7}, 0.0},  // model says 1, actual 0
      Sample{{0.2}, 1.0},                      // model says 0, actual 1
  });
  const ConfusionMatrix cm = evaluate(w, a, test, {0.0, 1.0});
  CHECK(cm.total() == 6);
  CHECK(cm.correct() == 4);
  CHECK(cm.count(0, 1) + cm.count(1, 0) == 2);
  CHECK(cm.count(0, 1) == 1);
  CHECK(cm.count(1, 0) == 1);
}

TEST_CASE("evaluate rejects labels the model does not know") {
  const Activation a(0.01);
  const Dataset test = Dataset::from_samples({Sample{{0.1}, 7.0}});
  CHECK_THROWS_AS(evaluate(WeightVector(1), a, test, {0.0, 1.0}), DataError);
}

TEST_CASE("config parsing and validation") {
  SUBCASE("round trip through the canonical echo") {
    const ExperimentConfig cfg = parse_experiment_config(synthetic_config());
    CHECK(cfg.name == "synthetic_check");
    REQUIRE(cfg.synthetic.has_value());
    CHECK(cfg.synthetic->train_per_class.at(0.0) == 12);
    REQUIRE(cfg.uniform_arm.has_value());
    CHECK(cfg.uniform_arm->epsilon == 1e-5);
    REQUIRE(cfg.mse_arm.has_value());
    CHECK(cfg.mse_arm->learning_rate == 0.002);
    const ExperimentConfig reparsed =
        parse_experiment_config(config_to_json(cfg));
    CHECK(config_to_json(reparsed) == config_to_json(cfg));
  }
  SUBCASE("exactly one data source") {
    json j = synthetic_config();
    j["data"] = {{"train_file", "a.tsv"}, {"test_file", "b.tsv"}};
    CHECK_THROWS_AS(parse_experiment_config(j), DataError);
    j.erase("data");
    j.erase("synthetic");
    CHECK_THROWS_AS(parse_experiment_config(j), DataError);
  }
  SUBCASE("at least one arm") {
    json j = synthetic_config();
    j["arms"] = json::object();
    CHECK_THROWS_AS(parse_experiment_config(j), DataError);
  }
  SUBCASE("outlier removal needs the uniform arm") {
    json j = synthetic_config();
    j["arms"].erase("uniform");
    j["outlier_removal"] = {{"method", "top_k"}, {"k", 2}};
    CHECK_THROWS_AS(parse_experiment_config(j), DataError);
  }
  SUBCASE("unresolved data dir placeholder") {
    json j = synthetic_config();
    j.erase("synthetic");
    j["data"] = {{"train_file", "${DATA_DIR}/train.tsv"},
                 {"test_file", "${DATA_DIR}/test.tsv"}};
    unsetenv("UNIFIT_DATA_DIR");
    CHECK_THROWS_AS(parse_experiment_config(j), DataError);
    const ExperimentConfig cfg = parse_experiment_config(j, "/tmp/somewhere");
    CHECK(cfg.files->train_file == std::filesystem::path("/tmp/somewhere/train.tsv"));
  }
  SUBCASE("unknown subset mode") {
    json j = synthetic_config();
    j["subset"] = {{"mode", "sideways"}};
    CHECK_THROWS_AS(parse_experiment_config(j), DataError);
  }
}

TEST_CASE("synthetic experiment end to end") {
  const ExperimentConfig cfg = parse_experiment_config(synthetic_config());
  const ExperimentReport report = run_experiment(cfg);

  REQUIRE(report.repetitions.size() == 1);
  const RepetitionResult& rep = report.repetitions[0];
  CHECK(rep.train_size == 24);
  CHECK(report.test_size == 80);
  REQUIRE(rep.arms.size() == 2);

  for (const ArmResult& arm : rep.arms) {
    // accuracy recomputed from the counts must equal the reported field
    CHECK(arm.accuracy == arm.confusion.accuracy());
    CHECK(arm.confusion.total() == 80);
    // well-separated clusters: both arms should classify essentially everything
    CHECK(arm.accuracy > 0.9);
  }
  CHECK(report.mean_accuracy.count("uniform") == 1);
  CHECK(report.mean_accuracy.count("mse") == 1);
}

TEST_CASE("a widely separable synthetic set is classified perfectly") {
  json j = synthetic_config();
  j["synthetic"]["separation"] = 8.0;
  j["synthetic"]["noise"] = 0.4;
  j["arms"].erase("mse");
  const ExperimentReport report = run_experiment(parse_experiment_config(j));
  CHECK(report.mean_accuracy.at("uniform") == 1.0);
  // the generator's own guarantee: a linear fit below the half-gap exists
  CHECK(report.repetitions[0].arms[0].train_loss < 0.5);
}

TEST_CASE("report bytes are deterministic and timing-independent") {
  const ExperimentConfig cfg = parse_experiment_config(synthetic_config());
  const json a = report_to_json(run_experiment(cfg));
  const json b = report_to_json(run_experiment(cfg));
  CHECK(report_compare::canonical_bytes(a) == report_compare::canonical_bytes(b));
}

TEST_CASE("disabling one arm leaves the other untouched") {
  json both = synthetic_config();
  json uniform_only = both;
  uniform_only["arms"].erase("mse");
  json mse_only = both;
  mse_only["arms"].erase("uniform");

  const json rb = report_to_json(run_experiment(parse_experiment_config(both)));
  const json ru = report_to_json(run_experiment(parse_experiment_config(uniform_only)));
  const json rm = report_to_json(run_experiment(parse_experiment_config(mse_only)));

  const auto arm_bytes = [](const json& report, const char* arm) {
    json j = report.at("repetitions").at(0).at("arms").at(arm);
    report_compare::strip_wall_seconds(j);
    return j.dump();
  };
  CHECK(arm_bytes(rb, "uniform") == arm_bytes(ru, "uniform"));
  CHECK(arm_bytes(rb, "mse") == arm_bytes(rm, "mse"));
}

TEST_CASE("random subsets vary by repetition with derived seeds") {
  json j = synthetic_config();
  j["subset"] = {{"mode", "random_k"}, {"total", 10}, {"base_seed", 500}};
  j["repetitions"] = 4;
  j["arms"].erase("mse");  // keep it quick
  const ExperimentReport report = run_experiment(parse_experiment_config(j));
  REQUIRE(report.repetitions.size() == 4);
  for (std::size_t rep = 0; rep < 4; ++rep) {
    CHECK(report.repetitions[rep].subset_seed == 500 + rep);
    CHECK(report.repetitions[rep].train_size == 10);
  }
  // the mean is the arithmetic average of the listed accuracies
  double sum = 0.0;
  for (const RepetitionResult& rep : report.repetitions) sum += rep.arms[0].accuracy;
  CHECK(report.mean_accuracy.at("uniform") == doctest::Approx(sum / 4.0).epsilon(1e-15));
}

TEST_CASE("report files are written and parse back") {
  const ExperimentConfig cfg = parse_experiment_config(synthetic_config());
  const ExperimentReport report = run_experiment(cfg);
  const std::filesystem::path base =
      std::filesystem::temp_directory_path() / "unifit_report_test";
  write_report_files(report, base);
  std::ifstream jf(base.string() + ".json");
  REQUIRE(jf.good());
  json parsed;
  jf >> parsed;
  CHECK(parsed.contains("mean_accuracy"));
  std::ifstream tf(base.string() + ".txt");
  REQUIRE(tf.good());
  std::string first_line;
  std::getline(tf, first_line);
  CHECK(first_line.find("synthetic_check") != std::string::npos);
  std::filesystem::remove(base.string() + ".json");
  std::filesystem::remove(base.string() + ".txt");
}

TEST_CASE("outlier removal integrates into the pipeline") {
  json j = synthetic_config();
  j["outlier_removal"] = {{"method", "top_k"}, {"k", 4}};
  const ExperimentReport report = run_experiment(parse_experiment_config(j));
  CHECK(report.repetitions[0].removed_outliers == 4);
  CHECK(report.repetitions[0].train_size == 20);  // 24 generated minus 4 removed
}
