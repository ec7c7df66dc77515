#include "unifit/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "unifit/model.hpp"

namespace unifit {

namespace {

using nlohmann::json;

std::string resolve_data_dir(std::string path, const std::string& data_dir) {
  const std::string placeholder = "${DATA_DIR}";
  const std::size_t at = path.find(placeholder);
  if (at == std::string::npos) return path;
  std::string dir = data_dir;
  if (dir.empty()) {
    if (const char* env = std::getenv("UNIFIT_DATA_DIR")) dir = env;
  }
  if (dir.empty()) {
    throw DataError("config path '" + path +
                    "' uses ${DATA_DIR}; pass --data-dir or set UNIFIT_DATA_DIR");
  }
  return path.replace(at, placeholder.size(), dir);
}

std::map<double, std::size_t> parse_counts(const json& j, const char* where) {
  std::map<double, std::size_t> counts;
  if (!j.is_object()) throw DataError(std::string(where) + " must be a label->count map");
  for (const auto& [key, value] : j.items()) {
    double label = 0.0;
    try {
      label = std::stod(key);
    } catch (const std::exception&) {
      throw DataError(std::string(where) + ": label '" + key + "' is not numeric");
    }
    counts[label] = value.get<std::size_t>();
  }
  return counts;
}

json counts_to_json(const std::map<double, std::size_t>& counts) {
  json j = json::object();
  for (const auto& [label, count] : counts) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", label);
    j[buf] = count;
  }
  return j;
}

const char* subset_mode_name(SubsetSpec::Mode mode) {
  switch (mode) {
    case SubsetSpec::Mode::full: return "full";
    case SubsetSpec::Mode::swap: return "swap";
    case SubsetSpec::Mode::first_k_per_class: return "first_k_per_class";
    case SubsetSpec::Mode::random_k: return "random_k";
  }
  return "full";
}

SubsetSpec::Mode subset_mode_from_name(const std::string& name) {
  if (name == "full") return SubsetSpec::Mode::full;
  if (name == "swap") return SubsetSpec::Mode::swap;
  if (name == "first_k_per_class") return SubsetSpec::Mode::first_k_per_class;
  if (name == "random_k") return SubsetSpec::Mode::random_k;
  throw DataError("unknown subset mode: " + name);
}

json confusion_to_json(const ConfusionMatrix& cm) {
  json counts = json::array();
  for (std::size_t i = 0; i < cm.classes(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < cm.classes(); ++j) row.push_back(cm.count(i, j));
    counts.push_back(row);
  }
  return json{{"labels", cm.labels()}, {"counts", counts}};
}

}  // namespace

ExperimentConfig load_experiment_config(const std::filesystem::path& path,
                                        const std::string& data_dir) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open experiment config: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_experiment_config(j, data_dir);
}

ExperimentConfig parse_experiment_config(const json& j, const std::string& data_dir) {
  ExperimentConfig cfg;
  try {
    cfg.name = j.value("name", "experiment");
    if (j.contains("data")) {
      ExperimentConfig::Files files;
      files.train_file =
          resolve_data_dir(j.at("data").at("train_file").get<std::string>(), data_dir);
      files.test_file =
          resolve_data_dir(j.at("data").at("test_file").get<std::string>(), data_dir);
      cfg.files = files;
    }
    if (j.contains("synthetic")) {
      const json& s = j.at("synthetic");
      ExperimentConfig::Synthetic synth;
      synth.n = s.at("n").get<std::size_t>();
      synth.train_per_class = parse_counts(s.at("train_per_class"), "train_per_class");
      synth.test_per_class = parse_counts(s.at("test_per_class"), "test_per_class");
      synth.separation = s.value("separation", 4.0);
      synth.noise = s.value("noise", 0.5);
      synth.train_seed = s.value("train_seed", std::uint64_t{1});
      synth.test_seed = s.value("test_seed", std::uint64_t{2});
      cfg.synthetic = synth;
    }
    if (cfg.files.has_value() == cfg.synthetic.has_value()) {
      throw DataError("config must provide exactly one of 'data' or 'synthetic'");
    }
    if (j.contains("subset")) {
      const json& s = j.at("subset");
      cfg.subset.mode = subset_mode_from_name(s.value("mode", "full"));
      if (s.contains("counts")) cfg.subset.counts = parse_counts(s.at("counts"), "counts");
      cfg.subset.total = s.value("total", std::size_t{0});
      cfg.subset.seed = s.value("base_seed", std::uint64_t{0});
    }
    cfg.repetitions = j.value("repetitions", 1);
    if (cfg.repetitions < 1) throw DataError("repetitions must be at least 1");
    if (j.contains("outlier_removal")) {
      const json& o = j.at("outlier_removal");
      OutlierSpec spec;
      const std::string method = o.at("method").get<std::string>();
      if (method == "tolerance") {
        spec.method = OutlierSpec::Method::tolerance;
        spec.tolerance = o.at("tolerance").get<double>();
      } else if (method == "top_k") {
        spec.method = OutlierSpec::Method::top_k;
        spec.k = o.at("k").get<std::size_t>();
      } else {
        throw DataError("unknown outlier removal method: " + method);
      }
      spec.allow_degenerate = o.value("allow_degenerate", false);
      cfg.outlier_removal = spec;
    }
    const json arms = j.value("arms", json::object());
    if (arms.contains("uniform")) {
      const json& u = arms.at("uniform");
      BisectionConfig b;
      b.epsilon = u.value("epsilon", 1e-5);
      b.alpha = u.value("alpha", 0.01);
      b.max_iterations = u.value("max_iterations", 200);
      cfg.uniform_arm = b;
    }
    if (arms.contains("mse")) {
      const json& mj = arms.at("mse");
      GdConfig g;
      g.learning_rate = mj.value("learning_rate", 1e-3);
      g.epochs = mj.value("epochs", 500);
      g.init_seed = mj.value("init_seed", std::uint64_t{0});
      g.init_scale = mj.value("init_scale", 0.01);
      g.standardize = mj.value("standardize", false);
      cfg.mse_arm = g;
      cfg.mse_alpha = mj.value("alpha", 0.01);
    }
    if (!cfg.uniform_arm && !cfg.mse_arm) {
      throw DataError("config enables no arms; add arms.uniform and/or arms.mse");
    }
    if (cfg.outlier_removal && !cfg.uniform_arm) {
      throw DataError("outlier_removal requires the uniform arm configuration");
    }
    cfg.output = j.value("output", "");
  } catch (const json::exception& e) {
    throw DataError(std::string("invalid experiment config: ") + e.what());
  }
  return cfg;
}

json config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["name"] = cfg.name;
  if (cfg.files) {
    j["data"] = {{"train_file", cfg.files->train_file.string()},
                 {"test_file", cfg.files->test_file.string()}};
  }
  if (cfg.synthetic) {
    j["synthetic"] = {{"n", cfg.synthetic->n},
                      {"train_per_class", counts_to_json(cfg.synthetic->train_per_class)},
                      {"test_per_class", counts_to_json(cfg.synthetic->test_per_class)},
                      {"separation", cfg.synthetic->separation},
                      {"noise", cfg.synthetic->noise},
                      {"train_seed", cfg.synthetic->train_seed},
                      {"test_seed", cfg.synthetic->test_seed}};
  }
  j["subset"] = {{"mode", subset_mode_name(cfg.subset.mode)}};
  if (!cfg.subset.counts.empty()) j["subset"]["counts"] = counts_to_json(cfg.subset.counts);
  if (cfg.subset.mode == SubsetSpec::Mode::random_k) {
    j["subset"]["total"] = cfg.subset.total;
    j["subset"]["base_seed"] = cfg.subset.seed;
  }
  j["repetitions"] = cfg.repetitions;
  if (cfg.outlier_removal) {
    if (cfg.outlier_removal->method == OutlierSpec::Method::tolerance) {
      j["outlier_removal"] = {{"method", "tolerance"},
                              {"tolerance", cfg.outlier_removal->tolerance}};
    } else {
      j["outlier_removal"] = {{"method", "top_k"}, {"k", cfg.outlier_removal->k}};
    }
    j["outlier_removal"]["allow_degenerate"] = cfg.outlier_removal->allow_degenerate;
  }
  json arms = json::object();
  if (cfg.uniform_arm) {
    arms["uniform"] = {{"epsilon", cfg.uniform_arm->epsilon},
                       {"alpha", cfg.uniform_arm->alpha},
                       {"max_iterations", cfg.uniform_arm->max_iterations}};
  }
  if (cfg.mse_arm) {
    arms["mse"] = {{"alpha", cfg.mse_alpha},
                   {"learning_rate", cfg.mse_arm->learning_rate},
                   {"epochs", cfg.mse_arm->epochs},
                   {"init_seed", cfg.mse_arm->init_seed},
                   {"init_scale", cfg.mse_arm->init_scale},
                   {"standardize", cfg.mse_arm->standardize}};
  }
  j["arms"] = arms;
  if (!cfg.output.empty()) j["output"] = cfg.output;
  return j;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  Dataset train_role(0);
  Dataset test_role(0);
  if (cfg.files) {
    train_role = read_ucr(cfg.files->train_file);
    test_role = read_ucr(cfg.files->test_file);
  } else {
    train_role = generate_synthetic(cfg.synthetic->n, cfg.synthetic->train_per_class,
                                    cfg.synthetic->separation, cfg.synthetic->noise,
                                    cfg.synthetic->train_seed);
    test_role = generate_synthetic(cfg.synthetic->n, cfg.synthetic->test_per_class,
                                   cfg.synthetic->separation, cfg.synthetic->noise,
                                   cfg.synthetic->test_seed);
  }
  if (cfg.subset.mode == SubsetSpec::Mode::swap) std::swap(train_role, test_role);

  // The decision rule uses the task's label set, which the full train-role
  // dataset defines; a reduced subset may miss a class entirely.
  const std::vector<double> class_labels = train_role.class_labels();

  ExperimentReport report;
  report.config_echo = config_to_json(cfg);
  report.test_size = test_role.size();

  const int reps = cfg.subset.mode == SubsetSpec::Mode::random_k ? cfg.repetitions : 1;
  for (int rep = 0; rep < reps; ++rep) {
    SubsetSpec subset = cfg.subset;
    if (subset.mode == SubsetSpec::Mode::random_k) {
      subset.seed = cfg.subset.seed + static_cast<std::uint64_t>(rep);
    }
    Dataset train_set = build_subset(train_role, subset);

    RepetitionResult rr;
    rr.subset_seed = subset.mode == SubsetSpec::Mode::random_k ? subset.seed : 0;

    if (cfg.outlier_removal) {
      OutlierSplit split = remove_outliers(train_set, *cfg.uniform_arm, *cfg.outlier_removal);
      rr.removed_outliers = split.removed.size();
      train_set = std::move(split.kept);
    }
    rr.train_size = train_set.size();

    if (cfg.uniform_arm) {
      const auto t0 = std::chrono::steady_clock::now();
      const BisectionReport trained = train_uniform(train_set, *cfg.uniform_arm);
      if (!trained.converged) {
        throw ConvergenceError("uniform training did not converge within " +
                               std::to_string(cfg.uniform_arm->max_iterations) +
                               " iterations (bracket " + std::to_string(trained.lower) +
                               " .. " + std::to_string(trained.upper) + ")");
      }
      const Activation act(cfg.uniform_arm->alpha);
      ArmResult arm;
      arm.arm = "uniform";
      arm.train_loss = uniform_loss(trained.weights, act, train_set);
      arm.confusion = evaluate(trained.weights, act, test_role, class_labels);
      arm.accuracy = arm.confusion.accuracy();
      UniformDiagnostics diag;
      diag.iterations = trained.iterations;
      diag.lower = trained.lower;
      diag.upper = trained.upper;
      for (const BisectionStep& step : trained.trace) diag.total_pivots += step.pivots;
      arm.uniform = diag;
      arm.wall_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      rr.arms.push_back(std::move(arm));
    }

    if (cfg.mse_arm) {
      const auto t0 = std::chrono::steady_clock::now();
      const Activation act(cfg.mse_alpha);
      const WeightVector weights = train_mse(train_set, *cfg.mse_arm, act);
      ArmResult arm;
      arm.arm = "mse";
      arm.train_loss = mse_loss(weights, act, train_set);
      arm.confusion = evaluate(weights, act, test_role, class_labels);
      arm.accuracy = arm.confusion.accuracy();
      arm.wall_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      rr.arms.push_back(std::move(arm));
    }

    report.repetitions.push_back(std::move(rr));
  }

  std::map<std::string, double> sums;
  for (const RepetitionResult& rr : report.repetitions) {
    for (const ArmResult& arm : rr.arms) sums[arm.arm] += arm.accuracy;
  }
  for (const auto& [arm, sum] : sums) {
    report.mean_accuracy[arm] = sum / static_cast<double>(report.repetitions.size());
  }
  return report;
}

json report_to_json(const ExperimentReport& report) {
  json j;
  j["experiment"] = report.config_echo;
  j["test_size"] = report.test_size;
  json reps = json::array();
  for (const RepetitionResult& rr : report.repetitions) {
    json r;
    r["subset_seed"] = rr.subset_seed;
    r["train_size"] = rr.train_size;
    r["removed_outliers"] = rr.removed_outliers;
    json arms = json::object();
    for (const ArmResult& arm : rr.arms) {
      json a;
      a["train_loss"] = arm.train_loss;
      a["accuracy"] = arm.accuracy;
      a["confusion"] = confusion_to_json(arm.confusion);
      a["wall_seconds"] = arm.wall_seconds;
      if (arm.uniform) {
        a["iterations"] = arm.uniform->iterations;
        a["lower"] = arm.uniform->lower;
        a["upper"] = arm.uniform->upper;
        a["total_pivots"] = arm.uniform->total_pivots;
      }
      arms[arm.arm] = a;
    }
    r["arms"] = arms;
    reps.push_back(r);
  }
  j["repetitions"] = reps;
  j["mean_accuracy"] = report.mean_accuracy;
  return j;
}

std::string report_to_text(const ExperimentReport& report) {
  std::ostringstream out;
  out << "experiment: " << report.config_echo.value("name", "experiment") << "\n";
  out << "test size: " << report.test_size << "\n";
  char buf[64];
  for (std::size_t rep = 0; rep < report.repetitions.size(); ++rep) {
    const RepetitionResult& rr = report.repetitions[rep];
    out << "\nrepetition " << rep << " (train size " << rr.train_size;
    if (rr.subset_seed != 0) out << ", subset seed " << rr.subset_seed;
    if (rr.removed_outliers != 0) out << ", outliers removed " << rr.removed_outliers;
    out << ")\n";
    out << "  method    accuracy   train loss     confusion (rows actual, cols "
           "predicted; labels ascending)\n";
    for (const ArmResult& arm : rr.arms) {
      std::snprintf(buf, sizeof(buf), "  %-8s  %6.2f%%   %-11.5g    ", arm.arm.c_str(),
                    100.0 * arm.accuracy, arm.train_loss);
      out << buf;
      for (std::size_t i = 0; i < arm.confusion.classes(); ++i) {
        if (i > 0) out << " / ";
        for (std::size_t j = 0; j < arm.confusion.classes(); ++j) {
          if (j > 0) out << ' ';
          out << arm.confusion.count(i, j);
        }
      }
      out << "\n";
    }
  }
  out << "\nmean accuracy over " << report.repetitions.size() << " repetition(s)\n";
  for (const auto& [arm, mean] : report.mean_accuracy) {
    std::snprintf(buf, sizeof(buf), "  %-8s  %6.2f%%\n", arm.c_str(), 100.0 * mean);
    out << buf;
  }
  return out.str();
}

void atomic_write_file(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path parent = path.parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write file: " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw DataError("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_report_files(const ExperimentReport& report, const std::filesystem::path& base) {
  std::filesystem::path json_path = base;
  json_path += ".json";
  std::filesystem::path text_path = base;
  text_path += ".txt";
  atomic_write_file(json_path, report_to_json(report).dump(2) + "\n");
  atomic_write_file(text_path, report_to_text(report));
}

}  // namespace unifit
