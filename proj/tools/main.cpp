#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "unifit/bisection.hpp"
#include "unifit/data.hpp"
#include "unifit/evaluation.hpp"
#include "unifit/experiment.hpp"
#include "unifit/gradient_descent.hpp"
#include "unifit/model.hpp"

namespace {

using nlohmann::json;

constexpr int kExitDataError = 2;
constexpr int kExitNonConvergence = 3;
constexpr int kExitDegenerateRemoval = 4;

std::map<double, std::size_t> parse_counts_flag(const std::string& flag) {
  std::map<double, std::size_t> counts;
  std::size_t pos = 0;
  while (pos < flag.size()) {
    const std::size_t comma = flag.find(',', pos);
    const std::string item =
        flag.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    const std::size_t colon = item.find(':');
    if (colon == std::string::npos) {
      throw unifit::DataError("bad counts entry '" + item + "', expected label:count");
    }
    counts[std::stod(item.substr(0, colon))] =
        static_cast<std::size_t>(std::stoul(item.substr(colon + 1)));
    pos = comma == std::string::npos ? flag.size() : comma + 1;
  }
  if (counts.empty()) throw unifit::DataError("empty counts list");
  return counts;
}

void save_weights(const std::filesystem::path& path, const unifit::WeightVector& w,
                  double alpha, const std::vector<double>& labels, json extra) {
  json j = std::move(extra);
  j["alpha"] = alpha;
  j["bias"] = w.bias;
  j["weights"] = w.weights;
  j["class_labels"] = labels;
  unifit::atomic_write_file(path, j.dump(2) + "\n");
}

struct LoadedModel {
  unifit::WeightVector weights;
  double alpha = 0.01;
  std::vector<double> class_labels;
};

LoadedModel load_weights(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw unifit::DataError("cannot open weights file: " + path.string());
  json j;
  try {
    in >> j;
    LoadedModel m;
    m.alpha = j.at("alpha").get<double>();
    m.weights = unifit::WeightVector(j.at("bias").get<double>(),
                                     j.at("weights").get<std::vector<double>>());
    m.class_labels = j.at("class_labels").get<std::vector<double>>();
    return m;
  } catch (const json::exception& e) {
    throw unifit::DataError("invalid weights file " + path.string() + ": " + e.what());
  }
}

void print_confusion(const unifit::ConfusionMatrix& cm) {
  std::printf("confusion matrix (rows actual, cols predicted; labels ascending:");
  for (double label : cm.labels()) std::printf(" %g", label);
  std::printf(")\n");
  for (std::size_t i = 0; i < cm.classes(); ++i) {
    std::printf(" ");
    for (std::size_t j = 0; j < cm.classes(); ++j) {
      std::printf(" %6ld", cm.count(i, j));
    }
    std::printf("\n");
  }
}

struct SubsetFlags {
  std::string mode = "full";
  std::string counts;
  std::size_t total = 0;
  std::uint64_t seed = 0;

  unifit::SubsetSpec to_spec() const {
    unifit::SubsetSpec spec;
    if (mode == "full") {
      spec.mode = unifit::SubsetSpec::Mode::full;
    } else if (mode == "first_k_per_class") {
      spec.mode = unifit::SubsetSpec::Mode::first_k_per_class;
      spec.counts = parse_counts_flag(counts);
    } else if (mode == "random_k") {
      spec.mode = unifit::SubsetSpec::Mode::random_k;
      spec.total = total;
      spec.seed = seed;
    } else {
      throw unifit::DataError("unknown subset mode: " + mode);
    }
    return spec;
  }
};

int run(int argc, char** argv) {
  CLI::App app{"Single-node classifier training under the uniform (max-norm) loss\n"
               "via bisection over linear feasibility, with an MSE baseline."};
  app.require_subcommand(1);

  // ---- train ----
  auto* train = app.add_subcommand("train", "Train one arm on a dataset");
  std::string train_data;
  std::string train_arm = "uniform";
  std::string train_out;
  unifit::BisectionConfig bis_cfg;
  unifit::GdConfig gd_cfg;
  SubsetFlags train_subset;
  train->add_option("--data", train_data, "UCR-format training file")->required();
  train->add_option("--arm", train_arm, "uniform or mse")
      ->check(CLI::IsMember({"uniform", "mse"}));
  train->add_option("--epsilon", bis_cfg.epsilon, "bisection stopping gap");
  train->add_option("--alpha", bis_cfg.alpha, "activation negative-side slope");
  train->add_option("--max-iterations", bis_cfg.max_iterations, "bisection cap");
  train->add_option("--learning-rate", gd_cfg.learning_rate, "gradient step size");
  train->add_option("--epochs", gd_cfg.epochs, "gradient descent epochs");
  train->add_option("--init-seed", gd_cfg.init_seed, "weight init seed");
  train->add_option("--init-scale", gd_cfg.init_scale, "weight init range");
  train->add_flag("--standardize", gd_cfg.standardize, "standardize features for GD");
  train->add_option("--subset-mode", train_subset.mode, "full|first_k_per_class|random_k");
  train->add_option("--counts", train_subset.counts, "label:count,... for first_k_per_class");
  train->add_option("--total", train_subset.total, "random_k subset size");
  train->add_option("--subset-seed", train_subset.seed, "random_k seed");
  train->add_option("--out", train_out, "weights file to write");

  // ---- evaluate ----
  auto* evaluate = app.add_subcommand("evaluate", "Evaluate saved weights on a dataset");
  std::string eval_weights;
  std::string eval_data;
  std::string eval_out;
  evaluate->add_option("--weights", eval_weights, "weights file from train")->required();
  evaluate->add_option("--data", eval_data, "UCR-format test file")->required();
  evaluate->add_option("--out", eval_out, "optional JSON report path");

  // ---- experiment ----
  auto* experiment = app.add_subcommand("experiment", "Run a declarative experiment config");
  std::string exp_config;
  std::string exp_out;
  std::string exp_data_dir;
  experiment->add_option("--config", exp_config, "experiment JSON file")->required();
  experiment->add_option("--out", exp_out, "report base path (writes .json and .txt)");
  experiment->add_option("--data-dir", exp_data_dir, "substitution for ${DATA_DIR} paths");

  // ---- remove-outliers ----
  auto* removecmd = app.add_subcommand(
      "remove-outliers", "Train the uniform model and split off high-deviation samples");
  std::string rm_data, rm_method = "tolerance", rm_kept, rm_removed, rm_report;
  double rm_tolerance = 1e-7;
  std::size_t rm_k = 0;
  bool rm_allow = false;
  unifit::BisectionConfig rm_cfg;
  removecmd->add_option("--data", rm_data, "UCR-format training file")->required();
  removecmd->add_option("--method", rm_method, "tolerance or top_k")
      ->check(CLI::IsMember({"tolerance", "top_k"}));
  removecmd->add_option("--tolerance", rm_tolerance, "deviation tolerance below max");
  removecmd->add_option("--k", rm_k, "number of samples to remove (top_k)");
  removecmd->add_option("--epsilon", rm_cfg.epsilon, "bisection stopping gap");
  removecmd->add_option("--alpha", rm_cfg.alpha, "activation slope");
  removecmd->add_option("--max-iterations", rm_cfg.max_iterations, "bisection cap");
  removecmd->add_option("--out-kept", rm_kept, "file for the kept samples");
  removecmd->add_option("--out-removed", rm_removed, "file for the removed samples");
  removecmd->add_option("--report", rm_report, "optional JSON report path");
  removecmd->add_flag("--allow-degenerate", rm_allow,
                      "permit removing every sample when all deviations tie");

  // ---- synth ----
  auto* synth = app.add_subcommand("synth", "Generate a synthetic two-class dataset");
  std::size_t synth_n = 2;
  std::string synth_counts = "0:10,1:10";
  double synth_sep = 4.0, synth_noise = 0.5;
  std::uint64_t synth_seed = 1;
  std::string synth_out;
  synth->add_option("--n", synth_n, "feature dimension");
  synth->add_option("--counts", synth_counts, "label:count,... per class");
  synth->add_option("--separation", synth_sep, "distance between class means");
  synth->add_option("--noise", synth_noise, "per-coordinate noise stddev");
  synth->add_option("--seed", synth_seed, "generator seed");
  synth->add_option("--out", synth_out, "output file")->required();

  CLI11_PARSE(app, argc, argv);

  if (*train) {
    unifit::Dataset full = unifit::read_ucr(train_data);
    const std::vector<double> labels = full.class_labels();
    const unifit::Dataset set = unifit::build_subset(full, train_subset.to_spec());
    if (train_arm == "uniform") {
      const unifit::BisectionReport report = unifit::train_uniform(set, bis_cfg);
      if (!report.converged) {
        throw unifit::ConvergenceError("bisection did not converge within " +
                                       std::to_string(bis_cfg.max_iterations) +
                                       " iterations");
      }
      const unifit::Activation act(bis_cfg.alpha);
      const double loss = unifit::uniform_loss(report.weights, act, set);
      std::printf("trained uniform arm on %zu samples: %d iterations, bracket "
                  "[%.3e, %.3e], train loss %.6e\n",
                  set.size(), report.iterations, report.lower, report.upper, loss);
      if (!train_out.empty()) {
        save_weights(train_out, report.weights, bis_cfg.alpha, labels,
                     json{{"arm", "uniform"},
                          {"train_loss", loss},
                          {"iterations", report.iterations},
                          {"lower", report.lower},
                          {"upper", report.upper}});
        std::printf("weights written to %s\n", train_out.c_str());
      }
    } else {
      const unifit::Activation act(bis_cfg.alpha);
      const unifit::WeightVector w = unifit::train_mse(set, gd_cfg, act);
      const double loss = unifit::mse_loss(w, act, set);
      std::printf("trained mse arm on %zu samples: %d epochs, train loss %.6e\n",
                  set.size(), gd_cfg.epochs, loss);
      if (!train_out.empty()) {
        save_weights(train_out, w, bis_cfg.alpha, labels,
                     json{{"arm", "mse"}, {"train_loss", loss}});
        std::printf("weights written to %s\n", train_out.c_str());
      }
    }
    return 0;
  }

  if (*evaluate) {
    const LoadedModel model = load_weights(eval_weights);
    const unifit::Dataset test = unifit::read_ucr(eval_data);
    const unifit::Activation act(model.alpha);
    const unifit::ConfusionMatrix cm =
        unifit::evaluate(model.weights, act, test, model.class_labels);
    std::printf("accuracy: %.2f%% (%ld / %ld)\n", 100.0 * cm.accuracy(), cm.correct(),
                cm.total());
    print_confusion(cm);
    if (!eval_out.empty()) {
      json counts = json::array();
      for (std::size_t i = 0; i < cm.classes(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < cm.classes(); ++j) row.push_back(cm.count(i, j));
        counts.push_back(row);
      }
      unifit::atomic_write_file(eval_out, json{{"accuracy", cm.accuracy()},
                                               {"labels", cm.labels()},
                                               {"counts", counts}}
                                                  .dump(2) +
                                              "\n");
    }
    return 0;
  }

  if (*experiment) {
    const unifit::ExperimentConfig cfg =
        unifit::load_experiment_config(exp_config, exp_data_dir);
    const unifit::ExperimentReport report = unifit::run_experiment(cfg);
    std::string base = exp_out;
    if (base.empty()) base = cfg.output;
    if (base.empty()) base = "reports/" + cfg.name;
    unifit::write_report_files(report, base);
    std::fputs(unifit::report_to_text(report).c_str(), stdout);
    std::printf("report written to %s.json and %s.txt\n", base.c_str(), base.c_str());
    return 0;
  }

  if (*removecmd) {
    const unifit::Dataset set = unifit::read_ucr(rm_data);
    unifit::OutlierSpec spec;
    if (rm_method == "tolerance") {
      spec.method = unifit::OutlierSpec::Method::tolerance;
      spec.tolerance = rm_tolerance;
    } else {
      spec.method = unifit::OutlierSpec::Method::top_k;
      spec.k = rm_k;
    }
    spec.allow_degenerate = rm_allow;
    const unifit::OutlierSplit split = unifit::remove_outliers(set, rm_cfg, spec);
    std::printf("removed %zu of %zu samples (max deviation %.6e, cut %.6e)\n",
                split.removed.size(), set.size(), split.report.max_deviation,
                split.report.threshold);
    if (!rm_kept.empty()) unifit::write_ucr(split.kept, rm_kept);
    if (!rm_removed.empty()) unifit::write_ucr(split.removed, rm_removed);
    if (!rm_report.empty()) {
      unifit::atomic_write_file(
          rm_report,
          json{{"removed", split.removed.size()},
               {"kept", split.kept.size()},
               {"max_deviation", split.report.max_deviation},
               {"threshold", split.report.threshold},
               {"removed_indices", split.report.removed_indices},
               {"iterations", split.report.training.iterations}}
              .dump(2) +
              "\n");
    }
    return 0;
  }

  if (*synth) {
    const unifit::Dataset set = unifit::generate_synthetic(
        synth_n, parse_counts_flag(synth_counts), synth_sep, synth_noise, synth_seed);
    unifit::write_ucr(set, synth_out);
    std::printf("wrote %zu samples with %zu features to %s\n", set.size(),
                set.feature_count(), synth_out.c_str());
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const unifit::DegenerateRemovalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDegenerateRemoval;
  } catch (const unifit::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNonConvergence;
  } catch (const unifit::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDataError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
