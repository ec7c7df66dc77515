#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <map>
#include <string>
#include <vector>

#include "unifit/bisection.hpp"
#include "unifit/data.hpp"
#include "unifit/evaluation.hpp"
#include "unifit/experiment.hpp"
#include "unifit/feasibility.hpp"
#include "unifit/gradient_descent.hpp"
#include "unifit/model.hpp"

namespace py = pybind11;
using namespace unifit;

namespace {

Dataset dataset_from_lists(const std::vector<std::vector<double>>& features,
                           const std::vector<double>& targets) {
  if (features.size() != targets.size()) {
    throw std::invalid_argument("features and targets have different lengths");
  }
  std::vector<Sample> samples;
  samples.reserve(features.size());
  for (std::size_t i = 0; i < features.size(); ++i) {
    samples.push_back(Sample{features[i], targets[i]});
  }
  return Dataset::from_samples(std::move(samples));
}

std::vector<std::vector<long>> confusion_counts(const ConfusionMatrix& cm) {
  std::vector<std::vector<long>> counts(cm.classes(), std::vector<long>(cm.classes()));
  for (std::size_t i = 0; i < cm.classes(); ++i) {
    for (std::size_t j = 0; j < cm.classes(); ++j) counts[i][j] = cm.count(i, j);
  }
  return counts;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Uniform (max-norm) training of single-node classifiers by bisection "
            "over linear feasibility, plus an MSE gradient-descent baseline.";

  py::register_exception<DataError>(m, "DataError");
  py::register_exception<ConvergenceError>(m, "ConvergenceError");
  py::register_exception<DegenerateRemovalError>(m, "DegenerateRemovalError");

  py::class_<Activation>(m, "Activation")
      .def(py::init<double>(), py::arg("alpha") = 0.01)
      .def_property_readonly("alpha", &Activation::alpha);

  py::class_<WeightVector>(m, "WeightVector")
      .def(py::init<double, std::vector<double>>(), py::arg("bias"), py::arg("weights"))
      .def_readwrite("bias", &WeightVector::bias)
      .def_readwrite("weights", &WeightVector::weights)
      .def("__len__", &WeightVector::size);

  py::class_<Dataset>(m, "Dataset")
      .def(py::init(&dataset_from_lists), py::arg("features"), py::arg("targets"))
      .def_property_readonly("n", &Dataset::feature_count)
      .def_property_readonly("class_labels", &Dataset::class_labels)
      .def("features", [](const Dataset& z, std::size_t i) { return z[i].features; })
      .def("target", [](const Dataset& z, std::size_t i) { return z[i].target; })
      .def("count_of_class", &Dataset::count_of_class)
      .def("__len__", &Dataset::size);

  m.def("activate", &activate, py::arg("activation"), py::arg("t"));
  m.def("activate_inverse", &activate_inverse, py::arg("activation"), py::arg("s"));
  m.def("forward", &forward, py::arg("weights"), py::arg("activation"), py::arg("x"));
  m.def("uniform_loss", &uniform_loss, py::arg("weights"), py::arg("activation"),
        py::arg("dataset"));
  m.def("uniform_loss_maxrep", &uniform_loss_maxrep, py::arg("weights"),
        py::arg("activation"), py::arg("dataset"));
  m.def("mse_loss", &mse_loss, py::arg("weights"), py::arg("activation"),
        py::arg("dataset"));

  py::class_<BisectionConfig>(m, "BisectionConfig")
      .def(py::init([](double epsilon, int max_iterations, double alpha) {
             return BisectionConfig{epsilon, max_iterations, alpha};
           }),
           py::arg("epsilon") = 1e-5, py::arg("max_iterations") = 200,
           py::arg("alpha") = 0.01)
      .def_readwrite("epsilon", &BisectionConfig::epsilon)
      .def_readwrite("max_iterations", &BisectionConfig::max_iterations)
      .def_readwrite("alpha", &BisectionConfig::alpha);

  py::class_<BisectionStep>(m, "BisectionStep")
      .def_readonly("midpoint", &BisectionStep::midpoint)
      .def_readonly("feasible", &BisectionStep::feasible)
      .def_readonly("pivots", &BisectionStep::pivots);

  py::class_<BisectionReport>(m, "BisectionReport")
      .def_readonly("weights", &BisectionReport::weights)
      .def_readonly("lower", &BisectionReport::lower)
      .def_readonly("upper", &BisectionReport::upper)
      .def_readonly("initial_upper", &BisectionReport::initial_upper)
      .def_readonly("iterations", &BisectionReport::iterations)
      .def_readonly("converged", &BisectionReport::converged)
      .def_readonly("trace", &BisectionReport::trace);

  m.def("initial_bounds", &initial_bounds, py::arg("dataset"), py::arg("activation"));
  m.def("train_uniform", &train_uniform, py::arg("dataset"), py::arg("config"),
        py::call_guard<py::gil_scoped_release>());

  py::class_<GdConfig>(m, "GdConfig")
      .def(py::init([](double learning_rate, int epochs, std::uint64_t init_seed,
                       double init_scale, bool standardize) {
             return GdConfig{learning_rate, epochs, init_seed, init_scale, standardize};
           }),
           py::arg("learning_rate") = 1e-3, py::arg("epochs") = 500,
           py::arg("init_seed") = 0, py::arg("init_scale") = 0.01,
           py::arg("standardize") = false)
      .def_readwrite("learning_rate", &GdConfig::learning_rate)
      .def_readwrite("epochs", &GdConfig::epochs)
      .def_readwrite("init_seed", &GdConfig::init_seed)
      .def_readwrite("init_scale", &GdConfig::init_scale)
      .def_readwrite("standardize", &GdConfig::standardize);

  m.def("mse_gradient", &mse_gradient, py::arg("weights"), py::arg("activation"),
        py::arg("dataset"));
  m.def("train_mse", &train_mse, py::arg("dataset"), py::arg("config"),
        py::arg("activation"), py::call_guard<py::gil_scoped_release>());

  m.def("read_ucr", &read_ucr, py::arg("path"));
  m.def("write_ucr", &write_ucr, py::arg("dataset"), py::arg("path"));
  m.def("generate_synthetic", &generate_synthetic, py::arg("n"), py::arg("per_class"),
        py::arg("separation"), py::arg("noise"), py::arg("seed"));

  m.def(
      "first_k_per_class",
      [](const Dataset& z, const std::map<double, std::size_t>& counts) {
        SubsetSpec spec;
        spec.mode = SubsetSpec::Mode::first_k_per_class;
        spec.counts = counts;
        return build_subset(z, spec);
      },
      py::arg("dataset"), py::arg("counts"));
  m.def(
      "random_subset",
      [](const Dataset& z, std::size_t total, std::uint64_t seed) {
        SubsetSpec spec;
        spec.mode = SubsetSpec::Mode::random_k;
        spec.total = total;
        spec.seed = seed;
        return build_subset(z, spec);
      },
      py::arg("dataset"), py::arg("total"), py::arg("seed"));

  m.def(
      "remove_outliers_tolerance",
      [](const Dataset& z, const BisectionConfig& cfg, double tolerance,
         bool allow_degenerate) {
        OutlierSpec spec;
        spec.method = OutlierSpec::Method::tolerance;
        spec.tolerance = tolerance;
        spec.allow_degenerate = allow_degenerate;
        OutlierSplit split = remove_outliers(z, cfg, spec);
        return py::make_tuple(split.kept, split.removed, split.report.removed_indices);
      },
      py::arg("dataset"), py::arg("config"), py::arg("tolerance"),
      py::arg("allow_degenerate") = false);
  m.def(
      "remove_outliers_top_k",
      [](const Dataset& z, const BisectionConfig& cfg, std::size_t k) {
        OutlierSpec spec;
        spec.method = OutlierSpec::Method::top_k;
        spec.k = k;
        OutlierSplit split = remove_outliers(z, cfg, spec);
        return py::make_tuple(split.kept, split.removed, split.report.removed_indices);
      },
      py::arg("dataset"), py::arg("config"), py::arg("k"));

  py::class_<ConfusionMatrix>(m, "ConfusionMatrix")
      .def_property_readonly("labels", &ConfusionMatrix::labels)
      .def_property_readonly("counts", &confusion_counts)
      .def("accuracy", &ConfusionMatrix::accuracy)
      .def("total", &ConfusionMatrix::total)
      .def("correct", &ConfusionMatrix::correct);

  m.def("classify", &classify, py::arg("weights"), py::arg("activation"), py::arg("x"),
        py::arg("class_labels"));
  m.def("evaluate", &evaluate, py::arg("weights"), py::arg("activation"),
        py::arg("test"), py::arg("class_labels"));

  m.def(
      "run_experiment",
      [](const std::string& config_json, const std::string& data_dir) {
        const ExperimentConfig cfg =
            parse_experiment_config(nlohmann::json::parse(config_json), data_dir);
        return report_to_json(run_experiment(cfg)).dump(2);
      },
      py::arg("config_json"), py::arg("data_dir") = std::string(),
      py::call_guard<py::gil_scoped_release>(),
      "Runs an experiment described by a JSON string; returns the report as JSON.");
  m.def(
      "run_experiment_file",
      [](const std::filesystem::path& path, const std::string& data_dir) {
        const ExperimentConfig cfg = load_experiment_config(path, data_dir);
        return report_to_json(run_experiment(cfg)).dump(2);
      },
      py::arg("config_path"), py::arg("data_dir") = std::string(),
      py::call_guard<py::gil_scoped_release>());
}
