#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "svmcf/audit.hpp"
#include "svmcf/counterfactual.hpp"
#include "svmcf/dataset.hpp"
#include "svmcf/evaluate.hpp"
#include "svmcf/model.hpp"
#include "svmcf/optim.hpp"

namespace py = pybind11;
using namespace svmcf;

namespace {

TrainConfig make_train_config(double C, int max_epochs, double tolerance, uint64_t seed) {
  TrainConfig cfg;
  cfg.C = C;
  cfg.max_epochs = max_epochs;
  cfg.tolerance = tolerance;
  cfg.seed = seed;
  return cfg;
}

SolverConfig make_solver_config(double mip_gap) {
  SolverConfig cfg;
  cfg.mip_gap_abs = mip_gap;
  return cfg;
}

CounterfactualQuery make_query(const Eigen::VectorXd& x, int y, Variant variant,
                               const std::vector<double>& weights,
                               std::optional<double> epsilon) {
  CounterfactualQuery q;
  q.x = x;
  q.y = y;
  q.variant = variant;
  q.weights = weights;
  q.epsilon = epsilon;
  return q;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Counterfactual explanations for linear SVM models";

  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<DataError>(m, "DataError");
  py::register_exception<ModelError>(m, "ModelError");
  py::register_exception<SolveError>(m, "SolveError");
  py::register_exception<InfeasibleError>(m, "InfeasibleError");

  py::enum_<Variant>(m, "Variant")
      .value("plain", Variant::Plain)
      .value("correlated", Variant::Correlated)
      .value("plausible", Variant::Plausible)
      .value("sparse", Variant::Sparse)
      .value("sparse_correlated", Variant::SparseCorrelated);

  py::enum_<SolveStatus>(m, "SolveStatus")
      .value("optimal", SolveStatus::Optimal)
      .value("infeasible", SolveStatus::Infeasible)
      .value("node_limit", SolveStatus::NodeLimit)
      .value("time_limit", SolveStatus::TimeLimit);

  py::class_<FeatureSchema>(m, "FeatureSchema")
      .def_static("from_json_text", &FeatureSchema::from_json_text, py::arg("text"))
      .def_static("from_file", &FeatureSchema::from_file, py::arg("path"))
      .def("__len__", &FeatureSchema::size)
      .def_property_readonly("label_column", &FeatureSchema::label_column)
      .def("names",
           [](const FeatureSchema& s) {
             std::vector<std::string> names;
             for (const FeatureSpec& f : s.features()) names.push_back(f.name);
             return names;
           })
      .def("index_of", &FeatureSchema::index_of, py::arg("name"))
      .def("is_continuous", &FeatureSchema::is_continuous, py::arg("index"))
      .def("default_weights", &FeatureSchema::default_weights)
      .def("groups", [](const FeatureSchema& s) { return s.groups(); });

  py::class_<Dataset>(m, "Dataset")
      .def_property_readonly("rows", &Dataset::rows)
      .def_property_readonly("labels", &Dataset::labels)
      .def_property_readonly("n_rows", &Dataset::n_rows)
      .def_property_readonly("n_features", &Dataset::n_features)
      .def_property_readonly("coerced_labels", &Dataset::coerced_labels)
      .def("row", &Dataset::row, py::arg("index"))
      .def_property_readonly("schema", &Dataset::schema);

  m.def(
      "load_dataset",
      [](const std::string& path, const FeatureSchema& schema, char delimiter, bool coerce) {
        LoadOptions opts;
        opts.delimiter = delimiter;
        opts.coerce_01_labels = coerce;
        return load_dataset_file(path, schema, opts);
      },
      py::arg("path"), py::arg("schema"), py::arg("delimiter") = ',',
      py::arg("coerce_01_labels") = false);
  m.def(
      "load_dataset_text",
      [](const std::string& text, const FeatureSchema& schema, char delimiter, bool coerce) {
        LoadOptions opts;
        opts.delimiter = delimiter;
        opts.coerce_01_labels = coerce;
        return load_dataset_text(text, schema, opts);
      },
      py::arg("text"), py::arg("schema"), py::arg("delimiter") = ',',
      py::arg("coerce_01_labels") = false);

  py::class_<EmpiricalDistribution>(m, "EmpiricalDistribution")
      .def_static("fit", &EmpiricalDistribution::fit, py::arg("dataset"))
      .def("percentile", &EmpiricalDistribution::percentile, py::arg("feature"),
           py::arg("value"))
      .def("stddev", &EmpiricalDistribution::stddev, py::arg("feature"))
      .def_property_readonly("continuous_features",
                             &EmpiricalDistribution::continuous_features)
      .def_property_readonly("sample_count", &EmpiricalDistribution::sample_count);

  py::class_<CovarianceModel>(m, "CovarianceModel")
      .def_static(
          "fit",
          [](const Dataset& data, std::optional<double> shrinkage) {
            return shrinkage ? CovarianceModel::fit(data, *shrinkage)
                             : CovarianceModel::fit(data);
          },
          py::arg("dataset"), py::arg("shrinkage") = std::nullopt)
      .def_property_readonly("covariance", &CovarianceModel::covariance)
      .def_property_readonly("inverse_sqrt", &CovarianceModel::inverse_sqrt)
      .def_property_readonly("mean", &CovarianceModel::mean)
      .def_property_readonly("shrinkage", &CovarianceModel::shrinkage);

  py::class_<ClassPrototypes>(m, "ClassPrototypes")
      .def_readonly("positive", &ClassPrototypes::positive)
      .def_readonly("negative", &ClassPrototypes::negative);
  m.def("class_prototype", &class_prototype, py::arg("dataset"), py::arg("label"));
  m.def("fit_prototypes", &fit_prototypes, py::arg("dataset"));

  py::class_<LinearSVM>(m, "LinearSVM")
      .def_readonly("w", &LinearSVM::w)
      .def_readonly("b", &LinearSVM::b)
      .def_readonly("gamma", &LinearSVM::gamma)
      .def_readonly("feature_names", &LinearSVM::feature_names);
  m.def(
      "train_svm",
      [](const Dataset& data, double C, int max_epochs, double tolerance, uint64_t seed) {
        return train_svm(data, make_train_config(C, max_epochs, tolerance, seed));
      },
      py::arg("dataset"), py::arg("C") = 1.0, py::arg("max_epochs") = 10000,
      py::arg("tolerance") = 1e-3, py::arg("seed") = 0);
  m.def("decision_value", &decision_value, py::arg("model"), py::arg("x"));
  m.def("predict", &predict, py::arg("model"), py::arg("x"));
  m.def("support_vectors", &support_vectors, py::arg("model"), py::arg("dataset"),
        py::arg("tol"));
  m.def("training_accuracy", &training_accuracy, py::arg("model"), py::arg("dataset"));
  m.def("save_model", &save_model, py::arg("model"), py::arg("path"));
  m.def("load_model", &load_model, py::arg("path"));

  py::class_<FeatureChange>(m, "FeatureChange")
      .def_readonly("index", &FeatureChange::index)
      .def_readonly("name", &FeatureChange::name)
      .def_readonly("from_value", &FeatureChange::from)
      .def_readonly("to_value", &FeatureChange::to);

  py::class_<SolverStats>(m, "SolverStats")
      .def_readonly("status", &SolverStats::status)
      .def_readonly("nodes", &SolverStats::nodes)
      .def_readonly("gap", &SolverStats::gap);

  py::class_<Counterfactual>(m, "Counterfactual")
      .def_readonly("x_prime", &Counterfactual::x_prime)
      .def_readonly("delta", &Counterfactual::delta)
      .def_readonly("objective", &Counterfactual::objective)
      .def_readonly("valid", &Counterfactual::valid)
      .def_readonly("stability_radius", &Counterfactual::stability_radius)
      .def_readonly("method", &Counterfactual::method)
      .def_readonly("changed", &Counterfactual::changed)
      .def_readonly("solver", &Counterfactual::solver)
      .def_readonly("epsilon_used", &Counterfactual::epsilon_used);

  m.def(
      "explain",
      [](const Eigen::VectorXd& x, int y, const LinearSVM& model, const FeatureSchema& schema,
         const std::vector<double>& weights, double mip_gap) {
        return explain(make_query(x, y, Variant::Plain, weights, std::nullopt), model, schema,
                       make_solver_config(mip_gap));
      },
      py::arg("x"), py::arg("y"), py::arg("model"), py::arg("schema"),
      py::arg("weights") = std::vector<double>{}, py::arg("mip_gap") = 1e-6);
  m.def(
      "explain_correlated",
      [](const Eigen::VectorXd& x, int y, const LinearSVM& model, const FeatureSchema& schema,
         const CovarianceModel& cov, const std::vector<double>& weights, double mip_gap) {
        return explain_correlated(make_query(x, y, Variant::Correlated, weights, std::nullopt),
                                  model, schema, cov, make_solver_config(mip_gap));
      },
      py::arg("x"), py::arg("y"), py::arg("model"), py::arg("schema"), py::arg("covariance"),
      py::arg("weights") = std::vector<double>{}, py::arg("mip_gap") = 1e-6);
  m.def(
      "explain_plausible",
      [](const Eigen::VectorXd& x, int y, const LinearSVM& model, const FeatureSchema& schema,
         const EmpiricalDistribution& dist, const ClassPrototypes& protos,
         std::optional<double> epsilon, const std::vector<double>& weights, double mip_gap) {
        return explain_plausible(make_query(x, y, Variant::Plausible, weights, epsilon), model,
                                 schema, dist, protos, make_solver_config(mip_gap));
      },
      py::arg("x"), py::arg("y"), py::arg("model"), py::arg("schema"), py::arg("distribution"),
      py::arg("prototypes"), py::arg("epsilon") = std::nullopt,
      py::arg("weights") = std::vector<double>{}, py::arg("mip_gap") = 1e-6);
  m.def(
      "explain_sparse",
      [](const Eigen::VectorXd& x, int y, const LinearSVM& model, const FeatureSchema& schema,
         const std::vector<double>& weights, double mip_gap) {
        return explain_sparse(make_query(x, y, Variant::Sparse, weights, std::nullopt), model,
                              schema, make_solver_config(mip_gap));
      },
      py::arg("x"), py::arg("y"), py::arg("model"), py::arg("schema"),
      py::arg("weights") = std::vector<double>{}, py::arg("mip_gap") = 1e-6);
  m.def(
      "explain_sparse_correlated",
      [](const Eigen::VectorXd& x, int y, const LinearSVM& model, const FeatureSchema& schema,
         const CovarianceModel& cov, const std::vector<double>& weights, double mip_gap) {
        return explain_sparse_correlated(
            make_query(x, y, Variant::SparseCorrelated, weights, std::nullopt), model, schema,
            cov, make_solver_config(mip_gap));
      },
      py::arg("x"), py::arg("y"), py::arg("model"), py::arg("schema"), py::arg("covariance"),
      py::arg("weights") = std::vector<double>{}, py::arg("mip_gap") = 1e-6);

  m.def("post_hoc_correlation", &post_hoc_correlation, py::arg("x"), py::arg("delta"),
        py::arg("covariance"), py::arg("schema"));
  m.def("stability_radius", &stability_radius, py::arg("model"), py::arg("x_prime"));

  py::class_<StabilityReport>(m, "StabilityReport")
      .def_readonly("radius", &StabilityReport::radius)
      .def_readonly("trials", &StabilityReport::trials)
      .def_readonly("retained", &StabilityReport::retained)
      .def_readonly("fraction", &StabilityReport::fraction);
  m.def("verify_stability", &verify_stability, py::arg("model"), py::arg("schema"),
        py::arg("x_prime"), py::arg("radius"), py::arg("trials"), py::arg("seed"));

  m.def("nearest_support_vector", &nearest_support_vector, py::arg("x"), py::arg("y_prime"),
        py::arg("dataset"), py::arg("model"), py::arg("weights") = std::vector<double>{},
        py::arg("sv_tol") = 1e-6);

  m.def("cost_f1", &cost_f1, py::arg("x"), py::arg("x_prime"), py::arg("distribution"));
  m.def("cost_f2", &cost_f2, py::arg("x"), py::arg("x_prime"), py::arg("distribution"));
  m.def("cost_f3", &cost_f3, py::arg("x_prime"), py::arg("dataset"), py::arg("distribution"),
        py::arg("class_filter") = std::nullopt);
  m.def("categorical_changes", &categorical_changes, py::arg("x"), py::arg("x_prime"),
        py::arg("schema"));

  m.def("linear_attribution", &linear_attribution, py::arg("model"), py::arg("dataset"),
        py::arg("x"));

  py::class_<MixedIntegerProgram>(m, "MixedIntegerProgram")
      .def(py::init<>())
      .def_readwrite("Q", &MixedIntegerProgram::Q)
      .def_readwrite("c", &MixedIntegerProgram::c)
      .def_readwrite("constant", &MixedIntegerProgram::constant)
      .def_readwrite("A", &MixedIntegerProgram::A)
      .def_readwrite("b", &MixedIntegerProgram::b)
      .def_readwrite("E", &MixedIntegerProgram::E)
      .def_readwrite("d", &MixedIntegerProgram::d)
      .def_readwrite("lower", &MixedIntegerProgram::lower)
      .def_readwrite("upper", &MixedIntegerProgram::upper)
      .def_property(
          "integral",
          [](const MixedIntegerProgram& p) {
            std::vector<bool> mask(p.integral.begin(), p.integral.end());
            return mask;
          },
          [](MixedIntegerProgram& p, const std::vector<bool>& mask) {
            p.integral.assign(mask.begin(), mask.end());
          })
      .def("validate", &MixedIntegerProgram::validate);

  py::class_<SolveResult>(m, "SolveResult")
      .def_readonly("status", &SolveResult::status)
      .def_readonly("x", &SolveResult::x)
      .def_readonly("objective", &SolveResult::objective)
      .def_readonly("gap", &SolveResult::gap)
      .def_readonly("nodes", &SolveResult::nodes)
      .def_readonly("binding_rows", &SolveResult::binding_rows);

  m.def(
      "solve_relaxation",
      [](const MixedIntegerProgram& p, double mip_gap) {
        return solve_relaxation(p, make_solver_config(mip_gap));
      },
      py::arg("program"), py::arg("mip_gap") = 1e-6);
  m.def(
      "solve_mip",
      [](const MixedIntegerProgram& p, double mip_gap) {
        return solve_mip(p, make_solver_config(mip_gap));
      },
      py::arg("program"), py::arg("mip_gap") = 1e-6);
  m.def(
      "brute_force_mip",
      [](const MixedIntegerProgram& p, double mip_gap) {
        return brute_force_mip(p, make_solver_config(mip_gap));
      },
      py::arg("program"), py::arg("mip_gap") = 1e-6);

#ifdef VERSION_INFO
  m.attr("__version__") = VERSION_INFO;
#else
  m.attr("__version__") = "dev";
#endif
}
