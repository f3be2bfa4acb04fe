#pragma once

#include <Eigen/Core>
#include <string>
#include <utility>
#include <vector>

#include "svmcf/dataset.hpp"

namespace svmcf {

/// Linear classifier sign(<w,x> + b), canonically scaled so the training
/// point closest to the hyperplane has |<w,x> + b| = 1 (the geometric margin
/// is then 1/||w||). `gamma` keeps the pre-scaling value of that minimum.
struct LinearSVM {
  Eigen::VectorXd w;
  double b = 0.0;
  std::vector<std::string> feature_names;
  double gamma = 1.0;
};

struct TrainConfig {
  double C = 1.0;          // hinge penalty
  int max_epochs = 10000;  // pair updates budget = max_epochs * N
  double tolerance = 1e-3; // KKT violation at which the dual solve stops
  uint64_t seed = 0;       // reserved; the solver is deterministic
};

/// Soft-margin hinge trainer: min 1/2 ||w||^2 + C sum hinge(y(<w,x>+b)),
/// solved in the dual by maximal-violating-pair coordinate updates, then
/// canonically rescaled.
LinearSVM train_svm(const Dataset& data, const TrainConfig& config = {});

double decision_value(const LinearSVM& model, const Eigen::VectorXd& x);

/// Sign of the decision value; an exact zero predicts +1.
int predict(const LinearSVM& model, const Eigen::VectorXd& x);

/// Rows on or inside the margin band: |<w,x> + b| <= 1 + tol. Requires a
/// canonicalized model and tol >= 0.
std::vector<std::pair<int, int>> support_vectors(const LinearSVM& model,
                                                 const Dataset& data, double tol);

/// Fraction of rows whose prediction matches the label.
double training_accuracy(const LinearSVM& model, const Dataset& data);

/// Versioned JSON document; round-trips w, b, gamma and feature names
/// losslessly.
void save_model(const LinearSVM& model, const std::string& path);
LinearSVM load_model(const std::string& path);

}  // namespace svmcf
