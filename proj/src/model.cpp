#include "svmcf/model.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace svmcf {

namespace {

// Dual coordinate solver for
//   min 1/2 a' Q a - 1' a    s.t. 0 <= a <= C, y' a = 0,
// with Q_ij = y_i y_j <x_i, x_j>. Maximal-violating-pair selection; ties
// break to the lowest index, so the solve is deterministic.
struct DualResult {
  Eigen::VectorXd alpha;
  double b = 0.0;
  double kkt_gap = 0.0;
  bool converged = false;
};

DualResult solve_dual(const Eigen::MatrixXd& X, const std::vector<int>& y, double C,
                      long max_updates, double tol) {
  const int N = static_cast<int>(X.rows());
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(N);
  Eigen::VectorXd grad = Eigen::VectorXd::Constant(N, -1.0);  // grad_i = (Q a)_i - 1
  const Eigen::VectorXd kdiag = X.rowwise().squaredNorm();

  // Gram cache for moderate row counts; larger problems recompute columns.
  const bool cached = N <= 2048;
  Eigen::MatrixXd gram;
  if (cached) gram = X * X.transpose();
  auto kernel_col = [&](int i) -> Eigen::VectorXd {
    return cached ? Eigen::VectorXd(gram.col(i)) : Eigen::VectorXd(X * X.row(i).transpose());
  };
  // Incremental gradient updates drift on badly scaled data; recompute
  // exactly every few thousand steps.
  auto refresh_gradient = [&] {
    Eigen::VectorXd ay(N);
    for (int k = 0; k < N; ++k) ay[k] = alpha[k] * y[k];
    const Eigen::VectorXd v = cached ? Eigen::VectorXd(gram * ay)
                                     : Eigen::VectorXd(X * (X.transpose() * ay));
    for (int k = 0; k < N; ++k) grad[k] = y[k] * v[k] - 1.0;
  };

  auto in_up = [&](int i) {
    return (y[i] > 0 && alpha[i] < C) || (y[i] < 0 && alpha[i] > 0.0);
  };
  auto in_low = [&](int i) {
    return (y[i] < 0 && alpha[i] < C) || (y[i] > 0 && alpha[i] > 0.0);
  };

  DualResult res;
  for (long it = 0; it < max_updates; ++it) {
    if (it > 0 && it % 4096 == 0) refresh_gradient();
    int i = -1;
    double up = -std::numeric_limits<double>::infinity();
    double low = std::numeric_limits<double>::infinity();
    for (int k = 0; k < N; ++k) {
      const double v = -y[k] * grad[k];
      if (in_up(k) && v > up) {
        up = v;
        i = k;
      }
      if (in_low(k)) low = std::min(low, v);
    }
    if (i < 0 || !std::isfinite(low)) {
      // One side empty: KKT holds on a bound face.
      res.converged = true;
      res.kkt_gap = 0.0;
      res.b = i >= 0 ? up : (std::isfinite(low) ? low : 0.0);
      break;
    }
    res.kkt_gap = up - low;
    if (res.kkt_gap <= tol) {
      res.converged = true;
      res.b = 0.5 * (up + low);
      break;
    }

    // Second-order partner selection: among candidates below `up`, take the
    // one with the largest decrease of the dual objective.
    const Eigen::VectorXd Ki = kernel_col(i);
    int j = -1;
    double best = 0.0;
    for (int k = 0; k < N; ++k) {
      if (!in_low(k)) continue;
      const double diff = up + y[k] * grad[k];  // up - (-y_k grad_k)
      if (diff <= 0.0) continue;
      const double quad = std::max(kdiag[i] + kdiag[k] - 2.0 * Ki[k], 1e-12);
      const double gain = diff * diff / quad;
      if (gain > best) {
        best = gain;
        j = k;
      }
    }
    if (j < 0) {
      res.converged = true;
      res.b = 0.5 * (up + low);
      break;
    }

    // Step along alpha + t * (y_i e_i - y_j e_j); curvature is
    // ||x_i - x_j||^2 and the equality constraint is preserved.
    const Eigen::VectorXd Kj = kernel_col(j);
    const double quad = std::max(kdiag[i] + kdiag[j] - 2.0 * Ki[j], 1e-12);
    double t = (up + y[j] * grad[j]) / quad;
    t = std::min(t, y[i] > 0 ? C - alpha[i] : alpha[i]);
    t = std::min(t, y[j] > 0 ? alpha[j] : C - alpha[j]);
    alpha[i] += y[i] * t;
    alpha[j] -= y[j] * t;
    alpha[i] = std::min(std::max(alpha[i], 0.0), C);
    alpha[j] = std::min(std::max(alpha[j], 0.0), C);
    for (int k = 0; k < N; ++k) grad[k] += t * y[k] * (Ki[k] - Kj[k]);
  }

  res.alpha = std::move(alpha);
  return res;
}

}  // namespace

LinearSVM train_svm(const Dataset& data, const TrainConfig& config) {
  const int N = data.n_rows();
  const int n = data.n_features();
  if (N < 2) throw ModelError("train: need at least 2 rows");
  if (!(config.C > 0.0)) throw ConfigError("train: C must be > 0");
  if (!(config.tolerance > 0.0)) throw ConfigError("train: tolerance must be > 0");

  bool has_pos = false, has_neg = false;
  for (int r = 0; r < N; ++r) (data.label(r) > 0 ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg) throw ModelError("train: single class in training data");

  const long max_updates = static_cast<long>(config.max_epochs) * N;
  DualResult dual = solve_dual(data.rows(), data.labels(), config.C, max_updates,
                               config.tolerance);
  if (!dual.converged) {
    std::ostringstream msg;
    msg << "train: no convergence within " << config.max_epochs
        << " epochs (KKT violation " << dual.kkt_gap << ", tolerance "
        << config.tolerance << ")";
    throw ModelError(msg.str());
  }

  LinearSVM model;
  model.w = Eigen::VectorXd::Zero(n);
  for (int r = 0; r < N; ++r)
    if (dual.alpha[r] > 0.0) model.w += dual.alpha[r] * data.label(r) * data.row(r);

  // Intercept: average over free support vectors when available, else the
  // midpoint of the KKT interval.
  double b_sum = 0.0;
  int b_count = 0;
  for (int r = 0; r < N; ++r) {
    const double a = dual.alpha[r];
    if (a > 1e-8 * config.C && a < config.C * (1.0 - 1e-8)) {
      b_sum += data.label(r) - model.w.dot(data.row(r));
      ++b_count;
    }
  }
  model.b = b_count > 0 ? b_sum / b_count : dual.b;

  model.feature_names.reserve(n);
  for (const FeatureSpec& f : data.schema().features()) model.feature_names.push_back(f.name);

  if (model.w.norm() <= 0.0) throw ModelError("train: degenerate model (w = 0)");

  // Canonical rescale: the training point nearest the hyperplane gets
  // |<w,x> + b| = 1.
  double gamma = std::numeric_limits<double>::infinity();
  for (int r = 0; r < N; ++r)
    gamma = std::min(gamma, std::abs(model.w.dot(data.row(r)) + model.b));
  if (gamma <= 1e-12)
    throw ModelError("train: degenerate margin (a training point lies on the hyperplane)");
  model.w /= gamma;
  model.b /= gamma;
  model.gamma = gamma;
  return model;
}

double decision_value(const LinearSVM& model, const Eigen::VectorXd& x) {
  if (x.size() != model.w.size())
    throw ModelError("decision_value: dimension mismatch (" + std::to_string(x.size()) +
                     " vs " + std::to_string(model.w.size()) + ")");
  return model.w.dot(x) + model.b;
}

int predict(const LinearSVM& model, const Eigen::VectorXd& x) {
  return decision_value(model, x) >= 0.0 ? 1 : -1;
}

std::vector<std::pair<int, int>> support_vectors(const LinearSVM& model,
                                                 const Dataset& data, double tol) {
  if (!(tol >= 0.0)) throw ConfigError("support_vectors: tol must be >= 0");
  std::vector<std::pair<int, int>> out;
  for (int r = 0; r < data.n_rows(); ++r) {
    if (std::abs(decision_value(model, data.row(r))) <= 1.0 + tol)
      out.emplace_back(r, data.label(r));
  }
  return out;
}

double training_accuracy(const LinearSVM& model, const Dataset& data) {
  int hits = 0;
  for (int r = 0; r < data.n_rows(); ++r)
    if (predict(model, data.row(r)) == data.label(r)) ++hits;
  return static_cast<double>(hits) / data.n_rows();
}

namespace {
constexpr int kModelFormatVersion = 1;
}

void save_model(const LinearSVM& model, const std::string& path) {
  nlohmann::json doc;
  doc["format_version"] = kModelFormatVersion;
  doc["feature_names"] = model.feature_names;
  doc["w"] = std::vector<double>(model.w.data(), model.w.data() + model.w.size());
  doc["b"] = model.b;
  doc["gamma"] = model.gamma;
  std::ofstream out(path);
  if (!out) throw ModelError("save_model: cannot open '" + path + "'");
  out << doc.dump(2) << "\n";
  if (!out) throw ModelError("save_model: write failed for '" + path + "'");
}

LinearSVM load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("load_model: cannot open '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ModelError("load_model: malformed model file '" + path + "': " + e.what());
  }
  try {
    const int version = doc.at("format_version").get<int>();
    if (version != kModelFormatVersion)
      throw ModelError("load_model: unsupported format version " + std::to_string(version));
    LinearSVM model;
    model.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
    const std::vector<double> w = doc.at("w").get<std::vector<double>>();
    if (w.size() != model.feature_names.size())
      throw ModelError("load_model: weight count does not match feature names");
    if (w.empty()) throw ModelError("load_model: empty weight vector");
    model.w = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<int>(w.size()));
    model.b = doc.at("b").get<double>();
    model.gamma = doc.at("gamma").get<double>();
    if (!(model.gamma > 0.0)) throw ModelError("load_model: gamma must be > 0");
    if (!model.w.allFinite()) throw ModelError("load_model: non-finite weights");
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw ModelError("load_model: malformed model file '" + path + "': " + e.what());
  }
}

}  // namespace svmcf
