#pragma once

#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "svmcf/dataset.hpp"
#include "svmcf/optim.hpp"
#include "svmcf/schema.hpp"

namespace svmcf::testing {

inline MixedIntegerProgram empty_program(int n) {
  MixedIntegerProgram p;
  p.Q = Eigen::MatrixXd::Zero(n, n);
  p.c = Eigen::VectorXd::Zero(n);
  p.A.resize(0, n);
  p.b.resize(0);
  p.E.resize(0, n);
  p.d.resize(0);
  p.lower = Eigen::VectorXd::Constant(n, -std::numeric_limits<double>::infinity());
  p.upper = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
  p.integral.assign(n, 0);
  return p;
}

inline void add_ineq(MixedIntegerProgram& p, const Eigen::VectorXd& row, double rhs) {
  const int m = static_cast<int>(p.A.rows());
  Eigen::MatrixXd A(m + 1, p.num_vars());
  A.topRows(m) = p.A;
  A.row(m) = row.transpose();
  p.A = A;
  Eigen::VectorXd b(m + 1);
  b.head(m) = p.b;
  b[m] = rhs;
  p.b = b;
}

inline void add_eq(MixedIntegerProgram& p, const Eigen::VectorXd& row, double rhs) {
  const int m = static_cast<int>(p.E.rows());
  Eigen::MatrixXd E(m + 1, p.num_vars());
  E.topRows(m) = p.E;
  E.row(m) = row.transpose();
  p.E = E;
  Eigen::VectorXd d(m + 1);
  d.head(m) = p.d;
  d[m] = rhs;
  p.d = d;
}

// Random one-hot-structured mixed program: binary groups summing to one,
// a few bounded continuous variables, one random inequality row, and a PD
// diagonal quadratic (or none).
inline MixedIntegerProgram random_group_mip(std::mt19937_64& rng, int max_binaries,
                                            bool quadratic) {
  std::uniform_int_distribution<int> group_count(0, 3);
  std::uniform_int_distribution<int> group_size(2, 4);
  std::uniform_int_distribution<int> cont_count(1, 3);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  std::uniform_real_distribution<double> qdiag(0.2, 3.0);

  int n_bin = 0;
  std::vector<int> sizes;
  for (int g = group_count(rng); g > 0; --g) {
    const int s = group_size(rng);
    if (n_bin + s > max_binaries) break;
    sizes.push_back(s);
    n_bin += s;
  }
  const int n_cont = cont_count(rng);
  const int n = n_bin + n_cont;

  MixedIntegerProgram p = empty_program(n);
  for (int j = 0; j < n_bin; ++j) {
    p.integral[j] = 1;
    p.lower[j] = 0.0;
    p.upper[j] = 1.0;
  }
  for (int j = n_bin; j < n; ++j) {
    p.lower[j] = -5.0;
    p.upper[j] = 5.0;
  }
  int at = 0;
  for (int s : sizes) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(n);
    for (int m = 0; m < s; ++m) row[at + m] = 1.0;
    add_eq(p, row, 1.0);
    at += s;
  }
  Eigen::VectorXd row(n);
  for (int j = 0; j < n; ++j) row[j] = coef(rng);
  add_ineq(p, row, coef(rng));

  for (int j = 0; j < n; ++j) p.c[j] = coef(rng);
  if (quadratic)
    for (int j = 0; j < n; ++j) p.Q(j, j) = qdiag(rng);
  return p;
}

// Schema with continuous features named c0..c{k-1}, unbounded, unit weight.
inline FeatureSchema continuous_schema(int k) {
  std::vector<FeatureSpec> specs;
  for (int i = 0; i < k; ++i) {
    FeatureSpec f;
    f.name = "c" + std::to_string(i);
    specs.push_back(f);
  }
  return FeatureSchema(std::move(specs), "label");
}

// k continuous features followed by one-hot groups of the given sizes.
inline FeatureSchema mixed_schema(int k, const std::vector<int>& group_sizes) {
  std::vector<FeatureSpec> specs;
  for (int i = 0; i < k; ++i) {
    FeatureSpec f;
    f.name = "c" + std::to_string(i);
    specs.push_back(f);
  }
  for (size_t g = 0; g < group_sizes.size(); ++g) {
    for (int m = 0; m < group_sizes[g]; ++m) {
      FeatureSpec f;
      f.name = "g" + std::to_string(g) + "_" + std::to_string(m);
      f.kind = FeatureKind::OneHot;
      f.group = "g" + std::to_string(g);
      specs.push_back(f);
    }
  }
  return FeatureSchema(std::move(specs), "label");
}

inline Dataset make_dataset(const FeatureSchema& schema, const Eigen::MatrixXd& rows,
                            const std::vector<int>& labels) {
  return Dataset(schema, rows, labels);
}

// Separable 2-D mixture of two Gaussians with labels +1 / -1.
inline Dataset two_gaussians(int per_class, uint64_t seed, double separation = 4.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd rows(2 * per_class, 2);
  std::vector<int> labels;
  for (int i = 0; i < per_class; ++i) {
    rows(i, 0) = g(rng) + separation / 2.0;
    rows(i, 1) = g(rng) + separation / 2.0;
    labels.push_back(1);
  }
  for (int i = 0; i < per_class; ++i) {
    rows(per_class + i, 0) = g(rng) - separation / 2.0;
    rows(per_class + i, 1) = g(rng) - separation / 2.0;
    labels.push_back(-1);
  }
  return Dataset(continuous_schema(2), rows, labels);
}

// Gaussian sample whitened so the sample covariance is exactly
// diag(col_scale^2) up to rounding.
inline Dataset scaled_whitened_gaussians(int N, uint64_t seed,
                                         const std::vector<double>& col_scale) {
  const int n = static_cast<int>(col_scale.size());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd X(N, n);
  for (int r = 0; r < N; ++r)
    for (int j = 0; j < n; ++j) X(r, j) = g(rng);
  const Eigen::RowVectorXd mean = X.colwise().mean();
  X.rowwise() -= mean;
  const Eigen::MatrixXd cov = (X.transpose() * X) / (N - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  const Eigen::MatrixXd whiten = eig.eigenvectors() *
                                 eig.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() *
                                 eig.eigenvectors().transpose();
  X = X * whiten;
  for (int j = 0; j < n; ++j) X.col(j) *= col_scale[j];
  std::vector<int> labels(N, 1);
  for (int r = 0; r < N / 2; ++r) labels[r] = -1;
  return Dataset(continuous_schema(n), X, labels);
}

inline std::string csv_of(const Dataset& data) {
  std::ostringstream out;
  const FeatureSchema& schema = data.schema();
  for (int i = 0; i < schema.size(); ++i) out << schema.feature(i).name << ",";
  out << schema.label_column() << "\n";
  out.precision(17);
  for (int r = 0; r < data.n_rows(); ++r) {
    for (int i = 0; i < schema.size(); ++i) out << data.rows()(r, i) << ",";
    out << data.label(r) << "\n";
  }
  return out.str();
}

inline std::string schema_json(const FeatureSchema& schema) {
  std::ostringstream out;
  out << "{\"label\": \"" << schema.label_column() << "\", \"features\": [";
  for (int i = 0; i < schema.size(); ++i) {
    const FeatureSpec& f = schema.feature(i);
    if (i) out << ", ";
    out << "{\"name\": \"" << f.name << "\"";
    if (f.kind == FeatureKind::OneHot)
      out << ", \"kind\": \"one_hot\", \"group\": \"" << f.group << "\"";
    if (std::isfinite(f.lower)) out << ", \"lower\": " << f.lower;
    if (std::isfinite(f.upper)) out << ", \"upper\": " << f.upper;
    if (std::isinf(f.weight))
      out << ", \"weight\": \"inf\"";
    else if (f.weight != 1.0)
      out << ", \"weight\": " << f.weight;
    out << "}";
  }
  out << "]}";
  return out.str();
}

// Unique scratch directory under the system temp root.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("svmcf_test_" + tag + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  const std::filesystem::path& path() const { return path_; }
  std::string str(const std::string& file = "") const {
    return file.empty() ? path_.string() : (path_ / file).string();
  }

 private:
  std::filesystem::path path_;
};

}  // namespace svmcf::testing
