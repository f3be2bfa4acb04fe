#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "svmcf/schema.hpp"

namespace svmcf {

struct LoadOptions {
  char delimiter = ',';
  bool coerce_01_labels = false;  // accept {0,1} labels, mapping 0 -> -1
};

/// Validated tabular data bound to a schema. Immutable after construction.
class Dataset {
 public:
  Dataset(FeatureSchema schema, Eigen::MatrixXd rows, std::vector<int> labels,
          int coerced_labels = 0);

  const FeatureSchema& schema() const { return schema_; }
  const Eigen::MatrixXd& rows() const { return rows_; }
  Eigen::VectorXd row(int i) const { return rows_.row(i).transpose(); }
  const std::vector<int>& labels() const { return labels_; }
  int label(int i) const { return labels_.at(i); }
  int n_rows() const { return static_cast<int>(rows_.rows()); }
  int n_features() const { return static_cast<int>(rows_.cols()); }
  /// Number of labels coerced from {0,1} during loading.
  int coerced_labels() const { return coerced_labels_; }

 private:
  FeatureSchema schema_;
  Eigen::MatrixXd rows_;
  std::vector<int> labels_;
  int coerced_labels_ = 0;
};

/// Parses delimiter-separated text with a header row. Header must contain
/// exactly the schema features plus the label column, in any order.
Dataset load_dataset(std::istream& in, const FeatureSchema& schema,
                     const LoadOptions& opts = {});
Dataset load_dataset_file(const std::string& path, const FeatureSchema& schema,
                          const LoadOptions& opts = {});
Dataset load_dataset_text(const std::string& text, const FeatureSchema& schema,
                          const LoadOptions& opts = {});

/// Per-feature empirical percentile functions over the continuous features.
/// Hazen plotting positions: the j-th order statistic (1-based) maps to
/// (j - 0.5) / N, ties collapse to their midrank, values between order
/// statistics interpolate linearly, and everything clamps to
/// [0.5/N, 1 - 0.5/N] so downstream logarithms stay finite.
class EmpiricalDistribution {
 public:
  static EmpiricalDistribution fit(const Dataset& data);

  double percentile(int feature, double value) const;
  bool has(int feature) const;
  int sample_count() const { return n_; }
  const std::vector<int>& continuous_features() const { return continuous_; }
  /// Sample standard deviation (used for default plausibility radii).
  double stddev(int feature) const;

 private:
  std::vector<std::vector<double>> sorted_;  // per feature; empty for one-hot
  std::vector<double> stddev_;
  std::vector<int> continuous_;
  int n_ = 0;
};

/// Mean and shrunk covariance of the continuous block, with a cached
/// symmetric inverse square root. One-hot coordinates are excluded; the
/// correlation transform acts as the identity on them.
class CovarianceModel {
 public:
  /// Unbiased sample covariance plus shrinkage: Sigma + lambda I.
  static CovarianceModel fit(const Dataset& data, double shrinkage);
  /// Auto shrinkage lambda = 1e-6 * trace(Sigma) / n_continuous.
  static CovarianceModel fit(const Dataset& data);

  /// Shrunk covariance (continuous block, in continuous_features() order).
  const Eigen::MatrixXd& covariance() const { return sigma_; }
  /// Symmetric (Sigma + lambda I)^(-1/2).
  const Eigen::MatrixXd& inverse_sqrt() const { return inv_sqrt_; }
  const Eigen::VectorXd& mean() const { return mean_; }
  double shrinkage() const { return lambda_; }

  const std::vector<int>& continuous_features() const { return continuous_; }
  /// Position of a feature inside the continuous block, -1 if not continuous.
  int continuous_position(int feature) const;

  /// Inverse square root of the sub-block selected by positions into the
  /// continuous block (marginal covariance of that subset).
  Eigen::MatrixXd marginal_inverse_sqrt(const std::vector<int>& positions) const;

 private:
  Eigen::MatrixXd sigma_;     // Sigma + lambda I
  Eigen::MatrixXd inv_sqrt_;
  Eigen::VectorXd mean_;
  double lambda_ = 0.0;
  std::vector<int> continuous_;
  std::vector<int> position_;  // feature -> continuous position or -1
};

struct ClassPrototypes {
  Eigen::VectorXd positive;  // label +1
  Eigen::VectorXd negative;  // label -1
  const Eigen::VectorXd& for_label(int y) const {
    return y > 0 ? positive : negative;
  }
};

/// Centroid of the rows carrying the given label.
Eigen::VectorXd class_prototype(const Dataset& data, int label);
ClassPrototypes fit_prototypes(const Dataset& data);

}  // namespace svmcf
