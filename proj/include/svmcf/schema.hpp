#pragma once

#include <limits>
#include <map>
#include <string>
#include <vector>

#include "svmcf/errors.hpp"

namespace svmcf {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class FeatureKind { Continuous, OneHot };

/// One column of the feature space. One-hot group members are binary
/// indicators; exactly one member of each group is active per row.
struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::Continuous;
  std::string group;          // group id for one-hot members, empty otherwise
  double lower = -kInf;       // one-hot members are fixed to [0, 1]
  double upper = kInf;
  double weight = 1.0;        // actionability weight; +inf freezes the feature
};

/// Ordered feature descriptors plus the name of the label column. Immutable
/// after construction; construction validates group structure, weights and
/// bounds.
class FeatureSchema {
 public:
  FeatureSchema(std::vector<FeatureSpec> features, std::string label_column);

  /// Parses the JSON schema document:
  ///   { "label": "Outcome",
  ///     "features": [ {"name": "...", "kind": "continuous"|"one_hot",
  ///                    "group": "...", "lower": num|"-inf",
  ///                    "upper": num|"inf", "weight": num|"inf"}, ... ] }
  static FeatureSchema from_json_text(const std::string& text);
  static FeatureSchema from_file(const std::string& path);

  int size() const { return static_cast<int>(features_.size()); }
  const FeatureSpec& feature(int i) const { return features_.at(i); }
  const std::vector<FeatureSpec>& features() const { return features_; }
  const std::string& label_column() const { return label_column_; }

  /// Index of a feature by name, -1 if absent.
  int index_of(const std::string& name) const;

  bool is_continuous(int i) const {
    return features_.at(i).kind == FeatureKind::Continuous;
  }

  /// group id -> member indices, in feature order.
  const std::map<std::string, std::vector<int>>& groups() const {
    return groups_;
  }

  std::vector<int> continuous_indices() const;
  std::vector<int> one_hot_indices() const;

  /// Per-feature actionability weights as declared in the schema.
  std::vector<double> default_weights() const;

 private:
  std::vector<FeatureSpec> features_;
  std::string label_column_;
  std::map<std::string, std::vector<int>> groups_;
};

}  // namespace svmcf
