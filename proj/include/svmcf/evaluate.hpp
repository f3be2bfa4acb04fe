#pragma once

#include <Eigen/Core>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "svmcf/counterfactual.hpp"
#include "svmcf/dataset.hpp"

namespace svmcf {

/// Maximum percentile shift over the continuous features; in [0, 1].
double cost_f1(const Eigen::VectorXd& x, const Eigen::VectorXd& x_prime,
               const EmpiricalDistribution& dist);

/// Symmetric log percentile shift, summed over the continuous features:
///   sum_i |log((1-Q(x'_i))/(1-Q(x_i)))| + |log(Q(x'_i)/Q(x_i))|.
/// Always finite thanks to the percentile clamps.
double cost_f2(const Eigen::VectorXd& x, const Eigen::VectorXd& x_prime,
               const EmpiricalDistribution& dist);

/// Minimax percentile shift to the dataset: min over rows of the max
/// percentile shift. Vanishes on every dataset row. The optional label
/// filter restricts the candidate rows to one class.
double cost_f3(const Eigen::VectorXd& x_prime, const Dataset& data,
               const EmpiricalDistribution& dist,
               std::optional<int> class_filter = std::nullopt);

/// Number of one-hot groups whose active member differs between x and x'.
int categorical_changes(const Eigen::VectorXd& x, const Eigen::VectorXd& x_prime,
                        const FeatureSchema& schema);

struct InstanceCosts {
  double f1 = 0.0;
  double f2 = 0.0;
  double f3 = 0.0;
  int categorical = 0;
  double objective = 0.0;
};

struct MethodColumn {
  std::string name;
  std::vector<std::optional<InstanceCosts>> per_instance;  // aligned with cohort
  int failures = 0;
  std::optional<double> mean_f1, mean_f2, mean_f3;
  double mean_categorical = 0.0;
};

struct CostReport {
  std::vector<int> instances;  // dataset row ids
  std::vector<MethodColumn> methods;
};

/// A named explanation procedure; throws to signal a per-instance failure.
using MethodFn = std::function<Counterfactual(int row, const Eigen::VectorXd& x)>;

/// Runs every method on every cohort instance; failures are counted, never
/// imputed. Output rows keep the given method order. The optional label
/// restricts f3's candidate rows to one class.
CostReport benchmark(const std::vector<int>& cohort,
                     const std::vector<std::pair<std::string, MethodFn>>& methods,
                     const Dataset& data, const EmpiricalDistribution& dist,
                     std::optional<int> f3_class_filter = std::nullopt);

/// Mean table, one row per method (method, mean f1/f2/f3, failures).
void write_cost_report_dsv(const CostReport& report, std::ostream& out, char delimiter = ',');
std::string cost_report_json(const CostReport& report);
/// Plot-ready columns: exactly one header row and one row per
/// (instance, method).
void write_plot_data(const CostReport& report, std::ostream& out, char delimiter = ',');

}  // namespace svmcf
