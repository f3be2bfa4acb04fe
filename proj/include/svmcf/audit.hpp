#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "svmcf/counterfactual.hpp"
#include "svmcf/dataset.hpp"

namespace svmcf {

struct CohortExplainResult {
  std::vector<int> rows;                            // instances predicted -target
  std::vector<std::optional<Counterfactual>> cfs;   // aligned; nullopt = failure
  std::vector<std::string> failure_reasons;         // aligned; empty on success
  int successes = 0;
  std::string method;
};

/// Explains every row whose prediction is the undesirable label (-target),
/// requesting the flip to target_label. Per-row failures are collected, not
/// fatal. An empty cohort yields an empty result.
CohortExplainResult cohort_explain(const Dataset& data, const ExplainContext& ctx,
                                   int target_label, Variant variant,
                                   const std::vector<double>& weights = {},
                                   std::optional<double> epsilon = std::nullopt);

struct CategoricalChange {
  int index = -1;
  std::string name;
  double signed_percent = 0.0;  // (switch-ins - switch-outs) / successes * 100
};

struct ContinuousChange {
  int index = -1;
  std::string name;
  double mean_delta = 0.0;  // absolute units
};

struct AuditReport {
  int cohort_size = 0;
  int successes = 0;
  int failures = 0;
  std::string method;
  std::vector<ContinuousChange> continuous;
  std::vector<CategoricalChange> categorical;
  std::vector<double> mean_attribution;  // per feature; empty until attached
  std::vector<std::string> feature_names;
};

/// Aggregates suggested changes over the successful counterfactuals:
/// continuous features as mean deltas, one-hot members as signed switch
/// percentages (which sum to zero within each group).
AuditReport aggregate_changes(const CohortExplainResult& result, const FeatureSchema& schema);

/// Exact interventional Shapley values of a linear model under feature
/// independence: phi_i = w_i (x_i - mu_i) with mu the dataset means;
/// sum phi_i = decision(x) - decision(mu) identically.
Eigen::VectorXd linear_attribution(const LinearSVM& model, const Dataset& data,
                                   const Eigen::VectorXd& x);

/// Fills report.mean_attribution with the cohort mean of linear_attribution.
void attach_attribution(AuditReport& report, const LinearSVM& model, const Dataset& data,
                        const std::vector<int>& rows);

void write_audit_report_dsv(const AuditReport& report, std::ostream& out, char delimiter = ',');
std::string audit_report_json(const AuditReport& report);

}  // namespace svmcf
