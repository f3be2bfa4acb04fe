#include "svmcf/audit.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace svmcf {

CohortExplainResult cohort_explain(const Dataset& data, const ExplainContext& ctx,
                                   int target_label, Variant variant,
                                   const std::vector<double>& weights,
                                   std::optional<double> epsilon) {
  if (ctx.model == nullptr || ctx.schema == nullptr)
    throw ConfigError("cohort_explain: context needs a model and a schema");
  if (target_label != 1 && target_label != -1)
    throw ConfigError("cohort_explain: target label must be +1 or -1");

  CohortExplainResult out;
  out.method = variant_name(variant);
  for (int r = 0; r < data.n_rows(); ++r) {
    if (predict(*ctx.model, data.row(r)) != -target_label) continue;
    out.rows.push_back(r);
  }
  out.cfs.resize(out.rows.size());
  out.failure_reasons.resize(out.rows.size());

  for (size_t k = 0; k < out.rows.size(); ++k) {
    CounterfactualQuery q;
    q.x = data.row(out.rows[k]);
    q.y = -target_label;
    q.variant = variant;
    q.weights = weights;
    q.epsilon = epsilon;
    try {
      out.cfs[k] = explain_query(q, ctx);
      ++out.successes;
    } catch (const std::exception& e) {
      out.failure_reasons[k] = e.what();
    }
  }
  return out;
}

AuditReport aggregate_changes(const CohortExplainResult& result, const FeatureSchema& schema) {
  AuditReport report;
  report.cohort_size = static_cast<int>(result.rows.size());
  report.successes = result.successes;
  report.failures = report.cohort_size - result.successes;
  report.method = result.method;
  for (const FeatureSpec& f : schema.features()) report.feature_names.push_back(f.name);
  if (result.successes == 0)
    throw DataError("aggregate_changes: zero successful counterfactuals");

  for (int i = 0; i < schema.size(); ++i) {
    if (schema.is_continuous(i)) {
      double sum = 0.0;
      for (const auto& cf : result.cfs)
        if (cf) sum += cf->delta[i];
      report.continuous.push_back({i, schema.feature(i).name, sum / result.successes});
    } else {
      long ins = 0, outs = 0;
      for (const auto& cf : result.cfs) {
        if (!cf) continue;
        const double before = cf->x_prime[i] - cf->delta[i];
        const double after = cf->x_prime[i];
        if (before < 0.5 && after > 0.5) ++ins;
        if (before > 0.5 && after < 0.5) ++outs;
      }
      report.categorical.push_back(
          {i, schema.feature(i).name,
           100.0 * static_cast<double>(ins - outs) / result.successes});
    }
  }
  return report;
}

Eigen::VectorXd linear_attribution(const LinearSVM& model, const Dataset& data,
                                   const Eigen::VectorXd& x) {
  if (x.size() != data.n_features() || model.w.size() != data.n_features())
    throw ConfigError("linear_attribution: dimension mismatch");
  const Eigen::VectorXd mu = data.rows().colwise().mean();
  return model.w.cwiseProduct(x - mu);
}

void attach_attribution(AuditReport& report, const LinearSVM& model, const Dataset& data,
                        const std::vector<int>& rows) {
  if (rows.empty()) throw DataError("attach_attribution: empty cohort");
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(data.n_features());
  for (int r : rows) sum += linear_attribution(model, data, data.row(r));
  sum /= static_cast<double>(rows.size());
  report.mean_attribution.assign(sum.data(), sum.data() + sum.size());
}

namespace {
std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(17);
  ss << v;
  return ss.str();
}
}  // namespace

void write_audit_report_dsv(const AuditReport& report, std::ostream& out, char delimiter) {
  out << "section" << delimiter << "feature" << delimiter << "value" << delimiter << "unit\n";
  for (const ContinuousChange& ch : report.continuous)
    out << "mean_change" << delimiter << ch.name << delimiter << fmt(ch.mean_delta)
        << delimiter << "absolute\n";
  for (const CategoricalChange& ch : report.categorical)
    out << "mean_change" << delimiter << ch.name << delimiter << fmt(ch.signed_percent)
        << delimiter << "percent\n";
  for (size_t i = 0; i < report.mean_attribution.size(); ++i)
    out << "mean_attribution" << delimiter << report.feature_names[i] << delimiter
        << fmt(report.mean_attribution[i]) << delimiter << "decision_units\n";
}

std::string audit_report_json(const AuditReport& report) {
  nlohmann::json doc;
  doc["cohort_size"] = report.cohort_size;
  doc["successes"] = report.successes;
  doc["failures"] = report.failures;
  doc["method"] = report.method;
  doc["note"] = "features are never frozen in audit mode";
  nlohmann::json cont = nlohmann::json::array();
  for (const ContinuousChange& ch : report.continuous)
    cont.push_back({{"feature", ch.name}, {"mean_delta", ch.mean_delta}});
  doc["continuous_mean_changes"] = cont;
  nlohmann::json cat = nlohmann::json::array();
  for (const CategoricalChange& ch : report.categorical)
    cat.push_back({{"feature", ch.name}, {"signed_percent", ch.signed_percent}});
  doc["categorical_changes"] = cat;
  if (!report.mean_attribution.empty()) {
    nlohmann::json attr = nlohmann::json::array();
    for (size_t i = 0; i < report.mean_attribution.size(); ++i)
      attr.push_back({{"feature", report.feature_names[i]},
                      {"mean_attribution", report.mean_attribution[i]}});
    doc["attribution"] = attr;
  }
  return doc.dump(2);
}

}  // namespace svmcf
