#include "svmcf/evaluate.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace svmcf {

namespace {

void check_pair(const Eigen::VectorXd& x, const Eigen::VectorXd& x_prime,
                const EmpiricalDistribution& dist) {
  if (x.size() != x_prime.size()) throw ConfigError("cost: dimension mismatch");
  if (dist.continuous_features().empty())
    throw DataError("cost: empty continuous feature set");
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(17);
  ss << v;
  return ss.str();
}

}  // namespace

double cost_f1(const Eigen::VectorXd& x, const Eigen::VectorXd& x_prime,
               const EmpiricalDistribution& dist) {
  check_pair(x, x_prime, dist);
  double worst = 0.0;
  for (int i : dist.continuous_features())
    worst = std::max(worst, std::abs(dist.percentile(i, x_prime[i]) - dist.percentile(i, x[i])));
  return worst;
}

double cost_f2(const Eigen::VectorXd& x, const Eigen::VectorXd& x_prime,
               const EmpiricalDistribution& dist) {
  check_pair(x, x_prime, dist);
  double total = 0.0;
  for (int i : dist.continuous_features()) {
    const double q = dist.percentile(i, x[i]);
    const double qp = dist.percentile(i, x_prime[i]);
    // log(a/b) written as log(a) - log(b) so that f2(x,x') and f2(x',x)
    // agree bitwise; the clamps keep every log finite.
    total += std::abs(std::log1p(-qp) - std::log1p(-q)) + std::abs(std::log(qp) - std::log(q));
  }
  return total;
}

double cost_f3(const Eigen::VectorXd& x_prime, const Dataset& data,
               const EmpiricalDistribution& dist, std::optional<int> class_filter) {
  if (x_prime.size() != data.n_features()) throw ConfigError("cost: dimension mismatch");
  if (dist.continuous_features().empty())
    throw DataError("cost: empty continuous feature set");
  double best = std::numeric_limits<double>::infinity();
  bool any = false;
  for (int r = 0; r < data.n_rows(); ++r) {
    if (class_filter && data.label(r) != *class_filter) continue;
    any = true;
    double worst = 0.0;
    for (int i : dist.continuous_features()) {
      worst = std::max(worst, std::abs(dist.percentile(i, x_prime[i]) -
                                       dist.percentile(i, data.rows()(r, i))));
      if (worst >= best) break;  // cannot improve the running min
    }
    best = std::min(best, worst);
    if (best == 0.0) break;
  }
  if (!any) throw DataError("cost_f3: no candidate rows (empty dataset or class)");
  return best;
}

int categorical_changes(const Eigen::VectorXd& x, const Eigen::VectorXd& x_prime,
                        const FeatureSchema& schema) {
  int changes = 0;
  for (const auto& [gid, members] : schema.groups()) {
    for (int j : members) {
      if (std::abs(x[j] - x_prime[j]) > 0.5) {
        ++changes;
        break;
      }
    }
  }
  return changes;
}

CostReport benchmark(const std::vector<int>& cohort,
                     const std::vector<std::pair<std::string, MethodFn>>& methods,
                     const Dataset& data, const EmpiricalDistribution& dist,
                     std::optional<int> f3_class_filter) {
  if (cohort.empty()) throw DataError("benchmark: empty cohort");
  if (methods.empty()) throw ConfigError("benchmark: no methods");

  CostReport report;
  report.instances = cohort;
  for (const auto& [name, fn] : methods) {
    MethodColumn col;
    col.name = name;
    col.per_instance.resize(cohort.size());
    double s1 = 0.0, s2 = 0.0, s3 = 0.0, sc = 0.0;
    int ok = 0;
    for (size_t k = 0; k < cohort.size(); ++k) {
      const int row = cohort[k];
      const Eigen::VectorXd x = data.row(row);
      try {
        const Counterfactual cf = fn(row, x);
        InstanceCosts costs;
        costs.f1 = cost_f1(x, cf.x_prime, dist);
        costs.f2 = cost_f2(x, cf.x_prime, dist);
        costs.f3 = cost_f3(cf.x_prime, data, dist, f3_class_filter);
        costs.categorical = categorical_changes(x, cf.x_prime, data.schema());
        costs.objective = cf.objective;
        col.per_instance[k] = costs;
        s1 += costs.f1;
        s2 += costs.f2;
        s3 += costs.f3;
        sc += costs.categorical;
        ++ok;
      } catch (const std::exception&) {
        ++col.failures;
      }
    }
    if (ok > 0) {
      col.mean_f1 = s1 / ok;
      col.mean_f2 = s2 / ok;
      col.mean_f3 = s3 / ok;
      col.mean_categorical = sc / ok;
    }
    report.methods.push_back(std::move(col));
  }
  return report;
}

void write_cost_report_dsv(const CostReport& report, std::ostream& out, char delimiter) {
  out << "method" << delimiter << "mean_f1" << delimiter << "mean_f2" << delimiter
      << "mean_f3" << delimiter << "mean_categorical_changes" << delimiter << "successes"
      << delimiter << "failures\n";
  for (const MethodColumn& col : report.methods) {
    const int ok = static_cast<int>(report.instances.size()) - col.failures;
    out << col.name << delimiter << (col.mean_f1 ? fmt(*col.mean_f1) : "") << delimiter
        << (col.mean_f2 ? fmt(*col.mean_f2) : "") << delimiter
        << (col.mean_f3 ? fmt(*col.mean_f3) : "") << delimiter
        << fmt(col.mean_categorical) << delimiter << ok << delimiter << col.failures << "\n";
  }
}

std::string cost_report_json(const CostReport& report) {
  nlohmann::json doc;
  doc["instances"] = report.instances;
  nlohmann::json methods = nlohmann::json::array();
  for (const MethodColumn& col : report.methods) {
    nlohmann::json m;
    m["name"] = col.name;
    m["failures"] = col.failures;
    if (col.mean_f1) {
      m["mean_f1"] = *col.mean_f1;
      m["mean_f2"] = *col.mean_f2;
      m["mean_f3"] = *col.mean_f3;
      m["mean_categorical_changes"] = col.mean_categorical;
    }
    nlohmann::json rows = nlohmann::json::array();
    for (size_t k = 0; k < col.per_instance.size(); ++k) {
      if (col.per_instance[k]) {
        const InstanceCosts& c = *col.per_instance[k];
        rows.push_back({{"instance", report.instances[k]},
                        {"f1", c.f1},
                        {"f2", c.f2},
                        {"f3", c.f3},
                        {"categorical_changes", c.categorical},
                        {"objective", c.objective}});
      } else {
        rows.push_back({{"instance", report.instances[k]}, {"failed", true}});
      }
    }
    m["per_instance"] = rows;
    methods.push_back(std::move(m));
  }
  doc["methods"] = methods;
  return doc.dump(2);
}

void write_plot_data(const CostReport& report, std::ostream& out, char delimiter) {
  out << "instance" << delimiter << "method" << delimiter << "status" << delimiter << "f1"
      << delimiter << "f2" << delimiter << "f3\n";
  for (size_t k = 0; k < report.instances.size(); ++k) {
    for (const MethodColumn& col : report.methods) {
      out << report.instances[k] << delimiter << col.name << delimiter;
      if (col.per_instance[k]) {
        const InstanceCosts& c = *col.per_instance[k];
        out << "ok" << delimiter << fmt(c.f1) << delimiter << fmt(c.f2) << delimiter
            << fmt(c.f3) << "\n";
      } else {
        out << "failed" << delimiter << delimiter << "\n";
      }
    }
  }
}

}  // namespace svmcf
