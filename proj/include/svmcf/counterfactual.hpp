#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "svmcf/dataset.hpp"
#include "svmcf/model.hpp"
#include "svmcf/optim.hpp"

namespace svmcf {

enum class Variant { Plain, Correlated, Plausible, Sparse, SparseCorrelated };

const char* variant_name(Variant v);
std::optional<Variant> variant_from_name(const std::string& name);

/// An explanation request: flip the label of x (currently y) to -y. Query
/// pipelines (CLI, audit, benchmark) set y = predict(model, x); the builders
/// accept any stated y so degenerate programs stay constructible.
struct CounterfactualQuery {
  Eigen::VectorXd x;
  int y = -1;
  Variant variant = Variant::Plain;
  std::vector<double> weights;      // per-feature, +inf freezes; empty = schema defaults
  std::optional<double> epsilon;    // plausibility radius; default = one std per feature
};

struct SolverStats {
  SolveStatus status = SolveStatus::Optimal;
  long nodes = 0;
  double gap = 0.0;
};

struct FeatureChange {
  int index = -1;
  std::string name;
  double from = 0.0;
  double to = 0.0;
};

struct Counterfactual {
  Eigen::VectorXd x_prime;
  Eigen::VectorXd delta;            // x_prime - x
  double objective = 0.0;
  bool valid = false;               // y' (<w,x'> + b) >= 1 - 1e-6
  double stability_radius = 0.0;    // |<w,x'> + b| / ||w||
  std::string method;               // variant label or "nearest_sv"
  std::vector<FeatureChange> changed;
  SolverStats solver;
  std::vector<double> epsilon_used;  // per-feature box radii (plausible only)
};

/// Margin slack treated as valid: y'(<w,x'>+b) >= 1 - kValidityTol.
inline constexpr double kValidityTol = 1e-6;
/// |delta_i| above this counts as a changed feature.
inline constexpr double kChangeTol = 1e-7;

/// Standard-form program of the plain variant: squared weighted distance
/// objective, margin row, one-hot group equalities, schema bounds, frozen
/// features substituted out. The program's variables are the non-frozen
/// features in schema order.
MixedIntegerProgram build_problem(const CounterfactualQuery& q, const LinearSVM& model,
                                  const FeatureSchema& schema);

Counterfactual explain(const CounterfactualQuery& q, const LinearSVM& model,
                       const FeatureSchema& schema, const SolverConfig& cfg = {});

/// Squared weighted Mahalanobis objective through the covariance of the
/// non-frozen continuous features; identity transform on one-hot coordinates.
Counterfactual explain_correlated(const CounterfactualQuery& q, const LinearSVM& model,
                                  const FeatureSchema& schema, const CovarianceModel& cov,
                                  const SolverConfig& cfg = {});

/// Plain objective plus the prototype box |x' - v_{y'}| <= epsilon per
/// coordinate. With no explicit epsilon the box radius is one sample standard
/// deviation per continuous feature (1.0 on one-hot coordinates).
Counterfactual explain_plausible(const CounterfactualQuery& q, const LinearSVM& model,
                                 const FeatureSchema& schema,
                                 const EmpiricalDistribution& dist,
                                 const ClassPrototypes& protos,
                                 const SolverConfig& cfg = {});

/// Weighted L1 objective via auxiliary variables d >= +-W(x - x'),
/// minimize 1'd; a mixed-integer linear program.
Counterfactual explain_sparse(const CounterfactualQuery& q, const LinearSVM& model,
                              const FeatureSchema& schema, const SolverConfig& cfg = {});

/// L1 objective after whitening the continuous block: 1'd with
/// d >= +-(W S)(x - x'), S the marginal inverse square root.
Counterfactual explain_sparse_correlated(const CounterfactualQuery& q, const LinearSVM& model,
                                         const FeatureSchema& schema,
                                         const CovarianceModel& cov,
                                         const SolverConfig& cfg = {});

/// Everything any variant may need, for variant-generic callers.
struct ExplainContext {
  const LinearSVM* model = nullptr;
  const FeatureSchema* schema = nullptr;
  const EmpiricalDistribution* dist = nullptr;
  const CovarianceModel* cov = nullptr;
  const ClassPrototypes* protos = nullptr;
  SolverConfig solver;
};

/// Dispatches on q.variant; throws ConfigError when a required statistic is
/// missing from the context.
Counterfactual explain_query(const CounterfactualQuery& q, const ExplainContext& ctx);

/// The program explain_query would solve (for debug dumps and cross-checks).
MixedIntegerProgram build_query_program(const CounterfactualQuery& q, const ExplainContext& ctx);

/// Post-hoc correlation action: x + (Sigma + lambda I) delta on continuous
/// coordinates, one-hot coordinates copied from x + delta. The result may
/// violate the margin; callers re-check validity.
Eigen::VectorXd post_hoc_correlation(const Eigen::VectorXd& x, const Eigen::VectorXd& delta,
                                     const CovarianceModel& cov, const FeatureSchema& schema);

/// Distance from x' to the decision hyperplane: |<w,x'> + b| / ||w||.
double stability_radius(const LinearSVM& model, const Eigen::VectorXd& x_prime);

struct StabilityReport {
  double radius = 0.0;
  int trials = 0;
  long retained = 0;
  double fraction = 1.0;
};

/// Samples points uniformly in the ball of the given radius around x'
/// (continuous coordinates only, one-hot held fixed) and reports the
/// fraction keeping the label of x'.
StabilityReport verify_stability(const LinearSVM& model, const FeatureSchema& schema,
                                 const Eigen::VectorXd& x_prime, double radius, int trials,
                                 uint64_t seed);

/// Baseline: the support vector of the desired class closest to x in the
/// weighted metric; ties break to the lowest row index.
Counterfactual nearest_support_vector(const Eigen::VectorXd& x, int y_prime,
                                      const Dataset& data, const LinearSVM& model,
                                      const std::vector<double>& weights,
                                      double sv_tol = 1e-6);

/// Structured-text form of a counterfactual report (feature old/new/delta,
/// objective, stability radius, method, solver stats).
std::string counterfactual_report_json(const Counterfactual& cf, const FeatureSchema& schema,
                                       const Eigen::VectorXd& x);

}  // namespace svmcf
