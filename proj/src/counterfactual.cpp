#include "svmcf/counterfactual.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <json.hpp>

namespace svmcf {

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::Plain: return "plain";
    case Variant::Correlated: return "correlated";
    case Variant::Plausible: return "plausible";
    case Variant::Sparse: return "sparse";
    case Variant::SparseCorrelated: return "sparse_correlated";
  }
  return "unknown";
}

std::optional<Variant> variant_from_name(const std::string& name) {
  if (name == "plain") return Variant::Plain;
  if (name == "correlated") return Variant::Correlated;
  if (name == "plausible") return Variant::Plausible;
  if (name == "sparse") return Variant::Sparse;
  if (name == "sparse_correlated") return Variant::SparseCorrelated;
  return std::nullopt;
}

namespace {

std::vector<double> resolve_weights(const CounterfactualQuery& q, const FeatureSchema& schema) {
  std::vector<double> w = q.weights.empty() ? schema.default_weights() : q.weights;
  if (static_cast<int>(w.size()) != schema.size())
    throw ConfigError("query: weight vector length does not match the schema");
  for (int i = 0; i < schema.size(); ++i)
    if (!(w[i] > 0.0))
      throw ConfigError("query: weight of feature '" + schema.feature(i).name +
                        "' must be positive (or +inf to freeze)");
  return w;
}

// The caller pipeline (CLI, audit, benchmark) builds q.y from the model
// prediction; here we validate structure only, so that programs for
// hand-stated (x, y) pairs remain constructible.
void validate_query(const CounterfactualQuery& q, const LinearSVM& model,
                    const FeatureSchema& schema) {
  if (q.x.size() != schema.size())
    throw ConfigError("query: instance length does not match the schema");
  if (model.w.size() != schema.size())
    throw ModelError("query: model dimension does not match the schema");
  if (q.y != 1 && q.y != -1) throw ConfigError("query: label must be +1 or -1");
  for (const auto& [gid, members] : schema.groups()) {
    double sum = 0.0;
    for (int j : members) {
      const double v = q.x[j];
      if (v != 0.0 && v != 1.0)
        throw DataError("query: one-hot entry of group '" + gid + "' not in {0,1}");
      sum += v;
    }
    if (sum != 1.0)
      throw DataError("query: group constraint violated for group '" + gid + "'");
  }
}

// Variable layout, margin row and shared constraints with frozen features
// substituted out.
struct Skeleton {
  std::vector<int> free_idx;
  std::vector<int> frozen_idx;
  std::vector<double> weights;      // resolved, per feature
  Eigen::VectorXd x_free;
  Eigen::VectorXd margin_row;       // margin_row' xf <= margin_rhs
  double margin_rhs = 0.0;
  std::vector<std::pair<Eigen::VectorXd, double>> group_rows;  // equalities
  Eigen::VectorXd lb, ub;
  std::vector<char> integral;
};

Skeleton make_skeleton(const CounterfactualQuery& q, const LinearSVM& model,
                       const FeatureSchema& schema) {
  Skeleton s;
  s.weights = resolve_weights(q, schema);
  for (int i = 0; i < schema.size(); ++i)
    (std::isinf(s.weights[i]) ? s.frozen_idx : s.free_idx).push_back(i);
  if (s.free_idx.empty()) throw ConfigError("query: all features are frozen");

  const int nf = static_cast<int>(s.free_idx.size());
  s.x_free.resize(nf);
  s.lb.resize(nf);
  s.ub.resize(nf);
  s.integral.resize(nf);
  for (int k = 0; k < nf; ++k) {
    const int i = s.free_idx[k];
    s.x_free[k] = q.x[i];
    s.lb[k] = schema.feature(i).lower;
    s.ub[k] = schema.feature(i).upper;
    s.integral[k] = !schema.is_continuous(i);
  }

  // y'(<w,x'> + b) >= 1 over the free coordinates.
  const int y_prime = -q.y;
  double frozen_term = 0.0;
  for (int i : s.frozen_idx) frozen_term += model.w[i] * q.x[i];
  s.margin_row.resize(nf);
  for (int k = 0; k < nf; ++k) s.margin_row[k] = -y_prime * model.w[s.free_idx[k]];
  s.margin_rhs = -(1.0 - y_prime * (model.b + frozen_term));

  for (const auto& [gid, members] : schema.groups()) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(nf);
    double rhs = 1.0;
    bool any_free = false;
    for (int j : members) {
      const auto it = std::find(s.free_idx.begin(), s.free_idx.end(), j);
      if (it != s.free_idx.end()) {
        row[it - s.free_idx.begin()] = 1.0;
        any_free = true;
      } else {
        rhs -= q.x[j];
      }
    }
    if (any_free) s.group_rows.emplace_back(std::move(row), rhs);
    // A fully frozen group is already consistent: the query was validated.
  }
  return s;
}

// Metric over the free coordinates: diag(w) for the plain variants; for the
// correlated ones the continuous block becomes S W S with S the marginal
// inverse square root of the free continuous covariance.
Eigen::MatrixXd free_metric(const Skeleton& s, const FeatureSchema& schema,
                            const CovarianceModel* cov) {
  const int nf = static_cast<int>(s.free_idx.size());
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(nf, nf);
  if (cov == nullptr) {
    for (int k = 0; k < nf; ++k) M(k, k) = s.weights[s.free_idx[k]];
    return M;
  }

  std::vector<int> cont_var;   // positions among free vars
  std::vector<int> cont_pos;   // positions inside the covariance block
  for (int k = 0; k < nf; ++k) {
    const int i = s.free_idx[k];
    if (schema.is_continuous(i)) {
      const int pos = cov->continuous_position(i);
      if (pos < 0)
        throw ConfigError("covariance model does not cover feature '" +
                          schema.feature(i).name + "' (schema mismatch)");
      cont_var.push_back(k);
      cont_pos.push_back(pos);
    } else {
      M(k, k) = s.weights[i];
    }
  }
  if (!cont_var.empty()) {
    const Eigen::MatrixXd S = cov->marginal_inverse_sqrt(cont_pos);
    Eigen::VectorXd wc(static_cast<int>(cont_var.size()));
    for (size_t a = 0; a < cont_var.size(); ++a) wc[a] = s.weights[s.free_idx[cont_var[a]]];
    const Eigen::MatrixXd Mc = S * wc.asDiagonal() * S;
    for (size_t a = 0; a < cont_var.size(); ++a)
      for (size_t b = 0; b < cont_var.size(); ++b)
        M(cont_var[a], cont_var[b]) = Mc(a, b);
  }
  return M;
}

// L1 transform rows: diag(w) on one-hot coordinates, diag(w) * S on the
// continuous block.
Eigen::MatrixXd sparse_transform(const Skeleton& s, const FeatureSchema& schema,
                                 const CovarianceModel* cov) {
  const int nf = static_cast<int>(s.free_idx.size());
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(nf, nf);
  if (cov == nullptr) {
    for (int k = 0; k < nf; ++k) T(k, k) = s.weights[s.free_idx[k]];
    return T;
  }
  std::vector<int> cont_var, cont_pos;
  for (int k = 0; k < nf; ++k) {
    const int i = s.free_idx[k];
    if (schema.is_continuous(i)) {
      const int pos = cov->continuous_position(i);
      if (pos < 0)
        throw ConfigError("covariance model does not cover feature '" +
                          schema.feature(i).name + "' (schema mismatch)");
      cont_var.push_back(k);
      cont_pos.push_back(pos);
    } else {
      T(k, k) = s.weights[i];
    }
  }
  if (!cont_var.empty()) {
    const Eigen::MatrixXd S = cov->marginal_inverse_sqrt(cont_pos);
    for (size_t a = 0; a < cont_var.size(); ++a)
      for (size_t b = 0; b < cont_var.size(); ++b)
        T(cont_var[a], cont_var[b]) = s.weights[s.free_idx[cont_var[a]]] * S(a, b);
  }
  return T;
}

struct Built {
  MixedIntegerProgram program;
  Skeleton skel;
  Eigen::MatrixXd metric;     // QP variants: objective = delta' M delta
  Eigen::MatrixXd transform;  // L1 variants: objective = ||T delta||_1
  bool is_l1 = false;
  bool plausible = false;
  std::vector<double> eps_used;
};

// Quadratic variants: min (x - x')' M (x - x') in standard form.
Built build_quadratic(const CounterfactualQuery& q, const LinearSVM& model,
                      const FeatureSchema& schema, const CovarianceModel* cov) {
  Built built;
  built.skel = make_skeleton(q, model, schema);
  const Skeleton& s = built.skel;
  const int nf = static_cast<int>(s.free_idx.size());

  built.metric = free_metric(s, schema, cov);
  MixedIntegerProgram& p = built.program;
  p.Q = 2.0 * built.metric;
  p.c = -2.0 * (built.metric * s.x_free);
  p.constant = s.x_free.dot(built.metric * s.x_free);

  p.A.resize(1, nf);
  p.A.row(0) = s.margin_row.transpose();
  p.b.resize(1);
  p.b[0] = s.margin_rhs;

  p.E.resize(static_cast<int>(s.group_rows.size()), nf);
  p.d.resize(static_cast<int>(s.group_rows.size()));
  for (size_t g = 0; g < s.group_rows.size(); ++g) {
    p.E.row(static_cast<int>(g)) = s.group_rows[g].first.transpose();
    p.d[static_cast<int>(g)] = s.group_rows[g].second;
  }
  p.lower = s.lb;
  p.upper = s.ub;
  p.integral = s.integral;
  return built;
}

void add_plausibility_rows(Built& built, const CounterfactualQuery& q,
                           const FeatureSchema& schema, const EmpiricalDistribution& dist,
                           const ClassPrototypes& protos) {
  const Skeleton& s = built.skel;
  const int nf = static_cast<int>(s.free_idx.size());
  const Eigen::VectorXd& proto = protos.for_label(-q.y);
  if (proto.size() != schema.size())
    throw ConfigError("plausible: prototype length does not match the schema");

  std::vector<double> eps(schema.size());
  if (q.epsilon) {
    if (!(*q.epsilon > 0.0)) throw ConfigError("plausible: epsilon must be > 0");
    std::fill(eps.begin(), eps.end(), *q.epsilon);
  } else {
    for (int i = 0; i < schema.size(); ++i)
      eps[i] = schema.is_continuous(i) ? dist.stddev(i) : 1.0;
  }
  built.eps_used = eps;
  built.plausible = true;

  for (int i : s.frozen_idx) {
    if (std::abs(q.x[i] - proto[i]) > eps[i] + 1e-12)
      throw InfeasibleError("epsilon too small: frozen feature '" + schema.feature(i).name +
                            "' lies outside the prototype box");
  }

  MixedIntegerProgram& p = built.program;
  const int base = static_cast<int>(p.A.rows());
  const int nvars = p.num_vars();
  Eigen::MatrixXd A(base + 2 * nf, nvars);
  Eigen::VectorXd b(base + 2 * nf);
  A.topRows(base) = p.A;
  b.head(base) = p.b;
  for (int k = 0; k < nf; ++k) {
    const int i = s.free_idx[k];
    Eigen::RowVectorXd up = Eigen::RowVectorXd::Zero(nvars);
    up[k] = 1.0;
    A.row(base + 2 * k) = up;
    b[base + 2 * k] = proto[i] + eps[i];
    A.row(base + 2 * k + 1) = -up;
    b[base + 2 * k + 1] = -(proto[i] - eps[i]);
  }
  p.A = std::move(A);
  p.b = std::move(b);
}

// L1 variants: variables (x'_free, d); minimize 1'd with d >= +-T(x - x').
Built build_l1(const CounterfactualQuery& q, const LinearSVM& model,
               const FeatureSchema& schema, const CovarianceModel* cov) {
  Built built;
  built.skel = make_skeleton(q, model, schema);
  built.is_l1 = true;
  const Skeleton& s = built.skel;
  const int nf = static_cast<int>(s.free_idx.size());
  built.transform = sparse_transform(s, schema, cov);
  const Eigen::MatrixXd& T = built.transform;

  MixedIntegerProgram& p = built.program;
  const int nv = 2 * nf;
  p.Q = Eigen::MatrixXd::Zero(nv, nv);
  p.c = Eigen::VectorXd::Zero(nv);
  p.c.tail(nf).setOnes();
  p.constant = 0.0;

  const Eigen::VectorXd tx = T * s.x_free;
  p.A = Eigen::MatrixXd::Zero(1 + 2 * nf, nv);
  p.b = Eigen::VectorXd::Zero(1 + 2 * nf);
  p.A.block(0, 0, 1, nf) = s.margin_row.transpose();
  p.b[0] = s.margin_rhs;
  for (int r = 0; r < nf; ++r) {
    // T_r (x - x') <= d_r  and  T_r (x' - x) <= d_r.
    p.A.block(1 + 2 * r, 0, 1, nf) = -T.row(r);
    p.A(1 + 2 * r, nf + r) = -1.0;
    p.b[1 + 2 * r] = -tx[r];
    p.A.block(2 + 2 * r, 0, 1, nf) = T.row(r);
    p.A(2 + 2 * r, nf + r) = -1.0;
    p.b[2 + 2 * r] = tx[r];
  }

  p.E = Eigen::MatrixXd::Zero(static_cast<int>(s.group_rows.size()), nv);
  p.d.resize(static_cast<int>(s.group_rows.size()));
  for (size_t g = 0; g < s.group_rows.size(); ++g) {
    p.E.block(static_cast<int>(g), 0, 1, nf) = s.group_rows[g].first.transpose();
    p.d[static_cast<int>(g)] = s.group_rows[g].second;
  }

  p.lower.resize(nv);
  p.upper.resize(nv);
  p.lower.head(nf) = s.lb;
  p.upper.head(nf) = s.ub;
  p.lower.tail(nf).setZero();
  p.upper.tail(nf).setConstant(kInf);
  p.integral.assign(nv, 0);
  for (int k = 0; k < nf; ++k) p.integral[k] = s.integral[k];
  return built;
}

Counterfactual finish(const CounterfactualQuery& q, const LinearSVM& model,
                      const FeatureSchema& schema, const Built& built,
                      const SolverConfig& cfg, const std::string& method) {
  SolveResult res = solve_mip(built.program, cfg);
  const Skeleton& s = built.skel;

  if (res.status == SolveStatus::Infeasible) {
    if (built.plausible) {
      // Distinguish "epsilon too small" from frozen/bounds infeasibility by
      // dropping the prototype box.
      CounterfactualQuery plain = q;
      plain.variant = Variant::Plain;
      Built base = build_quadratic(plain, model, schema, nullptr);
      if (solve_mip(base.program, cfg).status == SolveStatus::Optimal)
        throw InfeasibleError(
            "epsilon too small: the prototype box does not intersect the margin halfspace");
    }
    std::ostringstream msg;
    msg << "margin unreachable within feature bounds";
    if (!s.frozen_idx.empty()) {
      msg << " with frozen features {";
      for (size_t k = 0; k < s.frozen_idx.size(); ++k)
        msg << (k ? ", " : "") << schema.feature(s.frozen_idx[k]).name;
      msg << "}";
    }
    throw InfeasibleError(msg.str());
  }
  if (res.x.size() == 0)
    throw SolveError(std::string("solver stopped (") + to_string(res.status) +
                     ") without an incumbent");

  Counterfactual cf;
  cf.method = method;
  cf.x_prime = q.x;
  const int nf = static_cast<int>(s.free_idx.size());
  for (int k = 0; k < nf; ++k) cf.x_prime[s.free_idx[k]] = res.x[k];
  cf.delta = cf.x_prime - q.x;

  Eigen::VectorXd delta_free(nf);
  for (int k = 0; k < nf; ++k) delta_free[k] = cf.delta[s.free_idx[k]];
  if (built.is_l1)
    cf.objective = (built.transform * delta_free).cwiseAbs().sum();
  else
    cf.objective = delta_free.dot(built.metric * delta_free);

  const int y_prime = -q.y;
  cf.valid = y_prime * decision_value(model, cf.x_prime) >= 1.0 - kValidityTol;
  cf.stability_radius = stability_radius(model, cf.x_prime);
  for (int i = 0; i < schema.size(); ++i) {
    if (std::abs(cf.delta[i]) > kChangeTol)
      cf.changed.push_back({i, schema.feature(i).name, q.x[i], cf.x_prime[i]});
  }
  cf.solver = {res.status, res.nodes, res.gap};
  cf.epsilon_used = built.eps_used;
  return cf;
}

}  // namespace

MixedIntegerProgram build_problem(const CounterfactualQuery& q, const LinearSVM& model,
                                  const FeatureSchema& schema) {
  validate_query(q, model, schema);
  return build_quadratic(q, model, schema, nullptr).program;
}

Counterfactual explain(const CounterfactualQuery& q, const LinearSVM& model,
                       const FeatureSchema& schema, const SolverConfig& cfg) {
  validate_query(q, model, schema);
  return finish(q, model, schema, build_quadratic(q, model, schema, nullptr), cfg, "plain");
}

Counterfactual explain_correlated(const CounterfactualQuery& q, const LinearSVM& model,
                                  const FeatureSchema& schema, const CovarianceModel& cov,
                                  const SolverConfig& cfg) {
  validate_query(q, model, schema);
  return finish(q, model, schema, build_quadratic(q, model, schema, &cov), cfg, "correlated");
}

Counterfactual explain_plausible(const CounterfactualQuery& q, const LinearSVM& model,
                                 const FeatureSchema& schema,
                                 const EmpiricalDistribution& dist,
                                 const ClassPrototypes& protos, const SolverConfig& cfg) {
  validate_query(q, model, schema);
  Built built = build_quadratic(q, model, schema, nullptr);
  add_plausibility_rows(built, q, schema, dist, protos);
  return finish(q, model, schema, built, cfg, "plausible");
}

Counterfactual explain_sparse(const CounterfactualQuery& q, const LinearSVM& model,
                              const FeatureSchema& schema, const SolverConfig& cfg) {
  validate_query(q, model, schema);
  return finish(q, model, schema, build_l1(q, model, schema, nullptr), cfg, "sparse");
}

Counterfactual explain_sparse_correlated(const CounterfactualQuery& q, const LinearSVM& model,
                                         const FeatureSchema& schema,
                                         const CovarianceModel& cov, const SolverConfig& cfg) {
  validate_query(q, model, schema);
  return finish(q, model, schema, build_l1(q, model, schema, &cov), cfg, "sparse_correlated");
}

Counterfactual explain_query(const CounterfactualQuery& q, const ExplainContext& ctx) {
  if (ctx.model == nullptr || ctx.schema == nullptr)
    throw ConfigError("explain: context needs a model and a schema");
  switch (q.variant) {
    case Variant::Plain:
      return explain(q, *ctx.model, *ctx.schema, ctx.solver);
    case Variant::Correlated:
      if (ctx.cov == nullptr) throw ConfigError("explain: correlated variant needs a covariance model");
      return explain_correlated(q, *ctx.model, *ctx.schema, *ctx.cov, ctx.solver);
    case Variant::Plausible:
      if (ctx.dist == nullptr || ctx.protos == nullptr)
        throw ConfigError("explain: plausible variant needs statistics and prototypes");
      return explain_plausible(q, *ctx.model, *ctx.schema, *ctx.dist, *ctx.protos, ctx.solver);
    case Variant::Sparse:
      return explain_sparse(q, *ctx.model, *ctx.schema, ctx.solver);
    case Variant::SparseCorrelated:
      if (ctx.cov == nullptr)
        throw ConfigError("explain: sparse_correlated variant needs a covariance model");
      return explain_sparse_correlated(q, *ctx.model, *ctx.schema, *ctx.cov, ctx.solver);
  }
  throw ConfigError("explain: unknown variant");
}

MixedIntegerProgram build_query_program(const CounterfactualQuery& q, const ExplainContext& ctx) {
  if (ctx.model == nullptr || ctx.schema == nullptr)
    throw ConfigError("build: context needs a model and a schema");
  validate_query(q, *ctx.model, *ctx.schema);
  switch (q.variant) {
    case Variant::Plain:
      return build_quadratic(q, *ctx.model, *ctx.schema, nullptr).program;
    case Variant::Correlated:
      if (ctx.cov == nullptr) throw ConfigError("build: correlated variant needs a covariance model");
      return build_quadratic(q, *ctx.model, *ctx.schema, ctx.cov).program;
    case Variant::Plausible: {
      if (ctx.dist == nullptr || ctx.protos == nullptr)
        throw ConfigError("build: plausible variant needs statistics and prototypes");
      Built built = build_quadratic(q, *ctx.model, *ctx.schema, nullptr);
      add_plausibility_rows(built, q, *ctx.schema, *ctx.dist, *ctx.protos);
      return built.program;
    }
    case Variant::Sparse:
      return build_l1(q, *ctx.model, *ctx.schema, nullptr).program;
    case Variant::SparseCorrelated:
      if (ctx.cov == nullptr)
        throw ConfigError("build: sparse_correlated variant needs a covariance model");
      return build_l1(q, *ctx.model, *ctx.schema, ctx.cov).program;
  }
  throw ConfigError("build: unknown variant");
}

Eigen::VectorXd post_hoc_correlation(const Eigen::VectorXd& x, const Eigen::VectorXd& delta,
                                     const CovarianceModel& cov, const FeatureSchema& schema) {
  if (x.size() != delta.size() || x.size() != schema.size())
    throw ConfigError("post_hoc_correlation: dimension mismatch");
  const std::vector<int>& cont = cov.continuous_features();
  Eigen::VectorXd dc(static_cast<int>(cont.size()));
  for (size_t p = 0; p < cont.size(); ++p) dc[static_cast<int>(p)] = delta[cont[p]];
  const Eigen::VectorXd moved = cov.covariance() * dc;
  Eigen::VectorXd x_cf = x + delta;
  for (size_t p = 0; p < cont.size(); ++p) x_cf[cont[p]] = x[cont[p]] + moved[static_cast<int>(p)];
  return x_cf;
}

double stability_radius(const LinearSVM& model, const Eigen::VectorXd& x_prime) {
  const double norm = model.w.norm();
  if (norm <= 0.0) throw ModelError("stability_radius: zero weight vector");
  return std::abs(decision_value(model, x_prime)) / norm;
}

StabilityReport verify_stability(const LinearSVM& model, const FeatureSchema& schema,
                                 const Eigen::VectorXd& x_prime, double radius, int trials,
                                 uint64_t seed) {
  if (!(radius >= 0.0)) throw ConfigError("verify_stability: radius must be >= 0");
  StabilityReport rep;
  rep.radius = radius;
  rep.trials = trials;
  const int y_prime = predict(model, x_prime);
  const std::vector<int> cont = schema.continuous_indices();
  const int k = static_cast<int>(cont.size());

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  for (int t = 0; t < trials; ++t) {
    Eigen::VectorXd pt = x_prime;
    if (k > 0 && radius > 0.0) {
      Eigen::VectorXd g(k);
      for (int a = 0; a < k; ++a) g[a] = gauss(rng);
      const double norm = g.norm();
      if (norm > 0.0) {
        const double r = radius * std::pow(unif(rng), 1.0 / k);
        for (int a = 0; a < k; ++a) pt[cont[a]] += r * g[a] / norm;
      }
    }
    if (predict(model, pt) == y_prime) ++rep.retained;
  }
  rep.fraction = trials > 0 ? static_cast<double>(rep.retained) / trials : 1.0;
  return rep;
}

Counterfactual nearest_support_vector(const Eigen::VectorXd& x, int y_prime,
                                      const Dataset& data, const LinearSVM& model,
                                      const std::vector<double>& weights, double sv_tol) {
  if (y_prime != 1 && y_prime != -1)
    throw ConfigError("nearest_support_vector: label must be +1 or -1");
  if (x.size() != data.n_features())
    throw ConfigError("nearest_support_vector: dimension mismatch");
  std::vector<double> w = weights.empty() ? data.schema().default_weights() : weights;
  if (static_cast<int>(w.size()) != data.n_features())
    throw ConfigError("nearest_support_vector: weight vector length mismatch");

  int best_row = -1;
  double best_dist = kInf;
  bool any_candidate = false;
  for (const auto& [row, label] : support_vectors(model, data, sv_tol)) {
    if (label != y_prime) continue;
    any_candidate = true;
    const Eigen::VectorXd s = data.row(row);
    double dist = 0.0;
    for (int i = 0; i < x.size(); ++i) {
      const double diff = x[i] - s[i];
      if (std::isinf(w[i])) {
        if (diff != 0.0) {
          dist = kInf;
          break;
        }
      } else {
        dist += w[i] * diff * diff;
      }
    }
    if (dist < best_dist) {
      best_dist = dist;
      best_row = row;
    }
  }
  if (!any_candidate)
    throw DataError("nearest_support_vector: no support vectors with label " +
                    std::to_string(y_prime));
  if (best_row < 0)
    throw DataError(
        "nearest_support_vector: every candidate support vector differs on a frozen feature");

  Counterfactual cf;
  cf.method = "nearest_sv";
  cf.x_prime = data.row(best_row);
  cf.delta = cf.x_prime - x;
  cf.objective = best_dist;
  cf.valid = y_prime * decision_value(model, cf.x_prime) >= 1.0 - kValidityTol;
  cf.stability_radius = stability_radius(model, cf.x_prime);
  for (int i = 0; i < data.n_features(); ++i) {
    if (std::abs(cf.delta[i]) > kChangeTol)
      cf.changed.push_back({i, data.schema().feature(i).name, x[i], cf.x_prime[i]});
  }
  cf.solver = {SolveStatus::Optimal, 0, 0.0};
  return cf;
}

std::string counterfactual_report_json(const Counterfactual& cf, const FeatureSchema& schema,
                                       const Eigen::VectorXd& x) {
  nlohmann::json doc;
  doc["method"] = cf.method;
  doc["objective"] = cf.objective;
  doc["valid"] = cf.valid;
  doc["stability_radius"] = cf.stability_radius;
  doc["solver"] = {{"status", to_string(cf.solver.status)},
                   {"nodes", cf.solver.nodes},
                   {"gap", cf.solver.gap}};
  nlohmann::json feats = nlohmann::json::array();
  for (int i = 0; i < schema.size(); ++i) {
    feats.push_back({{"name", schema.feature(i).name},
                     {"original", x[i]},
                     {"counterfactual", cf.x_prime[i]},
                     {"delta", cf.delta[i]}});
  }
  doc["features"] = feats;
  nlohmann::json changed = nlohmann::json::array();
  for (const FeatureChange& ch : cf.changed) changed.push_back(ch.name);
  doc["changed_features"] = changed;
  if (!cf.epsilon_used.empty()) doc["epsilon_used"] = cf.epsilon_used;
  return doc.dump(2);
}

}  // namespace svmcf
