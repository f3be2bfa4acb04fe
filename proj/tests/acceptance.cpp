// Acceptance suite: runs every release criterion at its stated tolerance and
// prints one pass/fail line per criterion. Exits nonzero if any criterion
// fails (skips are reported, not failures).
//
// Usage: acceptance [--cli <path-to-svmcf-binary>] [--pima <path-to-csv>]

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <vector>

#include "svmcf/audit.hpp"
#include "svmcf/cli.hpp"
#include "svmcf/counterfactual.hpp"
#include "svmcf/dataset.hpp"
#include "svmcf/evaluate.hpp"
#include "svmcf/model.hpp"
#include "svmcf/optim.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace svmcf;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  bool skip = false;
  std::string detail;
  double seconds = 0.0;
};

int failures = 0;

void run_criterion(const std::string& name, double time_limit_s,
                   const std::function<Outcome()>& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = fn();
  } catch (const std::exception& e) {
    out.pass = false;
    out.detail = std::string("exception: ") + e.what();
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!out.skip && out.pass && time_limit_s > 0.0 && out.seconds > time_limit_s) {
    out.pass = false;
    out.detail += " [runtime " + std::to_string(out.seconds) + "s exceeds " +
                  std::to_string(time_limit_s) + "s]";
  }
  const char* tag = out.skip ? "SKIP" : (out.pass ? "PASS" : "FAIL");
  if (!out.skip && !out.pass) ++failures;
  std::ostringstream line;
  line.precision(2);
  line << std::fixed << "[" << tag << "] " << name << ": " << out.detail << " (" << out.seconds
       << " s)";
  std::cout << line.str() << std::endl;
}

struct RandomInstance {
  FeatureSchema schema;
  LinearSVM model;
  CounterfactualQuery query;
};

// Mixed continuous/one-hot query against a random linear model, n <= 20.
// Continuous coordinates are unbounded so the flip is always reachable.
RandomInstance random_instance(std::mt19937_64& rng, bool one_hot_allowed) {
  std::normal_distribution<double> g(0.0, 2.0);
  std::uniform_real_distribution<double> wdist(0.25, 4.0);

  const int n_cont = 1 + static_cast<int>(rng() % 8);
  std::vector<int> group_sizes;
  int n_bin = 0;
  if (one_hot_allowed) {
    const int groups = static_cast<int>(rng() % 4);
    for (int k = 0; k < groups; ++k) {
      const int s = 2 + static_cast<int>(rng() % 3);
      if (n_cont + n_bin + s > 20) break;
      group_sizes.push_back(s);
      n_bin += s;
    }
  }
  const int n = n_cont + n_bin;

  RandomInstance inst{svmcf::testing::mixed_schema(n_cont, group_sizes), LinearSVM{}, {}};
  inst.model.w.resize(n);
  for (int i = 0; i < n; ++i) inst.model.w[i] = g(rng);
  // Keep at least one continuous lever on the margin.
  if (inst.model.w.head(n_cont).cwiseAbs().maxCoeff() < 0.3) inst.model.w[0] = 1.0;
  inst.model.b = g(rng);
  for (int i = 0; i < n; ++i) inst.model.feature_names.push_back(inst.schema.feature(i).name);

  Eigen::VectorXd x(n);
  for (int i = 0; i < n_cont; ++i) x[i] = g(rng);
  int at = n_cont;
  for (const int s : group_sizes) {
    const int hot = static_cast<int>(rng() % s);
    for (int m = 0; m < s; ++m) x[at + m] = (m == hot) ? 1.0 : 0.0;
    at += s;
  }
  inst.query.x = x;
  inst.query.y = predict(inst.model, x);
  inst.query.weights.resize(n);
  for (int i = 0; i < n; ++i) inst.query.weights[i] = wdist(rng);
  return inst;
}

std::string cli_path;   // --cli
std::string pima_path;  // --pima

// ---------------------------------------------------------------------------

std::vector<RandomInstance> validity_instances;
std::vector<Counterfactual> validity_cfs;

Outcome criterion_validity() {
  std::mt19937_64 rng(1001);
  const int total = 500;
  validity_instances.clear();
  validity_cfs.clear();
  for (int k = 0; k < total; ++k) {
    RandomInstance inst = random_instance(rng, true);
    const Counterfactual cf = explain(inst.query, inst.model, inst.schema);
    const int y_prime = -inst.query.y;
    const double margin = y_prime * decision_value(inst.model, cf.x_prime);
    if (!(margin >= 1.0 - 1e-6) || !cf.valid)
      return {false, false,
              "instance " + std::to_string(k) + " violates the margin (value " +
                  std::to_string(margin) + ")"};
    validity_instances.push_back(std::move(inst));
    validity_cfs.push_back(cf);
  }
  return {true, false, "500/500 counterfactuals satisfy the margin"};
}

Outcome criterion_projection() {
  std::mt19937_64 rng(2002);
  double worst = 0.0;
  for (int k = 0; k < 500; ++k) {
    const RandomInstance inst = random_instance(rng, false);
    const Counterfactual cf = explain(inst.query, inst.model, inst.schema);
    Eigen::VectorXd weights(inst.schema.size());
    for (int i = 0; i < inst.schema.size(); ++i) weights[i] = inst.query.weights[i];
    const auto oracle = svmcf::testing::project_halfspace(
        inst.query.x, inst.model.w, inst.model.b, -inst.query.y, weights);
    const double diff = std::abs(cf.objective - oracle.objective);
    worst = std::max(worst, diff);
    if (diff > 1e-6)
      return {false, false,
              "objective differs from the analytic projection by " + std::to_string(diff)};
  }
  std::ostringstream d;
  d << "500/500 objectives match the analytic projection (worst |diff| " << worst << ")";
  return {true, false, d.str()};
}

Outcome criterion_mip_oracle() {
  std::mt19937_64 rng(3003);
  SolverConfig cfg;
  cfg.mip_gap_abs = 1e-9;
  int solved = 0;
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    const MixedIntegerProgram p = svmcf::testing::random_group_mip(rng, 12, k % 2 == 0);
    const SolveResult mip = solve_mip(p, cfg);
    const SolveResult oracle = brute_force_mip(p, cfg);
    if (mip.status != oracle.status)
      return {false, false, "status mismatch on instance " + std::to_string(k)};
    if (mip.status != SolveStatus::Optimal) continue;
    ++solved;
    const double diff = std::abs(mip.objective - oracle.objective);
    worst = std::max(worst, diff);
    if (diff > 1e-6)
      return {false, false,
              "objective differs from enumeration by " + std::to_string(diff) +
                  " on instance " + std::to_string(k)};
  }
  std::ostringstream d;
  d << solved << " feasible instances match enumeration (worst |diff| " << worst << ")";
  return {true, false, d.str()};
}

Outcome criterion_stability() {
  if (validity_cfs.empty()) return {false, false, "criterion 1 did not produce instances"};
  for (size_t k = 0; k < validity_cfs.size(); ++k) {
    const RandomInstance& inst = validity_instances[k];
    const Counterfactual& cf = validity_cfs[k];
    const double margin_radius = 1.0 / inst.model.w.norm();
    if (!(cf.stability_radius >= margin_radius - 1e-9))
      return {false, false, "stability radius below 1/||w|| on instance " + std::to_string(k)};
    const StabilityReport rep =
        verify_stability(inst.model, inst.schema, cf.x_prime, 0.999 * margin_radius, 1000,
                         4004 + static_cast<uint64_t>(k));
    if (rep.fraction != 1.0)
      return {false, false,
              "label flipped inside the guaranteed ball on instance " + std::to_string(k) +
                  " (fraction " + std::to_string(rep.fraction) + ")"};
  }
  return {true, false,
          std::to_string(validity_cfs.size()) +
              " counterfactuals keep the label across 1000-sample balls"};
}

Outcome criterion_cost_laws() {
  std::mt19937_64 rng(5005);
  std::normal_distribution<double> g(0.0, 3.0);
  const int N = 40;
  Eigen::MatrixXd rows(N, 3);
  for (int r = 0; r < N; ++r)
    for (int j = 0; j < 3; ++j) rows(r, j) = g(rng);
  std::vector<int> labels(N, 1);
  for (int r = 0; r < N / 2; ++r) labels[r] = -1;
  const Dataset data(svmcf::testing::continuous_schema(3), rows, labels);
  const EmpiricalDistribution dist = EmpiricalDistribution::fit(data);

  // Identity laws and f3 on rows.
  for (int r = 0; r < N; ++r) {
    if (cost_f1(data.row(r), data.row(r), dist) != 0.0) return {false, false, "f1(x,x) != 0"};
    if (cost_f2(data.row(r), data.row(r), dist) != 0.0) return {false, false, "f2(x,x) != 0"};
    if (cost_f3(data.row(r), data, dist) != 0.0) return {false, false, "f3(row) != 0"};
  }
  // Symmetry of f2, exact.
  std::uniform_real_distribution<double> v(-6.0, 6.0);
  for (int k = 0; k < 200; ++k) {
    Eigen::Vector3d a(v(rng), v(rng), v(rng)), b(v(rng), v(rng), v(rng));
    if (cost_f2(a, b, dist) != cost_f2(b, a, dist))
      return {false, false, "f2 symmetry broke bitwise"};
  }
  // Scale invariance under 20 strictly increasing maps, exact at data points.
  std::uniform_real_distribution<double> coef(0.2, 3.0);
  for (int m = 0; m < 20; ++m) {
    Eigen::MatrixXd mapped = rows;
    for (int j = 0; j < 3; ++j) {
      const double a = coef(rng), b = coef(rng);
      const int kind = static_cast<int>(rng() % 3);
      for (int r = 0; r < N; ++r) {
        const double t = rows(r, j);
        mapped(r, j) = kind == 0   ? a * t + b
                       : kind == 1 ? a * t * t * t + b * t
                                   : a * std::exp(0.2 * b * t);
      }
    }
    const Dataset mdata(svmcf::testing::continuous_schema(3), mapped, labels);
    const EmpiricalDistribution mdist = EmpiricalDistribution::fit(mdata);
    for (int k = 0; k < 25; ++k) {
      const int i = static_cast<int>(rng() % N), j = static_cast<int>(rng() % N);
      if (cost_f1(data.row(i), data.row(j), dist) !=
          cost_f1(mdata.row(i), mdata.row(j), mdist))
        return {false, false, "f1 scale invariance broke"};
      if (cost_f2(data.row(i), data.row(j), dist) !=
          cost_f2(mdata.row(i), mdata.row(j), mdist))
        return {false, false, "f2 scale invariance broke"};
      if (cost_f3(data.row(j), data, dist) != cost_f3(mdata.row(j), mdata, mdist))
        return {false, false, "f3 scale invariance broke"};
    }
  }
  return {true, false, "identity, symmetry and 20 monotone remaps hold exactly"};
}

Outcome criterion_variant_coherence() {
  const Dataset white = svmcf::testing::scaled_whitened_gaussians(80, 6006, {1.0, 1.0, 1.0});
  const CovarianceModel cov = CovarianceModel::fit(white, 0.0);
  const EmpiricalDistribution dist = EmpiricalDistribution::fit(white);
  const ClassPrototypes protos = fit_prototypes(white);
  const FeatureSchema schema = svmcf::testing::continuous_schema(3);

  std::mt19937_64 rng(6007);
  std::normal_distribution<double> g(0.0, 2.0);
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    LinearSVM m;
    m.w = Eigen::Vector3d(g(rng), g(rng), g(rng));
    if (m.w.norm() < 0.2) m.w[0] += 1.0;
    m.b = g(rng);
    m.feature_names = {"c0", "c1", "c2"};
    CounterfactualQuery q;
    q.x = Eigen::Vector3d(g(rng), g(rng), g(rng));
    q.y = predict(m, q.x);

    const Counterfactual plain = explain(q, m, schema);
    q.variant = Variant::Correlated;
    const Counterfactual corr = explain_correlated(q, m, schema, cov);
    q.variant = Variant::Plausible;
    q.epsilon = 1e9;
    const Counterfactual plaus = explain_plausible(q, m, schema, dist, protos);
    q.epsilon.reset();
    const double d1 = std::abs(plain.objective - corr.objective);
    const double d2 = std::abs(plain.objective - plaus.objective);
    worst = std::max({worst, d1, d2});
    if (d1 > 1e-8)
      return {false, false, "correlated objective deviates by " + std::to_string(d1)};
    if (d2 > 1e-8)
      return {false, false, "plausible objective deviates by " + std::to_string(d2)};
  }
  std::ostringstream d;
  d << "50/50 queries agree across variants (worst |diff| " << worst << ")";
  return {true, false, d.str()};
}

Outcome criterion_sparsity() {
  std::mt19937_64 rng(7007);
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    const RandomInstance inst = random_instance(rng, false);
    CounterfactualQuery q = inst.query;
    q.variant = Variant::Sparse;
    const Counterfactual sparse = explain_sparse(q, inst.model, inst.schema);
    q.variant = Variant::Plain;
    const Counterfactual plain = explain(q, inst.model, inst.schema);
    if (sparse.changed.size() > plain.changed.size())
      return {false, false,
              "sparse touched more features than plain on instance " + std::to_string(k)};
    Eigen::VectorXd weights(inst.schema.size());
    for (int i = 0; i < inst.schema.size(); ++i) weights[i] = q.weights[i];
    const double oracle = svmcf::testing::l1_projection_objective(
        q.x, inst.model.w, inst.model.b, -q.y, weights);
    const double diff = std::abs(sparse.objective - oracle);
    worst = std::max(worst, diff);
    if (diff > 1e-6)
      return {false, false, "L1 objective differs from the oracle by " + std::to_string(diff)};
  }
  std::ostringstream d;
  d << "200/200 instances: fewer-or-equal changes and L1 oracle match (worst |diff| " << worst
    << ")";
  return {true, false, d.str()};
}

Outcome criterion_attribution() {
  std::mt19937_64 rng(8008);
  std::normal_distribution<double> g(0.0, 2.0);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const int n = 1 + static_cast<int>(rng() % 20);
    const int N = 3 + static_cast<int>(rng() % 10);
    Eigen::MatrixXd rows(N, n);
    for (int r = 0; r < N; ++r)
      for (int j = 0; j < n; ++j) rows(r, j) = g(rng);
    std::vector<int> labels(N, 1);
    labels[0] = -1;
    const Dataset data(svmcf::testing::continuous_schema(n), rows, labels);
    LinearSVM m;
    m.w.resize(n);
    for (int j = 0; j < n; ++j) m.w[j] = g(rng);
    m.b = g(rng);
    for (int j = 0; j < n; ++j) m.feature_names.push_back("c" + std::to_string(j));
    Eigen::VectorXd x(n);
    for (int j = 0; j < n; ++j) x[j] = g(rng);

    const Eigen::VectorXd mu = data.rows().colwise().mean();
    const double lhs = linear_attribution(m, data, x).sum();
    const double rhs = decision_value(m, x) - decision_value(m, mu);
    const double diff = std::abs(lhs - rhs);
    worst = std::max(worst, diff);
    if (diff > 1e-12)
      return {false, false, "completeness residual " + std::to_string(diff)};
  }
  std::ostringstream d;
  d << "1000/1000 completeness identities hold (worst residual " << worst << ")";
  return {true, false, d.str()};
}

Outcome criterion_toy_margin() {
  // Seeded 2-Gaussian data, 200 points; every counterfactual of a point on
  // the undesirable side lands exactly on the margin boundary.
  const Dataset data = svmcf::testing::two_gaussians(100, 9009, 6.0);
  TrainConfig tc;
  tc.C = 10.0;
  const LinearSVM model = train_svm(data, tc);
  const FeatureSchema& schema = data.schema();

  int explained = 0;
  for (int r = 0; r < data.n_rows(); ++r) {
    if (predict(model, data.row(r)) != -1) continue;
    CounterfactualQuery q;
    q.x = data.row(r);
    q.y = -1;
    const Counterfactual cf = explain(q, model, schema);
    ++explained;
    const double dec = decision_value(model, cf.x_prime);
    if (std::abs(std::abs(dec) - 1.0) > 1e-6)
      return {false, false,
              "row " + std::to_string(r) + " not on the margin (decision " +
                  std::to_string(dec) + ")"};
  }
  if (explained == 0) return {false, false, "no undesirable predictions in the toy data"};

  // Plot data files through the CLI pipeline.
  svmcf::testing::TempDir tmp("accept_toy");
  {
    std::ofstream csv(tmp.str("data.csv"));
    csv << svmcf::testing::csv_of(data);
    std::ofstream schema_file(tmp.str("schema.json"));
    schema_file << svmcf::testing::schema_json(schema);
  }
  RunConfig cfg;
  cfg.command = "train";
  cfg.data_path = tmp.str("data.csv");
  cfg.schema_path = tmp.str("schema.json");
  cfg.out_dir = tmp.str("out");
  cfg.model_path = tmp.str("out/model.json");
  cfg.train_C = 10.0;
  run_command(cfg);
  cfg.command = "bench";
  cfg.methods = {"plain", "nearest_sv"};
  cfg.plot_data = true;
  run_command(cfg);
  if (!fs::exists(tmp.str("out/bench_instances.csv")) ||
      !fs::exists(tmp.str("out/bench_points.csv")))
    return {false, false, "plot-data files missing"};
  std::ifstream plot(tmp.str("out/bench_instances.csv"));
  std::string line;
  int rows = 0;
  while (std::getline(plot, line)) ++rows;
  if (rows != 1 + explained * 2)
    return {false, false,
            "plot file has " + std::to_string(rows) + " rows, expected " +
                std::to_string(1 + explained * 2)};
  return {true, false,
          std::to_string(explained) + " counterfactuals on the margin; plot data emitted"};
}

Outcome criterion_diabetes() {
  std::string path = pima_path;
  if (path.empty()) {
    const char* env = std::getenv("SVMCF_PIMA_CSV");
    if (env != nullptr) path = env;
  }
  if (path.empty() && fs::exists("data/pima.csv")) path = "data/pima.csv";
  if (path.empty() || !fs::exists(path))
    return {true, true, "diabetes dataset not present (pass --pima or set SVMCF_PIMA_CSV)"};

  const std::string schema_text = R"({
    "label": "Outcome",
    "features": [
      {"name": "Pregnancies", "weight": "inf"},
      {"name": "Glucose", "lower": 0},
      {"name": "BloodPressure", "lower": 0},
      {"name": "SkinThickness", "weight": "inf"},
      {"name": "Insulin", "lower": 0},
      {"name": "BMI", "lower": 0},
      {"name": "DiabetesPedigreeFunction", "weight": "inf"},
      {"name": "Age", "weight": "inf"}
    ]
  })";
  const FeatureSchema schema = FeatureSchema::from_json_text(schema_text);
  LoadOptions opts;
  opts.coerce_01_labels = true;
  const Dataset data = load_dataset_file(path, schema, opts);
  const LinearSVM model = train_svm(data);

  const int glucose = schema.index_of("Glucose");
  const int bmi = schema.index_of("BMI");
  double sum_glucose = 0.0, sum_bmi = 0.0;
  int cohort = 0, infeasible = 0;
  for (int r = 0; r < data.n_rows(); ++r) {
    if (predict(model, data.row(r)) != 1) continue;  // positive = at risk
    ++cohort;
    CounterfactualQuery q;
    q.x = data.row(r);
    q.y = 1;  // flip to the healthy side
    try {
      const Counterfactual cf = explain(q, model, schema);
      sum_glucose += cf.delta[glucose];
      sum_bmi += cf.delta[bmi];
    } catch (const InfeasibleError&) {
      ++infeasible;
    }
  }
  if (cohort == 0) return {false, false, "no positive-predicted rows in the dataset"};
  const int ok = cohort - infeasible;
  if (ok == 0) return {false, false, "every cohort instance was infeasible"};
  const double mean_glucose = sum_glucose / ok;
  const double mean_bmi = sum_bmi / ok;
  std::ostringstream d;
  d << "cohort " << cohort << ": mean dGlucose " << mean_glucose << ", mean dBMI " << mean_bmi;
  if (mean_glucose < 0.0 && mean_bmi < 0.0) return {true, false, d.str()};
  return {false, false, d.str() + " (expected both negative)"};
}

Outcome criterion_planted_bias() {
  // LSAT-style synthetic cohort: gpa, lsat, and a five-way group feature
  // whose first category is favored by the generating rule.
  std::mt19937_64 rng(1111);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_int_distribution<int> race(0, 4);
  const int N = 1000;
  const FeatureSchema schema = [&] {
    std::vector<FeatureSpec> specs;
    specs.push_back({"gpa", FeatureKind::Continuous, "", 0.0, 4.0, 1.0});
    specs.push_back({"lsat", FeatureKind::Continuous, "", 0.0, 60.0, 1.0});
    const char* cats[] = {"white", "black", "hispanic", "other", "asian"};
    for (const char* c : cats)
      specs.push_back({std::string("race_") + c, FeatureKind::OneHot, "race", 0.0, 1.0, 1.0});
    return FeatureSchema(specs, "pass_bar");
  }();

  Eigen::MatrixXd rows(N, 7);
  std::vector<int> labels(N);
  for (int r = 0; r < N; ++r) {
    const double gpa = std::min(4.0, std::max(0.0, 3.0 + 0.4 * g(rng)));
    const double lsat = std::min(60.0, std::max(0.0, 35.0 + 8.0 * g(rng)));
    const int cat = race(rng);
    rows(r, 0) = gpa;
    rows(r, 1) = lsat;
    for (int m = 0; m < 5; ++m) rows(r, 2 + m) = (m == cat) ? 1.0 : 0.0;
    // Known group-dependent rule: the first category gets a bonus.
    const double score = 1.2 * (gpa - 3.0) / 0.4 + 0.8 * (lsat - 35.0) / 8.0 +
                         1.5 * (cat == 0 ? 1.0 : 0.0) - 0.4;
    labels[r] = score >= 0.0 ? 1 : -1;
  }
  const Dataset data(schema, rows, labels);
  TrainConfig tc;
  tc.C = 5.0;
  const LinearSVM model = train_svm(data, tc);

  ExplainContext ctx;
  ctx.model = &model;
  ctx.schema = &schema;
  const CovarianceModel cov = CovarianceModel::fit(data);
  ctx.cov = &cov;
  const CohortExplainResult cohort = cohort_explain(data, ctx, 1, Variant::Correlated);
  if (cohort.rows.empty()) return {false, false, "no predicted-fail students"};
  AuditReport report = aggregate_changes(cohort, schema);
  attach_attribution(report, model, data, cohort.rows);

  double advantaged = 0.0;
  for (const CategoricalChange& ch : report.categorical)
    if (ch.name == "race_white") advantaged = ch.signed_percent;
  std::ostringstream d;
  d << "cohort " << cohort.rows.size() << ", signed percentage for the advantaged group "
    << advantaged << "%";
  if (advantaged > 0.0) return {true, false, d.str()};
  return {false, false, d.str() + " (expected positive)"};
}

// Contents of every regular file under a directory, keyed by relative path.
std::map<std::string, std::string> snapshot_dir(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    out[fs::relative(e.path(), dir).string()] = ss.str();
  }
  return out;
}

Outcome criterion_determinism() {
  svmcf::testing::TempDir tmp("accept_det");
  const Dataset data = svmcf::testing::two_gaussians(40, 1212, 6.0);
  {
    std::ofstream csv(tmp.str("data.csv"));
    csv << svmcf::testing::csv_of(data);
    std::ofstream schema_file(tmp.str("schema.json"));
    schema_file << svmcf::testing::schema_json(data.schema());
  }

  const std::vector<std::vector<std::string>> commands = {
      {"train", "--C", "10"},
      {"explain", "--trials", "200"},
      {"bench", "--methods", "plain,correlated,sparse,nearest_sv", "--plot-data"},
      {"audit"},
  };

  for (const auto& cmd : commands) {
    const std::string out_dir = tmp.str("out_" + cmd[0]);
    auto run_once = [&]() -> std::string {  // empty on success, else error
      if (!cli_path.empty()) {
        std::ostringstream sh;
        sh << "'" << cli_path << "'";
        for (const std::string& arg : cmd) sh << " " << arg;
        sh << " --data '" << tmp.str("data.csv") << "'"
           << " --schema '" << tmp.str("schema.json") << "'"
           << " --out '" << out_dir << "'"
           << " --seed 777";
        if (cmd[0] != "train") sh << " --model '" << tmp.str("out_train") << "/model.json'";
        const int rc = std::system(sh.str().c_str());
        if (rc != 0)
          return "CLI command '" + cmd[0] + "' exited with " + std::to_string(rc);
      } else {
        RunConfig cfg;
        cfg.command = cmd[0];
        cfg.data_path = tmp.str("data.csv");
        cfg.schema_path = tmp.str("schema.json");
        cfg.out_dir = out_dir;
        cfg.seed = 777;
        cfg.train_C = 10.0;
        cfg.trials = 200;
        cfg.plot_data = true;
        cfg.methods = {"plain", "correlated", "sparse", "nearest_sv"};
        if (cfg.command == "audit") cfg.variant = "correlated";
        if (cfg.command != "train") cfg.model_path = tmp.str("out_train") + "/model.json";
        run_command(cfg);
      }
      return "";
    };

    // Identical command, rerun into the same output directory.
    if (const std::string err = run_once(); !err.empty()) return {false, false, err};
    const auto first = snapshot_dir(out_dir);
    if (const std::string err = run_once(); !err.empty()) return {false, false, err};
    const auto second = snapshot_dir(out_dir);
    if (first != second) {
      std::string why = "file sets differ";
      for (const auto& [rel, content] : first) {
        const auto it = second.find(rel);
        if (it == second.end() || it->second != content) {
          why = "content differs: " + rel;
          break;
        }
      }
      return {false, false, "command '" + cmd[0] + "' is not byte-deterministic: " + why};
    }
  }
  return {true, false,
          std::string("train/explain/bench/audit reruns byte-identical") +
              (cli_path.empty() ? " (in-process; pass --cli for the binary)" : "")};
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string flag = argv[i];
    if (flag == "--cli") cli_path = argv[i + 1];
    if (flag == "--pima") pima_path = argv[i + 1];
  }

  run_criterion("1. validity on 500 random mixed queries", 30.0, criterion_validity);
  run_criterion("2. projection-oracle equivalence (500 continuous)", 10.0,
                criterion_projection);
  run_criterion("3. MIP-oracle equivalence (200 instances, <=12 binaries)", 60.0,
                criterion_mip_oracle);
  run_criterion("4. stability guarantee (1000-sample balls)", 0.0, criterion_stability);
  run_criterion("5. cost-function laws", 5.0, criterion_cost_laws);
  run_criterion("6. variant coherence (identity covariance, inactive epsilon)", 0.0,
                criterion_variant_coherence);
  run_criterion("7. sparsity dominance and L1 oracle (200 instances)", 0.0,
                criterion_sparsity);
  run_criterion("8. attribution completeness (1000 instances)", 0.0, criterion_attribution);
  run_criterion("9. toy-experiment margin reproduction (200 points)", 5.0,
                criterion_toy_margin);
  run_criterion("10. diabetes directional check", 0.0, criterion_diabetes);
  run_criterion("11. planted-bias audit (1000 rows)", 30.0, criterion_planted_bias);
  run_criterion("12. CLI determinism", 0.0, criterion_determinism);

  if (failures > 0) {
    std::cout << failures << " criterion(s) failed" << std::endl;
    return 1;
  }
  std::cout << "all criteria passed" << std::endl;
  return 0;
}
