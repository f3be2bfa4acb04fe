#include "svmcf/cli.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "svmcf/audit.hpp"
#include "svmcf/counterfactual.hpp"
#include "svmcf/dataset.hpp"
#include "svmcf/evaluate.hpp"
#include "svmcf/model.hpp"
#include "svmcf/optim.hpp"

namespace svmcf {

namespace {

namespace fs = std::filesystem;

nlohmann::json config_echo(const RunConfig& c) {
  nlohmann::json j;
  j["command"] = c.command;
  j["data"] = c.data_path;
  j["schema"] = c.schema_path;
  j["model"] = c.model_path;
  j["out"] = c.out_dir;
  j["variant"] = c.variant;
  j["methods"] = c.methods;
  j["instances"] = c.instances;
  j["target_label"] = c.target_label;
  if (c.epsilon) j["epsilon"] = *c.epsilon;
  j["shrinkage"] = c.shrinkage ? nlohmann::json(*c.shrinkage) : nlohmann::json("auto");
  j["weights"] = c.weights_path;
  j["freeze"] = c.freeze;
  j["seed"] = c.seed;
  j["mip_gap"] = c.mip_gap;
  j["trials"] = c.trials;
  j["delimiter"] = c.delimiter;
  j["coerce_01_labels"] = c.coerce_01_labels;
  j["plot_data"] = c.plot_data;
  j["dump_programs"] = c.dump_programs;
  j["f3_class_filter"] = c.f3_class_filter;
  j["train_C"] = c.train_C;
  j["train_epochs"] = c.train_epochs;
  j["train_tol"] = c.train_tol;
  return j;
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

char delimiter_of(const RunConfig& c) {
  require(c.delimiter.size() == 1, "config: delimiter must be a single character");
  return c.delimiter[0];
}

fs::path ensure_out_dir(const RunConfig& c) {
  require(!c.out_dir.empty(), "config: --out directory is required");
  fs::create_directories(c.out_dir);
  return fs::path(c.out_dir);
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open output file '" + path.string() + "'");
  out << content;
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

Dataset load_data(const RunConfig& c, const FeatureSchema& schema) {
  require(!c.data_path.empty(), "config: --data path is required");
  LoadOptions opts;
  opts.delimiter = delimiter_of(c);
  opts.coerce_01_labels = c.coerce_01_labels;
  return load_dataset_file(c.data_path, schema, opts);
}

FeatureSchema load_schema(const RunConfig& c) {
  require(!c.schema_path.empty(), "config: --schema path is required");
  return FeatureSchema::from_file(c.schema_path);
}

// Schema defaults, overridden by the weights file, overridden by --freeze.
// In audit mode freezing is ignored (the point is to watch every feature).
std::vector<double> resolve_cli_weights(const RunConfig& c, const FeatureSchema& schema,
                                        bool audit_mode) {
  std::vector<double> w = schema.default_weights();
  if (!c.weights_path.empty()) {
    std::ifstream in(c.weights_path);
    if (!in) throw ConfigError("weights: cannot open '" + c.weights_path + "'");
    nlohmann::json doc;
    try {
      in >> doc;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("weights: invalid JSON: ") + e.what());
    }
    for (const auto& [name, value] : doc.items()) {
      const int i = schema.index_of(name);
      if (i < 0) throw ConfigError("weights: unknown feature '" + name + "'");
      if (value.is_number()) {
        w[i] = value.get<double>();
      } else if (value.is_string() && (value == "inf" || value == "+inf" || value == "Infinity")) {
        w[i] = kInf;
      } else {
        throw ConfigError("weights: feature '" + name + "' needs a number or \"inf\"");
      }
      if (!(w[i] > 0.0)) throw ConfigError("weights: feature '" + name + "' must be positive");
    }
  }
  for (const std::string& name : c.freeze) {
    const int i = schema.index_of(name);
    if (i < 0) throw ConfigError("freeze: unknown feature '" + name + "'");
    w[i] = kInf;
  }
  if (audit_mode) {
    for (int i = 0; i < schema.size(); ++i)
      if (std::isinf(w[i])) {
        const double fallback = schema.feature(i).weight;
        w[i] = std::isinf(fallback) ? 1.0 : fallback;
      }
  }
  return w;
}

SolverConfig solver_config(const RunConfig& c) {
  SolverConfig s;
  require(c.mip_gap > 0.0, "config: --mip-gap must be > 0");
  s.mip_gap_abs = c.mip_gap;
  return s;
}

std::string fmt6(double v) {
  std::ostringstream ss;
  ss.precision(6);
  ss << v;
  return ss.str();
}

// Assembled inputs shared by explain/bench/audit.
struct Loaded {
  FeatureSchema schema;
  Dataset data;
  LinearSVM model;
  std::vector<double> weights;
  EmpiricalDistribution dist;
  std::optional<CovarianceModel> cov;
  std::optional<ClassPrototypes> protos;
};

bool needs_covariance(const std::string& name) {
  return name == "correlated" || name == "sparse_correlated";
}

Loaded load_all(const RunConfig& c, const std::vector<std::string>& variants, bool audit_mode) {
  FeatureSchema schema = load_schema(c);
  Dataset data = load_data(c, schema);
  require(!c.model_path.empty(), "config: --model path is required");
  LinearSVM model = load_model(c.model_path);
  if (static_cast<int>(model.feature_names.size()) != schema.size())
    throw ModelError("model: feature count does not match the schema");
  for (int i = 0; i < schema.size(); ++i)
    if (model.feature_names[i] != schema.feature(i).name)
      throw ModelError("model: feature name mismatch at position " + std::to_string(i) +
                       " ('" + model.feature_names[i] + "' vs '" + schema.feature(i).name + "')");

  std::vector<double> weights = resolve_cli_weights(c, schema, audit_mode);
  EmpiricalDistribution dist = EmpiricalDistribution::fit(data);

  Loaded out{std::move(schema), std::move(data), std::move(model), std::move(weights),
             std::move(dist), std::nullopt, std::nullopt};
  bool want_cov = false, want_protos = false;
  for (const std::string& v : variants) {
    if (needs_covariance(v)) want_cov = true;
    if (v == "plausible") want_protos = true;
  }
  if (want_cov)
    out.cov = c.shrinkage ? CovarianceModel::fit(out.data, *c.shrinkage)
                          : CovarianceModel::fit(out.data);
  if (want_protos) out.protos = fit_prototypes(out.data);
  return out;
}

ExplainContext context_of(const Loaded& L, const RunConfig& c) {
  ExplainContext ctx;
  ctx.model = &L.model;
  ctx.schema = &L.schema;
  ctx.dist = &L.dist;
  ctx.cov = L.cov ? &*L.cov : nullptr;
  ctx.protos = L.protos ? &*L.protos : nullptr;
  ctx.solver = solver_config(c);
  return ctx;
}

std::vector<int> select_instances(const RunConfig& c, const Loaded& L) {
  std::vector<int> rows;
  if (c.instances == "all") {
    for (int r = 0; r < L.data.n_rows(); ++r) rows.push_back(r);
  } else if (c.instances == "cohort") {
    for (int r = 0; r < L.data.n_rows(); ++r)
      if (predict(L.model, L.data.row(r)) == -c.target_label) rows.push_back(r);
  } else {
    std::istringstream ss(c.instances);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      int v = 0;
      const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc() || ptr != tok.data() + tok.size() || v < 0 ||
          v >= L.data.n_rows())
        throw ConfigError("instances: bad row id '" + tok + "'");
      rows.push_back(v);
    }
  }
  return rows;
}

Variant parse_variant(const std::string& name) {
  const auto v = variant_from_name(name);
  if (!v)
    throw ConfigError("unknown variant '" + name +
                      "' (valid: plain, correlated, plausible, sparse, sparse_correlated)");
  return *v;
}

}  // namespace

void run_train(const RunConfig& cfg) {
  const fs::path out = ensure_out_dir(cfg);
  FeatureSchema schema = load_schema(cfg);
  Dataset data = load_data(cfg, schema);

  TrainConfig tc;
  tc.C = cfg.train_C;
  tc.max_epochs = cfg.train_epochs;
  tc.tolerance = cfg.train_tol;
  tc.seed = cfg.seed;
  LinearSVM model = train_svm(data, tc);

  save_model(model, (out / "model.json").string());

  const double acc = training_accuracy(model, data);
  const size_t sv_count = support_vectors(model, data, 1e-6).size();
  std::ostringstream txt;
  txt << "training summary\n";
  txt << "rows: " << data.n_rows() << "\n";
  txt << "coerced_labels: " << data.coerced_labels() << "\n";
  txt << "accuracy: " << fmt6(acc) << "\n";
  txt << "margin_scale_gamma: " << fmt6(model.gamma) << "\n";
  txt << "geometric_margin: " << fmt6(1.0 / model.w.norm()) << "\n";
  txt << "support_vectors: " << sv_count << "\n";
  txt << "config: " << config_echo(cfg).dump() << "\n";
  write_file(out / "train_summary.txt", txt.str());
}

void run_explain(const RunConfig& cfg) {
  const fs::path out = ensure_out_dir(cfg);
  const Loaded L = load_all(cfg, {cfg.variant}, false);
  const ExplainContext ctx = context_of(L, cfg);
  const Variant variant = parse_variant(cfg.variant);
  const std::vector<int> rows = select_instances(cfg, L);
  if (rows.empty()) throw DataError("explain: selector matched no instances");

  nlohmann::json all = nlohmann::json::array();
  for (const int r : rows) {
    const Eigen::VectorXd x = L.data.row(r);
    const int pred = predict(L.model, x);

    Counterfactual cf;
    std::string note;
    bool failed = false;
    if (pred == cfg.target_label) {
      // Already on the desired side: the counterfactual is the instance.
      cf.method = cfg.variant;
      cf.x_prime = x;
      cf.delta = Eigen::VectorXd::Zero(x.size());
      cf.objective = 0.0;
      cf.valid = cfg.target_label * decision_value(L.model, x) >= 1.0 - kValidityTol;
      cf.stability_radius = stability_radius(L.model, x);
      cf.solver = {SolveStatus::Optimal, 0, 0.0};
      note = "already predicted as the target label";
    } else {
      CounterfactualQuery q;
      q.x = x;
      q.y = pred;
      q.variant = variant;
      q.weights = L.weights;
      q.epsilon = cfg.epsilon;
      if (cfg.dump_programs) {
        std::ostringstream dump;
        dump_program(build_query_program(q, ctx), dump);
        write_file(out / ("program_row" + std::to_string(r) + ".txt"), dump.str());
      }
      try {
        cf = explain_query(q, ctx);
      } catch (const InfeasibleError& e) {
        failed = true;
        note = e.what();
      }
    }

    nlohmann::json entry;
    entry["row"] = r;
    entry["prediction"] = pred;
    entry["target"] = cfg.target_label;
    if (failed) {
      entry["failed"] = true;
      entry["reason"] = note;
      all.push_back(entry);
      std::ostringstream txt;
      txt << "row " << r << ": infeasible: " << note << "\n";
      write_file(out / ("explain_row" + std::to_string(r) + ".txt"), txt.str());
      continue;
    }

    entry["report"] = nlohmann::json::parse(counterfactual_report_json(cf, L.schema, x));
    if (!note.empty()) entry["note"] = note;
    if (cfg.trials > 0) {
      const StabilityReport sr = verify_stability(
          L.model, L.schema, cf.x_prime, 0.999 * cf.stability_radius, cfg.trials, cfg.seed);
      entry["stability_check"] = {{"radius", sr.radius},
                                  {"trials", sr.trials},
                                  {"fraction_retained", sr.fraction}};
    }
    all.push_back(entry);

    std::ostringstream txt;
    txt << "row " << r << "  method=" << cf.method << "  valid=" << (cf.valid ? "yes" : "no")
        << "\n";
    txt << "objective: " << fmt6(cf.objective) << "\n";
    txt << "stability_radius: " << fmt6(cf.stability_radius) << "\n";
    txt << "changed_features: " << cf.changed.size() << "\n";
    if (!note.empty()) txt << "note: " << note << "\n";
    txt << "\nFeature | Original | CF\n";
    for (int i = 0; i < L.schema.size(); ++i) {
      txt << L.schema.feature(i).name;
      if (std::isinf(L.weights[i])) txt << " (frozen)";
      txt << " | " << fmt6(x[i]) << " | " << fmt6(cf.x_prime[i]) << "\n";
    }
    write_file(out / ("explain_row" + std::to_string(r) + ".txt"), txt.str());
  }

  nlohmann::json doc;
  doc["config"] = config_echo(cfg);
  doc["reports"] = all;
  write_file(out / "explain.json", doc.dump(2) + "\n");
}

void run_bench(const RunConfig& cfg) {
  const fs::path out = ensure_out_dir(cfg);
  require(!cfg.methods.empty(), "bench: at least one method is required");
  for (const std::string& m : cfg.methods) {
    if (m != "nearest_sv") parse_variant(m);  // throws with the valid list
  }
  const Loaded L = load_all(cfg, cfg.methods, false);
  const ExplainContext ctx = context_of(L, cfg);

  std::vector<int> cohort;
  for (int r = 0; r < L.data.n_rows(); ++r)
    if (predict(L.model, L.data.row(r)) == -cfg.target_label) cohort.push_back(r);
  if (cohort.empty()) throw DataError("bench: empty cohort (no undesirable predictions)");

  std::vector<std::pair<std::string, MethodFn>> methods;
  for (const std::string& name : cfg.methods) {
    if (name == "nearest_sv") {
      methods.emplace_back(name, [&](int, const Eigen::VectorXd& x) {
        return nearest_support_vector(x, cfg.target_label, L.data, L.model, L.weights);
      });
    } else {
      const Variant v = parse_variant(name);
      methods.emplace_back(name, [&, v](int, const Eigen::VectorXd& x) {
        CounterfactualQuery q;
        q.x = x;
        q.y = -cfg.target_label;
        q.variant = v;
        q.weights = L.weights;
        q.epsilon = cfg.epsilon;
        return explain_query(q, ctx);
      });
    }
  }

  const CostReport report =
      benchmark(cohort, methods, L.data, L.dist,
                cfg.f3_class_filter ? std::optional<int>(cfg.target_label) : std::nullopt);

  std::ostringstream dsv;
  write_cost_report_dsv(report, dsv, delimiter_of(cfg));
  write_file(out / "bench_summary.csv", dsv.str());

  nlohmann::json doc = nlohmann::json::parse(cost_report_json(report));
  doc["config"] = config_echo(cfg);
  write_file(out / "bench_summary.json", doc.dump(2) + "\n");

  if (cfg.plot_data) {
    std::ostringstream plot;
    write_plot_data(report, plot, delimiter_of(cfg));
    write_file(out / "bench_instances.csv", plot.str());

    // Counterfactual coordinates for scatter plots.
    std::ostringstream pts;
    const char d = delimiter_of(cfg);
    pts << "instance" << d << "method" << d << "status";
    for (int i = 0; i < L.schema.size(); ++i) pts << d << L.schema.feature(i).name;
    pts << "\n";
    for (size_t k = 0; k < cohort.size(); ++k) {
      const Eigen::VectorXd x = L.data.row(cohort[k]);
      for (const auto& [name, fn] : methods) {
        pts << cohort[k] << d << name << d;
        try {
          const Counterfactual cf = fn(cohort[k], x);
          pts << "ok";
          for (int i = 0; i < L.schema.size(); ++i) pts << d << fmt6(cf.x_prime[i]);
        } catch (const std::exception&) {
          pts << "failed";
          for (int i = 0; i < L.schema.size(); ++i) pts << d;
        }
        pts << "\n";
      }
    }
    write_file(out / "bench_points.csv", pts.str());
  }
}

void run_audit(const RunConfig& cfg) {
  const fs::path out = ensure_out_dir(cfg);
  const Loaded L = load_all(cfg, {cfg.variant}, true);
  const ExplainContext ctx = context_of(L, cfg);
  const Variant variant = parse_variant(cfg.variant);

  const CohortExplainResult cohort =
      cohort_explain(L.data, ctx, cfg.target_label, variant, L.weights, cfg.epsilon);
  if (cohort.rows.empty()) throw DataError("audit: empty cohort (no undesirable predictions)");

  AuditReport report = aggregate_changes(cohort, L.schema);
  attach_attribution(report, L.model, L.data, cohort.rows);

  std::ostringstream dsv;
  dsv << "# audit: variant=" << cfg.variant
      << "; protected features are NOT frozen in audit mode\n";
  write_audit_report_dsv(report, dsv, delimiter_of(cfg));
  write_file(out / "audit.csv", dsv.str());

  nlohmann::json doc = nlohmann::json::parse(audit_report_json(report));
  doc["config"] = config_echo(cfg);
  write_file(out / "audit.json", doc.dump(2) + "\n");
}

void run_command(const RunConfig& cfg) {
  if (cfg.command == "train") return run_train(cfg);
  if (cfg.command == "explain") return run_explain(cfg);
  if (cfg.command == "bench") return run_bench(cfg);
  if (cfg.command == "audit") return run_audit(cfg);
  throw ConfigError("unknown command '" + cfg.command + "' (train, explain, bench, audit)");
}

}  // namespace svmcf
