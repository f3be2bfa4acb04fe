#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "svmcf/cli.hpp"
#include "svmcf/errors.hpp"

namespace {

void add_common(CLI::App* cmd, svmcf::RunConfig& cfg) {
  cmd->add_option("--data", cfg.data_path, "dataset file (delimiter-separated, header row)");
  cmd->add_option("--schema", cfg.schema_path, "feature schema JSON");
  cmd->add_option("--model", cfg.model_path, "model file");
  cmd->add_option("--out", cfg.out_dir, "output directory");
  cmd->add_option("--seed", cfg.seed, "run seed (default 12345)");
  cmd->add_option("--delimiter", cfg.delimiter, "cell delimiter (default ,)");
  cmd->add_flag("--labels-01", cfg.coerce_01_labels, "accept {0,1} labels, mapping 0 to -1");
  cmd->set_config("--config");
}

void add_query_options(CLI::App* cmd, svmcf::RunConfig& cfg) {
  cmd->add_option("--variant", cfg.variant,
                  "plain | correlated | plausible | sparse | sparse_correlated");
  cmd->add_option("--target-label", cfg.target_label, "desired class (+1 or -1)")
      ->check(CLI::IsMember({1, -1}));
  cmd->add_option("--epsilon", [&cfg](const CLI::results_t& r) {
        cfg.epsilon = std::stod(r[0]);
        return true;
      }, "plausibility radius (default: one std per feature)");
  cmd->add_option("--shrinkage", [&cfg](const CLI::results_t& r) {
        cfg.shrinkage = std::stod(r[0]);
        return true;
      }, "covariance shrinkage lambda (default: auto)");
  cmd->add_option("--weights", cfg.weights_path, "JSON weight overrides per feature");
  cmd->add_option("--freeze", cfg.freeze, "feature names to freeze")->delimiter(',');
  cmd->add_option("--mip-gap", cfg.mip_gap, "absolute MIP gap (default 1e-6)");
  cmd->add_flag("--dump-programs", cfg.dump_programs, "dump solved programs as text");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"counterfactual explanations for linear SVM models"};
  app.require_subcommand(1);

  svmcf::RunConfig cfg;

  CLI::App* train = app.add_subcommand("train", "train and save a linear SVM");
  add_common(train, cfg);
  train->add_option("--C", cfg.train_C, "hinge penalty (default 1.0)");
  train->add_option("--epochs", cfg.train_epochs, "training epoch budget");
  train->add_option("--tol", cfg.train_tol, "dual KKT tolerance");

  CLI::App* explain = app.add_subcommand("explain", "explain selected instances");
  add_common(explain, cfg);
  add_query_options(explain, cfg);
  explain->add_option("--instances", cfg.instances, "cohort | all | comma-separated row ids");
  explain->add_option("--trials", cfg.trials, "stability sampling trials per instance");

  CLI::App* bench = app.add_subcommand("bench", "compare explanation methods on a cohort");
  add_common(bench, cfg);
  add_query_options(bench, cfg);
  bench->add_option("--methods", cfg.methods,
                    "methods among plain, correlated, plausible, sparse, "
                    "sparse_correlated, nearest_sv")
      ->delimiter(',');
  bench->add_flag("--plot-data", cfg.plot_data, "emit per-instance plot columns");
  bench->add_flag("--f3-class-filter", cfg.f3_class_filter,
                  "restrict f3 candidates to the target class");

  CLI::App* audit = app.add_subcommand("audit", "cohort bias audit");
  add_common(audit, cfg);
  add_query_options(audit, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  cfg.command = app.get_subcommands().front()->get_name();
  if (cfg.command == "audit" && !audit->count("--variant")) cfg.variant = "correlated";

  try {
    svmcf::run_command(cfg);
  } catch (const svmcf::ConfigError& e) {
    std::cerr << "error: config: " << e.what() << "\n";
    return 1;
  } catch (const svmcf::DataError& e) {
    std::cerr << "error: data: " << e.what() << "\n";
    return 1;
  } catch (const svmcf::ModelError& e) {
    std::cerr << "error: model: " << e.what() << "\n";
    return 1;
  } catch (const svmcf::InfeasibleError& e) {
    std::cerr << "error: infeasible: " << e.what() << "\n";
    return 1;
  } catch (const svmcf::SolveError& e) {
    std::cerr << "error: solve: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: usage: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
