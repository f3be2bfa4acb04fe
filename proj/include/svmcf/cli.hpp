#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace svmcf {

inline constexpr uint64_t kDefaultSeed = 12345;

/// Effective configuration of one CLI run. Commands are deterministic given
/// (inputs, seed, config); every output embeds this configuration.
struct RunConfig {
  std::string command;  // train | explain | bench | audit
  std::string data_path;
  std::string schema_path;
  std::string model_path;
  std::string out_dir;

  std::string variant = "plain";
  std::vector<std::string> methods = {"plain", "nearest_sv"};  // bench
  std::string instances = "cohort";  // explain selector: cohort | all | "i,j,k"
  int target_label = 1;              // desired class
  std::optional<double> epsilon;
  std::optional<double> shrinkage;   // nullopt = auto
  std::string weights_path;          // JSON weight overrides
  std::vector<std::string> freeze;   // feature names forced to +inf weight
  uint64_t seed = kDefaultSeed;
  double mip_gap = 1e-6;
  int trials = 0;                    // stability sampling per explained instance
  std::string delimiter = ",";
  bool coerce_01_labels = false;
  bool plot_data = false;
  bool dump_programs = false;
  bool f3_class_filter = false;      // restrict f3 candidates to the target class

  double train_C = 1.0;
  int train_epochs = 10000;
  double train_tol = 1e-3;
};

void run_train(const RunConfig& cfg);
void run_explain(const RunConfig& cfg);
void run_bench(const RunConfig& cfg);
void run_audit(const RunConfig& cfg);

/// Dispatches on cfg.command; throws ConfigError for unknown commands.
void run_command(const RunConfig& cfg);

}  // namespace svmcf
