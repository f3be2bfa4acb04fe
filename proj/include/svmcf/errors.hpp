#pragma once

#include <stdexcept>

namespace svmcf {

// Error categories map one-to-one onto the CLI's machine-greppable failure
// classes (see tools/main.cpp).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ModelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Certified infeasibility of a counterfactual program, with a human-readable
// cause ("epsilon too small", "margin unreachable within bounds", ...).
struct InfeasibleError : SolveError {
  using SolveError::SolveError;
};

}  // namespace svmcf
