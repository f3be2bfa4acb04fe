#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <limits>
#include <optional>
#include <vector>

#include "svmcf/errors.hpp"

namespace svmcf {

/// Standard form:
///   min 1/2 x'Qx + c'x + constant
///   s.t. A x <= b,  E x = d,  lower <= x <= upper,
///        x_j binary where integral[j] is set.
/// Q symmetric PSD; an all-zero Q makes this a linear program. Integral
/// variables must be bounded inside [0,1] (they are one-hot indicators here).
struct MixedIntegerProgram {
  Eigen::MatrixXd Q;
  Eigen::VectorXd c;
  double constant = 0.0;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::MatrixXd E;
  Eigen::VectorXd d;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  std::vector<char> integral;

  int num_vars() const { return static_cast<int>(c.size()); }
  /// Throws std::invalid_argument on inconsistent dimensions, asymmetric or
  /// indefinite Q, or non-finite constraint rows.
  void validate() const;
};

struct SolverConfig {
  double feasibility_tol = 1e-8;
  double optimality_tol = 1e-8;
  double mip_gap_abs = 1e-6;
  long max_nodes = 100000;
  long max_iter = 50000;  // per relaxation
  double time_limit = std::numeric_limits<double>::infinity();  // seconds
};

enum class SolveStatus { Optimal, Infeasible, NodeLimit, TimeLimit };

const char* to_string(SolveStatus s);

/// Multipliers for a continuous solve, in the sign convention
///   Qx + c + A'ineq + E'eq - lower + upper = 0,  ineq/lower/upper >= 0.
struct DualSolution {
  Eigen::VectorXd ineq;
  Eigen::VectorXd eq;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

struct SolveResult {
  SolveStatus status = SolveStatus::Infeasible;
  Eigen::VectorXd x;
  double objective = std::numeric_limits<double>::infinity();
  double gap = 0.0;
  long nodes = 0;
  std::vector<int> binding_rows;         // inequality rows active at x
  std::optional<DualSolution> duals;     // continuous solves only
};

/// Continuous relaxation (integrality ignored). Strictly convex Q is solved
/// by a dual active-set method, Q = 0 by a bounded-variable simplex; a
/// singular nonzero Q is rejected. Throws SolveError on unbounded programs
/// or numerical breakdown.
SolveResult solve_relaxation(const MixedIntegerProgram& p, const SolverConfig& cfg = {});

/// Best-first branch and bound on the relaxation. Node selection: lowest
/// bound, then greatest depth, then lowest node id; branching on the most
/// fractional binary, ties to the lowest index. Integral incumbents are
/// re-solved with their binaries fixed, so returned binaries are exact.
SolveResult solve_mip(const MixedIntegerProgram& p, const SolverConfig& cfg = {});

/// Exhaustive enumeration over all binary assignments (test oracle only).
/// Throws on more than 20 binaries.
SolveResult brute_force_mip(const MixedIntegerProgram& p, const SolverConfig& cfg = {});

/// Max-norm of the KKT stationarity residual of a continuous solve; requires
/// result.duals.
double kkt_stationarity_residual(const MixedIntegerProgram& p, const SolveResult& result);

/// Plain-text dump (objective, constraint rows) for external cross-checking.
void dump_program(const MixedIntegerProgram& p, std::ostream& out);

}  // namespace svmcf
