#pragma once

#include <Eigen/Core>
#include <vector>

namespace svmcf::detail {

// Shared convention: constraint rows n_i' x >= b_i, the first meq rows being
// equalities (multiplier sign free, never dropped from the active set).

struct ActiveSetResult {
  bool feasible = false;
  Eigen::VectorXd x;
  std::vector<int> active;           // row ids
  std::vector<double> multipliers;   // aligned with active; >= 0 past meq
  long iterations = 0;
};

// Goldfarb-Idnani dual active-set method for strictly convex QP:
//   min 1/2 x'Gx + a'x  s.t.  N x >= b  (first meq rows equalities).
// Rows should be normalized to unit 2-norm by the caller. Throws SolveError
// on numerical breakdown; infeasibility is reported, not thrown.
ActiveSetResult solve_qp_gi(const Eigen::MatrixXd& G, const Eigen::VectorXd& a,
                            const Eigen::MatrixXd& N, const Eigen::VectorXd& b,
                            int meq, long max_iter);

struct SimplexResult {
  enum class Status { Optimal, Infeasible, Unbounded } status = Status::Infeasible;
  Eigen::VectorXd x;          // primal values (first nv entries meaningful)
  Eigen::VectorXd row_dual;   // y with B'y = c_B at the final basis
  Eigen::VectorXd red_cost;   // reduced costs c_j - y'M_j per structural var
  long iterations = 0;
};

// Two-phase bounded-variable primal simplex with Bland's rule:
//   min c'z  s.t.  M z = q,  lb <= z <= ub  (entries may be +-inf).
SimplexResult solve_lp_simplex(const Eigen::VectorXd& c, const Eigen::MatrixXd& M,
                               const Eigen::VectorXd& q, const Eigen::VectorXd& lb,
                               const Eigen::VectorXd& ub, long max_iter);

}  // namespace svmcf::detail
