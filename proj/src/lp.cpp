#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "svmcf/errors.hpp"
#include "solvers_internal.hpp"

namespace svmcf::detail {

namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();
constexpr double kPivTol = 1e-9;
constexpr double kCostTol = 1e-9;

enum class VarState { Basic, AtLower, AtUpper, Free };

// Tableau-free bounded simplex working on the extended system
// [M | I] (structurals then one artificial per row). The basis is
// refactorized every iteration; problems here are small.
struct Simplex {
  const Eigen::MatrixXd& M;
  const Eigen::VectorXd& q;
  int m, nv, total;
  Eigen::VectorXd lb, ub, cost, val;
  std::vector<VarState> state;
  std::vector<int> basis;   // row -> variable
  long iterations = 0;
  long max_iter;

  Simplex(const Eigen::MatrixXd& M_, const Eigen::VectorXd& q_, const Eigen::VectorXd& lb_,
          const Eigen::VectorXd& ub_, long max_iter_)
      : M(M_), q(q_), m(static_cast<int>(M_.rows())), nv(static_cast<int>(M_.cols())),
        total(nv + m), lb(total), ub(total), cost(Eigen::VectorXd::Zero(total)),
        val(Eigen::VectorXd::Zero(total)), state(total, VarState::AtLower),
        basis(m), max_iter(max_iter_) {
    lb.head(nv) = lb_;
    ub.head(nv) = ub_;
    for (int j = 0; j < nv; ++j) {
      if (std::isfinite(lb[j])) {
        val[j] = lb[j];
        state[j] = VarState::AtLower;
      } else if (std::isfinite(ub[j])) {
        val[j] = ub[j];
        state[j] = VarState::AtUpper;
      } else {
        val[j] = 0.0;
        state[j] = VarState::Free;
      }
    }
    const Eigen::VectorXd r = q - M * val.head(nv);
    for (int i = 0; i < m; ++i) {
      const int a = nv + i;
      val[a] = r[i];
      if (r[i] >= 0.0) {
        lb[a] = 0.0;
        ub[a] = kInfinity;
        cost[a] = 1.0;
      } else {
        lb[a] = -kInfinity;
        ub[a] = 0.0;
        cost[a] = -1.0;
      }
      state[a] = VarState::Basic;
      basis[i] = a;
    }
  }

  Eigen::VectorXd column(int j) const {
    if (j < nv) return M.col(j);
    Eigen::VectorXd e = Eigen::VectorXd::Zero(m);
    e[j - nv] = 1.0;
    return e;
  }

  bool fixed(int j) const { return lb[j] == ub[j]; }

  Eigen::MatrixXd basis_matrix() const {
    Eigen::MatrixXd B(m, m);
    for (int i = 0; i < m; ++i) B.col(i) = column(basis[i]);
    return B;
  }

  // Recomputes basic values from the nonbasic ones.
  void refresh_basics(const Eigen::FullPivLU<Eigen::MatrixXd>& lu) {
    Eigen::VectorXd rhs = q;
    for (int j = 0; j < total; ++j)
      if (state[j] != VarState::Basic && val[j] != 0.0) rhs -= column(j) * val[j];
    const Eigen::VectorXd xb = lu.solve(rhs);
    for (int i = 0; i < m; ++i) val[basis[i]] = xb[i];
  }

  // One simplex phase; returns Optimal or Unbounded.
  SimplexResult::Status run() {
    for (;;) {
      if (++iterations > max_iter)
        throw SolveError("lp: iteration limit reached (numerical breakdown?)");
      Eigen::MatrixXd B = basis_matrix();
      Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
      if (m > 0 && !lu.isInvertible())
        throw SolveError("lp: singular basis (numerical breakdown)");
      refresh_basics(lu);

      Eigen::VectorXd cb(m);
      for (int i = 0; i < m; ++i) cb[i] = cost[basis[i]];
      const Eigen::VectorXd y =
          m > 0 ? Eigen::VectorXd(Eigen::FullPivLU<Eigen::MatrixXd>(B.transpose()).solve(cb))
                : Eigen::VectorXd(0);

      // Bland: lowest-index improving nonbasic column.
      int enter = -1;
      double dir = 0.0;
      for (int j = 0; j < total; ++j) {
        if (state[j] == VarState::Basic || fixed(j)) continue;
        const double dj = cost[j] - (m > 0 ? y.dot(column(j)) : 0.0);
        if ((state[j] == VarState::AtLower || state[j] == VarState::Free) && dj < -kCostTol) {
          enter = j;
          dir = 1.0;
          break;
        }
        if ((state[j] == VarState::AtUpper || state[j] == VarState::Free) && dj > kCostTol) {
          enter = j;
          dir = -1.0;
          break;
        }
      }
      if (enter < 0) return SimplexResult::Status::Optimal;

      const Eigen::VectorXd w = m > 0 ? Eigen::VectorXd(lu.solve(column(enter)))
                                      : Eigen::VectorXd(0);

      // Ratio test: blocking limit of each basic variable, plus the entering
      // variable's own range (a bound flip).
      auto block = [&](int i) -> std::pair<double, bool> {  // (limit, hits upper)
        const double g = dir * w[i];
        const int v = basis[i];
        if (g > kPivTol && std::isfinite(lb[v]))
          return {std::max((val[v] - lb[v]) / g, 0.0), false};
        if (g < -kPivTol && std::isfinite(ub[v]))
          return {std::max((ub[v] - val[v]) / (-g), 0.0), true};
        return {kInfinity, false};
      };

      double tmin = kInfinity;
      for (int i = 0; i < m; ++i) tmin = std::min(tmin, block(i).first);

      const double trange = (std::isfinite(ub[enter]) && std::isfinite(lb[enter]))
                                ? ub[enter] - lb[enter]
                                : kInfinity;
      double t;
      int leave = -1;  // basis position, -1 for a bound flip
      bool leave_at_upper = false;
      if (trange <= tmin) {
        t = trange;
      } else {
        t = tmin;
        // Bland: among blocking basics at the minimum ratio, the lowest
        // variable index leaves.
        int best_var = std::numeric_limits<int>::max();
        for (int i = 0; i < m; ++i) {
          const auto [cand, to_upper] = block(i);
          if (cand <= tmin + 1e-12 && basis[i] < best_var) {
            best_var = basis[i];
            leave = i;
            leave_at_upper = to_upper;
          }
        }
      }

      if (!std::isfinite(t)) return SimplexResult::Status::Unbounded;

      // Apply the step.
      val[enter] += dir * t;
      for (int i = 0; i < m; ++i) val[basis[i]] -= dir * t * w[i];
      if (leave < 0) {
        // Bound flip, basis unchanged.
        state[enter] = dir > 0 ? VarState::AtUpper : VarState::AtLower;
        val[enter] = dir > 0 ? ub[enter] : lb[enter];
      } else {
        const int out = basis[leave];
        state[out] = leave_at_upper ? VarState::AtUpper : VarState::AtLower;
        val[out] = leave_at_upper ? ub[out] : lb[out];
        basis[leave] = enter;
        state[enter] = VarState::Basic;
      }
    }
  }
};

}  // namespace

SimplexResult solve_lp_simplex(const Eigen::VectorXd& c, const Eigen::MatrixXd& M,
                               const Eigen::VectorXd& q, const Eigen::VectorXd& lb,
                               const Eigen::VectorXd& ub, long max_iter) {
  const int m = static_cast<int>(M.rows());
  const int nv = static_cast<int>(M.cols());
  SimplexResult out;

  // Pure bound minimization when there are no rows.
  if (m == 0) {
    out.x = Eigen::VectorXd::Zero(nv);
    for (int j = 0; j < nv; ++j) {
      if (c[j] > 0.0) {
        if (!std::isfinite(lb[j])) {
          out.status = SimplexResult::Status::Unbounded;
          return out;
        }
        out.x[j] = lb[j];
      } else if (c[j] < 0.0) {
        if (!std::isfinite(ub[j])) {
          out.status = SimplexResult::Status::Unbounded;
          return out;
        }
        out.x[j] = ub[j];
      } else {
        out.x[j] = std::isfinite(lb[j]) ? lb[j] : (std::isfinite(ub[j]) ? ub[j] : 0.0);
      }
    }
    out.status = SimplexResult::Status::Optimal;
    out.row_dual = Eigen::VectorXd(0);
    out.red_cost = c;
    return out;
  }

  Simplex s(M, q, lb, ub, max_iter);

  // Phase 1: minimize the artificial infeasibility.
  if (s.run() != SimplexResult::Status::Optimal)
    throw SolveError("lp: phase-1 unbounded (internal error)");
  double infeas = 0.0;
  for (int a = s.nv; a < s.total; ++a) infeas += std::abs(s.val[a]);
  const double scale = 1.0 + q.cwiseAbs().maxCoeff();
  if (infeas > 1e-7 * scale) {
    out.status = SimplexResult::Status::Infeasible;
    out.iterations = s.iterations;
    return out;
  }

  // Drive basic artificials out where a structural column can replace them;
  // rows that admit none are redundant and keep a fixed artificial at zero.
  {
    Eigen::MatrixXd B = s.basis_matrix();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(B.transpose());
    for (int i = 0; i < m; ++i) {
      if (s.basis[i] < s.nv) continue;
      Eigen::VectorXd e = Eigen::VectorXd::Zero(m);
      e[i] = 1.0;
      const Eigen::VectorXd v = lu.solve(e);           // row i of B^-1
      const Eigen::VectorXd row = M.transpose() * v;   // over structurals
      int replacement = -1;
      for (int j = 0; j < s.nv; ++j) {
        if (s.state[j] == VarState::Basic) continue;
        if (std::abs(row[j]) > 1e-7) {
          replacement = j;
          break;
        }
      }
      if (replacement >= 0) {
        const int art = s.basis[i];
        s.basis[i] = replacement;
        s.state[replacement] = VarState::Basic;
        s.state[art] = VarState::AtLower;
        s.val[art] = 0.0;
        B = s.basis_matrix();
        lu.compute(B.transpose());
      }
    }
  }

  // Freeze artificials and switch to the real objective.
  for (int a = s.nv; a < s.total; ++a) {
    s.lb[a] = 0.0;
    s.ub[a] = 0.0;
    s.cost[a] = 0.0;
    if (s.state[a] != VarState::Basic) s.val[a] = 0.0;
  }
  s.cost.head(s.nv) = c;

  const SimplexResult::Status st = s.run();
  out.iterations = s.iterations;
  if (st == SimplexResult::Status::Unbounded) {
    out.status = SimplexResult::Status::Unbounded;
    return out;
  }

  // Final duals and reduced costs for KKT reporting.
  Eigen::MatrixXd B = s.basis_matrix();
  Eigen::VectorXd cb(m);
  for (int i = 0; i < m; ++i) cb[i] = s.cost[s.basis[i]];
  out.row_dual = Eigen::FullPivLU<Eigen::MatrixXd>(B.transpose()).solve(cb);
  out.red_cost = Eigen::VectorXd(s.nv);
  for (int j = 0; j < s.nv; ++j) out.red_cost[j] = c[j] - out.row_dual.dot(M.col(j));
  out.x = s.val.head(s.nv);
  out.status = SimplexResult::Status::Optimal;
  return out;
}

}  // namespace svmcf::detail
