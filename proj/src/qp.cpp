#include <Eigen/Cholesky>
#include <cmath>
#include <limits>

#include "svmcf/errors.hpp"
#include "solvers_internal.hpp"

namespace svmcf::detail {

namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Givens coefficients zeroing y into x (x <- hypot, y <- 0).
struct Givens {
  double c, s;
};

Givens make_givens(double x, double y) {
  const double h = std::hypot(x, y);
  if (h == 0.0) return {1.0, 0.0};
  return {x / h, y / h};
}

}  // namespace

// Implementation of the dual active-set method of Goldfarb and Idnani.
// Invariants maintained:
//   J = U^-1 rotated so that J'GJ = I and J' n_active = [R; 0] with R upper
//   triangular; x is the minimizer subject to the active rows; u holds their
//   multipliers.
ActiveSetResult solve_qp_gi(const Eigen::MatrixXd& G, const Eigen::VectorXd& a,
                            const Eigen::MatrixXd& N, const Eigen::VectorXd& b,
                            int meq, long max_iter) {
  const int n = static_cast<int>(a.size());
  const int m = static_cast<int>(N.rows());

  Eigen::LLT<Eigen::MatrixXd> llt(G);
  if (llt.info() != Eigen::Success)
    throw SolveError("qp: quadratic term is not positive definite");

  Eigen::MatrixXd J = llt.matrixU().solve(Eigen::MatrixXd::Identity(n, n));
  Eigen::VectorXd x = llt.solve(-a);

  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(n, n);
  std::vector<int> active;
  std::vector<double> u;
  std::vector<double> row_sign(m, 1.0);  // equalities may be flipped
  int q = 0;
  int n_eq_active = 0;  // equalities occupy the first positions of `active`

  ActiveSetResult result;
  result.x = x;

  const double viol_tol = 1e-10;
  const double dep_tol = 1e-11;

  auto row = [&](int p) -> Eigen::VectorXd { return row_sign[p] * N.row(p).transpose(); };
  auto rhs = [&](int p) { return row_sign[p] * b[p]; };
  auto residual = [&](int p) { return row(p).dot(x) - rhs(p); };

  // Appends the (rotated) row with steps d = J' n_p to the active set.
  auto add_constraint = [&](Eigen::VectorXd& d, int p, double u_plus) {
    for (int k = n - 1; k > q; --k) {
      if (d[k] == 0.0) continue;
      const Givens g = make_givens(d[k - 1], d[k]);
      d[k - 1] = std::hypot(d[k - 1], d[k]);
      d[k] = 0.0;
      const Eigen::VectorXd jk = J.col(k - 1);
      J.col(k - 1) = g.c * jk + g.s * J.col(k);
      J.col(k) = -g.s * jk + g.c * J.col(k);
    }
    R.col(q).head(q + 1) = d.head(q + 1);
    active.push_back(p);
    u.push_back(u_plus);
    ++q;
    if (std::abs(R(q - 1, q - 1)) <= dep_tol * (1.0 + d.head(q).norm()))
      throw SolveError("qp: numerical breakdown (dependent constraint accepted)");
  };

  // Removes the active constraint at position l and restores triangularity.
  auto drop_constraint = [&](int l) {
    active.erase(active.begin() + l);
    u.erase(u.begin() + l);
    for (int col = l + 1; col < q; ++col) R.col(col - 1).head(col + 1) = R.col(col).head(col + 1);
    R.col(q - 1).setZero();
    --q;
    for (int k = l; k < q; ++k) {
      const double rkk = R(k, k);
      const double rk1 = R(k + 1, k);
      if (rk1 == 0.0) continue;
      const Givens g = make_givens(rkk, rk1);
      for (int col = k; col < q; ++col) {
        const double v0 = R(k, col);
        const double v1 = R(k + 1, col);
        R(k, col) = g.c * v0 + g.s * v1;
        R(k + 1, col) = -g.s * v0 + g.c * v1;
      }
      R(k + 1, k) = 0.0;
      const Eigen::VectorXd jk = J.col(k);
      J.col(k) = g.c * jk + g.s * J.col(k + 1);
      J.col(k + 1) = -g.s * jk + g.c * J.col(k + 1);
    }
  };

  // Processes one violated constraint p until it is added (returns true) or
  // the program is found infeasible (returns false).
  auto process = [&](int p, bool is_equality) -> bool {
    double u_plus = 0.0;
    for (;;) {
      if (++result.iterations > max_iter)
        throw SolveError("qp: iteration limit reached (numerical breakdown?)");

      const Eigen::VectorXd np = row(p);
      double s = np.dot(x) - rhs(p);
      Eigen::VectorXd d = J.transpose() * np;
      const double d2sq = d.tail(n - q).squaredNorm();
      const bool z_nonzero = d2sq > 1e-24 * std::max(1.0, d.squaredNorm());

      Eigen::VectorXd r;
      if (q > 0)
        r = R.topLeftCorner(q, q).triangularView<Eigen::Upper>().solve(d.head(q));

      // Longest dual step keeping multipliers of droppable rows nonnegative.
      double t1 = kInfinity;
      int l = -1;
      for (int k = n_eq_active; k < q; ++k) {
        if (r[k] > 1e-12) {
          const double cand = u[k] / r[k];
          if (cand < t1) {
            t1 = cand;
            l = k;
          }
        }
      }

      if (!z_nonzero) {
        if (is_equality && std::abs(s) <= 1e-9) return true;  // redundant, consistent
        if (l < 0) return false;                              // certified infeasible
        for (int k = 0; k < q; ++k) u[k] -= t1 * r[k];
        u_plus += t1;
        drop_constraint(l);
        continue;
      }

      const double t2 = -s / d2sq;  // full step along z = J2 d2
      const double t = std::min(t1, t2);
      if (!std::isfinite(t)) return false;

      x += t * (J.rightCols(n - q) * d.tail(n - q));
      for (int k = 0; k < q; ++k) u[k] -= t * r[k];
      u_plus += t;

      if (t2 <= t1) {
        add_constraint(d, p, u_plus);
        return true;
      }
      drop_constraint(l);
    }
  };

  // Equalities first: flip rows so the violation is nonpositive, then force
  // them into the active set.
  for (int p = 0; p < meq; ++p) {
    if (residual(p) > 0.0) row_sign[p] = -1.0;
    const int q_before = q;
    if (!process(p, true)) {
      result.feasible = false;
      return result;
    }
    if (q > q_before) n_eq_active = q;  // skipped redundant rows do not count
  }

  // Inequalities: repeatedly add the most violated row.
  for (;;) {
    if (result.iterations > max_iter)
      throw SolveError("qp: iteration limit reached (numerical breakdown?)");
    int p = -1;
    double worst = -viol_tol;
    for (int i = meq; i < m; ++i) {
      bool already = false;
      for (int k = n_eq_active; k < q; ++k)
        if (active[k] == i) {
          already = true;
          break;
        }
      if (already) continue;
      const double s = N.row(i).dot(x) - b[i];
      if (s < worst) {
        worst = s;
        p = i;
      }
    }
    if (p < 0) break;  // all rows satisfied
    if (!process(p, false)) {
      result.feasible = false;
      return result;
    }
  }

  result.feasible = true;
  result.x = x;
  result.active = active;
  result.multipliers = u;
  // Undo equality sign flips so multipliers refer to the rows as given.
  for (int k = 0; k < q; ++k)
    if (active[k] < meq) result.multipliers[k] *= row_sign[active[k]];
  return result;
}

}  // namespace svmcf::detail
