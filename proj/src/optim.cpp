#include "svmcf/optim.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <queue>

#include "solvers_internal.hpp"

namespace svmcf {

namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

bool near(double v, double target, double tol) { return std::abs(v - target) <= tol; }

}  // namespace

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::NodeLimit: return "node_limit";
    case SolveStatus::TimeLimit: return "time_limit";
  }
  return "unknown";
}

void MixedIntegerProgram::validate() const {
  const int n = num_vars();
  if (n <= 0) throw std::invalid_argument("program: no variables");
  if (Q.rows() != n || Q.cols() != n) throw std::invalid_argument("program: Q dimension mismatch");
  if (lower.size() != n || upper.size() != n)
    throw std::invalid_argument("program: bound dimension mismatch");
  if (static_cast<int>(integral.size()) != n)
    throw std::invalid_argument("program: integrality mask dimension mismatch");
  if (A.rows() != b.size() || (A.rows() > 0 && A.cols() != n))
    throw std::invalid_argument("program: inequality system dimension mismatch");
  if (E.rows() != d.size() || (E.rows() > 0 && E.cols() != n))
    throw std::invalid_argument("program: equality system dimension mismatch");
  if (!c.allFinite() || !Q.allFinite()) throw std::invalid_argument("program: non-finite objective");
  if ((A.rows() > 0 && (!A.allFinite() || !b.allFinite())) ||
      (E.rows() > 0 && (!E.allFinite() || !d.allFinite())))
    throw std::invalid_argument("program: non-finite constraint rows");

  const double qmax = Q.cwiseAbs().maxCoeff();
  if (qmax > 0.0) {
    if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + qmax))
      throw std::invalid_argument("program: Q is not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Q, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -1e-10 * std::max(1.0, qmax))
      throw std::invalid_argument("program: Q is not positive semidefinite");
  }
  for (int j = 0; j < n; ++j) {
    if (integral[j] && !(lower[j] >= 0.0 - 1e-12 && upper[j] <= 1.0 + 1e-12))
      throw std::invalid_argument("program: integral variables must be bounded in [0,1]");
  }
}

namespace {

// Fixed-variable elimination plus removal of constraint rows that become
// vacuous; the only presolve performed.
struct Presolved {
  bool infeasible = false;
  std::vector<int> keep;        // reduced -> original variable
  std::vector<int> amap, emap;  // reduced row -> original row
  Eigen::VectorXd full_value;   // fixed entries filled in
  MixedIntegerProgram reduced;
  double constant = 0.0;

  Eigen::VectorXd expand(const Eigen::VectorXd& xr) const {
    Eigen::VectorXd x = full_value;
    for (size_t k = 0; k < keep.size(); ++k) x[keep[k]] = xr[k];
    return x;
  }
};

Presolved presolve(const MixedIntegerProgram& p, double feas_tol) {
  const int n = p.num_vars();
  Presolved out;
  out.full_value = Eigen::VectorXd::Zero(n);

  std::vector<int> pos(n, -1);
  for (int j = 0; j < n; ++j) {
    if (p.lower[j] > p.upper[j] + 1e-12) {
      out.infeasible = true;
      return out;
    }
    if (p.upper[j] - p.lower[j] <= 1e-12) {
      out.full_value[j] = p.lower[j];
    } else {
      pos[j] = static_cast<int>(out.keep.size());
      out.keep.push_back(j);
    }
  }

  const int nk = static_cast<int>(out.keep.size());
  MixedIntegerProgram& r = out.reduced;
  r.Q.resize(nk, nk);
  r.c.resize(nk);
  r.lower.resize(nk);
  r.upper.resize(nk);
  r.integral.resize(nk);

  for (int a = 0; a < nk; ++a) {
    const int ja = out.keep[a];
    r.lower[a] = p.lower[ja];
    r.upper[a] = p.upper[ja];
    r.integral[a] = p.integral[ja];
    for (int bcol = 0; bcol < nk; ++bcol) r.Q(a, bcol) = p.Q(ja, out.keep[bcol]);
  }

  // Objective after substitution: c_k + Q_kf v; constant picks up
  // 1/2 v'Q_ff v + c_f'v.
  Eigen::VectorXd v = out.full_value;
  for (int j : out.keep) v[j] = 0.0;
  const Eigen::VectorXd qv = p.Q * v;
  for (int a = 0; a < nk; ++a) r.c[a] = p.c[out.keep[a]] + qv[out.keep[a]];
  out.constant = p.constant + 0.5 * v.dot(qv) + p.c.dot(v);

  // Constraint rows, dropping those with no surviving support.
  std::vector<Eigen::VectorXd> arows;
  std::vector<double> brhs;
  for (int i = 0; i < p.A.rows(); ++i) {
    Eigen::VectorXd rr(nk);
    for (int a = 0; a < nk; ++a) rr[a] = p.A(i, out.keep[a]);
    const double rhs = p.b[i] - p.A.row(i).dot(v);
    if (nk == 0 || rr.cwiseAbs().maxCoeff() <= 1e-14) {
      if (rhs < -feas_tol) {
        out.infeasible = true;
        return out;
      }
      continue;
    }
    arows.push_back(std::move(rr));
    brhs.push_back(rhs);
    out.amap.push_back(i);
  }
  std::vector<Eigen::VectorXd> erows;
  std::vector<double> drhs;
  for (int i = 0; i < p.E.rows(); ++i) {
    Eigen::VectorXd rr(nk);
    for (int a = 0; a < nk; ++a) rr[a] = p.E(i, out.keep[a]);
    const double rhs = p.d[i] - p.E.row(i).dot(v);
    if (nk == 0 || rr.cwiseAbs().maxCoeff() <= 1e-14) {
      if (std::abs(rhs) > feas_tol) {
        out.infeasible = true;
        return out;
      }
      continue;
    }
    erows.push_back(std::move(rr));
    drhs.push_back(rhs);
    out.emap.push_back(i);
  }

  r.A.resize(static_cast<int>(arows.size()), nk);
  r.b.resize(static_cast<int>(arows.size()));
  for (size_t i = 0; i < arows.size(); ++i) {
    r.A.row(static_cast<int>(i)) = arows[i].transpose();
    r.b[static_cast<int>(i)] = brhs[i];
  }
  r.E.resize(static_cast<int>(erows.size()), nk);
  r.d.resize(static_cast<int>(erows.size()));
  for (size_t i = 0; i < erows.size(); ++i) {
    r.E.row(static_cast<int>(i)) = erows[i].transpose();
    r.d[static_cast<int>(i)] = drhs[i];
  }
  return out;
}

double objective_of(const MixedIntegerProgram& p, const Eigen::VectorXd& x) {
  return 0.5 * x.dot(p.Q * x) + p.c.dot(x) + p.constant;
}

std::vector<int> binding_rows_of(const MixedIntegerProgram& p, const Eigen::VectorXd& x,
                                 double tol) {
  std::vector<int> rows;
  for (int i = 0; i < p.A.rows(); ++i) {
    const double resid = p.b[i] - p.A.row(i).dot(x);
    if (resid <= tol * (1.0 + std::abs(p.b[i]))) rows.push_back(i);
  }
  return rows;
}

// Checks a fully fixed program (no free variables left after presolve).
bool fixed_point_feasible(const MixedIntegerProgram& p, const Eigen::VectorXd& x, double tol) {
  for (int i = 0; i < p.A.rows(); ++i)
    if (p.A.row(i).dot(x) > p.b[i] + tol * (1.0 + std::abs(p.b[i]))) return false;
  for (int i = 0; i < p.E.rows(); ++i)
    if (std::abs(p.E.row(i).dot(x) - p.d[i]) > tol * (1.0 + std::abs(p.d[i]))) return false;
  return true;
}

SolveResult solve_continuous(const MixedIntegerProgram& p, const SolverConfig& cfg) {
  Presolved pre = presolve(p, cfg.feasibility_tol);
  SolveResult res;
  if (pre.infeasible) return res;

  const int nk = static_cast<int>(pre.keep.size());
  if (nk == 0) {
    if (!fixed_point_feasible(p, pre.full_value, cfg.feasibility_tol)) return res;
    res.status = SolveStatus::Optimal;
    res.x = pre.full_value;
    res.objective = objective_of(p, res.x);
    res.binding_rows = binding_rows_of(p, res.x, 1e-6);
    res.duals.reset();
    return res;
  }

  const MixedIntegerProgram& r = pre.reduced;
  const int mi = static_cast<int>(r.A.rows());
  const int me = static_cast<int>(r.E.rows());

  DualSolution duals;
  duals.ineq = Eigen::VectorXd::Zero(p.A.rows());
  duals.eq = Eigen::VectorXd::Zero(p.E.rows());
  duals.lower = Eigen::VectorXd::Zero(p.num_vars());
  duals.upper = Eigen::VectorXd::Zero(p.num_vars());

  const std::vector<int>& amap = pre.amap;
  const std::vector<int>& emap = pre.emap;

  const bool is_lp = r.Q.cwiseAbs().maxCoeff() == 0.0;
  Eigen::VectorXd xr;

  if (is_lp) {
    // z = (x, slack); rows [A I; E 0].
    const int nz = nk + mi;
    Eigen::MatrixXd M(mi + me, nz);
    Eigen::VectorXd q(mi + me), lb(nz), ub(nz), cz(nz);
    M.setZero();
    if (mi > 0) {
      M.topLeftCorner(mi, nk) = r.A;
      M.topRightCorner(mi, mi).setIdentity();
      q.head(mi) = r.b;
    }
    if (me > 0) {
      M.bottomLeftCorner(me, nk) = r.E;
      q.tail(me) = r.d;
    }
    lb.head(nk) = r.lower;
    ub.head(nk) = r.upper;
    lb.tail(mi).setZero();
    ub.tail(mi).setConstant(kInfinity);
    cz.head(nk) = r.c;
    cz.tail(mi).setZero();

    detail::SimplexResult sr = detail::solve_lp_simplex(cz, M, q, lb, ub, cfg.max_iter);
    if (sr.status == detail::SimplexResult::Status::Infeasible) return res;
    if (sr.status == detail::SimplexResult::Status::Unbounded)
      throw SolveError("solve: linear program is unbounded");
    xr = sr.x.head(nk);

    for (int i = 0; i < mi; ++i) duals.ineq[amap[i]] = std::max(-sr.row_dual[i], 0.0);
    for (int i = 0; i < me; ++i) duals.eq[emap[i]] = -sr.row_dual[mi + i];
    for (int a = 0; a < nk; ++a) {
      const double rc = sr.red_cost[a];
      const int j = pre.keep[a];
      if (rc > 0.0 && near(xr[a], r.lower[a], 1e-6 * (1.0 + std::abs(r.lower[a]))))
        duals.lower[j] = rc;
      else if (rc < 0.0 && near(xr[a], r.upper[a], 1e-6 * (1.0 + std::abs(r.upper[a]))))
        duals.upper[j] = -rc;
    }
  } else {
    // Rows for the dual active-set kernel: equalities, then -A x >= -b, then
    // finite bounds; everything normalized to unit row norm.
    std::vector<Eigen::VectorXd> rows;
    std::vector<double> rhs;
    std::vector<double> scale;
    enum class RowKind { Eq, Ineq, Lower, Upper };
    std::vector<std::pair<RowKind, int>> kind;

    for (int i = 0; i < me; ++i) {
      rows.push_back(r.E.row(i).transpose());
      rhs.push_back(r.d[i]);
      kind.emplace_back(RowKind::Eq, emap[i]);
    }
    for (int i = 0; i < mi; ++i) {
      rows.push_back(-r.A.row(i).transpose());
      rhs.push_back(-r.b[i]);
      kind.emplace_back(RowKind::Ineq, amap[i]);
    }
    for (int a = 0; a < nk; ++a) {
      if (std::isfinite(r.lower[a])) {
        rows.push_back(Eigen::VectorXd::Unit(nk, a));
        rhs.push_back(r.lower[a]);
        kind.emplace_back(RowKind::Lower, pre.keep[a]);
      }
      if (std::isfinite(r.upper[a])) {
        rows.push_back(-Eigen::VectorXd::Unit(nk, a));
        rhs.push_back(-r.upper[a]);
        kind.emplace_back(RowKind::Upper, pre.keep[a]);
      }
    }

    const int mrows = static_cast<int>(rows.size());
    Eigen::MatrixXd N(mrows, nk);
    Eigen::VectorXd bn(mrows);
    scale.resize(mrows);
    for (int i = 0; i < mrows; ++i) {
      const double nrm = rows[i].norm();
      scale[i] = nrm;
      N.row(i) = rows[i].transpose() / nrm;
      bn[i] = rhs[i] / nrm;
    }

    detail::ActiveSetResult ar =
        detail::solve_qp_gi(r.Q, r.c, N, bn, me, cfg.max_iter);
    if (!ar.feasible) return res;
    xr = ar.x;

    for (size_t k = 0; k < ar.active.size(); ++k) {
      const int rowid = ar.active[k];
      const double mult = ar.multipliers[k] / scale[rowid];
      switch (kind[rowid].first) {
        case RowKind::Eq: duals.eq[kind[rowid].second] = -mult; break;
        case RowKind::Ineq: duals.ineq[kind[rowid].second] = std::max(mult, 0.0); break;
        case RowKind::Lower: duals.lower[kind[rowid].second] = std::max(mult, 0.0); break;
        case RowKind::Upper: duals.upper[kind[rowid].second] = std::max(mult, 0.0); break;
      }
    }
  }

  // Clamp bound dust so callers see values inside the box.
  for (int a = 0; a < nk; ++a)
    xr[a] = std::min(std::max(xr[a], r.lower[a]), r.upper[a]);

  res.status = SolveStatus::Optimal;
  res.x = pre.expand(xr);
  res.objective = objective_of(p, res.x);
  res.binding_rows = binding_rows_of(p, res.x, 1e-6);
  res.duals = std::move(duals);
  return res;
}

}  // namespace

SolveResult solve_relaxation(const MixedIntegerProgram& p, const SolverConfig& cfg) {
  p.validate();
  return solve_continuous(p, cfg);
}

namespace {

std::vector<int> integral_indices(const MixedIntegerProgram& p) {
  std::vector<int> out;
  for (int j = 0; j < p.num_vars(); ++j)
    if (p.integral[j]) out.push_back(j);
  return out;
}

constexpr double kIntTol = 1e-6;

bool is_integral(const Eigen::VectorXd& x, const std::vector<int>& bins) {
  for (int j : bins)
    if (std::abs(x[j] - std::round(x[j])) > kIntTol) return false;
  return true;
}

// Re-solves with all binaries pinned to their rounded values; returns exact
// binary coordinates.
SolveResult polish_integral(const MixedIntegerProgram& p, const SolverConfig& cfg,
                            const std::vector<int>& bins, const Eigen::VectorXd& x,
                            Eigen::VectorXd lo, Eigen::VectorXd hi) {
  MixedIntegerProgram fixed = p;
  fixed.lower = std::move(lo);
  fixed.upper = std::move(hi);
  for (int j : bins) {
    const double v = std::round(x[j]);
    fixed.lower[j] = v;
    fixed.upper[j] = v;
  }
  return solve_continuous(fixed, cfg);
}

}  // namespace

SolveResult solve_mip(const MixedIntegerProgram& p, const SolverConfig& cfg) {
  p.validate();
  const std::vector<int> bins = integral_indices(p);
  if (bins.empty()) return solve_continuous(p, cfg);

  const auto t_start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  };

  struct Node {
    double bound;
    int depth;
    long id;
    Eigen::VectorXd lo, hi, relax_x;
  };
  // Best-first: lowest bound, then deepest, then lowest id.
  auto later = [](const Node& a, const Node& b) {
    if (a.bound != b.bound) return a.bound > b.bound;
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.id > b.id;
  };
  std::priority_queue<Node, std::vector<Node>, decltype(later)> open(later);

  SolveResult best;  // incumbent
  long nodes = 0;
  long next_id = 0;
  bool have_incumbent = false;

  auto consider = [&](const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, int depth) {
    MixedIntegerProgram sub = p;
    sub.lower = lo;
    sub.upper = hi;
    SolveResult rel = solve_continuous(sub, cfg);
    ++nodes;
    if (rel.status != SolveStatus::Optimal) return;  // infeasible child
    if (have_incumbent && rel.objective >= best.objective - cfg.mip_gap_abs) return;
    if (is_integral(rel.x, bins)) {
      SolveResult cand = polish_integral(p, cfg, bins, rel.x, lo, hi);
      ++nodes;
      if (cand.status != SolveStatus::Optimal) {
        // Rounding dust made the pinned subproblem marginally infeasible;
        // fall back to the relaxation point with snapped binaries.
        cand = rel;
        for (int j : bins) cand.x[j] = std::round(cand.x[j]);
        cand.objective = objective_of(p, cand.x);
      } else {
        for (int j : bins) cand.x[j] = std::round(cand.x[j]);
      }
      if (!have_incumbent || cand.objective < best.objective) {
        best = std::move(cand);
        have_incumbent = true;
      }
      return;
    }
    open.push(Node{rel.objective, depth, next_id++, lo, hi, rel.x});
  };

  consider(p.lower, p.upper, 0);
  if (!have_incumbent && open.empty()) {
    SolveResult res;
    res.nodes = nodes;
    return res;  // infeasible at the root
  }

  double last_bound = -kInfinity;
  while (!open.empty()) {
    const Node node = open.top();
    last_bound = node.bound;
    if (have_incumbent && node.bound >= best.objective - cfg.mip_gap_abs) break;
    if (nodes >= cfg.max_nodes || elapsed() > cfg.time_limit) {
      SolveResult res = have_incumbent ? best : SolveResult{};
      res.status = nodes >= cfg.max_nodes ? SolveStatus::NodeLimit : SolveStatus::TimeLimit;
      res.nodes = nodes;
      res.gap = have_incumbent ? std::max(best.objective - node.bound, 0.0) : kInfinity;
      res.duals.reset();
      return res;
    }
    open.pop();

    // Most fractional binary, ties to the lowest index.
    int branch = -1;
    double most = kIntTol;
    for (int j : bins) {
      const double frac = std::min(node.relax_x[j] - std::floor(node.relax_x[j]),
                                   std::ceil(node.relax_x[j]) - node.relax_x[j]);
      if (frac > most) {
        most = frac;
        branch = j;
      }
    }
    if (branch < 0) continue;  // already handled as integral at creation

    for (const double side : {0.0, 1.0}) {
      Eigen::VectorXd lo = node.lo, hi = node.hi;
      lo[branch] = side;
      hi[branch] = side;
      consider(lo, hi, node.depth + 1);
    }
  }

  if (!have_incumbent) {
    SolveResult res;
    res.nodes = nodes;
    return res;  // all branches infeasible
  }
  best.status = SolveStatus::Optimal;
  best.nodes = nodes;
  best.gap = open.empty() ? 0.0 : std::max(best.objective - last_bound, 0.0);
  best.duals.reset();
  best.binding_rows = binding_rows_of(p, best.x, 1e-6);
  return best;
}

SolveResult brute_force_mip(const MixedIntegerProgram& p, const SolverConfig& cfg) {
  p.validate();
  const std::vector<int> bins = integral_indices(p);
  const int k = static_cast<int>(bins.size());
  if (k > 20)
    throw std::invalid_argument("brute_force_mip: too many binaries (" + std::to_string(k) +
                                " > 20)");
  if (k == 0) return solve_continuous(p, cfg);

  SolveResult best;
  long nodes = 0;
  for (long mask = 0; mask < (1L << k); ++mask) {
    MixedIntegerProgram sub = p;
    for (int i = 0; i < k; ++i) {
      const double v = (mask >> i) & 1 ? 1.0 : 0.0;
      sub.lower[bins[i]] = v;
      sub.upper[bins[i]] = v;
    }
    SolveResult res = solve_continuous(sub, cfg);
    ++nodes;
    if (res.status != SolveStatus::Optimal) continue;
    if (best.status != SolveStatus::Optimal || res.objective < best.objective) {
      best = res;
      for (int i = 0; i < k; ++i) best.x[bins[i]] = (mask >> i) & 1 ? 1.0 : 0.0;
    }
  }
  best.nodes = nodes;
  best.gap = 0.0;
  best.duals.reset();
  if (best.status == SolveStatus::Optimal)
    best.binding_rows = binding_rows_of(p, best.x, 1e-6);
  return best;
}

double kkt_stationarity_residual(const MixedIntegerProgram& p, const SolveResult& result) {
  if (!result.duals) throw std::invalid_argument("kkt: result carries no duals");
  const DualSolution& du = *result.duals;
  Eigen::VectorXd g = p.Q * result.x + p.c;
  if (p.A.rows() > 0) g += p.A.transpose() * du.ineq;
  if (p.E.rows() > 0) g += p.E.transpose() * du.eq;
  g -= du.lower;
  g += du.upper;
  return g.cwiseAbs().maxCoeff();
}

void dump_program(const MixedIntegerProgram& p, std::ostream& out) {
  const int n = p.num_vars();
  out << "vars " << n << "\n";
  out << "constant " << p.constant << "\n";
  out << "c";
  for (int j = 0; j < n; ++j) out << " " << p.c[j];
  out << "\nQ\n";
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) out << (j ? " " : "") << p.Q(i, j);
    out << "\n";
  }
  for (int i = 0; i < p.A.rows(); ++i) {
    out << "ineq";
    for (int j = 0; j < n; ++j) out << " " << p.A(i, j);
    out << " <= " << p.b[i] << "\n";
  }
  for (int i = 0; i < p.E.rows(); ++i) {
    out << "eq";
    for (int j = 0; j < n; ++j) out << " " << p.E(i, j);
    out << " = " << p.d[i] << "\n";
  }
  out << "bounds\n";
  for (int j = 0; j < n; ++j)
    out << p.lower[j] << " <= x" << j << " <= " << p.upper[j]
        << (p.integral[j] ? " binary" : "") << "\n";
}

}  // namespace svmcf
