#include "coorddet/lp.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace coorddet::lp {

namespace {

constexpr double kPhase1Tol = 1e-9;  // artificial objective above this => infeasible

// How one original variable maps into the standardized nonnegative space:
// x = shift + sign * y[col] (+ y[col] - y[col_neg] for free variables, which
// use shift 0 and sign +1).
struct VarMap {
  double shift = 0.0;
  double sign = 1.0;
  int col = -1;
  int col_neg = -1;
};

struct Standardized {
  Eigen::MatrixXd A;  // rows x cols, constraints A y <= b with y >= 0
  Eigen::VectorXd b;
  Eigen::VectorXd c;
  std::vector<VarMap> map;
};

Standardized standardize(const LinearProgram& lp) {
  const int nx = static_cast<int>(lp.c.size());
  const int m0 = static_cast<int>(lp.A.rows());
  if (nx < 1) throw std::invalid_argument("lp has no variables");
  if (lp.A.cols() != nx || lp.b.size() != m0 || lp.lb.size() != nx ||
      lp.ub.size() != nx)
    throw std::invalid_argument("lp dimensions are inconsistent");
  if (!lp.A.allFinite() || !lp.b.allFinite() || !lp.c.allFinite())
    throw std::invalid_argument("lp data must be finite");

  int ncols = 0;
  int nrows = m0;
  std::vector<VarMap> map(nx);
  for (int j = 0; j < nx; ++j) {
    const double lb = lp.lb(j), ub = lp.ub(j);
    if (std::isnan(lb) || std::isnan(ub) || lb == kInf || ub == -kInf || lb > ub)
      throw std::invalid_argument("invalid bounds on variable " + std::to_string(j));
    if (lb == -kInf && ub == kInf) {
      map[j] = {0.0, 1.0, ncols, ncols + 1};
      ncols += 2;
    } else if (lb != -kInf) {
      map[j] = {lb, 1.0, ncols, -1};
      ncols += 1;
      if (ub != kInf) nrows += 1;  // y_j <= ub - lb
    } else {
      map[j] = {ub, -1.0, ncols, -1};  // x = ub - y
      ncols += 1;
    }
  }

  Standardized sf;
  sf.A = Eigen::MatrixXd::Zero(nrows, ncols);
  sf.b = Eigen::VectorXd::Zero(nrows);
  sf.b.head(m0) = lp.b;
  sf.c = Eigen::VectorXd::Zero(ncols);
  sf.map = map;
  int extra = m0;
  for (int j = 0; j < nx; ++j) {
    const VarMap& vm = map[j];
    const auto colA = lp.A.col(j);
    if (vm.col_neg >= 0) {
      sf.A.col(vm.col).head(m0) = colA;
      sf.A.col(vm.col_neg).head(m0) = -colA;
      sf.c(vm.col) = lp.c(j);
      sf.c(vm.col_neg) = -lp.c(j);
    } else if (vm.sign > 0) {
      sf.A.col(vm.col).head(m0) = colA;
      sf.b.head(m0) -= colA * vm.shift;
      sf.c(vm.col) = lp.c(j);
      if (lp.ub(j) != kInf) {
        sf.A(extra, vm.col) = 1.0;
        sf.b(extra) = lp.ub(j) - lp.lb(j);
        ++extra;
      }
    } else {
      sf.A.col(vm.col).head(m0) = -colA;
      sf.b.head(m0) -= colA * vm.shift;
      sf.c(vm.col) = -lp.c(j);
    }
  }
  return sf;
}

struct CoreResult {
  LpStatus status = LpStatus::Infeasible;
  Eigen::VectorXd y;
  int iterations = 0;
};

// Two-phase tableau simplex on  min c'y, A y <= b, y >= 0.  Slacks enter as
// an identity block; rows with negative rhs are sign-flipped and given an
// artificial basic variable. Bland's rule (lowest eligible index entering,
// lowest basic index leaving among ratio ties) prevents cycling.
CoreResult simplex_core(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                        const Eigen::VectorXd& c) {
  const int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  int n_art = 0;
  for (int r = 0; r < m; ++r)
    if (b(r) < 0) ++n_art;
  const int art0 = n + m;
  const int ncols = n + m + n_art;
  const int rhs = ncols;

  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, ncols + 1);
  std::vector<int> basis(m, -1);
  {
    int a = 0;
    for (int r = 0; r < m; ++r) {
      const double s = b(r) < 0 ? -1.0 : 1.0;
      T.row(r).head(n) = s * A.row(r);
      T(r, n + r) = s;
      T(r, rhs) = s * b(r);
      if (s < 0) {
        T(r, art0 + a) = 1.0;
        basis[r] = art0 + a;
        ++a;
      } else {
        basis[r] = n + r;
      }
    }
  }

  Eigen::RowVectorXd z1 = Eigen::RowVectorXd::Zero(ncols + 1);
  for (int j = art0; j < ncols; ++j) z1(j) = 1.0;
  Eigen::RowVectorXd z2 = Eigen::RowVectorXd::Zero(ncols + 1);
  z2.head(n) = c.transpose();
  for (int r = 0; r < m; ++r) {
    if (z1(basis[r]) != 0.0) z1 -= z1(basis[r]) * T.row(r);
    if (z2(basis[r]) != 0.0) z2 -= z2(basis[r]) * T.row(r);
  }

  int iters = 0;
  const long max_iters = 2000 + 200L * (m + ncols);
  std::vector<bool> dead(m, false);  // redundant rows dropped after phase 1

  auto pivot = [&](int r, int q) {
    const Eigen::RowVectorXd prow = T.row(r) / T(r, q);
    T.row(r) = prow;
    Eigen::VectorXd colq = T.col(q);
    colq(r) = 0.0;
    T.noalias() -= colq * prow;
    z1 -= z1(q) * prow;
    z2 -= z2(q) * prow;
    basis[r] = q;
    ++iters;
  };

  // Lowest non-artificial column with a reduced cost below -kPivotTol.
  auto entering = [&](const Eigen::RowVectorXd& z) {
    for (int j = 0; j < art0; ++j)
      if (z(j) < -kPivotTol) return j;
    return -1;
  };

  auto leaving = [&](int q) {
    int best_r = -1;
    double best_ratio = 0.0;
    for (int r = 0; r < m; ++r) {
      if (dead[r]) continue;
      const double a = T(r, q);
      if (a <= kPivotTol) continue;
      const double ratio = T(r, rhs) / a;
      if (best_r < 0 || ratio < best_ratio ||
          (ratio == best_ratio && basis[r] < basis[best_r])) {
        best_r = r;
        best_ratio = ratio;
      }
    }
    return best_r;
  };

  auto run_phase = [&](const Eigen::RowVectorXd& z) -> bool {
    // Returns false if an improving column had no blocking row (unbounded).
    while (true) {
      if (iters > max_iters)
        throw std::runtime_error("simplex iteration limit exceeded");
      const int q = entering(z);
      if (q < 0) return true;
      const int r = leaving(q);
      if (r < 0) return false;
      pivot(r, q);
    }
  };

  run_phase(z1);  // phase-1 objective is bounded below by zero
  double infeas = 0.0;
  for (int r = 0; r < m; ++r)
    if (basis[r] >= art0) infeas += T(r, rhs);
  CoreResult out;
  out.iterations = iters;
  if (infeas > kPhase1Tol) {
    out.status = LpStatus::Infeasible;
    out.iterations = iters;
    return out;
  }

  // Drive leftover artificials out of the basis; rows that offer no real
  // pivot are redundant and drop out of all further ratio tests.
  for (int r = 0; r < m; ++r) {
    if (basis[r] < art0) continue;
    int q = -1;
    for (int j = 0; j < art0; ++j) {
      if (std::abs(T(r, j)) > kPivotTol) {
        q = j;
        break;
      }
    }
    if (q >= 0)
      pivot(r, q);
    else
      dead[r] = true;
  }

  const bool bounded = run_phase(z2);
  out.iterations = iters;
  if (!bounded) {
    out.status = LpStatus::Unbounded;
    return out;
  }
  out.status = LpStatus::Optimal;
  out.y = Eigen::VectorXd::Zero(n);
  for (int r = 0; r < m; ++r)
    if (!dead[r] && basis[r] < n) out.y(basis[r]) = T(r, rhs);
  return out;
}

}  // namespace

LpResult solve(const LinearProgram& lp) {
  const Standardized sf = standardize(lp);
  const CoreResult core = simplex_core(sf.A, sf.b, sf.c);
  LpResult res;
  res.status = core.status;
  res.iterations = core.iterations;
  if (core.status != LpStatus::Optimal) return res;
  const int nx = static_cast<int>(lp.c.size());
  res.x = Eigen::VectorXd::Zero(nx);
  for (int j = 0; j < nx; ++j) {
    const VarMap& vm = sf.map[j];
    double v = vm.shift + vm.sign * core.y(vm.col);
    if (vm.col_neg >= 0) v -= core.y(vm.col_neg);
    res.x(j) = v;
  }
  res.objective = lp.c.dot(res.x);
  return res;
}

Feasibility feasible(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                     const Eigen::VectorXd& lb, const Eigen::VectorXd& ub) {
  LinearProgram p;
  p.c = Eigen::VectorXd::Zero(A.cols());
  p.A = A;
  p.b = b;
  p.lb = lb;
  p.ub = ub;
  const LpResult r = solve(p);
  Feasibility f;
  f.feasible = r.status == LpStatus::Optimal;
  f.iterations = r.iterations;
  if (f.feasible) f.witness = r.x;
  return f;
}

}  // namespace coorddet::lp
