#pragma once

#include <Eigen/Core>
#include <limits>

namespace coorddet::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kFeasTol = 1e-8;   // constraint satisfaction slack
inline constexpr double kPivotTol = 1e-10;  // entries below this never pivot

// min c'x  s.t.  A x <= b,  lb <= x <= ub   (entries of lb/ub may be +-inf).
struct LinearProgram {
  Eigen::VectorXd c;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::VectorXd lb;
  Eigen::VectorXd ub;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  Eigen::VectorXd x;        // meaningful for Optimal
  double objective = 0.0;   // c'x for Optimal
  int iterations = 0;       // simplex pivots across both phases
};

// Two-phase dense-tableau simplex with Bland's rule (anti-cycling). Bounds
// are handled by substitution: finite lower bounds shift, finite upper
// bounds add a row, free variables split into a difference of nonnegative
// parts. Throws std::invalid_argument on shape mismatches or lb > ub.
LpResult solve(const LinearProgram& lp);

struct Feasibility {
  bool feasible = false;
  Eigen::VectorXd witness;  // satisfies all constraints within kFeasTol
  int iterations = 0;
};

// Phase-1-only entry point: is {x : A x <= b, lb <= x <= ub} nonempty?
Feasibility feasible(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                     const Eigen::VectorXd& lb, const Eigen::VectorXd& ub);

}  // namespace coorddet::lp
