#pragma once

// Dense two-phase simplex for the small feasibility programs used by the
// sphere-classification and convex-hull routines.

#include <Eigen/Dense>

namespace hpq {

struct LpResult {
  enum class Status { Optimal, Infeasible, Unbounded };
  Status status;
  Eigen::VectorXd x;
  double objective = 0.0;
};

// maximize c.x  subject to  A x <= b, x >= 0.
LpResult solve_lp_max(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                      const Eigen::VectorXd& c);

}  // namespace hpq
