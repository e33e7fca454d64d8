#include "hpq/linprog.hpp"

#include <limits>
#include <vector>

namespace hpq {

namespace {

constexpr double kEps = 1e-11;

// Tableau rows: one per constraint, columns: all variables plus rhs.
// basis[i] = variable index basic in row i.
struct Tableau {
  Eigen::MatrixXd t;
  std::vector<int> basis;

  void pivot(int row, int col) {
    t.row(row) /= t(row, col);
    for (int i = 0; i < t.rows(); ++i) {
      if (i == row) continue;
      const double f = t(i, col);
      if (f != 0.0) t.row(i) -= f * t.row(row);
    }
    basis[row] = col;
  }
};

// Bland's rule simplex on the reduced-cost row z (to maximize). Columns in
// [0, ncols) are eligible unless blocked. Returns false on unboundedness.
bool run_simplex(Tableau& tab, Eigen::RowVectorXd& z, int ncols,
                 const std::vector<bool>& blocked) {
  const int m = static_cast<int>(tab.t.rows());
  const int rhs = static_cast<int>(tab.t.cols()) - 1;
  for (int iter = 0; iter < 20000; ++iter) {
    int enter = -1;
    for (int j = 0; j < ncols; ++j) {
      if (blocked[j]) continue;
      if (z[j] > kEps) {
        enter = j;
        break;
      }
    }
    if (enter < 0) return true;

    int leave = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      const double a = tab.t(i, enter);
      if (a > kEps) {
        const double ratio = tab.t(i, rhs) / a;
        if (ratio < best - kEps ||
            (ratio < best + kEps &&
             (leave < 0 || tab.basis[i] < tab.basis[leave]))) {
          best = ratio;
          leave = i;
        }
      }
    }
    if (leave < 0) return false;

    const double zf = z[enter];
    tab.pivot(leave, enter);
    z -= zf * tab.t.row(leave);
  }
  return true;  // iteration cap; treat current vertex as optimal
}

}  // namespace

LpResult solve_lp_max(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                      const Eigen::VectorXd& c) {
  const int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());

  int n_art = 0;
  for (int i = 0; i < m; ++i)
    if (b[i] < 0.0) ++n_art;

  const int total = n + m + n_art;
  Tableau tab;
  tab.t = Eigen::MatrixXd::Zero(m, total + 1);
  tab.basis.resize(m);

  int art = n + m;
  for (int i = 0; i < m; ++i) {
    const double s = b[i] < 0.0 ? -1.0 : 1.0;
    tab.t.block(i, 0, 1, n) = s * A.row(i);
    tab.t(i, n + i) = s;
    tab.t(i, total) = s * b[i];
    if (b[i] < 0.0) {
      tab.t(i, art) = 1.0;
      tab.basis[i] = art++;
    } else {
      tab.basis[i] = n + i;
    }
  }

  std::vector<bool> blocked(total, false);

  if (n_art > 0) {
    // Phase 1: maximize -(sum of artificials). Reduced costs start at the
    // cost vector (-1 on artificial columns) plus the artificial-basic rows.
    Eigen::RowVectorXd z = Eigen::RowVectorXd::Zero(total + 1);
    for (int j = n + m; j < total; ++j) z[j] = -1.0;
    for (int i = 0; i < m; ++i)
      if (tab.basis[i] >= n + m) z += tab.t.row(i);
    if (!run_simplex(tab, z, total, blocked))
      return {LpResult::Status::Infeasible, Eigen::VectorXd::Zero(n), 0.0};
    if (z[total] > 1e-8)
      return {LpResult::Status::Infeasible, Eigen::VectorXd::Zero(n), 0.0};
    for (int j = n + m; j < total; ++j) blocked[j] = true;
  }

  // Phase 2 objective row: reduced costs of c given the current basis.
  Eigen::RowVectorXd z = Eigen::RowVectorXd::Zero(total + 1);
  z.head(n) = c.transpose();
  for (int i = 0; i < m; ++i) {
    const int bv = tab.basis[i];
    if (z[bv] != 0.0) z -= z[bv] * tab.t.row(i);
  }

  if (!run_simplex(tab, z, total, blocked))
    return {LpResult::Status::Unbounded, Eigen::VectorXd::Zero(n), 0.0};

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < m; ++i)
    if (tab.basis[i] < n) x[tab.basis[i]] = tab.t(i, total);
  return {LpResult::Status::Optimal, x, c.dot(x)};
}

}  // namespace hpq
