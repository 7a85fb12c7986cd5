#pragma once

// Test-only oracles, kept independent of the solver implementation paths
// they are used to check.

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include "pdscr/milp.hpp"

namespace oracle {

// Enumerates all basic solutions of {rows a'x<=b} over a finite box and
// returns the best objective among the feasible ones, or nullopt when no
// vertex is feasible (bounded region => infeasible).
inline std::optional<double> vertex_enum_min(
    const std::vector<std::vector<double>>& A, const std::vector<double>& b,
    const std::vector<double>& lb, const std::vector<double>& ub,
    const std::vector<double>& c) {
  const int n = static_cast<int>(lb.size());
  const int m = static_cast<int>(b.size());

  struct Plane {
    std::vector<double> a;
    double rhs;
  };
  std::vector<Plane> pool;
  for (int i = 0; i < m; ++i) pool.push_back({A[i], b[i]});
  for (int j = 0; j < n; ++j) {
    std::vector<double> e(n, 0.0);
    e[j] = 1.0;
    pool.push_back({e, lb[j]});
    pool.push_back({e, ub[j]});
  }

  std::optional<double> best;
  std::vector<int> idx(n);
  const int P = static_cast<int>(pool.size());

  std::vector<int> comb(n);
  for (int i = 0; i < n; ++i) comb[i] = i;
  auto next_comb = [&]() {
    int i = n - 1;
    while (i >= 0 && comb[i] == P - n + i) --i;
    if (i < 0) return false;
    ++comb[i];
    for (int k = i + 1; k < n; ++k) comb[k] = comb[k - 1] + 1;
    return true;
  };

  do {
    Eigen::MatrixXd M(n, n);
    Eigen::VectorXd r(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) M(i, j) = pool[comb[i]].a[j];
      r(i) = pool[comb[i]].rhs;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    if (!lu.isInvertible()) continue;
    Eigen::VectorXd x = lu.solve(r);
    bool ok = true;
    for (int j = 0; j < n && ok; ++j)
      ok = x(j) >= lb[j] - 1e-7 && x(j) <= ub[j] + 1e-7;
    for (int i = 0; i < m && ok; ++i) {
      double lhs = 0;
      for (int j = 0; j < n; ++j) lhs += A[i][j] * x(j);
      ok = lhs <= b[i] + 1e-7;
    }
    if (!ok) continue;
    double obj = 0;
    for (int j = 0; j < n; ++j) obj += c[j] * x(j);
    if (!best || obj < *best) best = obj;
  } while (next_comb());
  return best;
}

}  // namespace oracle
