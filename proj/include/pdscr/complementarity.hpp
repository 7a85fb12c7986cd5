#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "pdscr/milp.hpp"

namespace pdscr {

// Attaches the big-M switch for a complementarity pair: an inequality row
// g: a'y <= b already in the problem, and its multiplier lambda >= 0.
// Adds binary z with
//     lambda <= big_m_lambda * z
//     b - a'y <= big_m_g * (1 - z)
// so every feasible point has lambda * slack(g) = 0 when the bounds are
// valid. Returns the id of z.
inline int add_complementarity(MilpProblem& p, int g_row, int lambda,
                               double big_m_g, double big_m_lambda,
                               const std::string& tag) {
  if (!(std::isfinite(big_m_g) && big_m_g > 0) ||
      !(std::isfinite(big_m_lambda) && big_m_lambda > 0))
    throw std::invalid_argument("complementarity pair '" + tag +
                                "' is missing a finite big-M bound");
  const LinExpr g_terms = p.row(g_row).terms;  // copy: add_row reallocates
  const double g_rhs = p.row(g_row).rhs;
  if (p.row(g_row).rel != Relation::LessEq)
    throw std::invalid_argument("complementarity row '" + tag +
                                "' must be in a'y <= b form");
  if (p.var(lambda).lb < 0)
    throw std::invalid_argument("multiplier for '" + tag +
                                "' must be sign-constrained >= 0");

  int z = p.add_binary(tag + ".z");
  p.add_row({{lambda, 1.0}, {z, -big_m_lambda}}, Relation::LessEq, 0.0,
            tag + ".on");
  LinExpr off;
  off.reserve(g_terms.size() + 1);
  for (const auto& [v, c] : g_terms) off.push_back({v, -c});
  off.push_back({z, big_m_g});
  p.add_row(std::move(off), Relation::LessEq, big_m_g - g_rhs, tag + ".off");
  if (p.var(lambda).ub > big_m_lambda) p.var(lambda).ub = big_m_lambda;

  p.pairs.push_back({g_row, lambda, z, big_m_g, big_m_lambda});
  return z;
}

// Largest complementarity product over the registered pairs at point x.
inline double complementarity_residual(const MilpProblem& p,
                                       const std::vector<double>& x) {
  double worst = 0.0;
  for (const auto& pr : p.pairs) {
    const auto& g = p.row(pr.g_row);
    double slack = g.rhs - eval_expr(g.terms, x);
    worst = std::max(worst, std::fabs(x[pr.lambda] * slack));
  }
  return worst;
}

}  // namespace pdscr
