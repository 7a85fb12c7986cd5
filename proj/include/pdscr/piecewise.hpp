#pragma once

#include <cmath>
#include <stdexcept>

#include "pdscr/milp.hpp"

namespace pdscr {

// Secant linearization of the convex fuel curve a*P^2 + b*P + c on
// [pmin, pmax]. Exact at breakpoints; the overestimate between them is
// bounded by a * (width/segments)^2 / 4.
inline PiecewiseBlock linearize_quadratic(double a, double b, double c,
                                          double pmin, double pmax,
                                          int segments) {
  if (a < 0)
    throw std::invalid_argument("non-convex fuel cost (a < 0) unsupported");
  if (segments < 1) throw std::invalid_argument("segments must be >= 1");
  if (pmin > pmax) throw std::invalid_argument("pmin > pmax");

  auto f = [&](double p) { return a * p * p + b * p + c; };
  PiecewiseBlock blk;
  if (pmax == pmin) {
    blk.breaks = {pmin};
    blk.values = {f(pmin)};
    return blk;
  }
  for (int k = 0; k <= segments; ++k) {
    double p = pmin + (pmax - pmin) * k / segments;
    blk.breaks.push_back(p);
    blk.values.push_back(f(p));
  }
  return blk;
}

inline double piecewise_value(const PiecewiseBlock& blk, double x) {
  const auto& q = blk.breaks;
  const auto& v = blk.values;
  if (q.size() == 1) return v[0];
  if (x <= q.front()) return v.front();
  if (x >= q.back()) return v.back();
  for (std::size_t k = 0; k + 1 < q.size(); ++k) {
    if (x <= q[k + 1]) {
      double w = (x - q[k]) / (q[k + 1] - q[k]);
      return v[k] * (1 - w) + v[k + 1] * w;
    }
  }
  return v.back();
}

}  // namespace pdscr
