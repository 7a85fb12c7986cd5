#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "pdscr/grid.hpp"
#include "pdscr/milp_solver.hpp"
#include "pdscr/pmp.hpp"
#include "pdscr/uc.hpp"

namespace pdscr {

struct BilevelModel {
  MilpProblem prob;
  PmpKkt kkt;
  UcVars uc;
  std::vector<int> tier;  // per-slot tariff choice binaries (empty: flat)
};

// Single-level form of the day-ahead game: leader commitment/dispatch/tariff
// variables plus the follower's optimality system, coupled through the
// balance rows and the tariff terms of the stationarity rows.
inline BilevelModel build_bilevel(const GridCase& gc,
                                  const UcBuildOptions& opt = {}) {
  if (!(gc.price_high > 0) || !(gc.price_low > 0))
    throw std::invalid_argument("tariff tiers must be configured and > 0");
  BilevelModel m;
  PriceSpec price;
  if (gc.price_high == gc.price_low) {
    price = PriceSpec::from_fixed(std::vector<double>(gc.T(), gc.price_low));
  } else {
    for (int t = 0; t < gc.T(); ++t)
      m.tier.push_back(m.prob.add_binary("tier[" + std::to_string(t) + "]"));
    price.tier_vars = m.tier;
    price.tier_low = gc.price_low;
    price.tier_high = gc.price_high;
  }
  m.kkt = emit_kkt(m.prob, gc.pmp, price);
  PmpCoupling couple;
  couple.vars = &m.kkt.y;
  UcBuildOptions uo = opt;
  uo.segments = gc.fuel_segments;
  m.uc = build_uc_constraints(m.prob, gc, couple, uo);
  set_thermal_cost_objective(m.prob, gc, m.uc);
  return m;
}

inline std::vector<double> tariff_of(const GridCase& gc,
                                     const BilevelModel& m,
                                     const std::vector<double>& x) {
  std::vector<double> a(gc.T(), gc.price_low);
  for (int t = 0; t < gc.T(); ++t)
    if (!m.tier.empty() && x[m.tier[t]] > 0.5) a[t] = gc.price_high;
  return a;
}

inline DayAheadSolution extract_day_ahead(const GridCase& gc,
                                          const BilevelModel& m,
                                          const std::vector<double>& x) {
  const int T = gc.T();
  DayAheadSolution s;
  s.alpha = tariff_of(gc, m, x);
  s.status.assign(T, std::vector<int>(gc.num_units()));
  s.p_thermal.assign(T, std::vector<double>(gc.num_units()));
  s.reserve.assign(T, std::vector<double>(gc.num_units()));
  s.p_wind.assign(T, std::vector<double>(gc.num_farms()));
  s.flows.assign(T, std::vector<double>(gc.num_branches()));
  s.theta.assign(T, std::vector<double>(gc.num_buses()));
  for (int t = 0; t < T; ++t) {
    for (int g = 0; g < gc.num_units(); ++g) {
      s.status[t][g] = x[m.uc.s[t][g]] > 0.5 ? 1 : 0;
      s.p_thermal[t][g] = s.status[t][g] ? x[m.uc.p_t[t][g]] : 0.0;
      s.reserve[t][g] = std::max(0.0, x[m.uc.r_t[t][g]]);
    }
    for (int l = 0; l < gc.num_farms(); ++l)
      s.p_wind[t][l] = std::clamp(x[m.uc.p_w[t][l]], 0.0,
                                  gc.wind[l].forecast[t]);
    for (int j = 0; j < gc.num_branches(); ++j)
      s.flows[t][j] = x[m.uc.flow[t][j]];
    for (int b = 0; b < gc.num_buses(); ++b)
      s.theta[t][b] = x[m.uc.theta[t][b]];
  }
  s.pmp = extract_schedule(gc.pmp, m.kkt.y, x);
  s.j_pmp = schedule_cost(gc.pmp, s.pmp, s.alpha);
  double fuel = 0;
  for (int t = 0; t < T; ++t) fuel += s.fuel_cost(gc, t);
  s.j1 = fuel + trajectory_start_cost(gc, s.status);
  std::vector<double> ratings;
  for (const auto& br : gc.branches) ratings.push_back(br.rating);
  s.j2 = 1.0 - compute_asc(s.flows, ratings);
  s.curtailment = 0;
  for (int t = 0; t < T; ++t)
    for (int l = 0; l < gc.num_farms(); ++l)
      s.curtailment += gc.wind[l].forecast[t] - s.p_wind[t][l];
  return s;
}

struct FrontPoint {
  double j1 = 0, j2 = 0, curtailment = 0;
  DayAheadSolution sol;
};

struct ParetoFront {
  std::vector<FrontPoint> points;  // non-dominated, sorted by j2 ascending
  std::vector<double> eps_grid;
  std::vector<double> eps_skipped;  // infeasible grid points, logged
};

// a dominates b in (min j1, min j2)
inline bool dominates(double a1, double a2, double b1, double b2) {
  return a1 <= b1 + 1e-12 && a2 <= b2 + 1e-12 &&
         (a1 < b1 - 1e-9 || a2 < b2 - 1e-9);
}

inline void filter_front(std::vector<FrontPoint>& pts) {
  std::vector<FrontPoint> keep;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool dom = false;
    for (std::size_t k = 0; k < pts.size() && !dom; ++k)
      if (k != i &&
          (dominates(pts[k].j1, pts[k].j2, pts[i].j1, pts[i].j2) ||
           (k < i && pts[k].j1 == pts[i].j1 && pts[k].j2 == pts[i].j2)))
        dom = true;
    if (!dom) keep.push_back(std::move(pts[i]));
  }
  std::sort(keep.begin(), keep.end(), [](const auto& a, const auto& b) {
    return a.j2 != b.j2 ? a.j2 < b.j2 : a.j1 < b.j1;
  });
  pts = std::move(keep);
}

// Sweep: minimize J1 while capping J2 on an even grid between the best
// reachable J2 and the J2 of the unconstrained-J1 optimum.
inline ParetoFront epsilon_sweep(const GridCase& gc, int n,
                                 const SolverConfig& cfg = {},
                                 std::function<void(const std::string&)> log =
                                     nullptr) {
  if (n < 2) throw std::invalid_argument("epsilon_sweep: need n >= 2");
  auto say = [&](const std::string& s) {
    if (log) log(s);
  };

  // cost anchor: unconstrained-J1 optimum
  ParetoFront front;
  double j2_max;
  DayAheadSolution cost_anchor;
  {
    UcBuildOptions opt;
    opt.asc_cap = 1.0;
    auto m = build_bilevel(gc, opt);
    auto sol = solve_milp(m.prob, cfg);
    if (sol.status != SolveStatus::Optimal)
      throw std::runtime_error("cost anchor solve failed: " +
                               std::string(to_string(sol.status)));
    cost_anchor = extract_day_ahead(gc, m, sol.x);
    j2_max = cost_anchor.j2;
  }

  // commitment/tariff pattern helpers for pinned auxiliary solves
  struct Pattern {
    std::vector<std::vector<int>> status;  // [t][g]
    std::vector<int> tier;                 // [t], 0/1
  };
  auto pattern_of = [&](const DayAheadSolution& da) {
    Pattern p;
    p.status = da.status;
    for (int t = 0; t < gc.T(); ++t)
      p.tier.push_back(da.alpha[t] == gc.price_high ? 1 : 0);
    return p;
  };
  auto all_on_pattern = [&]() {
    Pattern p;
    p.status.assign(gc.T(), std::vector<int>(gc.num_units(), 1));
    for (int g = 0; g < gc.num_units(); ++g) {
      int rem = gc.units[g].min_down -
                static_cast<int>(gc.units[g].initial_off());
      for (int t = 0; t < std::min(rem, gc.T()); ++t) p.status[t][g] = 0;
    }
    p.tier.assign(gc.T(), 0);
    return p;
  };
  auto pin_pattern = [&](BilevelModel& m, const Pattern& pat) {
    for (int g = 0; g < gc.num_units(); ++g)
      for (int t = 0; t < gc.T(); ++t)
        m.prob.add_row({{m.uc.s[t][g], 1.0}}, Relation::Equal,
                       double(pat.status[t][g]), "pin_s");
    for (int t = 0; t < gc.T() && !m.tier.empty(); ++t)
      m.prob.add_row({{m.tier[t], 1.0}}, Relation::Equal,
                     double(pat.tier[t]), "pin_z");
  };
  // cheapest dispatch of a fixed pattern under a margin cap; the solution
  // vector lives in the grid problems' variable space
  auto repair = [&](const Pattern& pat, double cap)
      -> std::optional<std::vector<double>> {
    UcBuildOptions opt;
    opt.asc_cap = cap;
    auto m = build_bilevel(gc, opt);
    pin_pattern(m, pat);
    auto sol = solve_milp(m.prob, cfg);
    if (sol.status != SolveStatus::Optimal) return std::nullopt;
    return sol.x;
  };

  // security anchor: every unit brought online and redispatched for the
  // smallest line-margin cap; fixes the attainable end of the sweep range
  double j2_best;
  {
    UcBuildOptions opt;
    opt.asc_cap_variable = true;
    auto m = build_bilevel(gc, opt);
    for (int j = 0; j < m.prob.num_vars(); ++j) m.prob.set_obj(j, 0.0);
    m.prob.objective_constant = 0;
    m.prob.set_obj(m.uc.asc_cap_var, 1.0);
    pin_pattern(m, all_on_pattern());
    auto sol = solve_milp(m.prob, cfg);
    if (sol.status != SolveStatus::Optimal)
      throw std::runtime_error("security anchor solve failed: " +
                               std::string(to_string(sol.status)));
    j2_best = extract_day_ahead(gc, m, sol.x).j2;
  }

  Pattern prev_pattern = pattern_of(cost_anchor);
  front.points.push_back(FrontPoint{cost_anchor.j1, cost_anchor.j2,
                                    cost_anchor.curtailment,
                                    std::move(cost_anchor)});

  if (j2_max <= j2_best + 1e-9) {
    front.eps_grid = {j2_best, j2_max};
    filter_front(front.points);
    return front;  // degenerate trade-off: one point dominates
  }

  SolverConfig point_cfg = cfg;
  point_cfg.node_limit = std::min<long>(cfg.node_limit, 50);
  for (int k = 0; k < n; ++k)
    front.eps_grid.push_back(j2_best + (j2_max - j2_best) * k / (n - 1) +
                             1e-7);
  // walk from the loose end towards the security end, adapting the warm
  // incumbent's commitment pattern as it stops fitting the cap
  for (int k = n - 2; k >= 0; --k) {
    double eps = front.eps_grid[k];
    say("solving eps=" + std::to_string(eps));
    auto warm = repair(prev_pattern, eps);
    if (!warm) warm = repair(all_on_pattern(), eps);
    UcBuildOptions opt;
    opt.asc_cap = eps;
    auto m = build_bilevel(gc, opt);
    auto sol = solve_milp(m.prob, point_cfg, warm ? &*warm : nullptr);
    bool usable = sol.status == SolveStatus::Optimal ||
                  (sol.status == SolveStatus::IterationLimit &&
                   !sol.x.empty());
    if (!usable) {
      front.eps_skipped.push_back(eps);
      say("eps point " + std::to_string(eps) + " skipped: " +
          to_string(sol.status));
      continue;
    }
    if (sol.status == SolveStatus::IterationLimit)
      say("eps point " + std::to_string(eps) +
          " stopped at the node budget; keeping the incumbent");
    auto da = extract_day_ahead(gc, m, sol.x);
    prev_pattern = pattern_of(da);
    FrontPoint fp{da.j1, da.j2, da.curtailment, std::move(da)};
    front.points.push_back(std::move(fp));
  }
  filter_front(front.points);
  return front;
}

// Normalized Chebyshev distance to the per-front ideal point; ties go to
// the cheaper member.
inline int pick_compromise_index(const std::vector<std::pair<double, double>>&
                                     pts) {
  if (pts.empty())
    throw std::invalid_argument("pick_compromise: empty front");
  double lo1 = kInf, hi1 = -kInf, lo2 = kInf, hi2 = -kInf;
  for (const auto& [a, b] : pts) {
    lo1 = std::min(lo1, a);
    hi1 = std::max(hi1, a);
    lo2 = std::min(lo2, b);
    hi2 = std::max(hi2, b);
  }
  double r1 = hi1 - lo1 > 1e-12 ? hi1 - lo1 : 1.0;
  double r2 = hi2 - lo2 > 1e-12 ? hi2 - lo2 : 1.0;
  int best = 0;
  double best_d = kInf;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double d = std::max((pts[i].first - lo1) / r1, (pts[i].second - lo2) / r2);
    if (d < best_d - 1e-12 ||
        (d < best_d + 1e-12 && pts[i].first < pts[best].first - 1e-12)) {
      best_d = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

inline const FrontPoint& pick_compromise(const ParetoFront& front) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& fp : front.points) pts.push_back({fp.j1, fp.j2});
  return front.points[pick_compromise_index(pts)];
}

// Stackelberg response witness: re-solving the follower at the member's
// tariff must reproduce its bill.
inline double follower_resolve_gap(const GridCase& gc,
                                   const DayAheadSolution& s,
                                   const SolverConfig& cfg = {}) {
  auto r = solve_pmp(gc.pmp, s.alpha, cfg);
  if (r.status != SolveStatus::Optimal) return kInf;
  return std::fabs(r.j_pmp - s.j_pmp);
}

}  // namespace pdscr
