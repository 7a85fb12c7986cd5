#pragma once

#include <string>
#include <vector>

#include "pdscr/grid.hpp"
#include "pdscr/milp.hpp"
#include "pdscr/piecewise.hpp"

namespace pdscr {

// Secant segments of one unit's fuel curve above p_min.
struct FuelSegments {
  double f_min = 0;  // fuel at p_min, charged through the status variable
  std::vector<double> width;
  std::vector<double> slope;
};

inline FuelSegments make_fuel_segments(const ThermalUnit& u, int segments) {
  FuelSegments fs;
  fs.f_min = u.fuel(u.p_min);
  if (u.p_max <= u.p_min) return fs;
  auto blk =
      linearize_quadratic(u.fuel_a, u.fuel_b, u.fuel_c, u.p_min, u.p_max,
                          segments);
  for (std::size_t k = 0; k + 1 < blk.breaks.size(); ++k) {
    fs.width.push_back(blk.breaks[k + 1] - blk.breaks[k]);
    fs.slope.push_back((blk.values[k + 1] - blk.values[k]) /
                       (blk.breaks[k + 1] - blk.breaks[k]));
  }
  return fs;
}

// Follower demand hook for the balance rows: either the production-line
// variables living in the same problem, or a fixed per-slot profile.
struct PmpCoupling {
  const PmpVars* vars = nullptr;
  const std::vector<double>* fixed = nullptr;
};

struct UcBuildOptions {
  double asc_cap = 1.0;        // flow cap as fraction of rating
  bool asc_cap_variable = false;
  int segments = 8;
};

struct UcVars {
  std::vector<std::vector<int>> s, u, w, u_init;        // [t][p]
  std::vector<std::vector<int>> p_t, r_t;               // [t][p]
  std::vector<std::vector<std::vector<int>>> seg;       // [t][p][k]
  std::vector<std::vector<std::vector<int>>> u_d;       // [t][p][d-1]
  std::vector<std::vector<int>> p_w;                    // [t][l]
  std::vector<std::vector<int>> theta;                  // [t][bus]
  std::vector<std::vector<int>> flow;                   // [t][branch]
  int asc_cap_var = -1;
  std::vector<FuelSegments> fuel;                       // per unit

  // linear fuel-cost expression of unit p in slot t
  LinExpr fuel_expr(int t, int p) const {
    LinExpr e = {{s[t][p], fuel[p].f_min}};
    for (std::size_t k = 0; k < fuel[p].slope.size(); ++k)
      e.push_back({seg[t][p][k], fuel[p].slope[k]});
    return e;
  }
};

// Emits commitment logic, capacity, ramps, wind caps, power balance with
// the industrial load, reserve window, DC flow and the margin-linked line
// limits for the full horizon.
inline UcVars build_uc_constraints(MilpProblem& p, const GridCase& gc,
                                   const PmpCoupling& pmp,
                                   const UcBuildOptions& opt = {}) {
  const int T = gc.T(), NG = gc.num_units(), NW = gc.num_farms();
  const int NB = gc.num_buses(), NL = gc.num_branches();
  const int slack = gc.slack_bus_index();
  UcVars v;
  auto nm = [](const char* k, int t, int i) {
    return std::string("uc.") + k + "[" + std::to_string(t) + "][" +
           std::to_string(i) + "]";
  };

  v.s.assign(T, std::vector<int>(NG));
  v.u.assign(T, std::vector<int>(NG));
  v.w.assign(T, std::vector<int>(NG));
  v.u_init.assign(T, std::vector<int>(NG));
  v.p_t.assign(T, std::vector<int>(NG));
  v.r_t.assign(T, std::vector<int>(NG));
  v.seg.assign(T, std::vector<std::vector<int>>(NG));
  v.u_d.assign(T, std::vector<std::vector<int>>(NG));
  v.p_w.assign(T, std::vector<int>(NW));
  v.theta.assign(T, std::vector<int>(NB));
  v.flow.assign(T, std::vector<int>(NL));
  for (int pu = 0; pu < NG; ++pu)
    v.fuel.push_back(make_fuel_segments(gc.units[pu], opt.segments));

  for (int t = 0; t < T; ++t)
    for (int g = 0; g < NG; ++g) {
      v.s[t][g] = p.add_binary(nm("s", t, g));
      v.u[t][g] = p.add_var(nm("u", t, g), 0, 1);
      v.w[t][g] = p.add_var(nm("w", t, g), 0, 1);
      v.u_init[t][g] = p.add_var(nm("ui", t, g), 0, 1);
      v.p_t[t][g] = p.add_var(nm("pt", t, g), 0, gc.units[g].p_max);
      v.r_t[t][g] = p.add_var(nm("rt", t, g), 0, gc.units[g].p_max);
      for (std::size_t k = 0; k < v.fuel[g].width.size(); ++k)
        v.seg[t][g].push_back(p.add_var(
            nm("seg", t, g) + "." + std::to_string(k), 0,
            v.fuel[g].width[k]));
      for (int d = 1; d <= t; ++d)
        v.u_d[t][g].push_back(
            p.add_var(nm("ud", t, g) + "." + std::to_string(d), 0, 1));
    }

  // remaining minimum-down time carried in from before the horizon
  for (int g = 0; g < NG; ++g) {
    int rem = gc.units[g].min_down -
              static_cast<int>(gc.units[g].initial_off());
    for (int t = 0; t < std::min(rem, T); ++t)
      p.add_row({{v.s[t][g], 1.0}}, Relation::LessEq, 0.0,
                nm("carry_dn", t, g));
  }

  for (int t = 0; t < T; ++t)
    for (int l = 0; l < NW; ++l)
      v.p_w[t][l] = p.add_var(nm("pw", t, l), 0, gc.wind[l].forecast[t]);

  for (int t = 0; t < T; ++t)
    for (int b = 0; b < NB; ++b)
      v.theta[t][b] = b == slack ? p.add_var(nm("th", t, b), 0, 0)
                                 : p.add_var(nm("th", t, b), -kInf, kInf);
  for (int t = 0; t < T; ++t)
    for (int j = 0; j < NL; ++j)
      v.flow[t][j] = p.add_var(nm("tp", t, j), -kInf, kInf);
  if (opt.asc_cap_variable) v.asc_cap_var = p.add_var("uc.asc_cap", 0, 1);

  // start/stop transition logic and minimum up/down windows
  for (int t = 0; t < T; ++t)
    for (int g = 0; g < NG; ++g) {
      const auto& unit = gc.units[g];
      int s_now = v.s[t][g];
      if (t == 0) {
        p.add_row({{v.u[0][g], 1.0}, {s_now, -1.0}}, Relation::Equal, 0.0,
                  nm("start0", t, g));
        p.add_row({{v.w[0][g], 1.0}}, Relation::Equal, 0.0, nm("stop0", t, g));
      } else {
        int s_prev = v.s[t - 1][g];
        p.add_row({{v.u[t][g], 1.0}, {s_now, -1.0}, {s_prev, 1.0}},
                  Relation::GreaterEq, 0.0, nm("start_lo", t, g));
        p.add_row({{v.u[t][g], 1.0}, {s_now, -1.0}}, Relation::LessEq, 0.0,
                  nm("start_hi1", t, g));
        p.add_row({{v.u[t][g], 1.0}, {s_prev, 1.0}}, Relation::LessEq, 1.0,
                  nm("start_hi2", t, g));
        p.add_row({{v.w[t][g], 1.0}, {s_prev, -1.0}, {s_now, 1.0}},
                  Relation::GreaterEq, 0.0, nm("stop_lo", t, g));
        p.add_row({{v.w[t][g], 1.0}, {s_prev, -1.0}}, Relation::LessEq, 0.0,
                  nm("stop_hi1", t, g));
        p.add_row({{v.w[t][g], 1.0}, {s_now, 1.0}}, Relation::LessEq, 1.0,
                  nm("stop_hi2", t, g));
      }
      {
        LinExpr e;
        for (int tau = std::max(0, t - unit.min_up + 1); tau <= t; ++tau)
          e.push_back({v.u[tau][g], 1.0});
        e.push_back({s_now, -1.0});
        p.add_row(std::move(e), Relation::LessEq, 0.0, nm("minup", t, g));
      }
      {
        LinExpr e;
        for (int tau = std::max(0, t - unit.min_down + 1); tau <= t; ++tau)
          e.push_back({v.w[tau][g], 1.0});
        e.push_back({s_now, 1.0});
        p.add_row(std::move(e), Relation::LessEq, 1.0, nm("mindn", t, g));
      }
      // startup classed by off-duration so (B.3) prices each transition
      {
        LinExpr e = {{v.u[t][g], -1.0}, {v.u_init[t][g], 1.0}};
        for (int d = 1; d <= t; ++d) {
          e.push_back({v.u_d[t][g][d - 1], 1.0});
          p.add_row({{v.u_d[t][g][d - 1], 1.0}, {v.w[t - d][g], -1.0}},
                    Relation::LessEq, 0.0,
                    nm("ud_link", t, g) + "." + std::to_string(d));
        }
        p.add_row(std::move(e), Relation::Equal, 0.0, nm("ud_sum", t, g));
        for (int tau = 0; tau < t; ++tau)
          p.add_row({{v.u_init[t][g], 1.0}, {v.s[tau][g], 1.0}},
                    Relation::LessEq, 1.0,
                    nm("ui_fresh", t, g) + "." + std::to_string(tau));
      }

      // output window while committed, reserve deliverability, ramps
      {
        LinExpr e = {{v.p_t[t][g], 1.0}, {s_now, -unit.p_min}};
        for (int k : v.seg[t][g]) e.push_back({k, -1.0});
        p.add_row(std::move(e), Relation::Equal, 0.0, nm("pdef", t, g));
      }
      for (std::size_t k = 0; k < v.seg[t][g].size(); ++k)
        p.add_row({{v.seg[t][g][k], 1.0}, {s_now, -v.fuel[g].width[k]}},
                  Relation::LessEq, 0.0,
                  nm("segcap", t, g) + "." + std::to_string(k));
      p.add_row({{v.p_t[t][g], 1.0}, {v.r_t[t][g], 1.0}, {s_now, -unit.p_max}},
                Relation::LessEq, 0.0, nm("spare", t, g));
      if (t == 0) {
        p.add_row({{v.p_t[0][g], 1.0}}, Relation::LessEq, unit.ramp_up,
                  nm("rampup", t, g));
      } else {
        p.add_row({{v.p_t[t][g], 1.0}, {v.p_t[t - 1][g], -1.0}},
                  Relation::LessEq, unit.ramp_up, nm("rampup", t, g));
        p.add_row({{v.p_t[t - 1][g], 1.0}, {v.p_t[t][g], -1.0}},
                  Relation::LessEq, unit.ramp_down, nm("rampdn", t, g));
      }
    }

  // reserve floor against wind-forecast error
  for (int t = 0; t < T; ++t) {
    LinExpr e;
    for (int g = 0; g < NG; ++g) e.push_back({v.r_t[t][g], 1.0});
    p.add_row(std::move(e), Relation::GreaterEq,
              gc.reserve_beta * gc.wind_forecast_total(t),
              "uc.reserve[" + std::to_string(t) + "]");
  }

  // system balance including the industrial demand
  for (int t = 0; t < T; ++t) {
    LinExpr e;
    double rhs = gc.total_load(t);
    for (int g = 0; g < NG; ++g) e.push_back({v.p_t[t][g], 1.0});
    for (int l = 0; l < NW; ++l) e.push_back({v.p_w[t][l], 1.0});
    if (pmp.vars) {
      for (int i = 0; i < gc.pmp.R(); ++i)
        e.push_back({pmp.vars->np[t][i],
                     -gc.pmp.procedures[i].power_per_project});
      for (int i = 0; i < gc.pmp.R() - 1; ++i)
        e.push_back({pmp.vars->nb[t][i],
                     -gc.pmp.buffers[i].power_per_project});
    } else if (pmp.fixed) {
      rhs += (*pmp.fixed)[t];
    }
    p.add_row(std::move(e), Relation::Equal, rhs,
              "uc.balance[" + std::to_string(t) + "]");
  }

  // nodal DC flow and branch definitions
  for (int t = 0; t < T; ++t) {
    for (int b = 0; b < NB; ++b) {
      LinExpr e;
      double rhs = -gc.buses[b].load[t];
      for (int j = 0; j < NL; ++j) {
        if (gc.bus_index(gc.branches[j].from) == b)
          e.push_back({v.flow[t][j], 1.0});
        else if (gc.bus_index(gc.branches[j].to) == b)
          e.push_back({v.flow[t][j], -1.0});
      }
      for (int g = 0; g < NG; ++g)
        if (gc.bus_index(gc.units[g].bus) == b)
          e.push_back({v.p_t[t][g], -1.0});
      for (int l = 0; l < NW; ++l)
        if (gc.bus_index(gc.wind[l].bus) == b)
          e.push_back({v.p_w[t][l], -1.0});
      if (gc.bus_index(gc.pmp_bus) == b) {
        if (pmp.vars) {
          for (int i = 0; i < gc.pmp.R(); ++i)
            e.push_back({pmp.vars->np[t][i],
                         gc.pmp.procedures[i].power_per_project});
          for (int i = 0; i < gc.pmp.R() - 1; ++i)
            e.push_back({pmp.vars->nb[t][i],
                         gc.pmp.buffers[i].power_per_project});
        } else if (pmp.fixed) {
          rhs -= (*pmp.fixed)[t];
        }
      }
      p.add_row(std::move(e), Relation::Equal, rhs,
                "uc.node[" + std::to_string(t) + "][" + std::to_string(b) +
                    "]");
    }
    for (int j = 0; j < NL; ++j) {
      const auto& br = gc.branches[j];
      p.add_row({{v.flow[t][j], 1.0},
                 {v.theta[t][gc.bus_index(br.from)], -br.susceptance},
                 {v.theta[t][gc.bus_index(br.to)], br.susceptance}},
                Relation::Equal, 0.0,
                "uc.tpdef[" + std::to_string(t) + "][" + std::to_string(j) +
                    "]");
      if (opt.asc_cap_variable) {
        p.add_row({{v.flow[t][j], 1.0}, {v.asc_cap_var, -br.rating}},
                  Relation::LessEq, 0.0,
                  "uc.tpcap+[" + std::to_string(t) + "][" + std::to_string(j) +
                      "]");
        p.add_row({{v.flow[t][j], -1.0}, {v.asc_cap_var, -br.rating}},
                  Relation::LessEq, 0.0,
                  "uc.tpcap-[" + std::to_string(t) + "][" + std::to_string(j) +
                      "]");
      } else {
        p.add_row({{v.flow[t][j], 1.0}}, Relation::LessEq,
                  br.rating * opt.asc_cap,
                  "uc.tpcap+[" + std::to_string(t) + "][" + std::to_string(j) +
                      "]");
        p.add_row({{v.flow[t][j], -1.0}}, Relation::LessEq,
                  br.rating * opt.asc_cap,
                  "uc.tpcap-[" + std::to_string(t) + "][" + std::to_string(j) +
                      "]");
      }
    }
  }
  return v;
}

// Thermal objective: exact-at-breakpoint fuel plus trajectory start costs.
inline void set_thermal_cost_objective(MilpProblem& p, const GridCase& gc,
                                       const UcVars& v) {
  for (int t = 0; t < gc.T(); ++t)
    for (int g = 0; g < gc.num_units(); ++g) {
      const auto& unit = gc.units[g];
      p.add_obj(v.s[t][g], v.fuel[g].f_min);
      for (std::size_t k = 0; k < v.fuel[g].slope.size(); ++k)
        p.add_obj(v.seg[t][g][k], v.fuel[g].slope[k]);
      p.add_obj(v.u_init[t][g], unit.start_cost(unit.initial_off() + t));
      for (int d = 1; d <= t; ++d)
        p.add_obj(v.u_d[t][g][d - 1], unit.start_cost(d));
    }
}

}  // namespace pdscr
