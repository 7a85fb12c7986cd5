#pragma once

// Independent re-evaluation of an accepted day-ahead solution against the
// case data. Deliberately shares no code with the constraint builder:
// everything is straight loops over the solution arrays, with flows
// re-derived from injections through the factorized network.

#include <cmath>
#include <string>
#include <vector>

#include "pdscr/grid.hpp"

namespace pdscr {

struct ReplayReport {
  std::vector<std::string> violations;
  double recomputed_j1 = 0;
  double recomputed_j2 = 0;
  double recomputed_j_pmp = 0;
  bool ok() const { return violations.empty(); }
};

inline ReplayReport replay_day_ahead(const GridCase& gc,
                                     const DayAheadSolution& s,
                                     double tol = 1e-5) {
  ReplayReport rep;
  auto bad = [&](const std::string& msg) { rep.violations.push_back(msg); };
  const int T = gc.T();

  // commitment logic: run lengths from the raw status trajectory
  for (int g = 0; g < gc.num_units(); ++g) {
    const auto& u = gc.units[g];
    int run = 0, off_run = static_cast<int>(u.initial_off());
    int prev = 0;
    for (int t = 0; t < T; ++t) {
      int on = s.status[t][g];
      if (on != 0 && on != 1) bad("status not binary at t=" + std::to_string(t));
      if (on && !prev && off_run < u.min_down)
        bad("unit " + u.id + " restarts after " + std::to_string(off_run) +
            "h off at t=" + std::to_string(t));
      if (!on && prev && run < u.min_up)
        bad("unit " + u.id + " stops after " + std::to_string(run) +
            "h on at t=" + std::to_string(t));
      if (on) {
        run = prev ? run + 1 : 1;
        off_run = 0;
      } else {
        off_run = prev ? 1 : off_run + 1;
        run = 0;
      }
      prev = on;
    }
  }

  // output windows, reserve headroom, ramps
  for (int t = 0; t < T; ++t) {
    double spare = 0;
    double reserve_total = 0;
    for (int g = 0; g < gc.num_units(); ++g) {
      const auto& u = gc.units[g];
      double pw = s.p_thermal[t][g];
      double rv = s.reserve[t][g];
      if (s.status[t][g]) {
        if (pw < u.p_min - tol || pw > u.p_max + tol)
          bad("unit " + u.id + " outside [Pmin,Pmax] at t=" +
              std::to_string(t));
        spare += u.p_max - pw;
      } else if (std::fabs(pw) > tol) {
        bad("unit " + u.id + " produces while off at t=" + std::to_string(t));
      }
      if (rv < -tol) bad("negative reserve at t=" + std::to_string(t));
      if (pw + rv > u.p_max * s.status[t][g] + tol)
        bad("unit " + u.id + " reserve exceeds headroom at t=" +
            std::to_string(t));
      reserve_total += rv;
      double prev_p = t == 0 ? 0.0 : s.p_thermal[t - 1][g];
      if (pw - prev_p > u.ramp_up + tol)
        bad("unit " + u.id + " ramps up too fast at t=" + std::to_string(t));
      if (t > 0 && prev_p - pw > u.ramp_down + tol)
        bad("unit " + u.id + " ramps down too fast at t=" + std::to_string(t));
    }
    double floor = gc.reserve_beta * gc.wind_forecast_total(t);
    if (reserve_total < floor - tol)
      bad("reserve below wind-error floor at t=" + std::to_string(t));
    if (reserve_total > spare + tol)
      bad("reserve exceeds committed spare capacity at t=" +
          std::to_string(t));
  }

  // wind caps
  for (int t = 0; t < T; ++t)
    for (int l = 0; l < gc.num_farms(); ++l) {
      if (s.p_wind[t][l] < -tol ||
          s.p_wind[t][l] > gc.wind[l].forecast[t] + tol)
        bad("wind farm " + gc.wind[l].id + " outside forecast cap at t=" +
            std::to_string(t));
    }

  // balance with the industrial demand included
  for (int t = 0; t < T; ++t) {
    double gen = 0;
    for (int g = 0; g < gc.num_units(); ++g) gen += s.p_thermal[t][g];
    for (int l = 0; l < gc.num_farms(); ++l) gen += s.p_wind[t][l];
    double demand = gc.total_load(t) + s.pmp.slot_demand_mw(gc.pmp, t);
    if (std::fabs(gen - demand) > 1e-5)
      bad("balance residual " + std::to_string(gen - demand) + " MW at t=" +
          std::to_string(t));
  }

  // flows re-derived from injections
  {
    std::vector<std::vector<double>> inj(T,
                                         std::vector<double>(gc.num_buses()));
    for (int t = 0; t < T; ++t) {
      for (int b = 0; b < gc.num_buses(); ++b)
        inj[t][b] = -gc.buses[b].load[t];
      for (int g = 0; g < gc.num_units(); ++g)
        inj[t][gc.bus_index(gc.units[g].bus)] += s.p_thermal[t][g];
      for (int l = 0; l < gc.num_farms(); ++l)
        inj[t][gc.bus_index(gc.wind[l].bus)] += s.p_wind[t][l];
      inj[t][gc.bus_index(gc.pmp_bus)] -= s.pmp.slot_demand_mw(gc.pmp, t);
      double net = 0;
      for (double x : inj[t]) net += x;
      inj[t][gc.slack_bus_index()] -= net;  // absorb the balance residual
    }
    auto fr = dc_flow(gc, inj);
    for (int t = 0; t < T; ++t)
      for (int j = 0; j < gc.num_branches(); ++j)
        if (std::fabs(fr.flows[t][j] - s.flows[t][j]) > 1e-4)
          bad("reported flow deviates from network solve on branch " +
              gc.branches[j].id + " at t=" + std::to_string(t));
    std::vector<double> ratings;
    for (const auto& br : gc.branches) ratings.push_back(br.rating);
    rep.recomputed_j2 = 1.0 - compute_asc(fr.flows, ratings);
    // margin-linked line limit against the claimed security coefficient
    for (int t = 0; t < T; ++t)
      for (int j = 0; j < gc.num_branches(); ++j)
        if (std::fabs(fr.flows[t][j]) >
            gc.branches[j].rating * s.j2 + 1e-4 * gc.branches[j].rating)
          bad("flow beyond margin-linked limit on branch " +
              gc.branches[j].id);
  }

  // production schedule legality and claimed objective values
  if (schedule_violation(gc.pmp, s.pmp) > tol)
    bad("industrial schedule violates the production constraints");
  double fuel = 0;
  for (int t = 0; t < T; ++t) fuel += s.fuel_cost(gc, t);
  rep.recomputed_j1 = fuel + trajectory_start_cost(gc, s.status);
  rep.recomputed_j_pmp = schedule_cost(gc.pmp, s.pmp, s.alpha);
  if (std::fabs(rep.recomputed_j1 - s.j1) > 1e-4 * (1 + std::fabs(s.j1)))
    bad("claimed thermal cost deviates from recomputation");
  if (std::fabs(rep.recomputed_j_pmp - s.j_pmp) >
      1e-4 * (1 + std::fabs(s.j_pmp)))
    bad("claimed industrial bill deviates from recomputation");
  if (std::fabs(rep.recomputed_j2 - s.j2) > 1e-4)
    bad("claimed margin objective deviates from recomputation");
  return rep;
}

}  // namespace pdscr
