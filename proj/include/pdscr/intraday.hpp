#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pdscr/dayahead.hpp"
#include "pdscr/grid.hpp"
#include "pdscr/milp_solver.hpp"
#include "pdscr/uc.hpp"

namespace pdscr {

enum class ShareRule { Equal, Contribution };
enum class SlotMode { None, Equal, Contribution };

inline const char* to_string(SlotMode m) {
  switch (m) {
    case SlotMode::None: return "none";
    case SlotMode::Equal: return "equal";
    case SlotMode::Contribution: return "contribution";
  }
  return "?";
}

struct Shares {
  std::vector<double> plant;  // u_{k,t}
  double ipe = 0;             // v_t
  bool fell_back_to_equal = false;
};

// Equal split of the slot profit across the plants and the producer.
inline std::optional<Shares> mipdms_equal(double psi, int n_plants) {
  if (psi < 0 || n_plants < 1) return std::nullopt;
  Shares s;
  double each = psi / (n_plants + 1);
  s.plant.assign(n_plants, each);
  s.ipe = each;
  return s;
}

// Contribution-weighted split: plant m with adjusted power sigma_m takes
// sigma_m * psi / (S + sigma_m); the producer takes the remainder.
inline std::optional<Shares> mipdms_contribution(
    double psi, const std::vector<double>& sigma) {
  if (psi < 0 || sigma.empty()) return std::nullopt;
  double total = 0;
  for (double s : sigma) {
    if (s < 0) return std::nullopt;
    total += s;
  }
  if (total <= 0) {
    auto eq = mipdms_equal(psi, static_cast<int>(sigma.size()));
    if (eq) eq->fell_back_to_equal = true;
    return eq;
  }
  Shares out;
  double acc = 0;
  for (double s : sigma) {
    double u = s * psi / (total + s);
    out.plant.push_back(u);
    acc += u;
  }
  out.ipe = psi - acc;
  return out;
}

struct LedgerRow {
  double psi = 0;
  std::vector<double> plant_profit;  // u_{k,t}
  double ipe_profit = 0;             // v_t
  std::vector<double> plant_fuel_base, plant_fuel_updated;
  double ipe_bill_base = 0, ipe_bill_updated = 0;
  double pmp_incentive = 0;             // producer's slice of the payment
  std::vector<double> plant_incentive;  // per-plant payments
  double delta_wind = 0;                // added wind utilization, MW
  double commendation = 0;              // rate * delta_wind
  double p_outres = 0, c_outres = 0;
  SlotMode mode = SlotMode::None;
  bool contribution_fell_back = false;
};

struct ProfitLedger {
  std::vector<LedgerRow> rows;
  double j3 = 0;  // producer bill net of incentives, plus the fixed cost
  double j4 = 0;  // plant-side cost net of incentives and sales revenue
  double total_cost() const { return j3 + j4; }

  // payment budget identity: commendation funds exactly the incentives
  double budget_residual() const {
    double worst = 0;
    for (const auto& r : rows) {
      double paid = r.pmp_incentive;
      for (double x : r.plant_incentive) paid += x;
      worst = std::max(worst, std::fabs(r.commendation - paid));
    }
    return worst;
  }
  // accounting identity: shares absorb the whole slot profit
  double share_residual() const {
    double worst = 0;
    for (const auto& r : rows) {
      double sum = r.ipe_profit;
      for (double u : r.plant_profit) sum += u;
      worst = std::max(worst, std::fabs(sum - r.psi));
    }
    return worst;
  }
};

struct IntradayOutcome {
  std::vector<std::vector<double>> p_thermal;  // updated MW [t][p]
  std::vector<std::vector<double>> p_wind;     // updated MW [t][l]
  PmpSchedule pmp;
  std::vector<double> p_outres;  // MW per slot
  std::vector<std::vector<double>> flows, theta;
  std::vector<SlotMode> slot_mode;
  double j5 = 0;  // curtailed MW over the cycle
  double j6 = 0;  // 1 - updated security coefficient
  ProfitLedger ledger;
};

// ---------------------------------------------------------------------------
// Profit accounting at a trial dispatch (Step 2 cost model).

namespace detail_intraday {

inline void require_frozen(const GridCase& gc, const DayAheadSolution& da) {
  if (static_cast<int>(da.status.size()) != gc.T() ||
      static_cast<int>(da.alpha.size()) != gc.T())
    throw std::invalid_argument("day-ahead solution horizon mismatch");
}

}  // namespace detail_intraday

// Fills profit rows, incentives and the stage cost aggregates for a trial
// dispatch under realized wind. The commitment, reserves and tariff stay
// at their day-ahead values; shares follow the requested rule with per-slot
// reversion to non-cooperation where the profit or the contribution signs
// fail.
inline ProfitLedger updated_costs(const GridCase& gc,
                                  const DayAheadSolution& da,
                                  const IntradayOutcome& trial,
                                  ShareRule rule) {
  detail_intraday::require_frozen(gc, da);
  const int T = gc.T();
  auto plants = gc.plant_ids();
  const int NP = static_cast<int>(plants.size());
  auto plant_index = [&](int plant_id) {
    for (int k = 0; k < NP; ++k)
      if (plants[k] == plant_id) return k;
    throw std::logic_error("unknown plant");
  };

  ProfitLedger led;
  double incentives_to_pmp = 0, incentives_to_plants = 0;
  double fuel_updated_total = 0;

  for (int t = 0; t < T; ++t) {
    LedgerRow row;
    row.plant_fuel_base.assign(NP, 0.0);
    row.plant_fuel_updated.assign(NP, 0.0);
    row.plant_incentive.assign(NP, 0.0);
    row.plant_profit.assign(NP, 0.0);

    std::vector<double> energy_up(NP, 0.0);
    double energy_up_total = 0;
    for (int g = 0; g < gc.num_units(); ++g) {
      if (!da.status[t][g]) continue;
      int k = plant_index(gc.units[g].plant);
      row.plant_fuel_base[k] += gc.units[g].fuel(da.p_thermal[t][g]);
      row.plant_fuel_updated[k] += gc.units[g].fuel(trial.p_thermal[t][g]);
      energy_up[k] += trial.p_thermal[t][g];
      energy_up_total += trial.p_thermal[t][g];
    }
    row.ipe_bill_base = da.alpha[t] * da.pmp.slot_demand_mw(gc.pmp, t);
    row.ipe_bill_updated = da.alpha[t] * trial.pmp.slot_demand_mw(gc.pmp, t);

    double wind_base = 0, wind_up = 0;
    for (int l = 0; l < gc.num_farms(); ++l) {
      wind_base += da.p_wind[t][l];
      wind_up += trial.p_wind[t][l];
    }
    row.delta_wind = wind_up - wind_base;
    row.p_outres = trial.p_outres[t];
    row.c_outres = gc.reserve_price * trial.p_outres[t];
    fuel_updated_total += std::accumulate(row.plant_fuel_updated.begin(),
                                          row.plant_fuel_updated.end(), 0.0);

    double fuel_save = 0;
    for (int k = 0; k < NP; ++k)
      fuel_save += row.plant_fuel_base[k] - row.plant_fuel_updated[k];
    double psi =
        fuel_save + gc.incentive_rate * row.delta_wind - row.c_outres;

    bool changed = trial.slot_mode[t] != SlotMode::None;
    std::optional<Shares> shares;
    if (changed && psi >= 0) {
      std::vector<double> sigma(NP, 0.0);
      for (int g = 0; g < gc.num_units(); ++g)
        sigma[plant_index(gc.units[g].plant)] +=
            da.p_thermal[t][g] - trial.p_thermal[t][g];
      shares = rule == ShareRule::Equal
                   ? mipdms_equal(psi, NP)
                   : mipdms_contribution(psi, sigma);
    }
    if (shares) {
      row.psi = psi;
      row.mode = rule == ShareRule::Equal ? SlotMode::Equal
                                          : SlotMode::Contribution;
      row.contribution_fell_back = shares->fell_back_to_equal;
      row.plant_profit = shares->plant;
      row.ipe_profit = shares->ipe;
      row.commendation = gc.incentive_rate * row.delta_wind;

      // payments sized so the agreed shares land on each account
      double bill_save = row.ipe_bill_base - row.ipe_bill_updated;
      row.pmp_incentive = row.ipe_profit - bill_save;
      for (int k = 0; k < NP; ++k) {
        double share_v =
            energy_up_total > 1e-9 ? energy_up[k] / energy_up_total
                                   : 1.0 / NP;
        double fuel_save_k =
            row.plant_fuel_base[k] - row.plant_fuel_updated[k];
        row.plant_incentive[k] = row.plant_profit[k] - fuel_save_k +
                                 share_v * (bill_save + row.c_outres);
      }
      incentives_to_pmp += row.pmp_incentive;
      for (double x : row.plant_incentive) incentives_to_plants += x;
    } else {
      row.mode = SlotMode::None;
    }
    led.rows.push_back(std::move(row));
  }

  double pmp_bill_updated = 0;
  for (int t = 0; t < T; ++t) pmp_bill_updated += led.rows[t].ipe_bill_updated;
  led.j3 = pmp_bill_updated - incentives_to_pmp + gc.pmp.fixed_cost;

  double start_costs = trajectory_start_cost(gc, da.status);
  double outres_cost = 0;
  for (const auto& r : led.rows) outres_cost += r.c_outres;
  double sales_revenue = gc.sales_revenue_includes_fixed
                             ? led.j3
                             : led.j3 - gc.pmp.fixed_cost;
  led.j4 = fuel_updated_total + start_costs + outres_cost -
           incentives_to_plants - sales_revenue;
  return led;
}

// ---------------------------------------------------------------------------
// Intraday cooperative re-dispatch model.

struct IntradayModel {
  MilpProblem prob;
  std::vector<std::vector<int>> p_up;   // [t][g], -1 when the unit is off
  std::vector<std::vector<std::vector<int>>> seg;
  std::vector<std::vector<int>> p_w;    // [t][l]
  std::vector<int> outres;              // [t]
  std::vector<int> coop;                // [t] binaries
  std::vector<std::vector<int>> theta, flow;
  PmpVars pmp;
  std::vector<FuelSegments> fuel;
  double curtail_const = 0;  // total realized wind
};

struct IntradayBuildOptions {
  double asc_cap = 1.0;      // flow cap fraction; >= 1 disables the margin
  bool flow_caps = true;     // Case-1 evaluation drops the caps entirely
  bool allow_coop = true;    // Case-1: everything frozen
};

inline IntradayModel build_intraday(const GridCase& gc,
                                    const DayAheadSolution& da,
                                    const std::vector<std::vector<double>>&
                                        realized,  // [t][l]
                                    ShareRule rule,
                                    const IntradayBuildOptions& opt) {
  detail_intraday::require_frozen(gc, da);
  const int T = gc.T(), NG = gc.num_units(), NW = gc.num_farms();
  const int NB = gc.num_buses(), NL = gc.num_branches();
  const int slack = gc.slack_bus_index();
  auto plants = gc.plant_ids();

  IntradayModel m;
  auto& p = m.prob;
  auto nm = [](const char* k, int t, int i) {
    return std::string("up.") + k + "[" + std::to_string(t) + "][" +
           std::to_string(i) + "]";
  };
  for (int g = 0; g < NG; ++g)
    m.fuel.push_back(make_fuel_segments(gc.units[g], gc.fuel_segments));

  m.p_up.assign(T, std::vector<int>(NG, -1));
  m.seg.assign(T, std::vector<std::vector<int>>(NG));
  m.p_w.assign(T, std::vector<int>(NW));
  m.outres.resize(T);
  m.coop.resize(T);
  m.theta.assign(T, std::vector<int>(NB));
  m.flow.assign(T, std::vector<int>(NL));

  double max_need = 0;
  for (int t = 0; t < T; ++t)
    max_need = std::max(max_need, gc.total_load(t));
  max_need += 100.0;

  for (int t = 0; t < T; ++t) {
    m.coop[t] = p.add_binary("up.coop[" + std::to_string(t) + "]");
    if (!opt.allow_coop)
      p.add_row({{m.coop[t], 1.0}}, Relation::LessEq, 0.0, "no_coop");
    for (int g = 0; g < NG; ++g) {
      if (!da.status[t][g]) continue;
      m.p_up[t][g] =
          p.add_var(nm("pt", t, g), 0, gc.units[g].p_max);
      for (std::size_t k = 0; k < m.fuel[g].width.size(); ++k)
        m.seg[t][g].push_back(p.add_var(
            nm("seg", t, g) + "." + std::to_string(k), 0, m.fuel[g].width[k]));
    }
    for (int l = 0; l < NW; ++l)
      m.p_w[t][l] =
          p.add_var(nm("pw", t, l), 0, std::max(0.0, realized[t][l]));
    m.outres[t] = p.add_var(nm("res", t, 0), 0, max_need);
    for (int b = 0; b < NB; ++b)
      m.theta[t][b] = b == slack ? p.add_var(nm("th", t, b), 0, 0)
                                 : p.add_var(nm("th", t, b), -kInf, kInf);
    for (int j = 0; j < NL; ++j)
      m.flow[t][j] = p.add_var(nm("tp", t, j), -kInf, kInf);
  }
  m.pmp = add_pmp_block(p, gc.pmp, nullptr, "up.pmp");

  double pwl_gap_total = 0;
  for (int g = 0; g < NG; ++g) {
    double w = 0;
    for (double x : m.fuel[g].width) w = std::max(w, x);
    pwl_gap_total += gc.units[g].fuel_a * w * w / 4;
  }

  for (int t = 0; t < T; ++t) {
    // thermal band around the committed point, collapsing when the slot
    // does not cooperate
    for (int g = 0; g < NG; ++g) {
      if (m.p_up[t][g] < 0) continue;
      const auto& u = gc.units[g];
      p.add_row({{m.p_up[t][g], 1.0}, {m.coop[t], -da.reserve[t][g]}},
                Relation::LessEq, da.p_thermal[t][g], nm("band_hi", t, g));
      p.add_row({{m.p_up[t][g], -1.0}, {m.coop[t], -da.reserve[t][g]}},
                Relation::LessEq, -da.p_thermal[t][g], nm("band_lo", t, g));
      LinExpr def = {{m.p_up[t][g], 1.0}};
      for (int sv : m.seg[t][g]) def.push_back({sv, -1.0});
      p.add_row(std::move(def), Relation::Equal, u.p_min, nm("pdef", t, g));
    }
    // production-line counts pinned to the day-ahead schedule off-coop
    for (int i = 0; i < gc.pmp.R(); ++i) {
      double cap = gc.pmp.procedures[i].max_projects;
      p.add_row({{m.pmp.np[t][i], 1.0}, {m.coop[t], -cap}}, Relation::LessEq,
                da.pmp.processed[t][i], nm("npin_hi", t, i));
      p.add_row({{m.pmp.np[t][i], -1.0}, {m.coop[t], -cap}}, Relation::LessEq,
                -da.pmp.processed[t][i], nm("npin_lo", t, i));
    }
    for (int i = 0; i < gc.pmp.R() - 1; ++i) {
      double cap = gc.pmp.buffers[i].max_projects;
      p.add_row({{m.pmp.nb[t][i], 1.0}, {m.coop[t], -cap}}, Relation::LessEq,
                da.pmp.buffered[t][i], nm("bpin_hi", t, i));
      p.add_row({{m.pmp.nb[t][i], -1.0}, {m.coop[t], -cap}}, Relation::LessEq,
                -da.pmp.buffered[t][i], nm("bpin_lo", t, i));
    }

    // balance with external reserve purchases
    {
      LinExpr e;
      double rhs = gc.total_load(t);
      for (int g = 0; g < NG; ++g)
        if (m.p_up[t][g] >= 0) e.push_back({m.p_up[t][g], 1.0});
      for (int l = 0; l < NW; ++l) e.push_back({m.p_w[t][l], 1.0});
      e.push_back({m.outres[t], 1.0});
      for (int i = 0; i < gc.pmp.R(); ++i)
        e.push_back({m.pmp.np[t][i], -gc.pmp.procedures[i].power_per_project});
      for (int i = 0; i < gc.pmp.R() - 1; ++i)
        e.push_back({m.pmp.nb[t][i], -gc.pmp.buffers[i].power_per_project});
      p.add_row(std::move(e), Relation::Equal, rhs,
                "up.balance[" + std::to_string(t) + "]");
    }

    // nodal flow; purchased reserve electricity lands on the slack bus
    for (int b = 0; b < NB; ++b) {
      LinExpr e;
      double rhs = -gc.buses[b].load[t];
      for (int j = 0; j < NL; ++j) {
        if (gc.bus_index(gc.branches[j].from) == b)
          e.push_back({m.flow[t][j], 1.0});
        else if (gc.bus_index(gc.branches[j].to) == b)
          e.push_back({m.flow[t][j], -1.0});
      }
      for (int g = 0; g < NG; ++g)
        if (m.p_up[t][g] >= 0 && gc.bus_index(gc.units[g].bus) == b)
          e.push_back({m.p_up[t][g], -1.0});
      for (int l = 0; l < NW; ++l)
        if (gc.bus_index(gc.wind[l].bus) == b)
          e.push_back({m.p_w[t][l], -1.0});
      if (b == slack) e.push_back({m.outres[t], -1.0});
      if (gc.bus_index(gc.pmp_bus) == b) {
        for (int i = 0; i < gc.pmp.R(); ++i)
          e.push_back({m.pmp.np[t][i],
                       gc.pmp.procedures[i].power_per_project});
        for (int i = 0; i < gc.pmp.R() - 1; ++i)
          e.push_back({m.pmp.nb[t][i], gc.pmp.buffers[i].power_per_project});
      }
      p.add_row(std::move(e), Relation::Equal, rhs,
                "up.node[" + std::to_string(t) + "][" + std::to_string(b) +
                    "]");
    }
    for (int j = 0; j < NL; ++j) {
      const auto& br = gc.branches[j];
      p.add_row({{m.flow[t][j], 1.0},
                 {m.theta[t][gc.bus_index(br.from)], -br.susceptance},
                 {m.theta[t][gc.bus_index(br.to)], br.susceptance}},
                Relation::Equal, 0.0,
                "up.tpdef[" + std::to_string(t) + "][" + std::to_string(j) +
                    "]");
      if (opt.flow_caps) {
        p.add_row({{m.flow[t][j], 1.0}}, Relation::LessEq,
                  br.rating * opt.asc_cap, "up.tpcap+");
        p.add_row({{m.flow[t][j], -1.0}}, Relation::LessEq,
                  br.rating * opt.asc_cap, "up.tpcap-");
      }
    }

    // cooperation must not lose money: updated fuel plus reserve purchases
    // net of the wind commendation may not exceed the day-ahead fuel
    if (opt.allow_coop) {
      double fuel_da = da.fuel_cost(gc, t);
      double wind_da = 0;
      for (int l = 0; l < NW; ++l) wind_da += da.p_wind[t][l];
      double big_psi =
          10 * (pwl_gap_total + gc.incentive_rate * (wind_da + 500) +
                gc.reserve_price * max_need + 10);
      LinExpr e;
      double rhs = fuel_da + gc.incentive_rate * (-wind_da) + big_psi;
      for (int g = 0; g < NG; ++g) {
        if (m.p_up[t][g] < 0) continue;
        for (std::size_t k = 0; k < m.seg[t][g].size(); ++k)
          e.push_back({m.seg[t][g][k], m.fuel[g].slope[k]});
        rhs -= m.fuel[g].f_min;  // constant part of the updated fuel
      }
      for (int l = 0; l < NW; ++l)
        e.push_back({m.p_w[t][l], -gc.incentive_rate});
      e.push_back({m.outres[t], gc.reserve_price});
      e.push_back({m.coop[t], big_psi});
      p.add_row(std::move(e), Relation::LessEq, rhs,
                "up.profit[" + std::to_string(t) + "]");

      if (rule == ShareRule::Contribution) {
        for (std::size_t k = 0; k < plants.size(); ++k) {
          LinExpr s;
          double srhs = 0;
          double range = 0;
          for (int g = 0; g < NG; ++g) {
            if (gc.units[g].plant != plants[k] || m.p_up[t][g] < 0) continue;
            s.push_back({m.p_up[t][g], 1.0});
            srhs += da.p_thermal[t][g];
            range += gc.units[g].p_max;
          }
          if (s.empty()) continue;
          // cutback sign: updated output of the plant stays at or below
          // the committed level whenever the slot cooperates
          s.push_back({m.coop[t], 10 * range + 10});
          p.add_row(std::move(s), Relation::LessEq, srhs + 10 * range + 10,
                    "up.sigma[" + std::to_string(t) + "]." +
                        std::to_string(k));
        }
      }
    }
  }

  m.curtail_const = 0;
  for (int t = 0; t < T; ++t)
    for (int l = 0; l < NW; ++l)
      m.curtail_const += std::max(0.0, realized[t][l]);
  return m;
}

inline void set_curtailment_objective(IntradayModel& m) {
  for (int j = 0; j < m.prob.num_vars(); ++j) m.prob.set_obj(j, 0.0);
  m.prob.objective_constant = m.curtail_const;
  for (const auto& slot : m.p_w)
    for (int v : slot) m.prob.add_obj(v, -1.0);
}

// system-cost tie-break: fuel plus reserve purchases minus commendation,
// with a whisper of pressure towards non-cooperation on indifferent slots
inline void set_cost_objective(IntradayModel& m, const GridCase& gc) {
  for (int j = 0; j < m.prob.num_vars(); ++j) m.prob.set_obj(j, 0.0);
  m.prob.objective_constant = 0;
  for (std::size_t t = 0; t < m.seg.size(); ++t) {
    for (std::size_t g = 0; g < m.seg[t].size(); ++g)
      for (std::size_t k = 0; k < m.seg[t][g].size(); ++k)
        m.prob.add_obj(m.seg[t][g][k], m.fuel[g].slope[k]);
    m.prob.add_obj(m.outres[t], gc.reserve_price);
    for (int v : m.p_w[t]) m.prob.add_obj(v, -gc.incentive_rate);
    m.prob.add_obj(m.coop[t], 1e-4);
  }
}

inline IntradayOutcome extract_intraday(const GridCase& gc,
                                        const DayAheadSolution& da,
                                        const IntradayModel& m,
                                        const std::vector<double>& x) {
  const int T = gc.T();
  IntradayOutcome out;
  out.p_thermal.assign(T, std::vector<double>(gc.num_units(), 0.0));
  out.p_wind.assign(T, std::vector<double>(gc.num_farms(), 0.0));
  out.p_outres.assign(T, 0.0);
  out.flows.assign(T, std::vector<double>(gc.num_branches(), 0.0));
  out.theta.assign(T, std::vector<double>(gc.num_buses(), 0.0));
  out.slot_mode.assign(T, SlotMode::None);
  for (int t = 0; t < T; ++t) {
    for (int g = 0; g < gc.num_units(); ++g)
      out.p_thermal[t][g] = m.p_up[t][g] >= 0 ? x[m.p_up[t][g]] : 0.0;
    for (int l = 0; l < gc.num_farms(); ++l) out.p_wind[t][l] = x[m.p_w[t][l]];
    out.p_outres[t] = x[m.outres[t]];
    for (int j = 0; j < gc.num_branches(); ++j)
      out.flows[t][j] = x[m.flow[t][j]];
    for (int b = 0; b < gc.num_buses(); ++b)
      out.theta[t][b] = x[m.theta[t][b]];
  }
  out.pmp = extract_schedule(gc.pmp, m.pmp, x);
  // a slot counts as responding only when its dispatch actually moved
  for (int t = 0; t < T; ++t) {
    if (x[m.coop[t]] < 0.5) continue;
    double moved = 0;
    for (int g = 0; g < gc.num_units(); ++g)
      moved = std::max(moved,
                       std::fabs(out.p_thermal[t][g] - da.p_thermal[t][g]));
    for (int i = 0; i < gc.pmp.R(); ++i)
      moved = std::max(moved, std::fabs(out.pmp.processed[t][i] -
                                        da.pmp.processed[t][i]));
    if (moved > 1e-6) out.slot_mode[t] = SlotMode::Equal;  // rule set later
  }
  out.j5 = m.curtail_const;
  for (int t = 0; t < T; ++t)
    for (int l = 0; l < gc.num_farms(); ++l) out.j5 -= out.p_wind[t][l];
  std::vector<double> ratings;
  for (const auto& br : gc.branches) ratings.push_back(br.rating);
  out.j6 = 1.0 - compute_asc(out.flows, ratings);
  return out;
}

struct IntradayResult {
  IntradayOutcome compromise;
  std::vector<std::pair<double, double>> front;  // (j5, j6) non-dominated
  std::vector<double> eps_skipped;
};

// Two-phase solve at one margin cap: best curtailment first, then the
// cheapest dispatch achieving it.
inline std::optional<IntradayOutcome> solve_intraday_point(
    const GridCase& gc, const DayAheadSolution& da,
    const std::vector<std::vector<double>>& realized, ShareRule rule,
    const IntradayBuildOptions& opt, const SolverConfig& cfg) {
  auto m = build_intraday(gc, da, realized, rule, opt);
  set_curtailment_objective(m);
  auto a = solve_milp(m.prob, cfg);
  if (a.status != SolveStatus::Optimal) return std::nullopt;
  double j5_star = a.objective;

  LinExpr cap;
  double rhs = j5_star + 1e-6 * (1 + std::fabs(j5_star)) - m.curtail_const;
  for (const auto& slot : m.p_w)
    for (int v : slot) cap.push_back({v, -1.0});
  m.prob.add_row(std::move(cap), Relation::LessEq, rhs, "up.j5cap");
  set_cost_objective(m, gc);
  auto b = solve_milp(m.prob, cfg, &a.x);
  const auto& sol = b.status == SolveStatus::Optimal ? b : a;
  auto out = extract_intraday(gc, da, m, sol.x);
  for (auto& sm : out.slot_mode)
    if (sm != SlotMode::None)
      sm = rule == ShareRule::Equal ? SlotMode::Equal : SlotMode::Contribution;
  out.ledger = updated_costs(gc, da, out, rule);
  return out;
}

// Day-ahead scheme held fixed under the realized wind: reserves purchased
// for shortfalls, surplus curtailed, line limits reported but not enforced.
inline IntradayOutcome evaluate_day_ahead_fixed(
    const GridCase& gc, const DayAheadSolution& da,
    const std::vector<std::vector<double>>& realized,
    const SolverConfig& cfg) {
  IntradayBuildOptions opt;
  opt.flow_caps = false;
  opt.allow_coop = false;
  auto out = solve_intraday_point(gc, da, realized, ShareRule::Equal, opt,
                                  cfg);
  if (!out)
    throw std::runtime_error(
        "held-fixed evaluation infeasible: load shed even with maximum "
        "reserve purchases");
  return *out;
}

// Margin sweep over the intraday objectives, mirroring the day-ahead one.
inline IntradayResult solve_intraday(const GridCase& gc,
                                     const DayAheadSolution& da,
                                     const std::vector<std::vector<double>>&
                                         realized,
                                     ShareRule rule, int n_eps = 5,
                                     const SolverConfig& cfg = {}) {
  if (n_eps < 2) throw std::invalid_argument("solve_intraday: need n >= 2");
  IntradayResult res;

  IntradayBuildOptions loose;
  loose.asc_cap = 1.0;
  auto base = solve_intraday_point(gc, da, realized, rule, loose, cfg);
  if (!base)
    throw std::runtime_error(
        "intraday infeasible: load shed even with maximum reserves");
  double j6_max = base->j6;

  // security anchor: all slots free to cooperate, minimal margin cap
  double j6_best = j6_max;
  {
    auto m = build_intraday(gc, da, realized, rule, loose);
    int capv = m.prob.add_var("up.asc_cap", 0, 1);
    for (std::size_t t = 0; t < m.flow.size(); ++t)
      for (std::size_t j = 0; j < m.flow[t].size(); ++j) {
        double rating = gc.branches[j].rating;
        m.prob.add_row({{m.flow[t][j], 1.0}, {capv, -rating}},
                       Relation::LessEq, 0.0, "up.mcap+");
        m.prob.add_row({{m.flow[t][j], -1.0}, {capv, -rating}},
                       Relation::LessEq, 0.0, "up.mcap-");
      }
    for (int j = 0; j < m.prob.num_vars(); ++j) m.prob.set_obj(j, 0.0);
    m.prob.objective_constant = 0;
    m.prob.set_obj(capv, 1.0);
    auto sol = solve_milp(m.prob, cfg);
    if (sol.status == SolveStatus::Optimal)
      j6_best = extract_intraday(gc, da, m, sol.x).j6;
  }

  std::vector<std::pair<double, IntradayOutcome>> pts;
  pts.push_back({base->j5, std::move(*base)});
  if (j6_max > j6_best + 1e-9) {
    for (int k = 0; k + 1 < n_eps; ++k) {
      double eps = j6_best + (j6_max - j6_best) * k / (n_eps - 1) + 1e-7;
      IntradayBuildOptions opt;
      opt.asc_cap = eps;
      auto out = solve_intraday_point(gc, da, realized, rule, opt, cfg);
      if (!out) {
        res.eps_skipped.push_back(eps);
        continue;
      }
      pts.push_back({out->j5, std::move(*out)});
    }
  }

  // non-dominated filter in (j5, j6), then the compromise point
  std::vector<std::pair<double, double>> keep;
  std::vector<int> keep_idx;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool dom = false;
    for (std::size_t k = 0; k < pts.size() && !dom; ++k) {
      if (k == i) continue;
      const auto& a = pts[k].second;
      const auto& b = pts[i].second;
      if (dominates(a.j5, a.j6, b.j5, b.j6) ||
          (k < i && a.j5 == b.j5 && a.j6 == b.j6))
        dom = true;
    }
    if (!dom) {
      keep.push_back({pts[i].second.j5, pts[i].second.j6});
      keep_idx.push_back(static_cast<int>(i));
    }
  }
  int pick = pick_compromise_index(keep);
  res.compromise = std::move(pts[keep_idx[pick]].second);
  res.front = std::move(keep);
  std::sort(res.front.begin(), res.front.end(),
            [](const auto& a, const auto& b) {
              return a.second != b.second ? a.second < b.second
                                          : a.first < b.first;
            });
  return res;
}

}  // namespace pdscr
