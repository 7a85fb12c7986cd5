#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "pdscr/pmp.hpp"

namespace pdscr {

struct ThermalUnit {
  std::string id;
  int bus = 0;
  int plant = 0;  // ownership group for profit accounting
  double fuel_a = 0, fuel_b = 0, fuel_c = 0;      // $/MW^2, $/MW, $
  double start_alpha = 0, start_beta = 0, start_tau = 1;
  double init_off_h = -1;  // off-time before slot 1; -1 means min_down
  double p_min = 0, p_max = 0;
  double ramp_up = 0, ramp_down = 0;  // MW/h
  int min_up = 1, min_down = 1;       // h

  double fuel(double p) const { return fuel_a * p * p + fuel_b * p + fuel_c; }
  double start_cost(double off_h) const {
    return start_alpha + start_beta * (1.0 - std::exp(-off_h / start_tau));
  }
  double initial_off() const { return init_off_h < 0 ? min_down : init_off_h; }
};

struct WindFarm {
  std::string id;
  int bus = 0;
  std::vector<double> forecast;  // MW per slot
};

struct Bus {
  int id = 0;
  std::vector<double> load;  // traditional load MW per slot
};

struct Branch {
  std::string id;
  int from = 0, to = 0;
  double susceptance = 0;  // MW per rad
  double rating = 0;       // MW
};

struct GridCase {
  std::string name;
  int horizon = 0;
  std::vector<Bus> buses;
  std::vector<Branch> branches;
  std::vector<ThermalUnit> units;
  std::vector<WindFarm> wind;
  PmpSystem pmp;
  int pmp_bus = 0;

  // price-based program tiers ($/MWh after ingestion) and the intraday
  // commendation rate
  double price_high = 0, price_low = 0;
  double incentive_rate = 0;  // $/MWh of added wind utilization
  double reserve_beta = 0;    // reserve floor as fraction of wind forecast
  double reserve_price = 0;   // $/MWh purchased externally

  int fuel_segments = 8;
  int eps_points = 8;
  int intraday_eps_points = 5;
  bool sales_revenue_includes_fixed = false;

  int scenario_count = 100;
  double sigma_fraction = 0.08;
  unsigned long long seed = 1;

  int T() const { return horizon; }
  int num_units() const { return static_cast<int>(units.size()); }
  int num_farms() const { return static_cast<int>(wind.size()); }
  int num_buses() const { return static_cast<int>(buses.size()); }
  int num_branches() const { return static_cast<int>(branches.size()); }

  int bus_index(int id) const {
    for (int i = 0; i < num_buses(); ++i)
      if (buses[i].id == id) return i;
    throw std::invalid_argument("unknown bus id " + std::to_string(id));
  }

  int slack_bus_index() const {
    int best = -1;
    for (const auto& u : units) {
      int i = bus_index(u.bus);
      if (best < 0 || buses[i].id < buses[best].id) best = i;
    }
    if (best < 0) throw std::invalid_argument("no generator bus for slack");
    return best;
  }

  std::vector<int> plant_ids() const {
    std::vector<int> ids;
    for (const auto& u : units)
      if (std::find(ids.begin(), ids.end(), u.plant) == ids.end())
        ids.push_back(u.plant);
    std::sort(ids.begin(), ids.end());
    return ids;
  }

  double total_load(int t) const {
    double d = 0;
    for (const auto& b : buses) d += b.load[t];
    return d;
  }
  double wind_forecast_total(int t) const {
    double w = 0;
    for (const auto& f : wind) w += f.forecast[t];
    return w;
  }
};

// ---------------------------------------------------------------------------
// DC power flow

struct FlowResult {
  std::vector<std::vector<double>> flows;  // [t][branch]
  std::vector<std::vector<double>> theta;  // [t][bus]
};

// Solves B*theta = injection per slot with the slack angle pinned to zero.
// injections[t][bus_index]; must balance per slot.
inline FlowResult dc_flow(const GridCase& gc,
                          const std::vector<std::vector<double>>& injections) {
  const int nb = gc.num_buses();
  const int nl = gc.num_branches();
  const int slack = gc.slack_bus_index();

  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(nb, nb);
  for (const auto& br : gc.branches) {
    int f = gc.bus_index(br.from), t = gc.bus_index(br.to);
    L(f, f) += br.susceptance;
    L(t, t) += br.susceptance;
    L(f, t) -= br.susceptance;
    L(t, f) -= br.susceptance;
  }
  Eigen::MatrixXd R(nb - 1, nb - 1);
  {
    int ri = 0;
    for (int i = 0; i < nb; ++i) {
      if (i == slack) continue;
      int rj = 0;
      for (int j = 0; j < nb; ++j) {
        if (j == slack) continue;
        R(ri, rj++) = L(i, j);
      }
      ++ri;
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(R);
  if (!lu.isInvertible())
    throw std::runtime_error("dc_flow: network is disconnected");

  FlowResult out;
  out.flows.assign(injections.size(), std::vector<double>(nl, 0.0));
  out.theta.assign(injections.size(), std::vector<double>(nb, 0.0));
  for (std::size_t t = 0; t < injections.size(); ++t) {
    const auto& inj = injections[t];
    double net = 0;
    for (double v : inj) net += v;
    if (std::fabs(net) > 1e-6)
      throw std::invalid_argument("dc_flow: slot " + std::to_string(t) +
                                  " injections do not balance");
    Eigen::VectorXd rhs(nb - 1);
    int ri = 0;
    for (int i = 0; i < nb; ++i)
      if (i != slack) rhs(ri++) = inj[i];
    Eigen::VectorXd th = lu.solve(rhs);
    ri = 0;
    for (int i = 0; i < nb; ++i)
      out.theta[t][i] = (i == slack) ? 0.0 : th(ri++);
    for (int j = 0; j < nl; ++j) {
      const auto& br = gc.branches[j];
      out.flows[t][j] = br.susceptance * (out.theta[t][gc.bus_index(br.from)] -
                                          out.theta[t][gc.bus_index(br.to)]);
    }
  }
  return out;
}

// Worst-case relative transmission margin over branches and slots.
// 1 when the grid is idle, negative when some branch overloads.
inline double compute_asc(const std::vector<std::vector<double>>& flows,
                          const std::vector<double>& ratings) {
  double asc = 1.0;
  for (std::size_t j = 0; j < ratings.size(); ++j) {
    if (!(ratings[j] > 0))
      throw std::invalid_argument("compute_asc: ratings must be positive");
    double peak = 0;
    for (const auto& slot : flows) peak = std::max(peak, std::fabs(slot[j]));
    asc = std::min(asc, (ratings[j] - peak) / ratings[j]);
  }
  return asc;
}

// ---------------------------------------------------------------------------
// Committed solution of the day-ahead stage.

struct DayAheadSolution {
  std::vector<std::vector<int>> status;        // [t][p]
  std::vector<std::vector<double>> p_thermal;  // [t][p] MW
  std::vector<std::vector<double>> reserve;    // [t][p] MW
  std::vector<std::vector<double>> p_wind;     // [t][l] MW
  std::vector<double> alpha;                   // $/MWh per slot
  std::vector<std::vector<double>> flows;      // [t][branch]
  std::vector<std::vector<double>> theta;      // [t][bus]
  PmpSchedule pmp;
  double j1 = 0;          // fuel + start, exact quadratic
  double j2 = 0;          // 1 - C_ASC
  double j_pmp = 0;       // follower bill at alpha
  double curtailment = 0; // MW over the cycle

  double fuel_cost(const GridCase& gc, int t) const {
    double f = 0;
    for (int p = 0; p < gc.num_units(); ++p)
      if (status[t][p]) f += gc.units[p].fuel(p_thermal[t][p]);
    return f;
  }
};

// Start costs re-derived from the commitment trajectory alone.
inline double trajectory_start_cost(const GridCase& gc,
                                    const std::vector<std::vector<int>>& s) {
  double total = 0;
  for (int p = 0; p < gc.num_units(); ++p) {
    const auto& u = gc.units[p];
    double off = u.initial_off();
    int prev = 0;
    for (int t = 0; t < gc.T(); ++t) {
      if (s[t][p] && !prev) total += u.start_cost(off);
      if (!s[t][p]) off += 1.0;
      else off = 0.0;
      prev = s[t][p];
    }
  }
  return total;
}

}  // namespace pdscr
