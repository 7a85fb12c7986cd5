#pragma once

#include "pdscr/grid.hpp"

// Bundled six-bus study system: three units in two plants, two wind farms,
// one production line on bus 3, eight-slot cycle.
inline pdscr::GridCase make_sixbus() {
  using namespace pdscr;
  GridCase gc;
  gc.name = "sixbus";
  gc.horizon = 8;

  const std::vector<double> total_load = {150, 140, 135, 150,
                                          170, 185, 175, 160};
  auto share = [&](double f) {
    std::vector<double> v;
    for (double x : total_load) v.push_back(x * f);
    return v;
  };
  gc.buses = {{1, std::vector<double>(8, 0.0)},
              {2, std::vector<double>(8, 0.0)},
              {3, share(0.40)},
              {4, share(0.30)},
              {5, share(0.30)},
              {6, std::vector<double>(8, 0.0)}};

  gc.branches = {{"L1", 1, 2, 25, 120}, {"L2", 1, 4, 25, 120},
                 {"L3", 2, 3, 25, 120}, {"L4", 2, 5, 25, 100},
                 {"L5", 3, 6, 25, 90},  {"L6", 4, 5, 25, 90},
                 {"L7", 5, 6, 25, 90}};

  ThermalUnit u1{"U1", 1, 1, 0.008, 18, 100, 200, 300, 3.0, 2,
                 30, 160, 90, 90, 2, 2};
  ThermalUnit u2{"U2", 2, 1, 0.015, 26, 80, 150, 200, 2.5, 2,
                 24, 120, 80, 80, 2, 2};
  ThermalUnit u3{"U3", 6, 2, 0.030, 38, 50, 80, 120, 2.0, 1,
                 10, 70, 70, 70, 1, 1};
  gc.units = {u1, u2, u3};

  const std::vector<double> wind_total = {30, 55, 85, 110, 95, 60, 35, 25};
  WindFarm w1{"W1", 4, {}}, w2{"W2", 5, {}};
  for (double x : wind_total) {
    w1.forecast.push_back(x * 0.6);
    w2.forecast.push_back(x * 0.4);
  }
  gc.wind = {w1, w2};

  gc.pmp.procedures = {{2, 12.0}, {2, 8.0}, {2, 10.0}};
  gc.pmp.buffers = {{4, 2.0}, {4, 2.0}};
  gc.pmp.target_projects = 8;
  gc.pmp.fixed_cost = 51.42;
  gc.pmp.horizon = 8;
  gc.pmp_bus = 3;

  gc.price_high = 167.90;  // $/MWh, 0.16790 $/kWh
  gc.price_low = 82.74;
  gc.incentive_rate = 150.0;  // 0.15 $/kWh on added wind utilization
  gc.reserve_beta = 0.08;
  gc.reserve_price = 250.0;
  gc.fuel_segments = 4;
  gc.eps_points = 8;
  gc.intraday_eps_points = 5;
  gc.scenario_count = 100;
  gc.sigma_fraction = 0.08;
  gc.seed = 42;
  return gc;
}
