#include <catch2/catch_amalgamated.hpp>

#include "fixtures.hpp"
#include "pdscr/grid.hpp"
#include "pdscr/milp_solver.hpp"
#include "pdscr/replay.hpp"
#include "pdscr/uc.hpp"

using namespace pdscr;

namespace {

GridCase two_bus() {
  GridCase gc;
  gc.horizon = 1;
  gc.buses = {{1, {0}}, {2, {10}}};
  gc.branches = {{"L", 1, 2, 20, 100}};
  ThermalUnit u{"G", 1, 1, 0.0, 10, 0, 0, 0, 1, 0, 0, 50, 50, 50, 1, 1};
  gc.units = {u};
  gc.pmp.procedures = {{1, 1}, {1, 1}};
  gc.pmp.buffers = {{1, 1}};
  gc.pmp.horizon = 2;
  gc.pmp_bus = 2;
  return gc;
}

}  // namespace

TEST_CASE("two-bus transfer carries the full injection") {
  auto gc = two_bus();
  auto fr = dc_flow(gc, {{10.0, -10.0}});
  CHECK_THAT(fr.flows[0][0], Catch::Matchers::WithinAbs(10.0, 1e-9));
}

TEST_CASE("triangle splits nine MW as six direct and three around") {
  GridCase gc;
  gc.horizon = 1;
  gc.buses = {{1, {0}}, {2, {0}}, {3, {9}}};
  gc.branches = {{"a", 1, 3, 10, 100},   // direct
                 {"b", 1, 2, 10, 100},
                 {"c", 2, 3, 10, 100}};
  ThermalUnit u{"G", 1, 1, 0, 1, 0, 0, 0, 1, 0, 0, 50, 50, 50, 1, 1};
  gc.units = {u};
  gc.pmp.procedures = {{1, 1}, {1, 1}};
  gc.pmp.buffers = {{1, 1}};
  gc.pmp.horizon = 2;
  gc.pmp_bus = 2;
  auto fr = dc_flow(gc, {{9.0, 0.0, -9.0}});
  CHECK_THAT(fr.flows[0][0], Catch::Matchers::WithinAbs(6.0, 1e-9));
  CHECK_THAT(fr.flows[0][1], Catch::Matchers::WithinAbs(3.0, 1e-9));
  CHECK_THAT(fr.flows[0][2], Catch::Matchers::WithinAbs(3.0, 1e-9));
}

TEST_CASE("zero injections give zero flows") {
  auto gc = two_bus();
  auto fr = dc_flow(gc, {{0.0, 0.0}});
  CHECK_THAT(fr.flows[0][0], Catch::Matchers::WithinAbs(0.0, 1e-12));
}

TEST_CASE("disconnected network is a structural error") {
  GridCase gc;
  gc.horizon = 1;
  gc.buses = {{1, {0}}, {2, {0}}, {3, {0}}};
  gc.branches = {{"a", 1, 2, 10, 100}};  // bus 3 isolated
  ThermalUnit u{"G", 1, 1, 0, 1, 0, 0, 0, 1, 0, 0, 50, 50, 50, 1, 1};
  gc.units = {u};
  CHECK_THROWS(dc_flow(gc, {{0.0, 0.0, 0.0}}));
}

TEST_CASE("unbalanced injections are rejected") {
  auto gc = two_bus();
  CHECK_THROWS(dc_flow(gc, {{10.0, -9.0}}));
}

TEST_CASE("security coefficient from margins") {
  SECTION("single branch, sixty of a hundred") {
    CHECK_THAT(compute_asc({{60.0}}, {100.0}),
               Catch::Matchers::WithinAbs(0.40, 1e-12));
  }
  SECTION("idle grid scores one") {
    CHECK_THAT(compute_asc({{0.0, 0.0}}, {100.0, 50.0}),
               Catch::Matchers::WithinAbs(1.0, 1e-12));
  }
  SECTION("overload goes negative") {
    CHECK(compute_asc({{120.0}}, {100.0}) < 0.0);
  }
  SECTION("scale invariance") {
    std::vector<std::vector<double>> flows = {{40, -20}, {-70, 10}};
    std::vector<double> ratings = {100, 80};
    double base = compute_asc(flows, ratings);
    for (double gamma : {0.5, 3.0, 17.0}) {
      auto f2 = flows;
      auto r2 = ratings;
      for (auto& row : f2)
        for (auto& x : row) x *= gamma;
      for (auto& x : r2) x *= gamma;
      CHECK_THAT(compute_asc(f2, r2), Catch::Matchers::WithinAbs(base, 1e-12));
    }
  }
}

TEST_CASE("single unit serves a flat load with one start") {
  GridCase gc;
  gc.horizon = 4;
  gc.buses = {{1, {0, 0, 0, 0}}, {2, {50, 50, 50, 50}}};
  gc.branches = {{"L", 1, 2, 20, 200}};
  ThermalUnit u{"G", 1, 1, 0.01, 20, 30, 100, 150, 2.0, 1,
                10, 80, 80, 80, 1, 1};
  gc.units = {u};
  gc.pmp.procedures = {{1, 0.1}, {1, 0.1}};
  gc.pmp.buffers = {{1, 0.1}};
  gc.pmp.horizon = 4;
  gc.pmp_bus = 2;

  MilpProblem p;
  std::vector<double> no_pmp(4, 0.0);
  PmpCoupling couple;
  couple.fixed = &no_pmp;
  UcBuildOptions opt;
  opt.segments = 8;
  auto v = build_uc_constraints(p, gc, couple, opt);
  set_thermal_cost_objective(p, gc, v);
  auto sol = solve_milp(p);
  REQUIRE(sol.status == SolveStatus::Optimal);
  for (int t = 0; t < 4; ++t) {
    CHECK(sol.x[v.s[t][0]] > 0.5);
    CHECK_THAT(sol.x[v.p_t[t][0]], Catch::Matchers::WithinAbs(50.0, 1e-5));
  }
  double expect = 4 * u.fuel(50.0) + u.start_cost(u.initial_off());
  // objective carries the secant overestimate; the exact recomputation
  // from the dispatched power must match the oracle
  double exact = 0;
  for (int t = 0; t < 4; ++t) exact += u.fuel(sol.x[v.p_t[t][0]]);
  exact += u.start_cost(u.initial_off());
  CHECK_THAT(exact, Catch::Matchers::WithinAbs(expect, 1e-4));
  CHECK(sol.objective >= expect - 1e-6);
  double per_slot_gap = 0.01 * (70.0 / 8) * (70.0 / 8) / 4;
  CHECK(sol.objective <= expect + 4 * per_slot_gap + 1e-6);
}

TEST_CASE("minimum down time blocks an early restart") {
  GridCase gc;
  gc.horizon = 10;
  std::vector<double> load = {40, 40, 40, 40, 40, 0, 0, 0, 40, 40};
  gc.buses = {{1, std::vector<double>(10, 0.0)}, {2, load}};
  gc.branches = {{"L", 1, 2, 20, 200}};
  ThermalUnit u{"G", 1, 1, 0.01, 20, 10, 50, 80, 2.0, 3,
                5, 80, 80, 80, 2, 3};
  gc.units = {u};
  gc.pmp.procedures = {{1, 0.1}, {1, 0.1}};
  gc.pmp.buffers = {{1, 0.1}};
  gc.pmp.horizon = 10;
  gc.pmp_bus = 2;

  MilpProblem p;
  std::vector<double> no_pmp(10, 0.0);
  PmpCoupling couple;
  couple.fixed = &no_pmp;
  auto v = build_uc_constraints(p, gc, couple, {});
  set_thermal_cost_objective(p, gc, v);
  p.add_row({{v.s[5][0], 1.0}}, Relation::LessEq, 0.0, "forced_off");
  auto sol = solve_milp(p);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.x[v.s[4][0]] > 0.5);
  CHECK(sol.x[v.s[5][0]] < 0.5);
  CHECK(sol.x[v.s[6][0]] < 0.5);
  CHECK(sol.x[v.s[7][0]] < 0.5);
  CHECK(sol.x[v.s[8][0]] > 0.5);
}

TEST_CASE("six-bus commitment with fixed industrial demand survives replay") {
  auto gc = make_sixbus();
  MilpProblem p;
  std::vector<double> flat_pmp(gc.T(), 30.0);
  PmpCoupling couple;
  couple.fixed = &flat_pmp;
  UcBuildOptions opt;
  opt.segments = gc.fuel_segments;
  auto v = build_uc_constraints(p, gc, couple, opt);
  set_thermal_cost_objective(p, gc, v);
  auto sol = solve_milp(p);
  REQUIRE(sol.status == SolveStatus::Optimal);

  // assemble a day-ahead record with a degenerate (flat-demand) schedule
  DayAheadSolution s;
  const int T = gc.T();
  s.alpha.assign(T, gc.price_low);
  s.status.assign(T, std::vector<int>(gc.num_units()));
  s.p_thermal.assign(T, std::vector<double>(gc.num_units()));
  s.reserve.assign(T, std::vector<double>(gc.num_units()));
  s.p_wind.assign(T, std::vector<double>(gc.num_farms()));
  s.flows.assign(T, std::vector<double>(gc.num_branches()));
  for (int t = 0; t < T; ++t) {
    for (int g = 0; g < gc.num_units(); ++g) {
      s.status[t][g] = sol.x[v.s[t][g]] > 0.5;
      s.p_thermal[t][g] = s.status[t][g] ? sol.x[v.p_t[t][g]] : 0.0;
      s.reserve[t][g] = sol.x[v.r_t[t][g]];
    }
    for (int l = 0; l < gc.num_farms(); ++l)
      s.p_wind[t][l] = sol.x[v.p_w[t][l]];
    for (int j = 0; j < gc.num_branches(); ++j)
      s.flows[t][j] = sol.x[v.flow[t][j]];
  }
  // flat industrial demand: 2.5 projects' worth on the final stage is not a
  // legal schedule, so replay gets a synthetic one matching 30 MW per slot
  // via held buffer projects; instead validate with the pmp block zeroed
  // and its demand folded into bus loads.
  auto gc2 = gc;
  for (auto& b : gc2.buses)
    if (b.id == gc.pmp_bus)
      for (auto& x : b.load) x += 30.0;
  gc2.pmp.target_projects = 0;
  s.pmp.processed.assign(T, std::vector<double>(gc.pmp.R(), 0.0));
  s.pmp.buffered.assign(T, std::vector<double>(gc.pmp.R() - 1, 0.0));
  double fuel = 0;
  for (int t = 0; t < T; ++t) fuel += s.fuel_cost(gc2, t);
  s.j1 = fuel + trajectory_start_cost(gc2, s.status);
  std::vector<double> ratings;
  for (const auto& br : gc2.branches) ratings.push_back(br.rating);
  s.j2 = 1.0 - compute_asc(s.flows, ratings);
  s.j_pmp = schedule_cost(gc2.pmp, s.pmp, s.alpha);

  auto rep = replay_day_ahead(gc2, s);
  for (const auto& msg : rep.violations) UNSCOPED_INFO(msg);
  CHECK(rep.ok());

  SECTION("tampering is caught") {
    auto bad = s;
    bad.p_thermal[3][0] += 5.0;  // break balance and flows
    auto r2 = replay_day_ahead(gc2, bad);
    CHECK_FALSE(r2.ok());
  }
}
