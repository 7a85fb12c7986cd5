#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "pdscr/dayahead.hpp"
#include "pdscr/replay.hpp"

using namespace pdscr;

namespace {

// Two buses, one line, one unit, one farm; four slots.
GridCase two_bus_case() {
  GridCase gc;
  gc.name = "twobus";
  gc.horizon = 4;
  gc.buses = {{1, {0, 0, 0, 0}}, {2, {60, 55, 50, 58}}};
  gc.branches = {{"L", 1, 2, 20, 150}};
  ThermalUnit u{"U1", 1, 1, 0.01, 20, 40, 50, 80, 2.0, 1,
                10, 120, 120, 120, 1, 1};
  gc.units = {u};
  gc.wind = {{"W1", 2, {5, 30, 45, 10}}};
  gc.pmp.procedures = {{2, 6.0}, {2, 4.0}};
  gc.pmp.buffers = {{3, 1.0}};
  gc.pmp.target_projects = 4;
  gc.pmp.fixed_cost = 10.0;
  gc.pmp.horizon = 4;
  gc.pmp_bus = 2;
  gc.price_high = 167.90;
  gc.price_low = 82.74;
  gc.incentive_rate = 150.0;
  gc.reserve_beta = 0.05;
  gc.reserve_price = 250.0;
  gc.fuel_segments = 4;
  return gc;
}

double exact_j1(const GridCase& gc, const UcVars& v,
                const std::vector<double>& x) {
  std::vector<std::vector<int>> status(gc.T(),
                                       std::vector<int>(gc.num_units()));
  double fuel = 0;
  for (int t = 0; t < gc.T(); ++t)
    for (int g = 0; g < gc.num_units(); ++g) {
      status[t][g] = x[v.s[t][g]] > 0.5;
      if (status[t][g]) fuel += gc.units[g].fuel(x[v.p_t[t][g]]);
    }
  return fuel + trajectory_start_cost(gc, status);
}

// Composition oracle: respond to a tariff with the production LP, then
// commit against the resulting fixed demand.
std::optional<double> compose_j1(const GridCase& gc,
                                 const std::vector<double>& alpha) {
  auto pr = solve_pmp(gc.pmp, alpha);
  if (pr.status != SolveStatus::Optimal) return std::nullopt;
  std::vector<double> demand(gc.T());
  for (int t = 0; t < gc.T(); ++t)
    demand[t] = pr.schedule.slot_demand_mw(gc.pmp, t);
  MilpProblem p;
  PmpCoupling couple;
  couple.fixed = &demand;
  UcBuildOptions opt;
  opt.segments = gc.fuel_segments;
  auto v = build_uc_constraints(p, gc, couple, opt);
  set_thermal_cost_objective(p, gc, v);
  auto sol = solve_milp(p);
  if (sol.status != SolveStatus::Optimal) return std::nullopt;
  return exact_j1(gc, v, sol.x);
}

}  // namespace

TEST_CASE("bilevel matches enumeration of every tariff assignment") {
  auto gc = two_bus_case();
  double best = kInf;
  for (int mask = 0; mask < 16; ++mask) {
    std::vector<double> alpha(4);
    for (int t = 0; t < 4; ++t)
      alpha[t] = (mask >> t & 1) ? gc.price_high : gc.price_low;
    auto j1 = compose_j1(gc, alpha);
    if (j1) best = std::min(best, *j1);
  }
  REQUIRE(best < kInf);

  auto m = build_bilevel(gc, {});
  auto sol = solve_milp(m.prob);
  REQUIRE(sol.status == SolveStatus::Optimal);
  auto da = extract_day_ahead(gc, m, sol.x);
  CHECK(da.j1 <= best + 1e-4 * (1 + best));          // leader dominance
  CHECK_THAT(da.j1, Catch::Matchers::WithinAbs(best, 1e-3 * (1 + best)));
  CHECK(follower_resolve_gap(gc, da) <= 1e-4 * (1 + std::fabs(da.j_pmp)));
  auto rep = replay_day_ahead(gc, da);
  for (const auto& msg : rep.violations) UNSCOPED_INFO(msg);
  CHECK(rep.ok());
}

TEST_CASE("flat tariff collapses the game to a fixed-price composition") {
  auto gc = two_bus_case();
  gc.price_high = gc.price_low;  // single tier
  auto oracle = compose_j1(gc, std::vector<double>(4, gc.price_low));
  REQUIRE(oracle.has_value());
  auto m = build_bilevel(gc, {});
  CHECK(m.tier.empty());
  auto sol = solve_milp(m.prob);
  REQUIRE(sol.status == SolveStatus::Optimal);
  auto da = extract_day_ahead(gc, m, sol.x);
  // the follower is indifferent across flat-price optima, so the leader may
  // pick a grid-friendlier schedule than the standalone solve; the bill
  // itself must coincide exactly
  CHECK(da.j1 <= *oracle + 1e-3 * (1 + *oracle));
  auto pr = solve_pmp(gc.pmp, da.alpha);
  CHECK_THAT(da.j_pmp, Catch::Matchers::WithinAbs(pr.j_pmp, 1e-5));
}

TEST_CASE("zero wind gives a pure thermal commitment with no wind output") {
  auto gc = two_bus_case();
  for (auto& f : gc.wind)
    f.forecast.assign(gc.T(), 0.0);
  auto m = build_bilevel(gc, {});
  auto sol = solve_milp(m.prob);
  REQUIRE(sol.status == SolveStatus::Optimal);
  auto da = extract_day_ahead(gc, m, sol.x);
  for (int t = 0; t < gc.T(); ++t)
    for (int l = 0; l < gc.num_farms(); ++l)
      CHECK_THAT(da.p_wind[t][l], Catch::Matchers::WithinAbs(0.0, 1e-9));
  double best = kInf;
  for (int mask = 0; mask < 16; ++mask) {
    std::vector<double> alpha(4);
    for (int t = 0; t < 4; ++t)
      alpha[t] = (mask >> t & 1) ? gc.price_high : gc.price_low;
    auto j1 = compose_j1(gc, alpha);
    if (j1) best = std::min(best, *j1);
  }
  CHECK_THAT(da.j1, Catch::Matchers::WithinAbs(best, 1e-3 * (1 + best)));
}

TEST_CASE("compromise selection") {
  SECTION("single point front returns it") {
    CHECK(pick_compromise_index({{3.0, 7.0}}) == 0);
  }
  SECTION("symmetric three point front picks the middle") {
    CHECK(pick_compromise_index({{0.0, 1.0}, {0.5, 0.5}, {1.0, 0.0}}) == 1);
  }
  SECTION("chosen point is never dominated") {
    std::mt19937_64 rng(440);
    std::uniform_real_distribution<double> d(0.0, 10.0);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<std::pair<double, double>> pts;
      int n = 2 + int(rng() % 8);
      for (int i = 0; i < n; ++i) pts.push_back({d(rng), d(rng)});
      int pick = pick_compromise_index(pts);
      for (int i = 0; i < n; ++i)
        CHECK_FALSE(dominates(pts[i].first, pts[i].second, pts[pick].first,
                              pts[pick].second));
    }
  }
}

TEST_CASE("toy sweep yields a clean front") {
  auto gc = two_bus_case();
  gc.branches[0].rating = 90;  // make the margin bite a little
  auto front = epsilon_sweep(gc, 4);
  REQUIRE(front.points.size() >= 1);
  // sorted by j2, mutually non-dominated, cost falls as margins loosen
  for (std::size_t i = 0; i + 1 < front.points.size(); ++i) {
    CHECK(front.points[i].j2 <= front.points[i + 1].j2 + 1e-12);
    CHECK(front.points[i].j1 >= front.points[i + 1].j1 - 1e-9);
    for (std::size_t k = 0; k < front.points.size(); ++k)
      if (k != i)
        CHECK_FALSE(dominates(front.points[k].j1, front.points[k].j2,
                              front.points[i].j1, front.points[i].j2));
  }
  // unconstrained-cost endpoint is on the front
  double min_j1 = kInf;
  for (const auto& fp : front.points) min_j1 = std::min(min_j1, fp.j1);
  CHECK_THAT(front.points.back().j1, Catch::Matchers::WithinAbs(min_j1, 1e-9));
  for (const auto& fp : front.points) {
    CHECK(follower_resolve_gap(gc, fp.sol) <=
          1e-4 * (1 + std::fabs(fp.sol.j_pmp)));
    auto rep = replay_day_ahead(gc, fp.sol);
    for (const auto& msg : rep.violations) UNSCOPED_INFO(msg);
    CHECK(rep.ok());
  }
}
