#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "oracles.hpp"
#include "pdscr/complementarity.hpp"
#include "pdscr/milp_solver.hpp"
#include "pdscr/piecewise.hpp"
#include "pdscr/simplex.hpp"

using namespace pdscr;

TEST_CASE("single-variable bound LP") {
  MilpProblem p;
  int x = p.add_var("x", -kInf, 10);
  p.add_row({{x, 1.0}}, Relation::GreaterEq, 3.0, "floor");
  p.set_obj(x, 1.0);
  auto s = solve_lp(p);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK_THAT(s.x[x], Catch::Matchers::WithinAbs(3.0, 1e-9));
  CHECK_THAT(s.objective, Catch::Matchers::WithinAbs(3.0, 1e-9));
}

TEST_CASE("unit simplex LP with dual of coupling row") {
  MilpProblem p;
  int x = p.add_var("x", 0, kInf);
  int y = p.add_var("y", 0, kInf);
  int cap = p.add_row({{x, 1.0}, {y, 1.0}}, Relation::LessEq, 1.0, "cap");
  p.set_obj(x, -1.0);
  p.set_obj(y, -1.0);
  auto s = solve_lp(p);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK_THAT(s.objective, Catch::Matchers::WithinAbs(-1.0, 1e-9));
  CHECK_THAT(s.duals[cap], Catch::Matchers::WithinAbs(-1.0, 1e-9));
}

TEST_CASE("infeasible and unbounded LPs flag without crashing") {
  {
    MilpProblem p;
    int x = p.add_var("x", 0, 1);
    p.add_row({{x, 1.0}}, Relation::GreaterEq, 2.0, "too_high");
    auto s = solve_lp(p);
    CHECK(s.status == SolveStatus::Infeasible);
  }
  {
    MilpProblem p;
    int x = p.add_var("x", 0, kInf);
    p.set_obj(x, -1.0);
    auto s = solve_lp(p);
    CHECK(s.status == SolveStatus::Unbounded);
  }
}

static MilpProblem random_box_lp(std::mt19937_64& rng, int n, int m,
                                 std::vector<std::vector<double>>& A,
                                 std::vector<double>& b,
                                 std::vector<double>& lb,
                                 std::vector<double>& ub,
                                 std::vector<double>& c) {
  std::uniform_real_distribution<double> coef(-5.0, 5.0);
  std::uniform_real_distribution<double> rhs(-2.0, 8.0);
  MilpProblem p;
  lb.assign(n, 0.0);
  ub.assign(n, 4.0);
  c.resize(n);
  for (int j = 0; j < n; ++j) {
    p.add_var("x" + std::to_string(j), 0.0, 4.0);
    c[j] = coef(rng);
    p.set_obj(j, c[j]);
  }
  A.assign(m, std::vector<double>(n));
  b.resize(m);
  for (int i = 0; i < m; ++i) {
    LinExpr e;
    for (int j = 0; j < n; ++j) {
      A[i][j] = coef(rng);
      e.push_back({j, A[i][j]});
    }
    b[i] = rhs(rng);
    p.add_row(std::move(e), Relation::LessEq, b[i]);
  }
  return p;
}

TEST_CASE("random LPs match vertex enumeration and satisfy strong duality") {
  std::mt19937_64 rng(20240811);
  int feasible_seen = 0;
  for (int trial = 0; trial < 60; ++trial) {
    int n = 2 + int(rng() % 5);  // 2..6
    int m = 3 + int(rng() % 6);  // 3..8
    std::vector<std::vector<double>> A;
    std::vector<double> b, lb, ub, c;
    auto p = random_box_lp(rng, n, m, A, b, lb, ub, c);
    auto expect = oracle::vertex_enum_min(A, b, lb, ub, c);
    auto s = solve_lp(p);
    if (!expect) {
      CHECK(s.status == SolveStatus::Infeasible);
      continue;
    }
    ++feasible_seen;
    REQUIRE(s.status == SolveStatus::Optimal);
    CHECK_THAT(s.objective, Catch::Matchers::WithinAbs(*expect, 1e-6));
    CHECK(std::fabs(s.objective - s.dual_objective) <=
          1e-6 * (1 + std::fabs(s.objective)));
    CHECK(max_violation(p, s.x) <= 1e-7);
  }
  CHECK(feasible_seen >= 20);
}

TEST_CASE("trivial binary MILP") {
  MilpProblem p;
  int x = p.add_binary("x");
  p.set_obj(x, -1.0);
  auto s = solve_milp(p);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(s.on(x));
  CHECK_THAT(s.objective, Catch::Matchers::WithinAbs(-1.0, 1e-9));
}

TEST_CASE("knapsack matches exhaustive enumeration") {
  const std::vector<double> value = {9, 7, 6, 4, 2};
  const std::vector<double> weight = {5, 4, 3, 2, 1};
  const double cap = 8;
  MilpProblem p;
  LinExpr wrow;
  for (int i = 0; i < 5; ++i) {
    int v = p.add_binary("item" + std::to_string(i));
    p.set_obj(v, value[i]);
    wrow.push_back({v, weight[i]});
  }
  p.sense = Sense::Maximize;
  p.add_row(std::move(wrow), Relation::LessEq, cap, "capacity");

  double best = 0;
  for (int mask = 0; mask < 32; ++mask) {
    double w = 0, val = 0;
    for (int i = 0; i < 5; ++i)
      if (mask >> i & 1) {
        w += weight[i];
        val += value[i];
      }
    if (w <= cap) best = std::max(best, val);
  }
  auto s = solve_milp(p);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK_THAT(s.objective, Catch::Matchers::WithinAbs(best, 1e-9));
}

TEST_CASE("totally unimodular instance is integral at the root") {
  // assignment-style rows: each of 3 workers to exactly one of 3 tasks
  MilpProblem p;
  std::vector<std::vector<int>> x(3, std::vector<int>(3));
  double cost[3][3] = {{4, 2, 8}, {4, 3, 7}, {3, 1, 6}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      x[i][j] = p.add_binary("a" + std::to_string(i) + std::to_string(j));
      p.set_obj(x[i][j], cost[i][j]);
    }
  for (int i = 0; i < 3; ++i) {
    LinExpr r1, r2;
    for (int j = 0; j < 3; ++j) {
      r1.push_back({x[i][j], 1.0});
      r2.push_back({x[j][i], 1.0});
    }
    p.add_row(std::move(r1), Relation::Equal, 1.0);
    p.add_row(std::move(r2), Relation::Equal, 1.0);
  }
  auto s = solve_milp(p);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(s.nodes == 1);
  CHECK_THAT(s.objective, Catch::Matchers::WithinAbs(12.0, 1e-9));
}

TEST_CASE("random mixed MILPs match brute force over binary assignments") {
  std::mt19937_64 rng(77001);
  std::uniform_real_distribution<double> coef(-4.0, 4.0);
  for (int trial = 0; trial < 40; ++trial) {
    int nb = 3 + int(rng() % 10);  // 3..12 binaries
    int m = 2 + int(rng() % 3);
    MilpProblem p;
    std::vector<double> c(nb);
    std::vector<std::vector<double>> A(m, std::vector<double>(nb));
    std::vector<double> b(m);
    for (int j = 0; j < nb; ++j) {
      p.add_binary("b" + std::to_string(j));
      c[j] = std::round(coef(rng) * 4) / 4;
      p.set_obj(j, c[j]);
    }
    for (int i = 0; i < m; ++i) {
      LinExpr e;
      for (int j = 0; j < nb; ++j) {
        A[i][j] = std::round(coef(rng));
        if (A[i][j] != 0) e.push_back({j, A[i][j]});
      }
      b[i] = std::round(coef(rng)) + 2;
      p.add_row(std::move(e), Relation::LessEq, b[i]);
    }
    double best = kInf;
    for (long mask = 0; mask < (1L << nb); ++mask) {
      bool ok = true;
      for (int i = 0; i < m && ok; ++i) {
        double lhs = 0;
        for (int j = 0; j < nb; ++j)
          if (mask >> j & 1) lhs += A[i][j];
        ok = lhs <= b[i] + 1e-12;
      }
      if (!ok) continue;
      double obj = 0;
      for (int j = 0; j < nb; ++j)
        if (mask >> j & 1) obj += c[j];
      best = std::min(best, obj);
    }
    auto s = solve_milp(p);
    if (best == kInf) {
      CHECK(s.status == SolveStatus::Infeasible);
    } else {
      REQUIRE(s.status == SolveStatus::Optimal);
      CHECK_THAT(s.objective, Catch::Matchers::WithinAbs(best, 1e-6));
    }
  }
}

TEST_CASE("piecewise linearization") {
  SECTION("already linear cost is exact") {
    auto blk = linearize_quadratic(0, 20, 100, 0, 100, 6);
    for (double pt : {0.0, 13.7, 50.0, 99.0})
      CHECK_THAT(piecewise_value(blk, pt),
                 Catch::Matchers::WithinAbs(20 * pt + 100, 1e-9));
  }
  SECTION("quadratic sample point stays within the secant bound") {
    auto blk = linearize_quadratic(0.01, 20, 100, 0, 100, 8);
    double truth = 0.01 * 50 * 50 + 20 * 50 + 100;  // 1125
    double bound = 0.01 * (100.0 / 8) * (100.0 / 8) / 4;
    double v = piecewise_value(blk, 50);
    CHECK(v >= truth - 1e-9);
    CHECK(v <= truth + bound + 1e-9);
  }
  SECTION("dense sampling against the theoretical bound") {
    auto blk = linearize_quadratic(0.02, 15, 40, 10, 90, 8);
    double bound = 0.02 * (80.0 / 8) * (80.0 / 8) / 4;
    double worst = 0;
    for (int k = 0; k <= 1000; ++k) {
      double pt = 10 + 80.0 * k / 1000;
      double truth = 0.02 * pt * pt + 15 * pt + 40;
      double dev = piecewise_value(blk, pt) - truth;
      CHECK(dev >= -1e-9);
      worst = std::max(worst, dev);
    }
    CHECK(worst <= bound + 1e-9);
  }
  SECTION("non-convex cost rejected") {
    CHECK_THROWS(linearize_quadratic(-0.1, 1, 0, 0, 10, 4));
  }
}

TEST_CASE("complementarity switch behaviour") {
  SECTION("active constraint admits a positive multiplier") {
    MilpProblem p;
    int x = p.add_var("x", 0, 10);
    int lam = p.add_var("lam", 0, kInf);
    int g = p.add_row({{x, 1.0}}, Relation::LessEq, 5.0, "g");
    p.add_row({{lam, 1.0}}, Relation::Equal, 1.0, "stationarity");
    int z = add_complementarity(p, g, lam, 20.0, 10.0, "pair");
    auto s = solve_milp(p);
    REQUIRE(s.status == SolveStatus::Optimal);
    CHECK(s.on(z));
    CHECK_THAT(s.x[x], Catch::Matchers::WithinAbs(5.0, 1e-6));
    CHECK(complementarity_residual(p, s.x) <= 1e-6);
  }
  SECTION("interior point forces the multiplier to zero") {
    MilpProblem p;
    int x = p.add_var("x", 2, 10);
    int lam = p.add_var("lam", 0, kInf);
    int g = p.add_row({{x, 1.0}}, Relation::LessEq, 5.0, "g");
    int z = add_complementarity(p, g, lam, 20.0, 1.0, "pair");
    p.set_obj(x, 1.0);
    p.set_obj(lam, -0.1);
    auto s = solve_milp(p);
    REQUIRE(s.status == SolveStatus::Optimal);
    CHECK_FALSE(s.on(z));
    CHECK_THAT(s.x[x], Catch::Matchers::WithinAbs(2.0, 1e-6));
    CHECK(s.x[lam] <= 1e-6);
    CHECK(complementarity_residual(p, s.x) <= 1e-6);
  }
  SECTION("missing big-M rejected before solve") {
    MilpProblem p;
    int x = p.add_var("x", 0, 10);
    int lam = p.add_var("lam", 0, kInf);
    int g = p.add_row({{x, 1.0}}, Relation::LessEq, 5.0, "g");
    CHECK_THROWS(add_complementarity(p, g, lam, kInf, 10.0, "pair"));
  }
}

TEST_CASE("identical problems solve to identical bytes") {
  auto build = [] {
    MilpProblem p;
    for (int j = 0; j < 6; ++j) p.add_var("x" + std::to_string(j), 0, 3);
    p.add_binary("flag");
    p.add_row({{0, 1.0}, {1, 2.0}, {6, 4.0}}, Relation::LessEq, 5.0);
    p.add_row({{2, 1.0}, {3, -1.0}}, Relation::GreaterEq, -1.0);
    p.add_row({{4, 1.0}, {5, 1.0}, {0, 0.5}}, Relation::Equal, 2.0);
    p.set_obj(0, -1.0);
    p.set_obj(2, -0.5);
    p.set_obj(6, -2.0);
    return p;
  };
  auto a = build();
  auto b = build();
  CHECK(a.to_lp_text() == b.to_lp_text());
  auto sa = solve_milp(a);
  auto sb = solve_milp(b);
  REQUIRE(sa.status == SolveStatus::Optimal);
  REQUIRE(sa.x.size() == sb.x.size());
  for (std::size_t i = 0; i < sa.x.size(); ++i)
    CHECK(sa.x[i] == sb.x[i]);  // bitwise
  CHECK(sa.objective == sb.objective);
}
