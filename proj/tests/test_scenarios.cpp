#include <catch2/catch_amalgamated.hpp>
#include <functional>
#include <random>
#include <set>

#include "pdscr/metrics.hpp"
#include "pdscr/scenarios.hpp"

using namespace pdscr;

namespace {
std::vector<std::vector<double>> demo_forecast() {
  // 4 slots x 2 farms, values far enough from zero that no sample clamps
  return {{60, 40}, {80, 55}, {100, 70}, {75, 50}};
}
}  // namespace

TEST_CASE("single sample sits at the median and equals the forecast") {
  auto fc = demo_forecast();
  auto set = lhs_sample(fc, 0.08, 1, 7);
  REQUIRE(set.count == 1);
  for (std::size_t t = 0; t < fc.size(); ++t)
    for (std::size_t f = 0; f < fc[t].size(); ++f)
      CHECK_THAT(set.realized[0][t][f],
                 Catch::Matchers::WithinAbs(fc[t][f], 1e-9));
  CHECK_THAT(set.fluctuation[0], Catch::Matchers::WithinAbs(0.0, 1e-9));
}

TEST_CASE("each stratum is hit exactly once per dimension") {
  auto fc = demo_forecast();
  for (int n : {10, 100}) {
    auto set = lhs_sample(fc, 0.08, n, 42);
    for (std::size_t t = 0; t < fc.size(); ++t)
      for (std::size_t f = 0; f < fc[t].size(); ++f) {
        std::vector<double> expect, got;
        for (int i = 0; i < n; ++i) {
          double z = normal_quantile((i + 0.5) / n);
          expect.push_back(fc[t][f] * (1 + 0.08 * z));
        }
        for (int s = 0; s < n; ++s) got.push_back(set.realized[s][t][f]);
        std::sort(expect.begin(), expect.end());
        std::sort(got.begin(), got.end());
        for (int i = 0; i < n; ++i)
          CHECK_THAT(got[i], Catch::Matchers::WithinAbs(expect[i], 1e-9));
      }
  }
}

TEST_CASE("hundred-sample mean stays near the forecast") {
  auto fc = demo_forecast();
  auto set = lhs_sample(fc, 0.08, 100, 1337);
  for (std::size_t t = 0; t < fc.size(); ++t)
    for (std::size_t f = 0; f < fc[t].size(); ++f) {
      double mean = 0;
      for (int s = 0; s < 100; ++s) mean += set.realized[s][t][f];
      mean /= 100;
      double sigma = 0.08 * fc[t][f];
      CHECK(std::fabs(mean - fc[t][f]) <= 3 * sigma / 10.0);
    }
}

TEST_CASE("identical seeds reproduce identical scenario bytes") {
  auto fc = demo_forecast();
  auto a = lhs_sample(fc, 0.08, 25, 99);
  auto b = lhs_sample(fc, 0.08, 25, 99);
  auto c = lhs_sample(fc, 0.08, 25, 100);
  CHECK(a.realized == b.realized);
  CHECK(a.realized != c.realized);
}

TEST_CASE("negative draws clamp to zero") {
  std::vector<std::vector<double>> fc = {{1.0}, {1.0}};
  auto set = lhs_sample(fc, 5.0, 20, 3);  // huge sigma forces negatives
  bool clamped = false;
  for (const auto& s : set.realized)
    for (const auto& slot : s)
      for (double v : slot) {
        CHECK(v >= 0.0);
        clamped |= v == 0.0;
      }
  CHECK(clamped);
}

TEST_CASE("stratified selection covers the fluctuation range") {
  auto fc = demo_forecast();
  auto set = lhs_sample(fc, 0.08, 100, 4242);

  SECTION("selecting all is the identity") {
    auto picks = stratified_select(set, 100);
    std::set<int> uniq(picks.begin(), picks.end());
    CHECK(uniq.size() == 100);
  }
  SECTION("two picks straddle the signs when both are present") {
    bool pos = false, neg = false;
    for (double f : set.fluctuation) {
      pos |= f > 0;
      neg |= f < 0;
    }
    REQUIRE((pos && neg));
    auto picks = stratified_select(set, 2);
    CHECK(set.fluctuation[picks[0]] > 0);
    CHECK(set.fluctuation[picks[1]] < 0);
  }
  SECTION("eleven picks come out ordered by fluctuation") {
    auto picks = stratified_select(set, 11);
    for (std::size_t i = 0; i + 1 < picks.size(); ++i)
      CHECK(set.fluctuation[picks[i]] >= set.fluctuation[picks[i + 1]]);
  }
}

TEST_CASE("unit square hypervolume") {
  CHECK_THAT(hypervolume({{1, 1}}, {2, 2}),
             Catch::Matchers::WithinAbs(1.0, 1e-12));
}

TEST_CASE("two-point front against Monte Carlo") {
  std::vector<std::pair<double, double>> front = {{0, 2}, {2, 0}};
  double hv = hypervolume(front, {3, 3});
  CHECK_THAT(hv, Catch::Matchers::WithinAbs(5.0, 1e-12));
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> d(0.0, 3.0);
  long in = 0;
  const long N = 1000000;
  for (long i = 0; i < N; ++i) {
    double x = d(rng), y = d(rng);
    for (const auto& [a, b] : front)
      if (x >= a && y >= b) {
        ++in;
        break;
      }
  }
  double mc = 9.0 * in / N;
  CHECK(std::fabs(hv - mc) <= 0.01 * 9.0);
}

TEST_CASE("duplicates leave the hypervolume unchanged") {
  std::vector<std::pair<double, double>> f1 = {{0, 2}, {2, 0}};
  auto f2 = f1;
  f2.push_back({0, 2});
  f2.push_back({2, 0});
  CHECK(hypervolume(f1, {3, 3}) == hypervolume(f2, {3, 3}));
}

TEST_CASE("points beyond the reference are excluded with a count") {
  int excluded = 0;
  double hv = hypervolume({{1, 1}, {5, 0}}, {2, 2}, &excluded);
  CHECK(excluded == 1);
  CHECK_THAT(hv, Catch::Matchers::WithinAbs(1.0, 1e-12));
}

TEST_CASE("hypervolume grows with new non-dominated points") {
  std::mt19937_64 rng(515);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::pair<double, double>> front;
    int n = 1 + int(rng() % 6);
    for (int i = 0; i < n; ++i) front.push_back({d(rng), d(rng)});
    double base = hypervolume(front, {1.5, 1.5});
    front.push_back({d(rng), d(rng)});
    double grown = hypervolume(front, {1.5, 1.5});
    CHECK(grown >= base - 1e-12);
  }
}

TEST_CASE("hypervolume scales with the square of the objectives") {
  std::vector<std::pair<double, double>> front = {{0.2, 0.9}, {0.5, 0.4},
                                                  {0.9, 0.1}};
  double base = hypervolume(front, {1.0, 1.0});
  for (double gamma : {0.5, 2.0, 13.0}) {
    std::vector<std::pair<double, double>> scaled;
    for (auto [a, b] : front) scaled.push_back({gamma * a, gamma * b});
    CHECK_THAT(hypervolume(scaled, {gamma, gamma}),
               Catch::Matchers::WithinAbs(gamma * gamma * base, 1e-9));
  }
}
