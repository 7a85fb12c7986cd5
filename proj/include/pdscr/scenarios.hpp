#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace pdscr {

// Acklam's rational approximation of the standard normal quantile.
inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("normal_quantile: p outside (0,1)");
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425, phigh = 1 - plow;
  double q, r;
  if (p < plow) {
    q = std::sqrt(-2 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
            c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  if (p > phigh) {
    q = std::sqrt(-2 * std::log(1 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
             c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  q = p - 0.5;
  r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r +
          a[5]) *
         q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct ScenarioSet {
  std::uint64_t seed = 0;
  int count = 0;
  double sigma_fraction = 0;
  // realized[s][t][farm] in MW, clamped at zero
  std::vector<std::vector<std::vector<double>>> realized;
  std::vector<double> fluctuation;  // sum over (t,farm) of realized-forecast
};

// Latin hypercube over independent Gaussian forecast errors: per (slot,
// farm) dimension the n samples occupy each probability stratum exactly
// once, placed at the stratum midpoint.
inline ScenarioSet lhs_sample(
    const std::vector<std::vector<double>>& forecast,  // [t][farm]
    double sigma_fraction, int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("lhs_sample: n must be >= 1");
  if (!(sigma_fraction > 0))
    throw std::invalid_argument("lhs_sample: sigma fraction must be > 0");
  const int T = static_cast<int>(forecast.size());
  const int F = T > 0 ? static_cast<int>(forecast[0].size()) : 0;

  ScenarioSet set;
  set.seed = seed;
  set.count = n;
  set.sigma_fraction = sigma_fraction;
  set.realized.assign(
      n, std::vector<std::vector<double>>(T, std::vector<double>(F, 0.0)));
  set.fluctuation.assign(n, 0.0);

  std::vector<int> perm(n);
  for (int t = 0; t < T; ++t)
    for (int f = 0; f < F; ++f) {
      std::uint64_t dim_seed =
          splitmix64(seed ^ splitmix64(0x9e37ULL * (t + 1) + f));
      std::mt19937_64 rng(dim_seed);
      for (int i = 0; i < n; ++i) perm[i] = i;
      std::shuffle(perm.begin(), perm.end(), rng);
      double mean = forecast[t][f];
      double sigma = sigma_fraction * mean;
      for (int s = 0; s < n; ++s) {
        double p = (perm[s] + 0.5) / n;
        double v = mean + sigma * normal_quantile(p);
        set.realized[s][t][f] = std::max(0.0, v);
        set.fluctuation[s] += set.realized[s][t][f] - mean;
      }
    }
  return set;
}

// Representative subset by wind-fluctuation rank: one pick per stratum,
// keeping the extremes so both surplus and deficit shapes survive.
inline std::vector<int> stratified_select(const ScenarioSet& set, int k) {
  const int n = set.count;
  if (k < 1 || k > n)
    throw std::invalid_argument("stratified_select: need 1 <= k <= n");
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (set.fluctuation[a] != set.fluctuation[b])
      return set.fluctuation[a] > set.fluctuation[b];
    return a < b;
  });
  std::vector<int> picks;
  for (int s = 0; s < k; ++s) {
    int lo = s * n / k;
    int hi = (s + 1) * n / k - 1;
    int at;
    if (s == 0)
      at = lo;  // strongest surplus
    else if (s == k - 1)
      at = hi;  // strongest deficit
    else
      at = (lo + hi) / 2;
    picks.push_back(order[at]);
  }
  return picks;
}

}  // namespace pdscr
