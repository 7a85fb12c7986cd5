#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace pdscr {

// Exact 2-D hypervolume for minimization fronts: the area dominated by the
// points up to the reference corner. Points beyond the reference are
// excluded; the number of exclusions is reported through `excluded`.
inline double hypervolume(std::vector<std::pair<double, double>> pts,
                          std::pair<double, double> ref,
                          int* excluded = nullptr) {
  int dropped = 0;
  std::vector<std::pair<double, double>> keep;
  for (const auto& p : pts) {
    if (p.first <= ref.first && p.second <= ref.second)
      keep.push_back(p);
    else
      ++dropped;
  }
  if (excluded) *excluded = dropped;
  if (keep.empty()) return 0.0;
  std::sort(keep.begin(), keep.end());
  double hv = 0.0;
  double best_y = ref.second;
  for (std::size_t i = 0; i < keep.size(); ++i) {
    best_y = std::min(best_y, keep[i].second);
    double next_x =
        i + 1 < keep.size() ? std::min(keep[i + 1].first, ref.first)
                            : ref.first;
    double width = next_x - keep[i].first;
    if (width > 0) hv += width * (ref.second - best_y);
  }
  return hv;
}

// Reference-point policy for case comparisons: objectives are min-max
// normalized over the union of the compared fronts, the corner sits at
// (1.1, 1.0) in that scale.
struct NormalizedHv {
  double value = 0;
  std::pair<double, double> reference;
};

inline NormalizedHv normalized_hypervolume(
    const std::vector<std::vector<std::pair<double, double>>>& fronts,
    int which) {
  double lo1 = 1e300, hi1 = -1e300;
  for (const auto& f : fronts)
    for (const auto& [a, b] : f) {
      lo1 = std::min(lo1, a);
      hi1 = std::max(hi1, a);
    }
  double r1 = hi1 - lo1 > 1e-12 ? hi1 - lo1 : 1.0;
  std::vector<std::pair<double, double>> scaled;
  for (const auto& [a, b] : fronts.at(which))
    scaled.push_back({(a - lo1) / r1, b});
  NormalizedHv out;
  out.reference = {1.1, 1.0};
  out.value = hypervolume(scaled, out.reference);
  return out;
}

}  // namespace pdscr
