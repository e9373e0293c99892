#pragma once

#include <algorithm>
#include <utility>
#include <vector>

namespace linenet {

using Interval = std::pair<double, double>;

// Sorts and merges overlapping or touching intervals. Empty intervals
// (hi <= lo) are dropped.
inline std::vector<Interval> merge_intervals(std::vector<Interval> iv) {
  std::erase_if(iv, [](const Interval& i) { return !(i.second > i.first); });
  std::sort(iv.begin(), iv.end());
  std::vector<Interval> out;
  for (const auto& i : iv) {
    if (!out.empty() && i.first <= out.back().second) {
      out.back().second = std::max(out.back().second, i.second);
    } else {
      out.push_back(i);
    }
  }
  return out;
}

// One-dimensional measure of the union.
inline double union_length(std::vector<Interval> iv) {
  double total = 0.0;
  for (const auto& i : merge_intervals(std::move(iv))) total += i.second - i.first;
  return total;
}

// Parts of [lo, hi] left after removing every interval in `cut`.
inline std::vector<Interval> subtract_intervals(double lo, double hi, std::vector<Interval> cut) {
  std::vector<Interval> out;
  double at = lo;
  for (const auto& c : merge_intervals(std::move(cut))) {
    if (c.second <= at) continue;
    if (c.first >= hi) break;
    if (c.first > at) out.emplace_back(at, c.first);
    at = std::max(at, c.second);
  }
  if (at < hi) out.emplace_back(at, hi);
  return out;
}

}  // namespace linenet
