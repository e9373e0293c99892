#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "linenet/geometry.hpp"
#include "linenet/network.hpp"
#include "linenet/rng.hpp"
#include "linenet/routing.hpp"
#include "linenet/sampler.hpp"

namespace linenet::testing {

inline MarkedLine marked(const Vec& dir, const Vec& through, double speed) {
  return MarkedLine{Line(Direction(dir), through), speed};
}

// A sample holding exactly the given lines, one layer [v_min, inf).
inline LineSample hand_sample(int d, double gamma, const Ball& window, double v_min, std::vector<MarkedLine> lines) {
  LineSample s;
  s.params = ProcessParams{d, gamma, window, v_min, 0};
  s.lines = std::move(lines);
  s.line_layer.assign(s.lines.size(), 0);
  s.layers = {SpeedLayer{v_min, std::numeric_limits<double>::infinity()}};
  return s;
}

struct BrutePath {
  double time = std::numeric_limits<double>::infinity();
  std::vector<int> nodes;
};

// Exhaustive search over simple paths. Among paths whose time is within
// `tie` of the best, the lexicographically smallest node sequence wins.
inline BrutePath brute_force_path(const RouteNetwork& net, int s, int t, double tie = 1e-12) {
  std::vector<std::pair<double, std::vector<int>>> found;
  std::vector<int> path{s};
  std::vector<char> used(net.node_count(), 0);
  used[static_cast<std::size_t>(s)] = 1;
  std::function<void(int, double)> dfs = [&](int u, double time) {
    if (u == t) {
      found.emplace_back(time, path);
      return;
    }
    for (const auto& nb : net.neighbors(u)) {
      if (used[static_cast<std::size_t>(nb.node)]) continue;
      used[static_cast<std::size_t>(nb.node)] = 1;
      path.push_back(nb.node);
      dfs(nb.node, time + net.edge(nb.edge).time);
      path.pop_back();
      used[static_cast<std::size_t>(nb.node)] = 0;
    }
  };
  dfs(s, 0.0);
  BrutePath best;
  for (const auto& f : found) best.time = std::min(best.time, f.first);
  for (const auto& f : found) {
    if (f.first <= best.time + tie && (best.nodes.empty() || f.second < best.nodes)) best.nodes = f.second;
  }
  return best;
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

}  // namespace linenet::testing
