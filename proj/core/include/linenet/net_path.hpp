#pragma once

#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "linenet/routing.hpp"
#include "linenet/sampler.hpp"

namespace linenet {

// Smallest admissible scale ratio for the recursive construction:
// 2^{(gamma-1)/(gamma-d)}.
double alpha_min(int d, double gamma);

struct NetPathConfig {
  double alpha = 5.0;
  double r = 1.0;
  int n_max = 4;
  // Level speed v_n = prefactor * r_{n+1}^{(d-1)/(gamma-1)}. The default puts
  // level-0 success above one half at gamma = 3, d = 2, r = 1, |x - y| = r.
  double speed_prefactor = 0.5;
  double v_bridge = 0.0;  // 0 selects the sample's v_min
  double gap_tolerance = std::numeric_limits<double>::infinity();
};

// Radius r_n = r * alpha^{-n}.
double level_radius(const NetPathConfig& cfg, int n);
double level_speed(const NetPathConfig& cfg, int n, int d, double gamma);

struct NetSegment {
  Vec from;
  Vec to;
  int line = -1;  // -1 for a bridge
  int level = 0;
  double length = 0.0;
  double time = 0.0;
};

struct NetPath {
  std::vector<NetSegment> segments;  // consecutive, from x to y
  double time = 0.0;
  double length = 0.0;
  std::map<int, LineShare> per_line;
  double bridge_time = 0.0;
};

struct NetPathFailure {
  int level = 0;
  Vec center_a;
  Vec center_b;
  double radius = 0.0;
  std::string reason;
};

struct NetPathResult {
  std::optional<NetPath> path;
  std::optional<NetPathFailure> failure;
  bool ok() const { return path.has_value(); }
};

using LineFilter = std::function<bool(const MarkedLine&)>;

// Builds a path from x to y by recursive halving: at level n the endpoints
// a, b are joined through the fastest admissible line of speed >= v_n that
// hits both B(a, r_{n+1}) and B(b, r_{n+1}); the two flanks recurse at level
// n + 1. Remaining gaps at level n_max are bridged at v_bridge.
NetPathResult build_net_path(const Vec& x, const Vec& y, const LineSample& sample, const NetPathConfig& cfg,
                             const LineFilter& filter = {});

// Distinct segment endpoints in path order, x first and y last.
std::vector<Vec> net_path_waypoints(const NetPath& path);

}  // namespace linenet
