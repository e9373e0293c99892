#pragma once

#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "linenet/network.hpp"

namespace linenet {

struct LineShare {
  double length = 0.0;  // L_g(l)
  double time = 0.0;    // T_g(l)
};

struct Geodesic {
  std::vector<int> nodes;
  std::vector<int> edges;  // edges[i] joins nodes[i] and nodes[i+1]
  double time = 0.0;
  double length = 0.0;
  std::map<int, LineShare> per_line;
  double bridge_time = 0.0;
  double bridge_length = 0.0;
};

inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

struct ShortestTree {
  std::vector<double> time;  // kUnreachable where not reached
  std::vector<int> pred_edge;  // -1 at the source and unreached nodes
};

// Single-source shortest times. When `stop_at` is non-empty the search ends
// once every listed node is settled; unsettled entries are then upper bounds.
ShortestTree shortest_times(const RouteNetwork& net, int source, std::span<const int> stop_at = {});

// Walks from `source` to the root of a tree computed from the target,
// always stepping to the smallest-index neighbor that stays on a shortest
// path. `from_target` must have `source` settled.
std::optional<Geodesic> trace_geodesic(const RouteNetwork& net, const ShortestTree& from_target, int source,
                                       int target);

// Minimum-time path between two terminal labels. Among equal-time paths the
// node sequence is lexicographically smallest. std::nullopt when t is not
// reachable from s.
std::optional<Geodesic> shortest_time_path(const RouteNetwork& net, int s_label, int t_label);

// Same as above for raw node indices.
std::optional<Geodesic> shortest_node_path(const RouteNetwork& net, int source, int target);

// Fills time, length and the per-line decomposition from nodes/edges.
void decompose(const RouteNetwork& net, Geodesic& g);

// Geodesic time predicted after scaling space by alpha and speeds by
// alpha^{(d-1)/(gamma-1)}: T * alpha^{(gamma-d)/(gamma-1)}.
double path_time_under_scaling(double time, double alpha, int d, double gamma);
inline double path_time_under_scaling(const Geodesic& g, double alpha, int d, double gamma) {
  return path_time_under_scaling(g.time, alpha, d, gamma);
}

// Applies the similarity above to every line of a sample (window included).
LineSample scale_sample(const LineSample& sample, double alpha);

// Ordered node list, then the per-line decomposition table.
void write_geodesic(std::ostream& out, const RouteNetwork& net, const Geodesic& g);

}  // namespace linenet
