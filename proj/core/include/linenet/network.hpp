#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "linenet/geometry.hpp"
#include "linenet/sampler.hpp"

namespace linenet {

enum class EdgeKind : std::uint8_t { on_line = 0, access = 1, jump = 2 };

std::string_view to_string(EdgeKind k);

struct Edge {
  int a = 0;  // a < b
  int b = 0;
  double time = 0.0;
  double length = 0.0;
  EdgeKind kind = EdgeKind::on_line;
  int line = -1;  // host line for on_line edges, -1 otherwise
};

struct Neighbor {
  int node;
  int edge;
};

// Undirected graph over points in R^d. Immutable once built; node 0..T-1
// are not guaranteed to be terminals (terminals may fuse), use terminal().
class RouteNetwork {
 public:
  int dim() const { return dim_; }
  std::size_t node_count() const { return hosts_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  std::size_t terminal_count() const { return terminals_.size(); }

  Eigen::Map<const Vec> point(int node) const {
    return Eigen::Map<const Vec>(coords_.data() + static_cast<std::ptrdiff_t>(node) * dim_, dim_);
  }
  std::span<const int> hosts(int node) const { return hosts_[static_cast<std::size_t>(node)]; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(int e) const { return edges_[static_cast<std::size_t>(e)]; }
  std::span<const Neighbor> neighbors(int node) const {
    const auto lo = adj_offset_[static_cast<std::size_t>(node)];
    const auto hi = adj_offset_[static_cast<std::size_t>(node) + 1];
    return {adj_.data() + lo, hi - lo};
  }
  // Node index of terminal label k (labels are input positions).
  int terminal(int label) const { return terminals_.at(static_cast<std::size_t>(label)); }
  const std::vector<int>& terminals() const { return terminals_; }
  double line_speed(int line) const { return line_speeds_.at(static_cast<std::size_t>(line)); }
  const std::vector<double>& line_speeds() const { return line_speeds_; }

 private:
  friend class NetworkAssembler;
  int dim_ = 0;
  std::vector<double> coords_;
  std::vector<std::vector<int>> hosts_;
  std::vector<Edge> edges_;
  std::vector<int> terminals_;
  std::vector<double> line_speeds_;
  std::vector<std::size_t> adj_offset_;
  std::vector<Neighbor> adj_;
};

// Exact line arrangement in the plane: intersections inside the window plus
// each terminal's projection on every line, joined by on_line edges; access
// edges run at v_access from each terminal to its projections.
RouteNetwork build_network_2d(const LineSample& sample, std::span<const Vec> terminals, double v_access);

struct JumpOptions {
  double eps = 0.05;
  double v_bridge = 0.0;  // 0 selects sample.params.v_min
  int k_access = 0;       // nearest lines per terminal; 0 = every line
  std::size_t node_cap = 2'000'000;
};

// Dimension-free builder: line pairs closer than eps get a jump edge between
// their closest-approach witnesses (fused when they coincide).
RouteNetwork build_network_jump(const LineSample& sample, std::span<const Vec> terminals,
                                const JumpOptions& options);

// Nodes section then edges section, kinds spelled out.
void write_network(std::ostream& out, const RouteNetwork& net);

}  // namespace linenet
