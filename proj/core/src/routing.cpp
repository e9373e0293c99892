#include "linenet/routing.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <queue>

#include "linenet/format.hpp"

namespace linenet {

ShortestTree shortest_times(const RouteNetwork& net, int source, std::span<const int> stop_at) {
  const std::size_t n = net.node_count();
  ShortestTree tree;
  tree.time.assign(n, kUnreachable);
  tree.pred_edge.assign(n, -1);
  std::vector<char> settled(n, 0);
  std::vector<char> wanted(n, 0);
  std::size_t remaining = 0;
  for (int v : stop_at) {
    if (!wanted[static_cast<std::size_t>(v)]) {
      wanted[static_cast<std::size_t>(v)] = 1;
      ++remaining;
    }
  }

  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  tree.time[static_cast<std::size_t>(source)] = 0.0;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    auto& done = settled[static_cast<std::size_t>(u)];
    if (done) continue;
    done = 1;
    if (wanted[static_cast<std::size_t>(u)] && --remaining == 0 && !stop_at.empty()) break;
    for (const Neighbor& nb : net.neighbors(u)) {
      if (settled[static_cast<std::size_t>(nb.node)]) continue;
      const double cand = d + net.edge(nb.edge).time;
      auto& cur = tree.time[static_cast<std::size_t>(nb.node)];
      if (cand < cur) {
        cur = cand;
        tree.pred_edge[static_cast<std::size_t>(nb.node)] = nb.edge;
        heap.emplace(cand, nb.node);
      }
    }
  }
  return tree;
}

void decompose(const RouteNetwork& net, Geodesic& g) {
  g.time = 0.0;
  g.length = 0.0;
  g.bridge_time = 0.0;
  g.bridge_length = 0.0;
  g.per_line.clear();
  for (int ei : g.edges) {
    const Edge& e = net.edge(ei);
    g.time += e.time;
    g.length += e.length;
    if (e.kind == EdgeKind::on_line) {
      auto& share = g.per_line[e.line];
      share.length += e.length;
      share.time += e.time;
    } else {
      g.bridge_time += e.time;
      g.bridge_length += e.length;
    }
  }
}

std::optional<Geodesic> trace_geodesic(const RouteNetwork& net, const ShortestTree& from_target, int source,
                                       int target) {
  const auto& dist = from_target.time;
  if (dist[static_cast<std::size_t>(target)] != 0.0) throw Error("trace_geodesic: tree is not rooted at target");
  if (dist[static_cast<std::size_t>(source)] == kUnreachable) return std::nullopt;
  Geodesic g;
  int u = source;
  g.nodes.push_back(u);
  while (u != target) {
    const double du = dist[static_cast<std::size_t>(u)];
    const Neighbor* step = nullptr;
    for (const Neighbor& nb : net.neighbors(u)) {
      const double dw = dist[static_cast<std::size_t>(nb.node)];
      if (dw < du && dw + net.edge(nb.edge).time == du) {
        step = &nb;
        break;
      }
    }
    if (step == nullptr) throw Error("trace_geodesic: inconsistent distance labels");
    g.edges.push_back(step->edge);
    g.nodes.push_back(step->node);
    u = step->node;
  }
  decompose(net, g);
  return g;
}

std::optional<Geodesic> shortest_node_path(const RouteNetwork& net, int source, int target) {
  if (source == target) {
    Geodesic g;
    g.nodes.push_back(source);
    return g;
  }
  // Distances to the target, then a forward walk from the source.
  const int stop[1] = {source};
  return trace_geodesic(net, shortest_times(net, target, stop), source, target);
}

std::optional<Geodesic> shortest_time_path(const RouteNetwork& net, int s_label, int t_label) {
  return shortest_node_path(net, net.terminal(s_label), net.terminal(t_label));
}

double path_time_under_scaling(double time, double alpha, int d, double gamma) {
  if (!(alpha > 0.0)) throw Error("path_time_under_scaling: alpha must be positive");
  return time * std::pow(alpha, (gamma - d) / (gamma - 1.0));
}

LineSample scale_sample(const LineSample& sample, double alpha) {
  if (!(alpha > 0.0)) throw Error("scale_sample: alpha must be positive");
  const auto& p = sample.params;
  const double speed_factor = std::pow(alpha, (p.d - 1.0) / (p.gamma - 1.0));
  LineSample out = sample;
  out.params.window = Ball(alpha * p.window.center, alpha * p.window.radius);
  out.params.v_min = p.v_min * speed_factor;
  for (auto& layer : out.layers) {
    layer.lo *= speed_factor;
    layer.hi *= speed_factor;
  }
  for (auto& l : out.lines) {
    l.line = Line::from_parts(l.line.dir(), alpha * l.line.foot());
    l.speed *= speed_factor;
  }
  return out;
}

void write_geodesic(std::ostream& out, const RouteNetwork& net, const Geodesic& g) {
  out << "# linenet geodesic v1\n";
  out << "time," << fmt_g17(g.time) << "\n";
  out << "length," << fmt_g17(g.length) << "\n";
  out << "bridge_time," << fmt_g17(g.bridge_time) << "\n";
  out << "bridge_length," << fmt_g17(g.bridge_length) << "\n";
  out << "nodes," << g.nodes.size() << "\n";
  out << "step,node";
  for (int k = 0; k < net.dim(); ++k) out << ",x" << k;
  out << "\n";
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    out << i << "," << g.nodes[i];
    const auto p = net.point(g.nodes[i]);
    for (int k = 0; k < net.dim(); ++k) out << "," << fmt_g17(p[k]);
    out << "\n";
  }
  out << "lines," << g.per_line.size() << "\n";
  out << "line,speed,length,time\n";
  for (const auto& [line, share] : g.per_line) {
    out << line << "," << fmt_g17(net.line_speed(line)) << "," << fmt_g17(share.length) << ","
        << fmt_g17(share.time) << "\n";
  }
}

}  // namespace linenet
