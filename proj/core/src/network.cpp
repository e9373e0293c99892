#include "linenet/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <tuple>

#include "linenet/format.hpp"

namespace linenet {

std::string_view to_string(EdgeKind k) {
  switch (k) {
    case EdgeKind::on_line:
      return "on_line";
    case EdgeKind::access:
      return "access";
    case EdgeKind::jump:
      return "jump";
  }
  return "?";
}

// Collects raw nodes, line attachments and bridge edges, then fuses
// coincident nodes and emits the compact network.
class NetworkAssembler {
 public:
  NetworkAssembler(const LineSample& sample, const Ball& window)
      : dim_(sample.params.d), window_(window), on_line_(sample.lines.size()) {
    speeds_.reserve(sample.lines.size());
    for (const auto& l : sample.lines) speeds_.push_back(l.speed);
  }

  int add_node(const double* p) {
    const int id = static_cast<int>(parent_.size());
    coords_.insert(coords_.end(), p, p + dim_);
    parent_.push_back(id);
    return id;
  }
  int add_node(const Vec& p) { return add_node(p.data()); }

  // Raw terminal nodes; coincident terminals share one node.
  std::vector<int> add_terminals(std::span<const Vec> terminals) {
    std::vector<int> raw;
    for (std::size_t k = 0; k < terminals.size(); ++k) {
      raw.push_back(add_node(terminals[k]));
      for (std::size_t j = 0; j < k; ++j) {
        if ((terminals[k] - terminals[j]).norm() <= kGeomSlack) {
          unite(raw[k], raw[j]);
          break;
        }
      }
    }
    return raw;
  }

  bool in_window(const double* p) const {
    double s = 0.0;
    for (int k = 0; k < dim_; ++k) {
      const double z = p[k] - window_.center[k];
      s += z * z;
    }
    const double r = window_.radius + kGeomSlack;
    return s <= r * r;
  }

  void attach(int line, double t, int node) { on_line_[static_cast<std::size_t>(line)].push_back({t, node}); }

  void add_bridge(int a, int b, double length, double time, EdgeKind kind) {
    raw_edges_.push_back(Edge{a, b, time, length, kind, -1});
  }

  std::size_t raw_node_count() const { return parent_.size(); }

  RouteNetwork finish(const std::vector<int>& terminal_raw) {
    for (std::size_t l = 0; l < on_line_.size(); ++l) {
      auto& att = on_line_[l];
      std::sort(att.begin(), att.end());
      const double speed = speeds_[l];
      std::size_t group_start = 0;
      for (std::size_t k = 1; k < att.size(); ++k) {
        if (att[k].first - att[k - 1].first <= kGeomSlack) {
          unite(att[k].second, att[k - 1].second);
          continue;
        }
        const double len = att[k].first - att[group_start].first;
        raw_edges_.push_back(Edge{att[group_start].second, att[k].second, len / speed, len,
                                  EdgeKind::on_line, static_cast<int>(l)});
        group_start = k;
      }
    }

    const std::size_t n_raw = parent_.size();
    std::vector<int> remap(n_raw, -1);
    RouteNetwork net;
    net.dim_ = dim_;
    int next = 0;
    for (std::size_t i = 0; i < n_raw; ++i) {
      if (find(static_cast<int>(i)) == static_cast<int>(i)) {
        remap[i] = next++;
        net.coords_.insert(net.coords_.end(), coords_.begin() + static_cast<std::ptrdiff_t>(i) * dim_,
                           coords_.begin() + static_cast<std::ptrdiff_t>(i + 1) * dim_);
      }
    }
    for (std::size_t i = 0; i < n_raw; ++i) remap[i] = remap[static_cast<std::size_t>(find(static_cast<int>(i)))];

    net.hosts_.assign(static_cast<std::size_t>(next), {});
    for (std::size_t l = 0; l < on_line_.size(); ++l) {
      for (const auto& [t, node] : on_line_[l]) {
        net.hosts_[static_cast<std::size_t>(remap[static_cast<std::size_t>(node)])].push_back(static_cast<int>(l));
      }
    }
    for (auto& h : net.hosts_) {
      std::sort(h.begin(), h.end());
      h.erase(std::unique(h.begin(), h.end()), h.end());
    }

    std::vector<Edge> edges;
    edges.reserve(raw_edges_.size());
    for (Edge e : raw_edges_) {
      e.a = remap[static_cast<std::size_t>(e.a)];
      e.b = remap[static_cast<std::size_t>(e.b)];
      if (e.a == e.b || !(e.length > 0.0)) continue;
      if (e.a > e.b) std::swap(e.a, e.b);
      edges.push_back(e);
    }
    // Parallel edges collapse onto the fastest; on_line wins ties.
    std::sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) {
      return std::tie(x.a, x.b, x.time, x.kind, x.line) < std::tie(y.a, y.b, y.time, y.kind, y.line);
    });
    for (const Edge& e : edges) {
      if (!net.edges_.empty() && net.edges_.back().a == e.a && net.edges_.back().b == e.b) continue;
      net.edges_.push_back(e);
    }

    net.adj_offset_.assign(static_cast<std::size_t>(next) + 1, 0);
    for (const Edge& e : net.edges_) {
      ++net.adj_offset_[static_cast<std::size_t>(e.a) + 1];
      ++net.adj_offset_[static_cast<std::size_t>(e.b) + 1];
    }
    std::partial_sum(net.adj_offset_.begin(), net.adj_offset_.end(), net.adj_offset_.begin());
    net.adj_.resize(net.adj_offset_.back());
    std::vector<std::size_t> fill(net.adj_offset_.begin(), net.adj_offset_.end() - 1);
    for (std::size_t i = 0; i < net.edges_.size(); ++i) {
      const Edge& e = net.edges_[i];
      net.adj_[fill[static_cast<std::size_t>(e.a)]++] = Neighbor{e.b, static_cast<int>(i)};
      net.adj_[fill[static_cast<std::size_t>(e.b)]++] = Neighbor{e.a, static_cast<int>(i)};
    }
    for (int v = 0; v < next; ++v) {
      auto first = net.adj_.begin() + static_cast<std::ptrdiff_t>(net.adj_offset_[static_cast<std::size_t>(v)]);
      auto last = net.adj_.begin() + static_cast<std::ptrdiff_t>(net.adj_offset_[static_cast<std::size_t>(v) + 1]);
      std::sort(first, last, [](const Neighbor& x, const Neighbor& y) { return x.node < y.node; });
    }

    for (int t : terminal_raw) net.terminals_.push_back(remap[static_cast<std::size_t>(t)]);
    net.line_speeds_ = speeds_;
    return net;
  }

 private:
  int find(int x) {
    while (parent_[static_cast<std::size_t>(x)] != x) {
      auto& p = parent_[static_cast<std::size_t>(x)];
      p = parent_[static_cast<std::size_t>(p)];
      x = p;
    }
    return x;
  }
  // The representative is always the smallest raw id, so compact indices
  // follow creation order.
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) std::swap(a, b);
    parent_[static_cast<std::size_t>(a)] = b;
  }

  int dim_;
  Ball window_;
  std::vector<double> coords_;
  std::vector<int> parent_;
  std::vector<std::vector<std::pair<double, int>>> on_line_;
  std::vector<Edge> raw_edges_;
  std::vector<double> speeds_;
};

namespace {

void check_terminals(const LineSample& sample, std::span<const Vec> terminals) {
  for (const auto& t : terminals) {
    if (t.size() != sample.params.d) throw Error("terminal dimension does not match the sample");
    if (!sample.params.window.contains(t)) throw Error("terminal lies outside the sampling window");
  }
}

// Attaches terminal raw id `term` at point x to line i: fused when x is on
// the line, otherwise an access edge to the in-window projection.
void attach_terminal(NetworkAssembler& as, const MarkedLine& ml, int line, int term, const Vec& x,
                     double v_access) {
  const double s = ml.line.param_of(x);
  const Vec q = ml.line.at(s);
  const double dist = (x - q).norm();
  if (dist <= kGeomSlack) {
    as.attach(line, s, term);
    return;
  }
  if (!as.in_window(q.data())) return;
  const int n = as.add_node(q);
  as.attach(line, s, n);
  as.add_bridge(term, n, dist, dist / v_access, EdgeKind::access);
}

}  // namespace

RouteNetwork build_network_2d(const LineSample& sample, std::span<const Vec> terminals, double v_access) {
  if (sample.params.d != 2) throw Error("build_network_2d: sample must be planar (d = 2)");
  if (!(v_access > 0.0) || v_access > sample.params.v_min) {
    throw Error("build_network_2d: v_access must lie in (0, v_min]");
  }
  check_terminals(sample, terminals);

  NetworkAssembler as(sample, sample.params.window);
  const std::vector<int> term_raw = as.add_terminals(terminals);

  const std::size_t n = sample.lines.size();
  std::vector<double> px(n), py(n), ux(n), uy(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& l = sample.lines[i].line;
    px[i] = l.foot()[0];
    py[i] = l.foot()[1];
    ux[i] = l.dir()[0];
    uy[i] = l.dir()[1];
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dot = ux[i] * ux[j] + uy[i] * uy[j];
      if (std::abs(1.0 - std::abs(dot)) < kParallelTol) continue;
      const double cr = ux[i] * uy[j] - uy[i] * ux[j];
      const double wx = px[j] - px[i];
      const double wy = py[j] - py[i];
      const double s = (wx * uy[j] - wy * ux[j]) / cr;
      const double t = (wx * uy[i] - wy * ux[i]) / cr;
      const double q[2] = {px[i] + s * ux[i], py[i] + s * uy[i]};
      if (!as.in_window(q)) continue;
      const int node = as.add_node(q);
      as.attach(static_cast<int>(i), s, node);
      as.attach(static_cast<int>(j), t, node);
    }
  }
  for (std::size_t k = 0; k < terminals.size(); ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      attach_terminal(as, sample.lines[i], static_cast<int>(i), term_raw[k], terminals[k], v_access);
    }
  }
  return as.finish(term_raw);
}

RouteNetwork build_network_jump(const LineSample& sample, std::span<const Vec> terminals,
                                const JumpOptions& options) {
  const double v_bridge = options.v_bridge > 0.0 ? options.v_bridge : sample.params.v_min;
  if (!(options.eps > 0.0)) throw Error("build_network_jump: eps must be positive");
  if (v_bridge > sample.params.v_min) throw Error("build_network_jump: v_bridge must not exceed v_min");
  if (options.k_access < 0) throw Error("build_network_jump: k_access must be >= 0");
  check_terminals(sample, terminals);

  NetworkAssembler as(sample, sample.params.window);
  const std::vector<int> term_raw = as.add_terminals(terminals);

  const auto& lines = sample.lines;
  const std::size_t n = lines.size();
  auto check_cap = [&] {
    if (as.raw_node_count() > options.node_cap) {
      throw Error("build_network_jump: node count exceeds the configured cap; reduce eps");
    }
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const ClosestApproach ca = closest_approach(lines[i].line, lines[j].line);
      if (!(ca.distance < options.eps) || ca.identical) continue;
      if (!as.in_window(ca.on_a.data()) || !as.in_window(ca.on_b.data())) continue;
      const double sa = lines[i].line.param_of(ca.on_a);
      const double sb = lines[j].line.param_of(ca.on_b);
      if (ca.distance == 0.0) {
        const int node = as.add_node(ca.on_a);
        as.attach(static_cast<int>(i), sa, node);
        as.attach(static_cast<int>(j), sb, node);
      } else {
        const int na = as.add_node(ca.on_a);
        const int nb = as.add_node(ca.on_b);
        as.attach(static_cast<int>(i), sa, na);
        as.attach(static_cast<int>(j), sb, nb);
        as.add_bridge(na, nb, ca.distance, ca.distance / v_bridge, EdgeKind::jump);
      }
      check_cap();
    }
  }

  std::vector<std::pair<double, std::size_t>> by_dist(n);
  for (std::size_t k = 0; k < terminals.size(); ++k) {
    for (std::size_t i = 0; i < n; ++i) by_dist[i] = {lines[i].line.distance_to(terminals[k]), i};
    std::sort(by_dist.begin(), by_dist.end());
    const std::size_t take =
        options.k_access == 0 ? n : std::min(n, static_cast<std::size_t>(options.k_access));
    for (std::size_t r = 0; r < take; ++r) {
      const std::size_t i = by_dist[r].second;
      attach_terminal(as, lines[i], static_cast<int>(i), term_raw[k], terminals[k], v_bridge);
    }
    check_cap();
  }
  return as.finish(term_raw);
}

void write_network(std::ostream& out, const RouteNetwork& net) {
  out << "# linenet network v1\n";
  out << "dim," << net.dim() << "\n";
  out << "nodes," << net.node_count() << "\n";
  out << "node";
  for (int k = 0; k < net.dim(); ++k) out << ",x" << k;
  out << ",hosts\n";
  for (std::size_t v = 0; v < net.node_count(); ++v) {
    out << v;
    const auto p = net.point(static_cast<int>(v));
    for (int k = 0; k < net.dim(); ++k) out << "," << fmt_g17(p[k]);
    out << ",";
    const auto h = net.hosts(static_cast<int>(v));
    for (std::size_t i = 0; i < h.size(); ++i) out << (i ? ";" : "") << h[i];
    out << "\n";
  }
  out << "edges," << net.edge_count() << "\n";
  out << "edge,a,b,kind,line,length,time\n";
  for (std::size_t i = 0; i < net.edge_count(); ++i) {
    const Edge& e = net.edges()[i];
    out << i << "," << e.a << "," << e.b << "," << to_string(e.kind) << "," << e.line << ","
        << fmt_g17(e.length) << "," << fmt_g17(e.time) << "\n";
  }
  out << "terminals," << net.terminal_count() << "\n";
  out << "label,node\n";
  for (std::size_t k = 0; k < net.terminal_count(); ++k) out << "t" << k << "," << net.terminals()[k] << "\n";
}

}  // namespace linenet
