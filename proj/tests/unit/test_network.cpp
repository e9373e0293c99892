#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "linenet/experiments.hpp"
#include "linenet/network.hpp"
#include "linenet/routing.hpp"
#include "support.hpp"

using namespace linenet;
using namespace linenet::testing;

namespace {

// x-axis at speed 2, y-axis at speed 1.
LineSample cross_sample() {
  return hand_sample(2, 3.0, Ball(origin(2), 2.0), 0.5,
                     {marked(point2(1, 0), origin(2), 2.0), marked(point2(0, 1), origin(2), 1.0)});
}

int node_at(const RouteNetwork& net, const Vec& p) {
  for (std::size_t v = 0; v < net.node_count(); ++v) {
    if ((net.point(static_cast<int>(v)) - p).norm() < 1e-12) return static_cast<int>(v);
  }
  return -1;
}

std::size_t intersection_nodes(const RouteNetwork& net) {
  std::size_t n = 0;
  for (std::size_t v = 0; v < net.node_count(); ++v) n += net.hosts(static_cast<int>(v)).size() >= 2 ? 1 : 0;
  return n;
}

}  // namespace

TEST(Network2d, CrossArrangement) {
  const auto s = cross_sample();
  const std::vector<Vec> terms{point2(0, -1), point2(1, 0)};
  const auto net = build_network_2d(s, terms, 0.5);
  EXPECT_EQ(intersection_nodes(net), 1u);
  const int o = node_at(net, origin(2));
  ASSERT_GE(o, 0);
  EXPECT_EQ(net.hosts(o).size(), 2u);
  // Terminals sit on the lines: no access edges survive.
  for (const auto& e : net.edges()) EXPECT_EQ(e.kind, EdgeKind::on_line);
  EXPECT_EQ(net.node_count(), 3u);
  EXPECT_EQ(net.edge_count(), 2u);
  for (const auto& e : net.edges()) {
    EXPECT_NEAR(e.time, e.length / net.line_speed(e.line), 1e-15);
    const auto ha = net.hosts(e.a);
    const auto hb = net.hosts(e.b);
    EXPECT_NE(std::find(ha.begin(), ha.end(), e.line), ha.end());
    EXPECT_NE(std::find(hb.begin(), hb.end(), e.line), hb.end());
  }
}

TEST(Network2d, TerminalOnIntersectionIsFused) {
  const auto s = cross_sample();
  const std::vector<Vec> terms{origin(2), point2(0.5, 0.5)};
  const auto net = build_network_2d(s, terms, 0.5);
  EXPECT_EQ(net.terminal(0), node_at(net, origin(2)));
  EXPECT_EQ(net.hosts(net.terminal(0)).size(), 2u);
  for (const auto& e : net.edges()) {
    EXPECT_GT(e.length, 0.0);
    EXPECT_NE(e.a, e.b);
  }
}

TEST(Network2d, AccessEdgesRunAtAccessSpeed) {
  const auto s = cross_sample();
  const std::vector<Vec> terms{point2(0.3, 0.4)};
  const auto net = build_network_2d(s, terms, 0.25);
  int access = 0;
  for (const auto& e : net.edges()) {
    if (e.kind != EdgeKind::access) continue;
    ++access;
    EXPECT_NEAR(e.time, e.length / 0.25, 1e-15);
  }
  EXPECT_EQ(access, 2);
  EXPECT_THROW(build_network_2d(s, terms, 0.6), Error);
  EXPECT_THROW(build_network_2d(s, std::vector<Vec>{point2(3, 0)}, 0.5), Error);
}

TEST(Network2d, EmptySampleGivesIsolatedTerminals) {
  const auto s = hand_sample(2, 3.0, Ball(origin(2), 1.0), 1.0, {});
  const std::vector<Vec> terms{point2(0.1, 0), point2(-0.1, 0)};
  const auto net = build_network_2d(s, terms, 1.0);
  EXPECT_EQ(net.node_count(), 2u);
  EXPECT_EQ(net.edge_count(), 0u);
  EXPECT_FALSE(shortest_time_path(net, 0, 1).has_value());
}

TEST(Network2d, IntersectionCountBound) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto s = sample_process(ProcessParams{2, 3.0, Ball(origin(2), 1.0), 0.4, seed});
    const auto net = build_network_2d(s, std::vector<Vec>{}, 0.4);
    const std::size_t n = s.size();
    EXPECT_LE(intersection_nodes(net), n * (n - 1) / 2);
  }
}

TEST(Network2d, StructuralInvariants) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto s = sample_process(ProcessParams{2, 3.0, Ball(origin(2), 1.5), 0.3, seed});
    const std::vector<Vec> terms{point2(-0.5, 0), point2(0.5, 0.1), point2(0, 0.4)};
    const auto net = build_network_2d(s, terms, 0.3);
    for (std::size_t v = 0; v < net.node_count(); ++v) {
      EXPECT_LE(net.point(static_cast<int>(v)).norm(), 1.5 + 1e-9);
      const auto nb = net.neighbors(static_cast<int>(v));
      for (std::size_t i = 1; i < nb.size(); ++i) EXPECT_LT(nb[i - 1].node, nb[i].node);
    }
    for (const auto& e : net.edges()) {
      EXPECT_LT(e.a, e.b);
      EXPECT_GT(e.length, 0.0);
      EXPECT_NEAR((net.point(e.a) - net.point(e.b)).norm(), e.length, 1e-9);
      if (e.kind == EdgeKind::on_line) {
        EXPECT_NEAR(e.time * s.lines[static_cast<std::size_t>(e.line)].speed, e.length, 1e-12);
      } else {
        EXPECT_NEAR(e.time * 0.3, e.length, 1e-12);
      }
    }
  }
}

TEST(NetworkJump, SkewPairGetsOneJumpEdge) {
  const auto s = hand_sample(3, 4.0, Ball(origin(3), 2.0), 1.0,
                             {marked(point3(1, 0, 0), origin(3), 2.0), marked(point3(0, 1, 0), point3(0, 0, 0.5), 3.0)});
  JumpOptions opt;
  opt.eps = 1.0;
  opt.v_bridge = 1.0;
  const auto net = build_network_jump(s, std::vector<Vec>{}, opt);
  int jumps = 0;
  for (const auto& e : net.edges()) {
    if (e.kind != EdgeKind::jump) continue;
    ++jumps;
    EXPECT_NEAR(e.time, 0.5, 1e-15);
    EXPECT_NEAR(e.length, 0.5, 1e-15);
  }
  EXPECT_EQ(jumps, 1);
  opt.eps = 0.4;
  EXPECT_EQ(build_network_jump(s, std::vector<Vec>{}, opt).edge_count(), 0u);
}

TEST(NetworkJump, TinyEpsDisconnectsGenericLines) {
  const auto s = sample_process(ProcessParams{3, 4.0, Ball(origin(3), 1.0), 0.5, 3});
  ASSERT_GE(s.size(), 2u);
  JumpOptions opt;
  opt.eps = 1e-12;
  const auto net = build_network_jump(s, std::vector<Vec>{}, opt);
  for (const auto& e : net.edges()) EXPECT_NE(e.kind, EdgeKind::jump);
}

TEST(NetworkJump, NodeCapRefuses) {
  const auto s = sample_process(ProcessParams{3, 4.0, Ball(origin(3), 1.0), 0.3, 3});
  JumpOptions opt;
  opt.eps = 10.0;
  opt.node_cap = 5;
  EXPECT_THROW(build_network_jump(s, std::vector<Vec>{}, opt), Error);
  opt.eps = 0.0;
  EXPECT_THROW(build_network_jump(s, std::vector<Vec>{}, opt), Error);
}

TEST(NetworkJump, PlanarMatchesArrangementBuilder) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto s = sample_process(ProcessParams{2, 3.0, Ball(origin(2), 1.5), 0.4, seed});
    const std::vector<Vec> terms{point2(-0.5, 0), point2(0.5, 0), point2(0.1, 0.3)};
    const auto a = build_network_2d(s, terms, 0.4);
    JumpOptions opt;
    opt.eps = 1e-9;
    opt.v_bridge = 0.4;
    const auto b = build_network_jump(s, terms, opt);
    for (int i = 0; i < 3; ++i) {
      for (int j = i + 1; j < 3; ++j) {
        const auto ga = shortest_time_path(a, i, j);
        const auto gb = shortest_time_path(b, i, j);
        ASSERT_EQ(ga.has_value(), gb.has_value());
        if (ga) EXPECT_LT(rel_diff(ga->time, gb->time), 1e-9) << seed;
      }
    }
  }
}

TEST(NetworkFormat, GoldenCrossDump) {
  const auto net = build_network_2d(cross_sample(), std::vector<Vec>{point2(0, -1), point2(1, 0)}, 0.5);
  std::ostringstream out;
  write_network(out, net);
  EXPECT_EQ(out.str(),
            "# linenet network v1\n"
            "dim,2\n"
            "nodes,3\n"
            "node,x0,x1,hosts\n"
            "0,0,-1,1\n"
            "1,1,0,0\n"
            "2,0,0,0;1\n"
            "edges,2\n"
            "edge,a,b,kind,line,length,time\n"
            "0,0,2,on_line,1,1,1\n"
            "1,1,2,on_line,0,1,0.5\n"
            "terminals,2\n"
            "label,node\n"
            "t0,0\n"
            "t1,1\n");
}
