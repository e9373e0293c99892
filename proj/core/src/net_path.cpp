#include "linenet/net_path.hpp"

#include <cmath>
#include <sstream>

namespace linenet {

double alpha_min(int d, double gamma) {
  if (!(gamma > d)) throw Error("alpha_min: gamma must exceed d");
  return std::pow(2.0, (gamma - 1.0) / (gamma - d));
}

double level_radius(const NetPathConfig& cfg, int n) { return cfg.r * std::pow(cfg.alpha, -n); }

double level_speed(const NetPathConfig& cfg, int n, int d, double gamma) {
  return cfg.speed_prefactor * std::pow(level_radius(cfg, n + 1), (d - 1.0) / (gamma - 1.0));
}

namespace {

class Builder {
 public:
  Builder(const LineSample& sample, const NetPathConfig& cfg, const LineFilter& filter)
      : sample_(sample), cfg_(cfg), filter_(filter) {
    v_bridge_ = cfg.v_bridge > 0.0 ? cfg.v_bridge : sample.params.v_min;
  }

  bool run(const Vec& a, const Vec& b, int n) {
    if ((a - b).norm() == 0.0) return true;
    if (n >= cfg_.n_max) {
      const double gap = (a - b).norm();
      if (gap > cfg_.gap_tolerance) {
        fail(n, a, b, level_radius(cfg_, n), "gap above tolerance at maximal depth");
        return false;
      }
      path_.segments.push_back(NetSegment{a, b, -1, n, gap, gap / v_bridge_});
      return true;
    }
    const double radius = level_radius(cfg_, n + 1);
    const double v_n = level_speed(cfg_, n, sample_.params.d, sample_.params.gamma);
    const Ball ba(a, radius);
    const Ball bb(b, radius);
    int best = -1;
    for (std::size_t i = 0; i < sample_.lines.size(); ++i) {
      const MarkedLine& ml = sample_.lines[i];
      if (ml.speed < v_n) continue;
      if (best >= 0 && ml.speed <= sample_.lines[static_cast<std::size_t>(best)].speed) continue;
      if (!line_hits_ball(ml.line, ba) || !line_hits_ball(ml.line, bb)) continue;
      if (filter_ && !filter_(ml)) continue;
      best = static_cast<int>(i);
    }
    if (best < 0) {
      fail(n, a, b, radius, "no admissible line hits both balls");
      return false;
    }
    const MarkedLine& ml = sample_.lines[static_cast<std::size_t>(best)];
    const Vec a1 = ml.line.project(a);
    const Vec b1 = ml.line.project(b);
    if (!run(a, a1, n + 1)) return false;
    const double len = (b1 - a1).norm();
    if (len > 0.0) path_.segments.push_back(NetSegment{a1, b1, best, n, len, len / ml.speed});
    return run(b1, b, n + 1);
  }

  NetPathResult finish(bool ok) {
    NetPathResult out;
    if (!ok) {
      out.failure = std::move(failure_);
      return out;
    }
    for (const auto& s : path_.segments) {
      path_.time += s.time;
      path_.length += s.length;
      if (s.line >= 0) {
        auto& share = path_.per_line[s.line];
        share.length += s.length;
        share.time += s.time;
      } else {
        path_.bridge_time += s.time;
      }
    }
    out.path = std::move(path_);
    return out;
  }

 private:
  void fail(int n, const Vec& a, const Vec& b, double radius, const char* why) {
    failure_ = NetPathFailure{n, a, b, radius, why};
  }

  const LineSample& sample_;
  const NetPathConfig& cfg_;
  const LineFilter& filter_;
  double v_bridge_ = 0.0;
  NetPath path_;
  NetPathFailure failure_;
};

}  // namespace

NetPathResult build_net_path(const Vec& x, const Vec& y, const LineSample& sample, const NetPathConfig& cfg,
                             const LineFilter& filter) {
  const auto& p = sample.params;
  const double amin = alpha_min(p.d, p.gamma);
  if (!(cfg.alpha > amin)) {
    std::ostringstream msg;
    msg << "build_net_path: alpha must exceed alpha_min = " << amin;
    throw Error(msg.str());
  }
  if (!(cfg.r > 0.0)) throw Error("build_net_path: r must be positive");
  if (cfg.n_max < 0 || cfg.n_max > 24) throw Error("build_net_path: n_max must lie in [0, 24]");
  if (cfg.v_bridge > p.v_min) throw Error("build_net_path: v_bridge must not exceed v_min");
  const double buffer = cfg.r / (cfg.alpha - 1.0);
  for (const Vec* v : {&x, &y}) {
    if ((*v - p.window.center).norm() + buffer > p.window.radius + kGeomSlack) {
      throw Error("build_net_path: endpoints need a buffer of r/(alpha-1) inside the window");
    }
  }
  if ((x - y).norm() > 2.0 * cfg.r + kGeomSlack) {
    throw Error("build_net_path: endpoints must share a ball of radius r");
  }
  Builder b(sample, cfg, filter);
  const bool ok = b.run(x, y, 0);
  return b.finish(ok);
}

std::vector<Vec> net_path_waypoints(const NetPath& path) {
  std::vector<Vec> out;
  auto push = [&](const Vec& p) {
    for (const auto& q : out) {
      if ((q - p).norm() == 0.0) return;
    }
    out.push_back(p);
  };
  for (const auto& s : path.segments) {
    push(s.from);
    push(s.to);
  }
  return out;
}

}  // namespace linenet
