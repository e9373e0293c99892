#include "linenet/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <queue>
#include <set>
#include <sstream>
#include <tuple>

#include <boost/math/special_functions/beta.hpp>

#include "linenet/intervals.hpp"
#include "linenet/parallel.hpp"
#include "linenet/rng.hpp"

namespace linenet {

namespace {

constexpr std::uint64_t kPointsTag = 0x706f696e7473ULL;
constexpr std::uint64_t kPairsTag = 0x7061697273ULL;
constexpr std::uint64_t kNetTag = 0x6e6574ULL;

double effective_access(const NetworkOptions& opt, double v_min) {
  return opt.v_access > 0.0 ? std::min(opt.v_access, v_min) : v_min;
}

template <class Row>
double disconnected_share(const std::vector<Row>& rows) {
  if (rows.empty()) return 0.0;
  const auto bad = std::count_if(rows.begin(), rows.end(), [](const Row& r) { return !r.connected; });
  return static_cast<double>(bad) / static_cast<double>(rows.size());
}

std::vector<int> walk_pred(const RouteNetwork& net, const ShortestTree& tree, int from) {
  std::vector<int> nodes{from};
  int u = from;
  while (tree.pred_edge[static_cast<std::size_t>(u)] >= 0) {
    const Edge& e = net.edge(tree.pred_edge[static_cast<std::size_t>(u)]);
    u = e.a == u ? e.b : e.a;
    nodes.push_back(u);
  }
  return nodes;
}

}  // namespace

std::uint64_t replicate_seed(std::uint64_t master, std::uint64_t index) { return derive_key({master, index}); }

std::vector<Vec> internal_net(const Ball& region, double spacing) {
  if (!(spacing > 0.0)) throw Error("internal_net: spacing must be positive");
  const int d = region.dim();
  const double h = spacing / 4.0;
  const long m = static_cast<long>(std::floor(region.radius / h));
  const long side = 2 * m + 1;
  std::vector<Vec> grid;
  std::vector<long> idx(static_cast<std::size_t>(d), 0);
  for (;;) {
    Vec p(d);
    for (int k = 0; k < d; ++k) p[k] = region.center[k] + static_cast<double>(idx[static_cast<std::size_t>(k)] - m) * h;
    if ((p - region.center).norm() <= region.radius) grid.push_back(p);
    int k = d - 1;
    while (k >= 0 && ++idx[static_cast<std::size_t>(k)] == side) {
      idx[static_cast<std::size_t>(k)] = 0;
      --k;
    }
    if (k < 0) break;
  }
  std::vector<Vec> net{region.center};
  for (const auto& p : grid) {
    bool far = true;
    for (const auto& q : net) {
      if ((p - q).norm() < spacing) {
        far = false;
        break;
      }
    }
    if (far) net.push_back(p);
  }
  return net;
}

RouteNetwork build_network(const LineSample& sample, std::span<const Vec> terminals, const NetworkOptions& opt) {
  const double v = effective_access(opt, sample.params.v_min);
  if (sample.params.d == 2) return build_network_2d(sample, terminals, v);
  JumpOptions jo;
  jo.eps = opt.eps;
  jo.v_bridge = v;
  jo.k_access = opt.k_access;
  jo.node_cap = opt.node_cap;
  return build_network_jump(sample, terminals, jo);
}

bool touches_shell(const RouteNetwork& net, std::span<const int> nodes, const Ball& window, double fraction) {
  const double limit = (1.0 - fraction) * window.radius;
  for (int n : nodes) {
    if ((net.point(n) - window.center).norm() > limit) return true;
  }
  return false;
}

// ---------------------------------------------------------------- counts

std::vector<double> fast_line_counts(const ProcessParams& params, double v0, const Ball& ball,
                                     std::size_t replicates, int threads) {
  std::vector<double> out(replicates, 0.0);
  parallel_for(replicates, threads, [&](std::size_t i) {
    ProcessParams p = params;
    p.seed = replicate_seed(params.seed, i);
    out[i] = static_cast<double>(count_fast_lines(sample_process(p), v0, ball).count);
  });
  return out;
}

double uniform_axis_fraction(double theta0, int d) {
  if (d < 2) throw Error("uniform_axis_fraction: d must be >= 2");
  if (!(theta0 >= 0.0 && theta0 <= std::numbers::pi / 2)) {
    throw Error("uniform_axis_fraction: theta0 must lie in [0, pi/2]");
  }
  const double s = std::sin(theta0);
  return boost::math::ibeta((d - 1) / 2.0, 0.5, s * s);
}

namespace {

FractionEstimate fraction_of(std::size_t hits, std::size_t n) {
  FractionEstimate f;
  f.n = n;
  if (n == 0) return f;
  f.fraction = static_cast<double>(hits) / static_cast<double>(n);
  f.std_error = std::sqrt(f.fraction * (1.0 - f.fraction) / static_cast<double>(n));
  return f;
}

}  // namespace

FractionEstimate cone_fraction_uniform(int d, double theta0, std::size_t samples, std::uint64_t seed) {
  Stream rng(derive_key({seed, 0x756e69ULL}));
  const double c0 = std::cos(theta0);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    const Direction u(random_unit_vector(rng, d));
    if (std::abs(u[0]) >= c0) ++hits;
  }
  return fraction_of(hits, samples);
}

FractionEstimate cone_fraction_process(int d, double theta0, std::size_t samples, std::uint64_t seed) {
  if (!(theta0 >= 0.0 && theta0 <= std::numbers::pi / 2)) {
    throw Error("cone_fraction_process: theta0 must lie in [0, pi/2]");
  }
  const double c0 = std::cos(theta0);
  ProcessParams p;
  p.d = d;
  p.gamma = d + 1.0;
  p.window = Ball(origin(d), 1.0);
  // Aim for about twice the needed count per chunk; about half the lines
  // hitting the unit ball cross its equatorial disk when d = 3.
  const double target = std::max(16.0, 2.0 * static_cast<double>(samples));
  p.v_min = std::pow(p.window_measure() / target, 1.0 / (p.gamma - 1.0));
  std::size_t n = 0;
  std::size_t hits = 0;
  for (std::uint64_t chunk = 0; n < samples; ++chunk) {
    p.seed = derive_key({seed, chunk});
    const LineSample s = sample_process(p);
    for (const auto& ml : s.lines) {
      const double u0 = ml.line.dir()[0];
      if (u0 == 0.0) continue;
      const Vec hit = ml.line.at(-ml.line.foot()[0] / u0);
      if (hit.norm() > 1.0) continue;
      if (std::abs(u0) >= c0) ++hits;
      if (++n == samples) break;
    }
  }
  return fraction_of(hits, n);
}

// ---------------------------------------------------------------- diameter

PairwiseMax max_terminal_time(const RouteNetwork& net, const Ball& window, double shell_fraction) {
  PairwiseMax out;
  const auto& terms = net.terminals();
  for (std::size_t i = 0; i + 1 < terms.size(); ++i) {
    std::vector<int> stops(terms.begin() + static_cast<std::ptrdiff_t>(i) + 1, terms.end());
    const ShortestTree tree = shortest_times(net, terms[i], stops);
    for (int t : stops) {
      const double time = tree.time[static_cast<std::size_t>(t)];
      if (time == kUnreachable) {
        out.connected = false;
        out.time = kUnreachable;
        return out;
      }
      out.time = std::max(out.time, time);
      if (!out.shell && touches_shell(net, walk_pred(net, tree, t), window, shell_fraction)) out.shell = true;
    }
  }
  return out;
}

DiameterResult estimate_diameter_tail(const DiameterConfig& cfg) {
  cfg.process.validate();
  if (!(cfg.region.radius + (cfg.region.center - cfg.process.window.center).norm() <= cfg.process.window.radius)) {
    throw Error("estimate_diameter_tail: region must lie inside the window");
  }
  std::vector<double> ladder = cfg.v_min_ladder.empty() ? std::vector<double>{cfg.process.v_min} : cfg.v_min_ladder;
  DiameterResult res;
  res.terminals = internal_net(cfg.region, cfg.net_spacing);
  const std::size_t rungs = ladder.size();
  res.rows.resize(cfg.replicates * rungs);
  parallel_for(cfg.replicates, cfg.threads, [&](std::size_t i) {
    const std::uint64_t seed = replicate_seed(cfg.process.seed, i);
    for (std::size_t r = 0; r < rungs; ++r) {
      ProcessParams p = cfg.process;
      p.seed = seed;
      p.v_min = ladder[r];
      const LineSample s = sample_process(p);
      const RouteNetwork net = build_network(s, res.terminals, cfg.network);
      const PairwiseMax pm = max_terminal_time(net, p.window, cfg.shell_fraction);
      DiameterRow& row = res.rows[i * rungs + r];
      row.replicate = i;
      row.seed = seed;
      row.v_min = ladder[r];
      row.lines = s.size();
      row.nodes = net.node_count();
      row.diameter = pm.time;
      row.connected = pm.connected;
      row.shell = pm.shell;
    }
  });
  for (std::size_t r = 0; r < rungs; ++r) {
    DiameterRung rung;
    rung.v_min = ladder[r];
    std::vector<double> values;
    std::size_t bad = 0;
    for (std::size_t i = 0; i < cfg.replicates; ++i) {
      const DiameterRow& row = res.rows[i * rungs + r];
      if (row.shell) ++rung.shell_flagged;
      if (!row.connected) {
        ++bad;
        continue;
      }
      values.push_back(row.diameter);
    }
    rung.disconnected_fraction =
        cfg.replicates == 0 ? 0.0 : static_cast<double>(bad) / static_cast<double>(cfg.replicates);
    rung.failed = rung.disconnected_fraction > cfg.max_disconnected;
    rung.mean = mean(values);
    rung.fit = fit_tail(std::move(values), TailKind::weibull, cfg.q_lo, cfg.q_hi);
    res.rungs.push_back(std::move(rung));
  }
  return res;
}

// ---------------------------------------------------------------- route length

RouteResult estimate_route_length(const RouteConfig& cfg) {
  cfg.process.validate();
  if (!(cfg.distance >= 0.0)) throw Error("estimate_route_length: distance must be >= 0");
  const int d = cfg.process.d;
  Vec e0 = Vec::Zero(d);
  e0[0] = 0.5 * cfg.distance;
  const std::vector<Vec> terms{cfg.process.window.center - e0, cfg.process.window.center + e0};
  RouteResult res;
  res.rows.resize(cfg.replicates);
  parallel_for(cfg.replicates, cfg.threads, [&](std::size_t i) {
    ProcessParams p = cfg.process;
    p.seed = replicate_seed(cfg.process.seed, i);
    const LineSample s = sample_process(p);
    const RouteNetwork net = build_network(s, terms, cfg.network);
    RouteRow& row = res.rows[i];
    row.replicate = i;
    row.seed = p.seed;
    row.lines = s.size();
    row.nodes = net.node_count();
    const auto g = shortest_time_path(net, 0, 1);
    if (!g) {
      row.connected = false;
      row.time = kUnreachable;
      row.length = kUnreachable;
      return;
    }
    row.time = g->time;
    row.length = g->length;
    row.support = g->per_line.size();
    row.shell = touches_shell(net, g->nodes, p.window, cfg.shell_fraction);
  });
  std::vector<double> lengths;
  for (const auto& row : res.rows) {
    if (row.shell) ++res.shell_flagged;
    if (row.connected) lengths.push_back(row.length);
  }
  res.disconnected_fraction = disconnected_share(res.rows);
  res.failed = res.disconnected_fraction > cfg.max_disconnected;
  res.mean_length = mean(lengths);
  res.length_se = standard_error(lengths);
  res.drift = running_mean_drift(lengths);
  res.min_length = lengths.empty() ? 0.0 : *std::min_element(lengths.begin(), lengths.end());
  res.fit = fit_tail(std::move(lengths), TailKind::pareto, cfg.q_lo, cfg.q_hi);
  return res;
}

// ---------------------------------------------------------------- point sets

std::vector<Vec> CoupledPointSets::level(int n) const {
  std::vector<Vec> out;
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (layer[k] < n) out.push_back(points[k]);
  }
  return out;
}

std::size_t CoupledPointSets::count(int n) const {
  return static_cast<std::size_t>(std::count_if(layer.begin(), layer.end(), [n](int l) { return l < n; }));
}

CoupledPointSets sample_coupled_points(const Ball& window, int n_max, std::uint64_t seed) {
  if (n_max < 1) throw Error("sample_coupled_points: n_max must be >= 1");
  const int d = window.dim();
  const double volume = unit_ball_volume(d) * std::pow(window.radius, d);
  CoupledPointSets out;
  out.window = window;
  out.n_max = n_max;
  for (int k = 0; k < n_max; ++k) {
    Stream rng(derive_key({seed, kPointsTag, static_cast<std::uint64_t>(k)}));
    const std::uint64_t n = rng.poisson(volume);
    for (std::uint64_t j = 0; j < n; ++j) {
      out.points.push_back(window.center + random_in_ball(rng, d, window.radius));
      out.layer.push_back(k);
    }
  }
  return out;
}

// ---------------------------------------------------------------- long-distance network

namespace {

// Parameter interval of the segment p + s w, s in [0, len], inside the ball.
Interval segment_in_ball(const Vec& p, const Vec& w, double len, const Ball& ball) {
  const Vec q = p - ball.center;
  const double b = w.dot(q);
  const double disc = b * b - (q.squaredNorm() - ball.radius * ball.radius);
  if (disc < 0.0) return {0.0, 0.0};
  const double r = std::sqrt(disc);
  return {std::max(0.0, -b - r), std::min(len, -b + r)};
}

}  // namespace

double long_distance_length(const RouteNetwork& net, const std::vector<Geodesic>& paths, const Ball& core,
                            double rho) {
  const int lines = static_cast<int>(net.line_speeds().size());
  // Carrier key: line index for on-line pieces, lines + edge index otherwise.
  std::map<long, std::vector<Interval>> carriers;
  std::map<int, std::pair<Vec, Vec>> frames;
  for (const auto& g : paths) {
    if (g.nodes.size() < 2) continue;
    const Vec x = net.point(g.nodes.front());
    const Vec y = net.point(g.nodes.back());
    for (std::size_t k = 0; k < g.edges.size(); ++k) {
      const Edge& e = net.edge(g.edges[k]);
      const Vec p = net.point(g.nodes[k]);
      const Vec q = net.point(g.nodes[k + 1]);
      const double len = (q - p).norm();
      if (!(len > 0.0)) continue;
      const Vec w = (q - p) / len;
      const Interval in_core = segment_in_ball(p, w, len, core);
      if (!(in_core.second > in_core.first)) continue;
      std::vector<Interval> cut;
      if (rho > 0.0) {
        cut.push_back(segment_in_ball(p, w, len, Ball(x, rho)));
        cut.push_back(segment_in_ball(p, w, len, Ball(y, rho)));
      }
      for (const auto& [s0, s1] : subtract_intervals(in_core.first, in_core.second, cut)) {
        if (e.kind == EdgeKind::on_line) {
          // One frame per line, fixed by the first piece seen on it.
          const auto it = frames.try_emplace(e.line, p, w).first;
          const auto& [o, dir] = it->second;
          const double c0 = (p + s0 * w - o).dot(dir);
          const double c1 = (p + s1 * w - o).dot(dir);
          carriers[e.line].emplace_back(std::min(c0, c1), std::max(c0, c1));
        } else {
          const Vec a = net.point(e.a);
          const double base = (p - a).norm();
          const bool forward = g.nodes[k] == e.a;
          const double c0 = forward ? base + s0 : base - s1;
          const double c1 = forward ? base + s1 : base - s0;
          carriers[static_cast<long>(lines) + g.edges[k]].emplace_back(c0, c1);
        }
      }
    }
  }
  double total = 0.0;
  for (auto& [key, iv] : carriers) total += union_length(std::move(iv));
  return total;
}

LongDistanceResult measure_long_distance_network(const LongDistanceConfig& cfg) {
  cfg.process.validate();
  if (cfg.intensity < 0) throw Error("measure_long_distance_network: intensity must be >= 0");
  if (cfg.removal_radii.empty()) throw Error("measure_long_distance_network: need at least one removal radius");
  for (double r : cfg.removal_radii) {
    if (!(r >= 0.0)) throw Error("measure_long_distance_network: removal radii must be >= 0");
  }
  const Ball& win = cfg.process.window;
  if ((cfg.core.center - win.center).norm() + cfg.exclusion_radius > win.radius) {
    throw Error("measure_long_distance_network: window must contain the exclusion ball");
  }
  if ((cfg.core.center - win.center).norm() + cfg.point_radius > win.radius) {
    throw Error("measure_long_distance_network: point region must lie inside the window");
  }
  LongDistanceResult res;
  res.radii = cfg.removal_radii;
  res.rows.resize(cfg.replicates);
  const Ball point_region(cfg.core.center, cfg.point_radius);
  parallel_for(cfg.replicates, cfg.threads, [&](std::size_t i) {
    LongDistanceRow& row = res.rows[i];
    row.replicate = i;
    row.seed = replicate_seed(cfg.process.seed, i);
    row.ell.assign(res.radii.size(), 0.0);
    std::vector<Vec> outer;
    if (cfg.intensity > 0) {
      const CoupledPointSets pts = sample_coupled_points(point_region, cfg.intensity, derive_key({row.seed, kPointsTag}));
      const auto all = pts.level(cfg.intensity);
      row.points = all.size();
      for (const auto& x : all) {
        if ((x - cfg.core.center).norm() > cfg.exclusion_radius) outer.push_back(x);
      }
    }
    row.outer_points = outer.size();
    if (outer.size() < 2) return;

    std::vector<std::pair<int, int>> pairs;
    for (int b = 1; b < static_cast<int>(outer.size()); ++b) {
      for (int a = 0; a < b; ++a) pairs.emplace_back(a, b);
    }
    if (pairs.size() > cfg.pair_cap) {
      Stream rng(derive_key({row.seed, kPairsTag}));
      for (std::size_t k = 0; k < cfg.pair_cap; ++k) {
        const std::size_t j = k + static_cast<std::size_t>(rng.uniform() * static_cast<double>(pairs.size() - k));
        std::swap(pairs[k], pairs[std::min(j, pairs.size() - 1)]);
      }
      pairs.resize(cfg.pair_cap);
      std::sort(pairs.begin(), pairs.end(), [](auto l, auto r) { return std::tie(l.second, l.first) < std::tie(r.second, r.first); });
      row.capped = true;
    }
    row.pairs = pairs.size();

    ProcessParams p = cfg.process;
    p.seed = row.seed;
    const LineSample s = sample_process(p);
    const RouteNetwork net = build_network(s, outer, cfg.network);
    std::vector<Geodesic> paths;
    for (std::size_t k = 0; k < pairs.size();) {
      const int target = pairs[k].second;
      std::vector<int> sources;
      std::size_t end = k;
      while (end < pairs.size() && pairs[end].second == target) sources.push_back(net.terminal(pairs[end++].first));
      const ShortestTree tree = shortest_times(net, net.terminal(target), sources);
      for (int src : sources) {
        auto g = src == net.terminal(target) ? std::optional<Geodesic>(Geodesic{{src}, {}, 0, 0, {}, 0, 0})
                                             : trace_geodesic(net, tree, src, net.terminal(target));
        if (!g) {
          ++row.disconnected_pairs;
          continue;
        }
        if (!row.shell && touches_shell(net, g->nodes, p.window, cfg.shell_fraction)) row.shell = true;
        paths.push_back(std::move(*g));
      }
      k = end;
    }
    for (std::size_t r = 0; r < res.radii.size(); ++r) {
      row.ell[r] = long_distance_length(net, paths, cfg.core, res.radii[r]);
    }
  });
  res.mean.assign(res.radii.size(), 0.0);
  res.se.assign(res.radii.size(), 0.0);
  for (std::size_t r = 0; r < res.radii.size(); ++r) {
    std::vector<double> v;
    for (const auto& row : res.rows) v.push_back(row.ell[r]);
    res.mean[r] = mean(v);
    res.se[r] = standard_error(v);
    if (r == 0) res.stability = half_split(v);
  }
  for (const auto& row : res.rows) {
    if (row.capped) res.lower_bound = true;
    if (row.shell) ++res.shell_flagged;
  }
  return res;
}

// ---------------------------------------------------------------- nested balls

double nested_ball_lambda(double alpha, double r0, double v0, double gamma, int d) {
  const double p = std::pow(alpha, 1.0 - d);
  return (1.0 - p) * unit_sphere_area(d) * std::pow(r0, d - 1.0) / (2.0 * std::pow(v0, gamma - 1.0));
}

double nested_ball_bound(double lambda, double delta, double p, int n) {
  if (!(delta > 0.0)) throw Error("nested_ball_bound: delta must be positive");
  const double base = (1.0 + lambda * delta) * std::pow((1.0 + delta) / delta, delta) * std::pow(p, delta);
  return std::pow(base, n);
}

NestedBallsResult simulate_nested_balls(const NestedBallsConfig& cfg) {
  if (!(cfg.delta > 0.0)) throw Error("simulate_nested_balls: delta must be positive");
  if (!(cfg.alpha > 1.0)) throw Error("simulate_nested_balls: alpha must exceed 1");
  if (cfg.d < 2) throw Error("simulate_nested_balls: d must be >= 2");
  if (!(cfg.gamma > 1.0)) throw Error("simulate_nested_balls: gamma must exceed 1");
  if (!(cfg.r0 > 0.0) || !(cfg.v0 > 0.0)) throw Error("simulate_nested_balls: r0 and v0 must be positive");
  for (int n : cfg.depths) {
    if (n < 0) throw Error("simulate_nested_balls: depths must be >= 0");
  }
  NestedBallsResult res;
  res.p = std::pow(cfg.alpha, 1.0 - cfg.d);
  res.lambda_theory = nested_ball_lambda(cfg.alpha, cfg.r0, cfg.v0, cfg.gamma, cfg.d);
  const int n_max = cfg.depths.empty() ? 0 : *std::max_element(cfg.depths.begin(), cfg.depths.end());
  const double g1 = cfg.gamma - 1.0;
  auto radius = [&](int i) { return cfg.r0 * std::pow(cfg.alpha, -i); };
  auto speed = [&](int i) { return cfg.v0 * std::pow(res.p, i / g1); };
  const Vec center = origin(cfg.d);

  res.seeds.resize(cfg.replicates);
  res.counts.assign(cfg.replicates, std::vector<int>(cfg.depths.size(), 0));
  res.own_hits.assign(cfg.replicates, 0.0);
  parallel_for(cfg.replicates, cfg.threads, [&](std::size_t rep) {
    const std::uint64_t seed = replicate_seed(cfg.seed, rep);
    res.seeds[rep] = seed;
    std::vector<char> marked(static_cast<std::size_t>(n_max) + 1, 0);
    double own_hits = 0.0;
    // Layer j holds V_j: speeds >= v_0 for j = 0, [v_j, v_{j-1}) otherwise.
    // Lines of V_j only matter through the balls they can reach, all inside
    // B_max(j,1), so that ball is the sampling window.
    for (int j = 0; j <= n_max; ++j) {
      const Ball host(center, radius(std::max(j, 1)));
      const double s_rate = j == 0 ? std::pow(speed(0), -g1) : std::pow(speed(j), -g1) - std::pow(speed(j - 1), -g1);
      Stream rng(derive_key({seed, static_cast<std::uint64_t>(j)}));
      const std::uint64_t count = rng.poisson(hitting_measure(host, cfg.d) * s_rate);
      if (j >= 1) own_hits += static_cast<double>(count);
      for (std::uint64_t k = 0; k < count; ++k) {
        const Line l = random_line_hitting(rng, host);
        for (int i = j + 1; i <= n_max; ++i) {
          if (!line_hits_ball(l, Ball(center, radius(i)))) break;
          marked[static_cast<std::size_t>(i)] = 1;
        }
      }
    }
    if (n_max >= 1) res.own_hits[rep] = own_hits / n_max;
    for (std::size_t q = 0; q < cfg.depths.size(); ++q) {
      int c = 0;
      for (int i = 1; i <= cfg.depths[q]; ++i) c += marked[static_cast<std::size_t>(i)];
      res.counts[rep][q] = c;
    }
  });
  res.lambda_empirical = mean(res.own_hits);
  res.lambda_se = standard_error(res.own_hits);
  for (std::size_t q = 0; q < cfg.depths.size(); ++q) {
    NestedDepth nd;
    nd.n = cfg.depths[q];
    std::size_t hits = 0;
    for (const auto& c : res.counts) {
      if (c[q] > cfg.delta * nd.n) ++hits;
    }
    const FractionEstimate f = fraction_of(hits, cfg.replicates);
    nd.exceed = f.fraction;
    nd.exceed_se = f.std_error;
    nd.bound = nested_ball_bound(res.lambda_theory, cfg.delta, res.p, nd.n);
    res.depths.push_back(nd);
  }
  return res;
}

// ---------------------------------------------------------------- direction clumping

std::vector<Direction> projective_net(int d, double eps, std::size_t stall) {
  if (!(eps > 0.0)) throw Error("projective_net: eps must be positive");
  Stream rng(derive_key({static_cast<std::uint64_t>(d), kNetTag}));
  std::vector<Direction> net;
  std::size_t misses = 0;
  while (misses < stall) {
    const Direction c(random_unit_vector(rng, d));
    bool far = true;
    for (const auto& s : net) {
      if (angle_between(c, s) < eps) {
        far = false;
        break;
      }
    }
    if (far) {
      net.push_back(c);
      misses = 0;
    } else {
      ++misses;
    }
  }
  return net;
}

namespace {

std::size_t popcount(const std::vector<std::uint64_t>& s) {
  std::size_t c = 0;
  for (auto w : s) c += static_cast<std::size_t>(__builtin_popcountll(w));
  return c;
}

bool subset_of(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] & ~b[i]) return false;
  }
  return true;
}

class CoverSearch {
 public:
  CoverSearch(std::vector<std::vector<std::uint64_t>> sets, std::size_t k, std::size_t cap)
      : sets_(std::move(sets)), k_(k), cap_(cap) {}

  CoverageResult run() {
    if (sets_.empty() || k_ == 0) return {};
    words_ = sets_.front().size();
    std::vector<std::uint64_t> cur(words_, 0);
    dfs(0, 0, cur);
    return {best_, !aborted_};
  }

  std::size_t greedy() const {
    std::vector<std::uint64_t> cur(sets_.empty() ? 0 : sets_.front().size(), 0);
    std::size_t total = 0;
    for (std::size_t step = 0; step < k_; ++step) {
      std::size_t gain_best = 0;
      std::size_t pick = sets_.size();
      for (std::size_t s = 0; s < sets_.size(); ++s) {
        std::size_t g = 0;
        for (std::size_t w = 0; w < cur.size(); ++w) g += static_cast<std::size_t>(__builtin_popcountll(sets_[s][w] & ~cur[w]));
        if (g > gain_best) {
          gain_best = g;
          pick = s;
        }
      }
      if (pick == sets_.size()) break;
      for (std::size_t w = 0; w < cur.size(); ++w) cur[w] |= sets_[pick][w];
      total += gain_best;
    }
    return total;
  }

 private:
  void dfs(std::size_t from, std::size_t used, std::vector<std::uint64_t>& cur) {
    if (aborted_) return;
    if (++visited_ > cap_) {
      aborted_ = true;
      return;
    }
    const std::size_t have = popcount(cur);
    best_ = std::max(best_, have);
    if (used == k_ || from == sets_.size()) return;
    // Bound: current plus the largest remaining marginal gains.
    std::vector<std::size_t> gains;
    for (std::size_t s = from; s < sets_.size(); ++s) {
      std::size_t g = 0;
      for (std::size_t w = 0; w < words_; ++w) g += static_cast<std::size_t>(__builtin_popcountll(sets_[s][w] & ~cur[w]));
      gains.push_back(g);
    }
    std::vector<std::size_t> sorted = gains;
    std::sort(sorted.rbegin(), sorted.rend());
    std::size_t bound = have;
    for (std::size_t q = 0; q < std::min(k_ - used, sorted.size()); ++q) bound += sorted[q];
    if (bound <= best_) return;
    for (std::size_t s = from; s < sets_.size(); ++s) {
      if (gains[s - from] == 0) continue;
      std::vector<std::uint64_t> next = cur;
      for (std::size_t w = 0; w < words_; ++w) next[w] |= sets_[s][w];
      dfs(s + 1, used + 1, next);
      if (aborted_) return;
    }
  }

  std::vector<std::vector<std::uint64_t>> sets_;
  std::size_t k_;
  std::size_t cap_;
  std::size_t words_ = 0;
  std::size_t best_ = 0;
  std::size_t visited_ = 0;
  bool aborted_ = false;
};

}  // namespace

CoverageResult max_coverage(const std::vector<std::vector<std::uint64_t>>& sets, std::size_t k,
                            std::size_t search_cap) {
  // Drop empty sets and sets contained in another one (ties keep the first).
  std::vector<std::vector<std::uint64_t>> kept;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    if (popcount(sets[i]) == 0) continue;
    bool dominated = false;
    for (std::size_t j = 0; j < sets.size() && !dominated; ++j) {
      if (i == j || !subset_of(sets[i], sets[j])) continue;
      dominated = !subset_of(sets[j], sets[i]) || j < i;
    }
    if (!dominated) kept.push_back(sets[i]);
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return popcount(a) > popcount(b); });
  CoverSearch search(std::move(kept), k, search_cap);
  CoverageResult r = search.run();
  if (!r.exact) r.covered = std::max(r.covered, search.greedy());
  return r;
}

ClumpingResult direction_clumping_test(const ClumpingConfig& cfg) {
  if (cfg.d < 3) throw Error("direction_clumping_test: d must be >= 3");
  if (cfg.n < 1) throw Error("direction_clumping_test: n must be >= 1");
  const double eta_lo = 1.0 / (cfg.d - 1.0);
  if (!(cfg.eta > eta_lo && cfg.eta < 1.0)) throw Error("direction_clumping_test: eta must lie in (1/(d-1), 1)");
  if (!(cfg.alpha > cfg.beta && cfg.beta > cfg.delta && cfg.delta > 0.0)) {
    throw Error("direction_clumping_test: need alpha > beta > delta > 0");
  }
  ClumpingResult res;
  const double n = cfg.n;
  res.points = static_cast<std::size_t>(std::ceil(cfg.alpha * n));
  res.needed = static_cast<std::size_t>(std::ceil(cfg.beta * n));
  res.balls = static_cast<std::size_t>(std::floor(cfg.delta * n));
  res.radius = std::pow(n, -cfg.eta);
  const std::vector<Direction> net = projective_net(cfg.d, res.radius);
  res.net_size = net.size();
  res.rows.resize(cfg.replicates);
  const std::size_t words = (res.points + 63) / 64;
  parallel_for(cfg.replicates, cfg.threads, [&](std::size_t rep) {
    ClumpingRow& row = res.rows[rep];
    row.replicate = rep;
    row.seed = replicate_seed(cfg.seed, rep);
    if (res.needed > res.points || res.balls == 0) return;
    Stream rng(row.seed);
    std::vector<Direction> pts;
    for (std::size_t i = 0; i < res.points; ++i) pts.emplace_back(random_unit_vector(rng, cfg.d));
    std::vector<std::vector<std::uint64_t>> sets;
    for (const auto& s : net) {
      std::vector<std::uint64_t> bits(words, 0);
      for (std::size_t i = 0; i < pts.size(); ++i) {
        if (angle_between(s, pts[i]) <= res.radius) bits[i / 64] |= 1ULL << (i % 64);
      }
      sets.push_back(std::move(bits));
    }
    const CoverageResult cov = max_coverage(sets, res.balls, cfg.search_cap);
    row.covered = cov.covered;
    row.exact = cov.exact;
    row.event = cov.covered >= res.needed;
  });
  std::size_t events = 0;
  for (const auto& row : res.rows) {
    if (row.event) ++events;
    if (!row.exact) ++res.fallbacks;
  }
  res.frequency = cfg.replicates == 0 ? 0.0 : static_cast<double>(events) / static_cast<double>(cfg.replicates);
  return res;
}

// ---------------------------------------------------------------- uniqueness gap

namespace {

struct PathRec {
  double time = 0.0;
  std::vector<int> nodes;
  std::vector<int> edges;

  bool operator<(const PathRec& o) const { return std::tie(time, nodes) < std::tie(o.time, o.nodes); }
};

double path_time(const RouteNetwork& net, const std::vector<int>& edges) {
  double t = 0.0;
  for (int e : edges) t += net.edge(e).time;
  return t;
}

std::set<int> support_of(const RouteNetwork& net, const std::vector<int>& edges) {
  std::set<int> s;
  for (int e : edges) {
    const Edge& ed = net.edge(e);
    if (ed.kind == EdgeKind::on_line && ed.length > 0.0) s.insert(ed.line);
  }
  return s;
}

// Shortest s-t path avoiding banned nodes and edges, smallest node sequence
// among ties.
std::optional<PathRec> masked_path(const RouteNetwork& net, int s, int t, const std::vector<char>& ban_node,
                                   const std::vector<char>& ban_edge) {
  const std::size_t n = net.node_count();
  std::vector<double> dist(n, kUnreachable);
  std::vector<char> done(n, 0);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[static_cast<std::size_t>(t)] = 0.0;
  heap.emplace(0.0, t);
  while (!heap.empty()) {
    const auto [du, u] = heap.top();
    heap.pop();
    if (done[static_cast<std::size_t>(u)]) continue;
    done[static_cast<std::size_t>(u)] = 1;
    if (u == s) break;
    for (const Neighbor& nb : net.neighbors(u)) {
      if (ban_edge[static_cast<std::size_t>(nb.edge)] || ban_node[static_cast<std::size_t>(nb.node)]) continue;
      const double c = du + net.edge(nb.edge).time;
      if (c < dist[static_cast<std::size_t>(nb.node)]) {
        dist[static_cast<std::size_t>(nb.node)] = c;
        heap.emplace(c, nb.node);
      }
    }
  }
  if (dist[static_cast<std::size_t>(s)] == kUnreachable) return std::nullopt;
  PathRec out;
  int u = s;
  out.nodes.push_back(u);
  while (u != t) {
    const double du = dist[static_cast<std::size_t>(u)];
    const Neighbor* step = nullptr;
    for (const Neighbor& nb : net.neighbors(u)) {
      if (ban_edge[static_cast<std::size_t>(nb.edge)] || ban_node[static_cast<std::size_t>(nb.node)]) continue;
      const double dw = dist[static_cast<std::size_t>(nb.node)];
      if (dw < du && dw + net.edge(nb.edge).time == du) {
        step = &nb;
        break;
      }
    }
    if (step == nullptr) throw Error("uniqueness_gap_probe: inconsistent distance labels");
    out.edges.push_back(step->edge);
    out.nodes.push_back(step->node);
    u = step->node;
  }
  out.time = path_time(net, out.edges);
  return out;
}

}  // namespace

GapResult uniqueness_gap_probe(const RouteNetwork& net, int s_label, int t_label, std::size_t k) {
  GapResult res;
  const int s = net.terminal(s_label);
  const int t = net.terminal(t_label);
  if (s == t) {
    res.skipped = true;
    return res;
  }
  std::vector<char> ban_node(net.node_count(), 0);
  std::vector<char> ban_edge(net.edge_count(), 0);
  auto first = masked_path(net, s, t, ban_node, ban_edge);
  if (!first) {
    res.best_time = kUnreachable;
    return res;
  }
  res.best_time = first->time;
  const std::set<int> best_support = support_of(net, first->edges);
  std::vector<PathRec> accepted{*first};
  std::set<PathRec> candidates;
  std::set<std::vector<int>> seen{first->nodes};
  res.paths_examined = 1;
  while (accepted.size() < std::max<std::size_t>(k, 1)) {
    const PathRec last = accepted.back();
    for (std::size_t i = 0; i + 1 < last.nodes.size(); ++i) {
      std::fill(ban_node.begin(), ban_node.end(), 0);
      std::fill(ban_edge.begin(), ban_edge.end(), 0);
      for (const auto& pth : accepted) {
        if (pth.nodes.size() > i + 1 && std::equal(last.nodes.begin(), last.nodes.begin() + static_cast<std::ptrdiff_t>(i) + 1,
                                                   pth.nodes.begin())) {
          ban_edge[static_cast<std::size_t>(pth.edges[i])] = 1;
        }
      }
      for (std::size_t r = 0; r < i; ++r) ban_node[static_cast<std::size_t>(last.nodes[r])] = 1;
      auto spur = masked_path(net, last.nodes[i], t, ban_node, ban_edge);
      if (!spur) continue;
      PathRec cand;
      cand.nodes.assign(last.nodes.begin(), last.nodes.begin() + static_cast<std::ptrdiff_t>(i));
      cand.edges.assign(last.edges.begin(), last.edges.begin() + static_cast<std::ptrdiff_t>(i));
      cand.nodes.insert(cand.nodes.end(), spur->nodes.begin(), spur->nodes.end());
      cand.edges.insert(cand.edges.end(), spur->edges.begin(), spur->edges.end());
      cand.time = path_time(net, cand.edges);
      if (seen.insert(cand.nodes).second) candidates.insert(std::move(cand));
    }
    if (candidates.empty()) break;
    PathRec next = *candidates.begin();
    candidates.erase(candidates.begin());
    ++res.paths_examined;
    if (support_of(net, next.edges) != best_support) {
      res.found = true;
      res.alt_time = next.time;
      res.gap = res.best_time > 0.0 ? (next.time - res.best_time) / res.best_time : next.time - res.best_time;
      return res;
    }
    accepted.push_back(std::move(next));
  }
  return res;
}

UniquenessResult probe_uniqueness_gaps(const UniquenessConfig& cfg) {
  cfg.process.validate();
  const int d = cfg.process.d;
  Vec e0 = Vec::Zero(d);
  e0[0] = 0.5 * cfg.distance;
  const std::vector<Vec> terms{cfg.process.window.center - e0, cfg.process.window.center + e0};
  UniquenessResult res;
  res.rows.resize(cfg.replicates);
  parallel_for(cfg.replicates, cfg.threads, [&](std::size_t i) {
    ProcessParams p = cfg.process;
    p.seed = replicate_seed(cfg.process.seed, i);
    const RouteNetwork net = build_network(sample_process(p), terms, cfg.network);
    res.rows[i].replicate = i;
    res.rows[i].seed = p.seed;
    res.rows[i].gap = uniqueness_gap_probe(net, 0, 1, cfg.k);
  });
  std::size_t counted = 0;
  std::size_t positive = 0;
  for (const auto& row : res.rows) {
    if (row.gap.skipped) continue;
    if (row.gap.best_time == kUnreachable) {
      ++res.disconnected;
      continue;
    }
    ++counted;
    if (row.gap.gap > 0.0) ++positive;
    if (row.gap.gap == 0.0) ++res.ties;
  }
  res.positive_fraction = counted == 0 ? 0.0 : static_cast<double>(positive) / static_cast<double>(counted);
  return res;
}

// ---------------------------------------------------------------- net paths

NetPathExperimentResult run_net_paths(const NetPathExperimentConfig& cfg) {
  cfg.process.validate();
  const int d = cfg.process.d;
  Vec e0 = Vec::Zero(d);
  e0[0] = 0.5 * cfg.distance;
  const Vec x = cfg.process.window.center - e0;
  const Vec y = cfg.process.window.center + e0;
  NetPathExperimentResult res;
  res.rows.resize(cfg.replicates);
  parallel_for(cfg.replicates, cfg.threads, [&](std::size_t i) {
    NetPathRow& row = res.rows[i];
    row.replicate = i;
    row.seed = replicate_seed(cfg.process.seed, i);
    ProcessParams p = cfg.process;
    p.seed = row.seed;
    const LineSample s = sample_process(p);
    const NetPathResult r = build_net_path(x, y, s, cfg.path);
    if (!r.ok()) {
      row.fail_level = r.failure->level;
      return;
    }
    row.success = true;
    row.segments = r.path->segments.size();
    row.time = r.path->time;
    row.bridge_time = r.path->bridge_time;
    const std::vector<Vec> way = net_path_waypoints(*r.path);
    if (way.size() < 2) {
      row.network_time = 0.0;
      row.dominates = true;
      return;
    }
    NetworkOptions opt;
    opt.v_access = cfg.path.v_bridge > 0.0 ? cfg.path.v_bridge : s.params.v_min;
    opt.eps = cfg.eps;
    const RouteNetwork net = build_network(s, way, opt);
    const auto g = shortest_time_path(net, 0, static_cast<int>(way.size()) - 1);
    row.network_time = g ? g->time : kUnreachable;
    row.dominates = g && row.time >= row.network_time * (1.0 - 1e-9);
  });
  std::size_t ok = 0;
  std::size_t level0 = 0;
  for (const auto& row : res.rows) {
    if (row.success) ++ok;
    if (row.success || row.fail_level != 0) ++level0;
    if (row.success && !row.dominates) ++res.dominance_violations;
  }
  if (cfg.replicates > 0) {
    res.success_rate = static_cast<double>(ok) / static_cast<double>(cfg.replicates);
    res.level0_success = static_cast<double>(level0) / static_cast<double>(cfg.replicates);
  }
  return res;
}

}  // namespace linenet
