// Desk-scale acceptance run. One line per criterion; nonzero exit when any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>

#include "linenet/experiments.hpp"
#include "linenet/routing.hpp"
#include "linenet/runner.hpp"
#include "support.hpp"

using namespace linenet;
using namespace linenet::testing;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Verdict()>& check) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = check();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("criterion %2d %-34s %s  %s  (%.1fs)\n", id, name.c_str(), v.pass ? "PASS" : "FAIL", v.detail.c_str(),
              secs);
  std::fflush(stdout);
  if (!v.pass) ++failures;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

Verdict fast_line_poisson() {
  const ProcessParams p{2, 3.0, Ball(origin(2), 1.0), 1.0, 20241};
  const auto counts = fast_line_counts(p, 1.0, p.window, 10000);
  const double m = mean(counts);
  const double var = variance(counts);
  const double se = std::sqrt(var / static_cast<double>(counts.size()));
  const double z = std::abs(m - std::numbers::pi) / se;
  const double ratio = var / m;
  return {z <= 4.0 && ratio >= 0.9 && ratio <= 1.1, fmt("mean %.4f (z %.2f) var/mean %.4f", m, z, ratio)};
}

Verdict cone_direction_fraction() {
  const auto est = cone_fraction_process(3, std::numbers::pi / 6, 100000, 20242);
  const double z = std::abs(est.fraction - 0.25) / est.std_error;
  return {z <= 4.0, fmt("fraction %.5f se %.5f (z %.2f)", est.fraction, est.std_error, z)};
}

Verdict scale_equivariance() {
  double worst = 0.0;
  int configs = 0;
  for (std::uint64_t seed = 0; configs < 100; ++seed) {
    const auto s = sample_process(ProcessParams{2, 3.0, Ball(origin(2), 1.5), 0.3, 9000 + seed});
    Stream rng(derive_key({seed, 0xacce}));
    const std::vector<Vec> terms{random_in_ball(rng, 2, 1.0), random_in_ball(rng, 2, 1.0)};
    const auto g = shortest_time_path(build_network_2d(s, terms, 0.3), 0, 1);
    if (!g) continue;
    ++configs;
    for (double a : {2.0, 4.0, 10.0}) {
      const std::vector<Vec> st{a * terms[0], a * terms[1]};
      const auto h = shortest_time_path(build_network_2d(scale_sample(s, a), st, 0.3 * std::sqrt(a)), 0, 1);
      if (!h) return {false, "scaled network lost its geodesic"};
      worst = std::max(worst, rel_diff(h->time, path_time_under_scaling(g->time, a, 2, 3.0)));
    }
  }
  return {worst <= 1e-9, fmt("100 configs x 3 factors, worst rel err %.2e", worst)};
}

RouteNetwork small_network(std::uint64_t seed) {
  Stream rng(derive_key({seed, 0xd1ce}));
  const Ball window(origin(2), 1.0);
  std::vector<MarkedLine> ls;
  const int lines = 1 + static_cast<int>(rng() % 3);
  for (int i = 0; i < lines; ++i) ls.push_back(MarkedLine{random_line_hitting(rng, window), 0.5 + 2.0 * rng.uniform()});
  std::vector<Vec> terms;
  const int t = 2 + static_cast<int>(rng() % 2);
  for (int k = 0; k < t; ++k) terms.push_back(random_in_ball(rng, 2, 0.7));
  return build_network_2d(hand_sample(2, 3.0, window, 0.5, ls), terms, 0.5 * rng.uniform_open_closed());
}

Verdict dijkstra_oracle() {
  int networks = 0;
  int pairs = 0;
  int mismatches = 0;
  for (std::uint64_t seed = 0; networks < 500; ++seed) {
    const auto net = small_network(seed);
    if (net.node_count() > 12) continue;
    ++networks;
    for (std::size_t s = 0; s < net.terminal_count(); ++s) {
      for (std::size_t t = 0; t < net.terminal_count(); ++t) {
        const int a = net.terminal(static_cast<int>(s));
        const int b = net.terminal(static_cast<int>(t));
        if (a == b) continue;
        ++pairs;
        const auto brute = brute_force_path(net, a, b);
        const auto g = shortest_time_path(net, static_cast<int>(s), static_cast<int>(t));
        const bool same = g ? (g->nodes == brute.nodes && std::abs(g->time - brute.time) <= 1e-12 * brute.time)
                            : brute.nodes.empty();
        mismatches += same ? 0 : 1;
      }
    }
  }
  return {mismatches == 0, fmt("%.0f networks, %.0f pairs, %.0f mismatches", networks, pairs, mismatches)};
}

Verdict decomposition_and_metric() {
  double worst_id = 0.0;
  double worst_tri = 0.0;
  std::size_t triples = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto s = sample_process(ProcessParams{2, 3.0, Ball(origin(2), 1.5), 0.3, 50000 + seed});
    Stream rng(derive_key({seed, 0x3e7}));
    std::vector<Vec> terms;
    for (int k = 0; k < 4; ++k) terms.push_back(random_in_ball(rng, 2, 1.0));
    const auto net = build_network_2d(s, terms, 0.3);
    double T[4][4];
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        const auto g = shortest_time_path(net, i, j);
        T[i][j] = g ? g->time : kUnreachable;
        if (!g || i >= j) continue;
        double st = g->bridge_time;
        double sl = g->bridge_length;
        for (const auto& [line, share] : g->per_line) {
          worst_id = std::max(worst_id, rel_diff(share.length, net.line_speed(line) * share.time));
          st += share.time;
          sl += share.length;
        }
        worst_id = std::max({worst_id, rel_diff(g->time, st), rel_diff(g->length, sl)});
      }
    }
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        for (int k = 0; k < 4; ++k) {
          if (T[i][k] == kUnreachable || T[k][j] == kUnreachable) continue;
          ++triples;
          worst_tri = std::max(worst_tri, (T[i][j] - T[i][k] - T[k][j]) / std::max(T[i][j], 1e-300));
        }
      }
    }
  }
  return {worst_id <= 1e-9 && worst_tri <= 1e-9,
          fmt("identity err %.2e, worst triangle excess %.2e over %.0f triples", worst_id, worst_tri,
              static_cast<double>(triples))};
}

Verdict diameter_tail() {
  DiameterConfig cfg;
  cfg.v_min_ladder = {0.5, 0.25, 0.125};
  cfg.replicates = 2000;
  const auto res = estimate_diameter_tail(cfg);
  std::string detail = "exponents";
  bool ok = true;
  for (const auto& r : res.rungs) {
    detail += fmt(" %.3f+-%.3f", r.fit.exponent, r.fit.std_error);
    ok = ok && r.fit.valid && !r.failed;
  }
  const auto& k = res.rungs;
  const double d1 = k[1].fit.exponent - k[0].fit.exponent;
  const double d2 = k[2].fit.exponent - k[1].fit.exponent;
  const double se2 = std::hypot(k[2].fit.std_error, k[1].fit.std_error);
  const bool stabilizing = std::abs(d2) <= std::abs(d1) + 2.0 * se2;
  const double finest = k[2].fit.exponent;
  const bool in_band = finest >= 1.5 && finest <= 2.5;
  detail += stabilizing ? "; ladder stabilizing" : "; ladder not stabilizing";
  detail += in_band ? "" : "; finest outside [1.5, 2.5]";
  return {ok && stabilizing && in_band, detail};
}

Verdict route_length() {
  RouteConfig cfg;
  cfg.replicates = 2000;
  const auto res = estimate_route_length(cfg);
  const bool ok = res.drift < 0.05 && res.min_length >= 1.0 - 1e-12 && res.fit.valid && res.fit.exponent > 1.0 &&
                  !res.failed;
  return {ok, fmt("mean L %.4f drift %.4f min L %.4f tail exponent %.3f", res.mean_length, res.drift,
                  res.min_length, res.fit.exponent)};
}

Verdict nested_balls() {
  NestedBallsConfig cfg;
  cfg.replicates = 10000;
  const auto res = simulate_nested_balls(cfg);
  const double z = std::abs(res.lambda_empirical - 1.5 * std::numbers::pi) / res.lambda_se;
  bool ok = z <= 4.0;
  std::string detail = fmt("lambda %.4f (z %.2f);", res.lambda_empirical, z);
  for (const auto& d : res.depths) {
    ok = ok && d.exceed <= d.bound + 4.0 * d.exceed_se;
    detail += fmt(" n=%.0f P=%.4f bound=%.3g", d.n, d.exceed, d.bound);
  }
  return {ok, detail};
}

Verdict long_distance() {
  LongDistanceConfig cfg;
  cfg.removal_radii = {1.0, 0.75, 1.25};
  cfg.replicates = 500;
  const auto res = measure_long_distance_network(cfg);
  // Radii sorted ascending with their column index.
  std::vector<std::pair<double, std::size_t>> order;
  for (std::size_t i = 0; i < res.radii.size(); ++i) order.emplace_back(res.radii[i], i);
  std::sort(order.begin(), order.end());
  bool finite = true;
  bool zero_ok = true;
  bool monotone = true;
  std::size_t empty_outer = 0;
  for (const auto& r : res.rows) {
    for (double v : r.ell) finite = finite && std::isfinite(v);
    if (r.outer_points == 0) {
      ++empty_outer;
      for (double v : r.ell) zero_ok = zero_ok && v == 0.0;
    }
    for (std::size_t k = 1; k < order.size(); ++k) {
      monotone = monotone && r.ell[order[k].second] <= r.ell[order[k - 1].second] + 1e-12;
    }
  }
  // Points confined to B(0, 2/3): nothing may be counted.
  LongDistanceConfig inner = cfg;
  inner.point_radius = cfg.exclusion_radius;
  inner.replicates = 100;
  for (const auto& r : measure_long_distance_network(inner).rows) {
    ++empty_outer;
    zero_ok = zero_ok && r.outer_points == 0;
    for (double v : r.ell) zero_ok = zero_ok && v == 0.0;
  }
  const bool stable = res.stability.z <= 4.0;
  return {finite && zero_ok && monotone && stable,
          fmt("mean ell %.4f se %.4f half-split z %.2f; ell = 0 on %.0f replicates without outer points", res.mean[0],
              res.se[0], res.stability.z, static_cast<double>(empty_outer)) +
              (monotone ? "" : "; NOT monotone") + (zero_ok ? "" : "; nonzero without outer points")};
}

Verdict refinement_monotone() {
  std::size_t compared = 0;
  std::size_t violations = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto coarse = sample_process(ProcessParams{2, 3.0, Ball(origin(2), 1.5), 0.25, 70000 + seed});
    const auto fine = refine(coarse, 0.125);
    for (std::size_t i = 0; i < coarse.size(); ++i) {
      if (i >= fine.size() || !(fine.lines[i].speed == coarse.lines[i].speed)) ++violations;
    }
    const std::vector<Vec> terms{point2(-0.5, 0), point2(0.5, 0), point2(0.2, 0.6)};
    const auto nc = build_network_2d(coarse, terms, 0.125);
    const auto nf = build_network_2d(fine, terms, 0.125);
    for (int i = 0; i < 3; ++i) {
      for (int j = i + 1; j < 3; ++j) {
        const auto gc = shortest_time_path(nc, i, j);
        const auto gf = shortest_time_path(nf, i, j);
        if (!gc) {
          continue;
        }
        ++compared;
        if (!gf || gf->time > gc->time * (1 + 1e-12)) ++violations;
      }
    }
  }
  return {violations == 0, fmt("%.0f geodesics compared, %.0f violations", static_cast<double>(compared),
                               static_cast<double>(violations))};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// replicates.csv, summary.csv and plots/*.csv of a run, concatenated by name.
std::string tables(const fs::path& dir) {
  std::vector<fs::path> files{dir / "replicates.csv", dir / "summary.csv"};
  for (const auto& e : fs::directory_iterator(dir / "plots")) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::string out;
  for (const auto& f : files) out += f.filename().string() + "\n" + slurp(f);
  return out;
}

Verdict determinism() {
  const fs::path base = fs::temp_directory_path() / "linenet_acceptance";
  fs::remove_all(base);
  const std::vector<std::string> scenarios{
      "[experiment]\nkind = route_length\nreplicates = 40\nseed = 5\n[process]\nv_min = 0.25\n",
      "[experiment]\nkind = nested_balls\nreplicates = 200\nseed = 5\n",
      "[experiment]\nkind = diameter_tail\nreplicates = 20\nseed = 5\n[diameter]\nv_min_ladder = 0.5,0.25\n"};
  std::size_t idx = 0;
  for (const auto& text : scenarios) {
    const Scenario s = parse_scenario(text);
    std::vector<std::string> got;
    for (int run = 0; run < 3; ++run) {
      const fs::path dir = base / (std::to_string(idx) + "_" + std::to_string(run));
      RunOptions opt{dir.string(), run == 2 ? 8 : 1, std::nullopt, false};
      const auto r = run_scenario(s, opt);
      if (r.exit_code == kExitError || r.exit_code == kExitRefused) return {false, "run failed: " + r.error};
      got.push_back(tables(dir));
    }
    if (got[0] != got[1]) return {false, std::string(to_string(s.kind())) + ": repeated run differs"};
    if (got[0] != got[2]) return {false, std::string(to_string(s.kind())) + ": 1 vs 8 threads differ"};
    ++idx;
  }
  fs::remove_all(base);
  return {true, "3 scenarios: repeat and 1 vs 8 threads byte-identical"};
}

}  // namespace

int main() {
  report(1, "fast-line Poisson law", fast_line_poisson);
  report(2, "cone measure", cone_direction_fraction);
  report(3, "scale equivariance", scale_equivariance);
  report(4, "Dijkstra oracle equivalence", dijkstra_oracle);
  report(5, "decomposition and metric axioms", decomposition_and_metric);
  report(6, "diameter tail exponent", diameter_tail);
  report(7, "route length", route_length);
  report(8, "nested-ball bound", nested_balls);
  report(9, "long-distance network", long_distance);
  report(10, "refinement monotonicity", refinement_monotone);
  report(11, "determinism", determinism);
  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
