#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "linenet/net_path.hpp"
#include "linenet/network.hpp"
#include "linenet/routing.hpp"
#include "linenet/sampler.hpp"
#include "linenet/stats.hpp"

namespace linenet {

// Seed of replicate i under a master seed.
std::uint64_t replicate_seed(std::uint64_t master, std::uint64_t index);

// Greedy internal eps-net of a ball: grid points of step spacing/4 are
// scanned in lexicographic order and kept when at least `spacing` away from
// every kept point. Always contains the grid point nearest the center first.
std::vector<Vec> internal_net(const Ball& region, double spacing);

struct NetworkOptions {
  double v_access = 0.0;  // 0 selects v_min; also the jump speed in d >= 3
  double eps = 0.05;      // jump threshold, d >= 3 only
  int k_access = 0;       // d >= 3 only; 0 = every line
  std::size_t node_cap = 2'000'000;
};

// build_network_2d in the plane, build_network_jump otherwise.
RouteNetwork build_network(const LineSample& sample, std::span<const Vec> terminals, const NetworkOptions& opt);

// True when any node of the path lies beyond (1 - fraction) * R from the
// window center.
bool touches_shell(const RouteNetwork& net, std::span<const int> nodes, const Ball& window, double fraction);

// ---------------------------------------------------------------- counts

struct FractionEstimate {
  double fraction = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

// Counts of lines with speed >= v0 hitting `ball`, one per replicate.
std::vector<double> fast_line_counts(const ProcessParams& params, double v0, const Ball& ball,
                                     std::size_t replicates, int threads = 1);

// Exact fraction of uniformly distributed axes within theta0 of a fixed axis:
// the regularized incomplete beta I_{sin^2 theta0}((d-1)/2, 1/2).
double uniform_axis_fraction(double theta0, int d);

// Fraction of uniform directions within theta0 of the first coordinate axis.
FractionEstimate cone_fraction_uniform(int d, double theta0, std::size_t samples, std::uint64_t seed);

// Fraction, among process lines crossing the flat unit (d-1)-disk normal to
// the first axis, of those within theta0 of that axis. Lines come from
// sample_process on the unit ball, so this also exercises the sampler.
FractionEstimate cone_fraction_process(int d, double theta0, std::size_t samples, std::uint64_t seed);

// ---------------------------------------------------------------- diameter

struct DiameterConfig {
  ProcessParams process{2, 3.0, Ball(origin(2), 1.5), 0.125, 1};
  Ball region{origin(2), 0.5};
  double net_spacing = 0.24;  // 16 terminals on B(0, 0.5)
  std::vector<double> v_min_ladder;  // empty: process.v_min only
  NetworkOptions network;            // v_access 0 follows each rung's v_min
  std::size_t replicates = 2000;
  double q_lo = 0.9;
  double q_hi = 0.995;
  double shell_fraction = 0.1;
  double max_disconnected = 0.05;
  int threads = 1;
};

struct DiameterRow {
  std::size_t replicate = 0;
  std::uint64_t seed = 0;
  double v_min = 0.0;
  std::size_t lines = 0;
  std::size_t nodes = 0;
  double diameter = 0.0;  // kUnreachable when disconnected
  bool connected = true;
  bool shell = false;
};

struct DiameterRung {
  double v_min = 0.0;
  TailFit fit;
  double mean = 0.0;
  double disconnected_fraction = 0.0;
  std::size_t shell_flagged = 0;
  bool failed = false;  // disconnected fraction above the limit
};

struct DiameterResult {
  std::vector<Vec> terminals;
  std::vector<DiameterRow> rows;  // replicate-major, rung-minor
  std::vector<DiameterRung> rungs;
};

DiameterResult estimate_diameter_tail(const DiameterConfig& cfg);

// Maximal pairwise terminal time on one network. kUnreachable when some pair
// is disconnected; `shell` reports whether a realizing path of any pair
// reaches the window shell.
struct PairwiseMax {
  double time = 0.0;
  bool connected = true;
  bool shell = false;
};
PairwiseMax max_terminal_time(const RouteNetwork& net, const Ball& window, double shell_fraction);

// ---------------------------------------------------------------- route length

struct RouteConfig {
  ProcessParams process{2, 3.0, Ball(origin(2), 1.5), 0.125, 1};
  double distance = 1.0;
  NetworkOptions network;
  std::size_t replicates = 2000;
  double q_lo = 0.9;
  double q_hi = 0.995;
  double shell_fraction = 0.1;
  double max_disconnected = 0.05;
  int threads = 1;
};

struct RouteRow {
  std::size_t replicate = 0;
  std::uint64_t seed = 0;
  std::size_t lines = 0;
  std::size_t nodes = 0;
  double time = 0.0;
  double length = 0.0;
  std::size_t support = 0;  // lines with positive length on the path
  bool connected = true;
  bool shell = false;
};

struct RouteResult {
  std::vector<RouteRow> rows;
  double mean_length = 0.0;
  double length_se = 0.0;
  double drift = 0.0;  // running_mean_drift of L over connected replicates
  double min_length = 0.0;
  TailFit fit;         // pareto-type fit of L
  double disconnected_fraction = 0.0;
  std::size_t shell_flagged = 0;
  bool failed = false;
};

RouteResult estimate_route_length(const RouteConfig& cfg);

// ---------------------------------------------------------------- point sets

struct CoupledPointSets {
  Ball window{origin(2), 1.0};
  int n_max = 0;
  std::vector<Vec> points;  // layer-major
  std::vector<int> layer;   // point k belongs to Xi_n for every n > layer[k]

  // Xi_n: points of layers 0..n-1.
  std::vector<Vec> level(int n) const;
  std::size_t count(int n) const;
};

// Layer k adds Poisson(volume(window)) uniform points from the stream keyed
// (seed, k); Xi_n is the union of layers 0..n-1.
CoupledPointSets sample_coupled_points(const Ball& window, int n_max, std::uint64_t seed);

// ---------------------------------------------------------------- long-distance network

struct LongDistanceConfig {
  ProcessParams process{2, 3.0, Ball(origin(2), 6.0), 0.5, 1};
  int intensity = 1;
  double point_radius = 2.0;           // points of Xi_n live in B(0, point_radius)
  std::vector<double> removal_radii{1.0};  // first entry is the headline radius
  Ball core{origin(2), 1.0 / 3.0};
  double exclusion_radius = 2.0 / 3.0;  // points inside contribute nothing
  std::size_t pair_cap = 2000;
  NetworkOptions network;
  std::size_t replicates = 500;
  double shell_fraction = 0.1;
  int threads = 1;
};

struct LongDistanceRow {
  std::size_t replicate = 0;
  std::uint64_t seed = 0;
  std::size_t points = 0;
  std::size_t outer_points = 0;
  std::size_t pairs = 0;
  std::size_t disconnected_pairs = 0;
  bool capped = false;
  bool shell = false;
  std::vector<double> ell;  // per removal radius
};

struct LongDistanceResult {
  std::vector<double> radii;
  std::vector<LongDistanceRow> rows;
  std::vector<double> mean;  // per radius
  std::vector<double> se;
  HalfSplit stability;       // headline radius
  bool lower_bound = false;  // some replicate hit the pair cap
  std::size_t shell_flagged = 0;
};

LongDistanceResult measure_long_distance_network(const LongDistanceConfig& cfg);

// Length inside `core` of the union of the path traces, after removing the
// balls of radius rho around each path's two endpoints. On-line pieces are
// merged per line, bridge pieces per edge.
double long_distance_length(const RouteNetwork& net, const std::vector<Geodesic>& paths, const Ball& core,
                            double rho);

// ---------------------------------------------------------------- nested balls

struct NestedBallsConfig {
  double alpha = 2.0;
  double r0 = 1.0;
  double v0 = 1.0;
  double gamma = 3.0;
  int d = 3;
  std::vector<int> depths{5, 10, 20};
  double delta = 0.6;
  std::size_t replicates = 10000;
  std::uint64_t seed = 1;
  int threads = 1;
};

struct NestedDepth {
  int n = 0;
  double exceed = 0.0;  // empirical P[I_n > delta n]
  double exceed_se = 0.0;
  double bound = 0.0;
};

struct NestedBallsResult {
  double p = 0.0;
  double lambda_theory = 0.0;
  double lambda_empirical = 0.0;
  double lambda_se = 0.0;
  std::vector<NestedDepth> depths;
  std::vector<std::uint64_t> seeds;
  std::vector<std::vector<int>> counts;  // per replicate, I_n per depth
  std::vector<double> own_hits;          // per replicate, mean of #(V_i hitting B_i) over i >= 1
};

// ((1 + lambda delta) ((1 + delta)/delta)^delta p^delta)^n
double nested_ball_bound(double lambda, double delta, double p, int n);
double nested_ball_lambda(double alpha, double r0, double v0, double gamma, int d);

NestedBallsResult simulate_nested_balls(const NestedBallsConfig& cfg);

// ---------------------------------------------------------------- direction clumping

struct ClumpingConfig {
  int d = 3;
  int n = 10;
  double eta = 0.75;
  double alpha = 2.0;
  double beta = 1.0;
  double delta = 0.5;
  std::size_t replicates = 200;
  std::uint64_t seed = 1;
  std::size_t search_cap = 2'000'000;  // DFS nodes before falling back to greedy
  int threads = 1;
};

struct ClumpingRow {
  std::size_t replicate = 0;
  std::uint64_t seed = 0;
  std::size_t covered = 0;  // best number of points inside floor(delta n) net balls
  bool event = false;
  bool exact = true;
};

struct ClumpingResult {
  std::size_t points = 0;  // ceil(alpha n)
  std::size_t needed = 0;  // ceil(beta n)
  std::size_t balls = 0;   // floor(delta n)
  double radius = 0.0;     // n^{-eta}
  std::size_t net_size = 0;
  std::vector<ClumpingRow> rows;
  double frequency = 0.0;
  std::size_t fallbacks = 0;
};

// Greedy internal eps-net of projective space under the angle metric, grown
// from a fixed candidate stream until `stall` consecutive candidates fail.
std::vector<Direction> projective_net(int d, double eps, std::size_t stall = 4000);

struct CoverageResult {
  std::size_t covered = 0;
  bool exact = true;
};

// Largest number of points (bitset rows) coverable by `k` of the sets.
CoverageResult max_coverage(const std::vector<std::vector<std::uint64_t>>& sets, std::size_t k,
                            std::size_t search_cap);

ClumpingResult direction_clumping_test(const ClumpingConfig& cfg);

// ---------------------------------------------------------------- uniqueness gap

struct GapResult {
  bool skipped = false;  // s and t are the same node
  bool found = false;    // a path with different support exists within k
  double best_time = 0.0;
  double alt_time = kUnreachable;
  double gap = kUnreachable;  // (alt - best) / best
  std::size_t paths_examined = 0;
};

// Enumerates simple s-t paths by increasing time (Yen) until one uses a
// different set of lines than the best path.
GapResult uniqueness_gap_probe(const RouteNetwork& net, int s_label, int t_label, std::size_t k = 50);

struct UniquenessConfig {
  ProcessParams process{2, 3.0, Ball(origin(2), 1.5), 0.5, 1};
  double distance = 1.0;
  NetworkOptions network;
  std::size_t k = 50;
  std::size_t replicates = 1000;
  int threads = 1;
};

struct UniquenessRow {
  std::size_t replicate = 0;
  std::uint64_t seed = 0;
  GapResult gap;
};

struct UniquenessResult {
  std::vector<UniquenessRow> rows;
  double positive_fraction = 0.0;  // among replicates with a finite or infinite gap
  std::size_t ties = 0;
  std::size_t disconnected = 0;
};

UniquenessResult probe_uniqueness_gaps(const UniquenessConfig& cfg);

// ---------------------------------------------------------------- net paths

struct NetPathExperimentConfig {
  ProcessParams process{2, 3.0, Ball(origin(2), 1.5), 0.125, 1};
  NetPathConfig path;
  double distance = 1.0;
  double eps = 0.05;  // jump threshold of the comparison network, d >= 3
  std::size_t replicates = 1000;
  int threads = 1;
};

struct NetPathRow {
  std::size_t replicate = 0;
  std::uint64_t seed = 0;
  bool success = false;
  int fail_level = -1;
  std::size_t segments = 0;
  double time = kUnreachable;
  double bridge_time = kUnreachable;
  double network_time = kUnreachable;  // shortest time on a network whose terminals are the waypoints
  bool dominates = false;              // time >= network_time
};

struct NetPathExperimentResult {
  std::vector<NetPathRow> rows;
  double success_rate = 0.0;
  double level0_success = 0.0;  // fraction not failing at level 0
  std::size_t dominance_violations = 0;
};

NetPathExperimentResult run_net_paths(const NetPathExperimentConfig& cfg);

}  // namespace linenet
