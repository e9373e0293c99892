#include "linenet/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace linenet {

namespace {

enum class Type { real, integer, u64, list, text };

struct Spec {
  const char* section;
  const char* key;
  Type type;
  const char* value;
  const char* help;
  bool artifact;
};

constexpr const char* kKindNames[] = {"diameter_tail",  "route_length",   "long_distance", "nested_balls",
                                      "direction_clumping", "uniqueness_gap", "coupled_points", "net_path"};

bool uses_process(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::diameter_tail:
    case ExperimentKind::route_length:
    case ExperimentKind::long_distance:
    case ExperimentKind::uniqueness_gap:
    case ExperimentKind::net_path:
      return true;
    default:
      return false;
  }
}

std::vector<Spec> specs(ExperimentKind kind) {
  std::vector<Spec> s;
  const char* reps = "1000";
  switch (kind) {
    case ExperimentKind::diameter_tail:
    case ExperimentKind::route_length:
      reps = "2000";
      break;
    case ExperimentKind::long_distance:
      reps = "500";
      break;
    case ExperimentKind::nested_balls:
      reps = "10000";
      break;
    case ExperimentKind::direction_clumping:
      reps = "200";
      break;
    default:
      break;
  }
  s.push_back({"experiment", "kind", Type::text, kKindNames[static_cast<int>(kind)], "experiment to run", false});
  s.push_back({"experiment", "seed", Type::u64, "1", "master seed; replicate i uses derive_key(seed, i)", false});
  s.push_back({"experiment", "replicates", Type::integer, reps, "number of replicates", false});
  s.push_back({"experiment", "threads", Type::integer, "1", "worker threads; output does not depend on it", false});
  s.push_back({"experiment", "out", Type::text, "", "output directory (empty: runs/<kind>)", false});

  if (uses_process(kind)) {
    const bool far = kind == ExperimentKind::long_distance;
    const bool coarse = far || kind == ExperimentKind::uniqueness_gap;
    s.push_back({"process", "d", Type::integer, "2", "dimension", false});
    s.push_back({"process", "gamma", Type::real, "3", "speed exponent, gamma > d", false});
    s.push_back({"process", "v_min", Type::real, coarse ? "0.5" : "0.125", "speed truncation", true});
    s.push_back({"process", "window_radius", Type::real, far ? "6" : "1.5",
                 "sampling window radius (3x the studied region)", true});
    s.push_back({"process", "window_center", Type::list, "", "window center (empty: origin)", false});
    s.push_back({"network", "v_access", Type::real, "0", "terminal access and jump speed (0: v_min)", true});
    s.push_back({"network", "eps", Type::real, "0.05", "jump threshold between near-miss lines, d >= 3", true});
    s.push_back({"network", "k_access", Type::integer, "0", "lines each terminal attaches to, d >= 3 (0: all)", true});
  }
  if (kind == ExperimentKind::diameter_tail || kind == ExperimentKind::route_length) {
    s.push_back({"fit", "q_lo", Type::real, "0.9", "lower end of the tail-fit quantile band", true});
    s.push_back({"fit", "q_hi", Type::real, "0.995", "upper end of the tail-fit quantile band", true});
  }
  if (uses_process(kind) && kind != ExperimentKind::net_path) {
    s.push_back({"checks", "shell_fraction", Type::real, "0.1", "outer window shell that flags a replicate", true});
  }
  if (kind == ExperimentKind::diameter_tail || kind == ExperimentKind::route_length) {
    s.push_back({"checks", "max_disconnected", Type::real, "0.05", "largest tolerated disconnected fraction", false});
  }
  switch (kind) {
    case ExperimentKind::diameter_tail:
      s.push_back({"diameter", "region_radius", Type::real, "0.5", "radius of the region whose diameter is measured", false});
      s.push_back({"diameter", "net_spacing", Type::real, "0.24", "spacing of the terminal net (16 points)", true});
      s.push_back({"diameter", "v_min_ladder", Type::list, "0.5,0.25,0.125", "cutoffs to compare (empty: v_min)", true});
      break;
    case ExperimentKind::route_length:
      s.push_back({"route", "distance", Type::real, "1", "terminal separation", false});
      break;
    case ExperimentKind::long_distance:
      s.push_back({"long_distance", "intensity", Type::integer, "1", "point intensity n", false});
      s.push_back({"long_distance", "point_radius", Type::real, "2", "points are sampled in B(0, point_radius)", true});
      s.push_back({"long_distance", "removal_radii", Type::list, "1", "removal radii rho; the first is the headline", false});
      s.push_back({"long_distance", "core_radius", Type::real, "0.3333333333333333", "radius of the measured core", false});
      s.push_back({"long_distance", "exclusion_radius", Type::real, "0.6666666666666666",
                   "points inside contribute nothing", false});
      s.push_back({"long_distance", "pair_cap", Type::integer, "2000", "pairs per replicate before subsampling", true});
      break;
    case ExperimentKind::nested_balls:
      s.push_back({"nested", "d", Type::integer, "3", "dimension", false});
      s.push_back({"nested", "gamma", Type::real, "3", "speed exponent", false});
      s.push_back({"nested", "alpha", Type::real, "2", "scale ratio between nested balls, > 1", false});
      s.push_back({"nested", "r0", Type::real, "1", "radius of B_0", false});
      s.push_back({"nested", "v0", Type::real, "1", "speed threshold v_0", false});
      s.push_back({"nested", "depths", Type::list, "5,10,20", "depths n", false});
      s.push_back({"nested", "delta", Type::real, "0.6", "exceedance level, > 0", false});
      break;
    case ExperimentKind::direction_clumping:
      s.push_back({"clumping", "d", Type::integer, "3", "dimension, >= 3", false});
      s.push_back({"clumping", "n", Type::integer, "10", "size parameter", false});
      s.push_back({"clumping", "eta", Type::real, "0.75", "net radius n^-eta, eta in (1/(d-1), 1)", false});
      s.push_back({"clumping", "alpha", Type::real, "2", "ceil(alpha n) directions", false});
      s.push_back({"clumping", "beta", Type::real, "1", "ceil(beta n) clumped directions", false});
      s.push_back({"clumping", "delta", Type::real, "0.5", "floor(delta n) net balls", false});
      s.push_back({"clumping", "search_cap", Type::integer, "2000000", "exact search budget before greedy fallback", true});
      break;
    case ExperimentKind::uniqueness_gap:
      s.push_back({"uniqueness", "distance", Type::real, "1", "terminal separation", false});
      s.push_back({"uniqueness", "k", Type::integer, "50", "paths enumerated before giving up", true});
      break;
    case ExperimentKind::coupled_points:
      s.push_back({"points", "d", Type::integer, "2", "dimension", false});
      s.push_back({"points", "window_radius", Type::real, "1", "radius of the point window", false});
      s.push_back({"points", "n_max", Type::integer, "4", "largest intensity", false});
      break;
    case ExperimentKind::net_path:
      s.push_back({"net_path", "distance", Type::real, "1", "endpoint separation", false});
      s.push_back({"net_path", "alpha", Type::real, "5", "scale ratio, > 2^((gamma-1)/(gamma-d))", false});
      s.push_back({"net_path", "r", Type::real, "1", "radius of the level-0 ball", false});
      s.push_back({"net_path", "n_max", Type::integer, "1", "recursion depth; deeper levels need speeds below v_min", true});
      s.push_back({"net_path", "speed_prefactor", Type::real, "0.5", "prefactor of the level speeds", true});
      s.push_back({"net_path", "v_bridge", Type::real, "0", "speed of leftover gaps (0: v_min)", true});
      s.push_back({"net_path", "gap_tolerance", Type::real, "inf", "largest leftover gap accepted", true});
      break;
  }
  return s;
}

std::string trim(std::string_view v) {
  const auto b = v.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = v.find_last_not_of(" \t\r\n");
  return std::string(v.substr(b, e - b + 1));
}

[[noreturn]] void fail(const std::string& section, const std::string& key, const std::string& why) {
  throw Error("[" + section + "] " + key + ": " + why);
}

double parse_real(const std::string& section, const std::string& key, const std::string& text) {
  double v = 0.0;
  const auto t = trim(text);
  const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || r.ec != std::errc() || r.ptr != t.data() + t.size() || std::isnan(v)) {
    fail(section, key, "expected a number, got '" + text + "'");
  }
  return v;
}

std::string format_real(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  if (trim(text).empty()) return out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) out.push_back(trim(item));
  return out;
}

std::string canonical_value(const Spec& s, const std::string& raw) {
  const std::string t = trim(raw);
  switch (s.type) {
    case Type::real:
      return format_real(parse_real(s.section, s.key, t));
    case Type::integer: {
      long v = 0;
      const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
      if (t.empty() || r.ec != std::errc() || r.ptr != t.data() + t.size()) {
        fail(s.section, s.key, "expected an integer, got '" + raw + "'");
      }
      return std::to_string(v);
    }
    case Type::u64: {
      std::uint64_t v = 0;
      const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
      if (t.empty() || r.ec != std::errc() || r.ptr != t.data() + t.size()) {
        fail(s.section, s.key, "expected an unsigned 64-bit integer, got '" + raw + "'");
      }
      return std::to_string(v);
    }
    case Type::list: {
      std::string out;
      for (const auto& item : split_list(t)) {
        if (!out.empty()) out += ",";
        out += format_real(parse_real(s.section, s.key, item));
      }
      return out;
    }
    case Type::text:
      return t;
  }
  return t;
}

const Spec* find_spec(const std::vector<Spec>& table, const std::string& section, const std::string& key) {
  for (const auto& s : table) {
    if (section == s.section && key == s.key) return &s;
  }
  return nullptr;
}

}  // namespace

std::string_view to_string(ExperimentKind k) { return kKindNames[static_cast<int>(k)]; }

const std::vector<ExperimentKind>& all_kinds() {
  static const std::vector<ExperimentKind> kinds{
      ExperimentKind::diameter_tail,  ExperimentKind::route_length,   ExperimentKind::long_distance,
      ExperimentKind::nested_balls,   ExperimentKind::direction_clumping, ExperimentKind::uniqueness_gap,
      ExperimentKind::coupled_points, ExperimentKind::net_path};
  return kinds;
}

ExperimentKind parse_kind(std::string_view name) {
  for (auto k : all_kinds()) {
    if (to_string(k) == name) return k;
  }
  std::string valid;
  for (auto k : all_kinds()) valid += (valid.empty() ? "" : ", ") + std::string(to_string(k));
  throw Error("[experiment] kind: unknown experiment '" + std::string(name) + "'; valid kinds: " + valid);
}

std::vector<KeySpec> key_table(ExperimentKind kind) {
  std::vector<KeySpec> out;
  for (const auto& s : specs(kind)) out.push_back({s.section, s.key, s.value, s.help, s.artifact});
  return out;
}

// ---------------------------------------------------------------- accessors

const std::string& Scenario::get(const std::string& section, const std::string& key) const {
  const auto it = values_.find({section, key});
  if (it == values_.end()) throw Error("[" + section + "] " + key + ": not defined for kind " + std::string(to_string(kind_)));
  return it->second;
}

double Scenario::number(const std::string& section, const std::string& key) const {
  return parse_real(section, key, get(section, key));
}

long Scenario::integer(const std::string& section, const std::string& key) const {
  return std::stol(get(section, key));
}

std::vector<double> Scenario::numbers(const std::string& section, const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : split_list(get(section, key))) out.push_back(parse_real(section, key, item));
  return out;
}

std::uint64_t Scenario::seed() const { return std::stoull(get("experiment", "seed")); }
std::size_t Scenario::replicates() const { return static_cast<std::size_t>(integer("experiment", "replicates")); }
int Scenario::threads() const { return static_cast<int>(integer("experiment", "threads")); }

std::string Scenario::out() const {
  const std::string& o = get("experiment", "out");
  return o.empty() ? "runs/" + std::string(to_string(kind_)) : o;
}

void Scenario::set(const std::string& section, const std::string& key, const std::string& value) {
  const auto table = specs(kind_);
  const Spec* spec = find_spec(table, section, key);
  if (spec == nullptr) fail(section, key, "unknown key for kind " + std::string(to_string(kind_)));
  if (section == "experiment" && key == "kind") fail(section, key, "cannot be overridden");
  values_[{section, key}] = canonical_value(*spec, value);
  validate();
}

ProcessParams Scenario::process() const {
  ProcessParams p;
  p.d = static_cast<int>(integer("process", "d"));
  p.gamma = number("process", "gamma");
  p.v_min = number("process", "v_min");
  p.seed = seed();
  std::vector<double> c = numbers("process", "window_center");
  Vec center = c.empty() ? origin(std::max(p.d, 1)) : Vec(Eigen::Map<Vec>(c.data(), static_cast<Eigen::Index>(c.size())));
  const double r = number("process", "window_radius");
  if (!(r > 0.0)) fail("process", "window_radius", "must be positive");
  p.window = Ball(center, r);
  return p;
}

NetworkOptions Scenario::network() const {
  NetworkOptions n;
  n.v_access = number("network", "v_access");
  n.eps = number("network", "eps");
  n.k_access = static_cast<int>(integer("network", "k_access"));
  return n;
}

DiameterConfig Scenario::diameter() const {
  DiameterConfig c;
  c.process = process();
  c.region = Ball(c.process.window.center, number("diameter", "region_radius"));
  c.net_spacing = number("diameter", "net_spacing");
  c.v_min_ladder = numbers("diameter", "v_min_ladder");
  c.network = network();
  c.replicates = replicates();
  c.q_lo = number("fit", "q_lo");
  c.q_hi = number("fit", "q_hi");
  c.shell_fraction = number("checks", "shell_fraction");
  c.max_disconnected = number("checks", "max_disconnected");
  c.threads = threads();
  return c;
}

RouteConfig Scenario::route() const {
  RouteConfig c;
  c.process = process();
  c.distance = number("route", "distance");
  c.network = network();
  c.replicates = replicates();
  c.q_lo = number("fit", "q_lo");
  c.q_hi = number("fit", "q_hi");
  c.shell_fraction = number("checks", "shell_fraction");
  c.max_disconnected = number("checks", "max_disconnected");
  c.threads = threads();
  return c;
}

LongDistanceConfig Scenario::long_distance() const {
  LongDistanceConfig c;
  c.process = process();
  c.intensity = static_cast<int>(integer("long_distance", "intensity"));
  c.point_radius = number("long_distance", "point_radius");
  c.removal_radii = numbers("long_distance", "removal_radii");
  c.core = Ball(c.process.window.center, number("long_distance", "core_radius"));
  c.exclusion_radius = number("long_distance", "exclusion_radius");
  c.pair_cap = static_cast<std::size_t>(integer("long_distance", "pair_cap"));
  c.network = network();
  c.replicates = replicates();
  c.shell_fraction = number("checks", "shell_fraction");
  c.threads = threads();
  return c;
}

NestedBallsConfig Scenario::nested_balls() const {
  NestedBallsConfig c;
  c.d = static_cast<int>(integer("nested", "d"));
  c.gamma = number("nested", "gamma");
  c.alpha = number("nested", "alpha");
  c.r0 = number("nested", "r0");
  c.v0 = number("nested", "v0");
  c.depths.clear();
  for (double v : numbers("nested", "depths")) c.depths.push_back(static_cast<int>(v));
  c.delta = number("nested", "delta");
  c.replicates = replicates();
  c.seed = seed();
  c.threads = threads();
  return c;
}

ClumpingConfig Scenario::clumping() const {
  ClumpingConfig c;
  c.d = static_cast<int>(integer("clumping", "d"));
  c.n = static_cast<int>(integer("clumping", "n"));
  c.eta = number("clumping", "eta");
  c.alpha = number("clumping", "alpha");
  c.beta = number("clumping", "beta");
  c.delta = number("clumping", "delta");
  c.search_cap = static_cast<std::size_t>(integer("clumping", "search_cap"));
  c.replicates = replicates();
  c.seed = seed();
  c.threads = threads();
  return c;
}

UniquenessConfig Scenario::uniqueness() const {
  UniquenessConfig c;
  c.process = process();
  c.distance = number("uniqueness", "distance");
  c.k = static_cast<std::size_t>(integer("uniqueness", "k"));
  c.network = network();
  c.replicates = replicates();
  c.threads = threads();
  return c;
}

NetPathExperimentConfig Scenario::net_path() const {
  NetPathExperimentConfig c;
  c.process = process();
  c.distance = number("net_path", "distance");
  c.path.alpha = number("net_path", "alpha");
  c.path.r = number("net_path", "r");
  c.path.n_max = static_cast<int>(integer("net_path", "n_max"));
  c.path.speed_prefactor = number("net_path", "speed_prefactor");
  c.path.v_bridge = number("net_path", "v_bridge");
  c.path.gap_tolerance = number("net_path", "gap_tolerance");
  c.eps = number("network", "eps");
  c.replicates = replicates();
  c.threads = threads();
  return c;
}

// ---------------------------------------------------------------- validation

void Scenario::validate() const {
  if (integer("experiment", "replicates") < 0) fail("experiment", "replicates", "must be >= 0");
  if (threads() < 1) fail("experiment", "threads", "must be >= 1");

  auto positive = [&](const char* section, const char* key) {
    if (!(number(section, key) > 0.0)) fail(section, key, "must be positive");
  };

  if (uses_process(kind_)) {
    const long d = integer("process", "d");
    if (d < 2) fail("process", "d", "must be >= 2");
    if (!(number("process", "gamma") > static_cast<double>(d))) {
      fail("process", "gamma", "gamma must exceed d (the scale-invariant regime requires gamma > d)");
    }
    positive("process", "v_min");
    if (!std::isfinite(number("process", "v_min"))) fail("process", "v_min", "must be finite");
    const auto c = numbers("process", "window_center");
    if (!c.empty() && static_cast<long>(c.size()) != d) fail("process", "window_center", "needs d coordinates");
    const ProcessParams p = process();
    try {
      p.validate();
    } catch (const Error& e) {
      fail("process", "*", e.what());
    }
    const double va = number("network", "v_access");
    if (va < 0.0 || va > p.v_min) fail("network", "v_access", "must be 0 (use v_min) or lie in (0, v_min]");
    positive("network", "eps");
    if (integer("network", "k_access") < 0) fail("network", "k_access", "must be >= 0");
    if (kind_ != ExperimentKind::net_path) {
      const double sf = number("checks", "shell_fraction");
      if (!(sf >= 0.0 && sf < 1.0)) fail("checks", "shell_fraction", "must lie in [0, 1)");
    }
  }
  if (kind_ == ExperimentKind::diameter_tail || kind_ == ExperimentKind::route_length) {
    const double lo = number("fit", "q_lo");
    const double hi = number("fit", "q_hi");
    if (!(0.0 < lo && lo < hi && hi < 1.0)) fail("fit", "q_lo", "need 0 < q_lo < q_hi < 1");
    const double md = number("checks", "max_disconnected");
    if (!(md >= 0.0 && md <= 1.0)) fail("checks", "max_disconnected", "must lie in [0, 1]");
  }

  switch (kind_) {
    case ExperimentKind::diameter_tail: {
      const ProcessParams p = process();
      const double rr = number("diameter", "region_radius");
      if (!(rr > 0.0)) fail("diameter", "region_radius", "must be positive");
      if (rr > p.window.radius) fail("diameter", "region_radius", "region must lie inside the window");
      positive("diameter", "net_spacing");
      for (double v : numbers("diameter", "v_min_ladder")) {
        if (!(v > 0.0) || !std::isfinite(v)) fail("diameter", "v_min_ladder", "cutoffs must be positive");
        if (number("network", "v_access") > v) fail("network", "v_access", "must not exceed any ladder cutoff");
      }
      break;
    }
    case ExperimentKind::route_length: {
      const double dist = number("route", "distance");
      if (!(dist >= 0.0)) fail("route", "distance", "must be >= 0");
      if (dist / 2.0 > process().window.radius) fail("route", "distance", "terminals must lie inside the window");
      break;
    }
    case ExperimentKind::long_distance: {
      const ProcessParams p = process();
      if (integer("long_distance", "intensity") < 0) fail("long_distance", "intensity", "must be >= 0");
      positive("long_distance", "point_radius");
      positive("long_distance", "core_radius");
      positive("long_distance", "exclusion_radius");
      if (number("long_distance", "point_radius") > p.window.radius) {
        fail("long_distance", "point_radius", "point region must lie inside the window");
      }
      if (number("long_distance", "exclusion_radius") > p.window.radius) {
        fail("long_distance", "exclusion_radius", "window must contain the exclusion ball");
      }
      const auto radii = numbers("long_distance", "removal_radii");
      if (radii.empty()) fail("long_distance", "removal_radii", "needs at least one radius");
      for (double r : radii) {
        if (!(r >= 0.0)) fail("long_distance", "removal_radii", "radii must be >= 0");
      }
      if (integer("long_distance", "pair_cap") < 1) fail("long_distance", "pair_cap", "must be >= 1");
      break;
    }
    case ExperimentKind::nested_balls: {
      if (integer("nested", "d") < 2) fail("nested", "d", "must be >= 2");
      if (!(number("nested", "alpha") > 1.0)) fail("nested", "alpha", "must exceed 1 so that p = alpha^(1-d) < 1");
      if (!(number("nested", "gamma") > 1.0)) fail("nested", "gamma", "must exceed 1");
      positive("nested", "r0");
      positive("nested", "v0");
      positive("nested", "delta");
      for (double n : numbers("nested", "depths")) {
        if (!(n >= 0.0) || n != std::floor(n)) fail("nested", "depths", "depths must be nonnegative integers");
      }
      break;
    }
    case ExperimentKind::direction_clumping: {
      const long d = integer("clumping", "d");
      if (d < 3) fail("clumping", "d", "must be >= 3");
      if (integer("clumping", "n") < 1) fail("clumping", "n", "must be >= 1");
      const double eta = number("clumping", "eta");
      if (!(eta > 1.0 / (d - 1.0) && eta < 1.0)) fail("clumping", "eta", "must lie in (1/(d-1), 1)");
      const double a = number("clumping", "alpha");
      const double b = number("clumping", "beta");
      const double dl = number("clumping", "delta");
      if (!(a > b && b > dl && dl > 0.0)) fail("clumping", "alpha", "need alpha > beta > delta > 0");
      if (integer("clumping", "search_cap") < 1) fail("clumping", "search_cap", "must be >= 1");
      break;
    }
    case ExperimentKind::uniqueness_gap: {
      const double dist = number("uniqueness", "distance");
      if (!(dist >= 0.0)) fail("uniqueness", "distance", "must be >= 0");
      if (dist / 2.0 > process().window.radius) fail("uniqueness", "distance", "terminals must lie inside the window");
      if (integer("uniqueness", "k") < 1) fail("uniqueness", "k", "must be >= 1");
      break;
    }
    case ExperimentKind::coupled_points: {
      if (integer("points", "d") < 1) fail("points", "d", "must be >= 1");
      positive("points", "window_radius");
      if (integer("points", "n_max") < 1) fail("points", "n_max", "must be >= 1");
      break;
    }
    case ExperimentKind::net_path: {
      const ProcessParams p = process();
      const double amin = alpha_min(p.d, p.gamma);
      const double a = number("net_path", "alpha");
      if (!(a > amin)) {
        std::ostringstream msg;
        msg << "alpha must exceed alpha_min = 2^((gamma-1)/(gamma-d)) = " << amin;
        fail("net_path", "alpha", msg.str());
      }
      positive("net_path", "r");
      positive("net_path", "speed_prefactor");
      const long n_max = integer("net_path", "n_max");
      if (n_max < 0 || n_max > 24) fail("net_path", "n_max", "must lie in [0, 24]");
      const double vb = number("net_path", "v_bridge");
      if (vb < 0.0 || vb > p.v_min) fail("net_path", "v_bridge", "must be 0 (use v_min) or lie in (0, v_min]");
      positive("net_path", "gap_tolerance");
      const double dist = number("net_path", "distance");
      const double r = number("net_path", "r");
      if (!(dist >= 0.0) || dist > 2.0 * r) fail("net_path", "distance", "endpoints must share a ball of radius r");
      if (dist / 2.0 + r / (a - 1.0) > p.window.radius) {
        fail("net_path", "distance", "endpoints need a buffer of r/(alpha-1) inside the window");
      }
      break;
    }
  }
}

// ---------------------------------------------------------------- text

Scenario default_scenario(ExperimentKind kind) {
  Scenario s;
  s.kind_ = kind;
  for (const auto& spec : specs(kind)) s.values_[{spec.section, spec.key}] = spec.value;
  s.validate();
  return s;
}

Scenario parse_scenario(std::string_view text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream in{std::string(text)};
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(std::string("scenario: ") + e.what());
  }
  for (const auto& [name, node] : tree) {
    if (node.empty()) throw Error("scenario: key '" + name + "' must sit inside a [section]");
  }
  const auto kind_node = tree.get_child_optional("experiment.kind");
  if (!kind_node) throw Error("[experiment] kind: missing required key");
  Scenario s;
  s.kind_ = parse_kind(trim(kind_node->data()));
  const auto table = specs(s.kind_);
  for (const auto& spec : table) s.values_[{spec.section, spec.key}] = spec.value;
  for (const auto& [section, node] : tree) {
    for (const auto& [key, value] : node) {
      const Spec* spec = find_spec(table, section, key);
      if (spec == nullptr) {
        bool section_known = std::any_of(table.begin(), table.end(), [&](const Spec& sp) { return section == sp.section; });
        fail(section, key,
             section_known ? "unknown key" : "section does not apply to kind " + std::string(to_string(s.kind_)));
      }
      s.values_[{section, key}] = canonical_value(*spec, value.data());
    }
  }
  s.validate();
  return s;
}

std::string serialize_scenario(const Scenario& s) {
  std::ostringstream out;
  std::string section;
  for (const auto& spec : specs(s.kind())) {
    if (section != spec.section) {
      if (!section.empty()) out << "\n";
      section = spec.section;
      out << "[" << section << "]\n";
    }
    out << spec.key << " = " << s.get(spec.section, spec.key) << "\n";
  }
  return out.str();
}

void print_defaults(std::ostream& out) {
  out << "# Defaults per experiment kind. Entries marked 'artifact choice' stand in\n"
         "# for constants the model leaves open.\n";
  for (auto kind : all_kinds()) {
    out << "\n== " << to_string(kind) << " ==\n";
    for (const auto& spec : specs(kind)) {
      std::string name = std::string("[") + spec.section + "] " + spec.key;
      out << std::left << std::setw(34) << name << " = " << std::setw(20)
          << (spec.value[0] ? spec.value : "(empty)") << " " << spec.help;
      if (spec.artifact) out << "  [artifact choice]";
      out << "\n";
    }
  }
}

}  // namespace linenet
