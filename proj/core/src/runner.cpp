#include "linenet/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "linenet/format.hpp"
#include "linenet/parallel.hpp"

namespace linenet {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string_view version() { return LINENET_VERSION; }

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

constexpr const char* kManifest = "manifest.json";
constexpr const char* kReplicates = "replicates.csv";
constexpr const char* kSummary = "summary.csv";
constexpr const char* kFailure = "failure.json";
constexpr const char* kPartial = ".partial";
constexpr const char* kPlots = "plots";

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string num(double v) { return fmt_g17(v); }
std::string num(std::size_t v) { return std::to_string(v); }
std::string num(int v) { return std::to_string(v); }
std::string flag(bool v) { return v ? "1" : "0"; }

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::size_t col(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (columns[i] == name) return i;
    }
    throw Error("replicates.csv: missing column " + name);
  }
  std::vector<double> column(const std::string& name) const {
    const std::size_t c = col(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(std::stod(r[c]));
    return out;
  }
};

struct Outcome {
  Table table;
  std::vector<std::pair<std::string, json>> summary;
  std::vector<std::string> warnings;
  bool statistical_failure = false;
};

std::string stamp(const Scenario& s) {
  return "# linenet " + std::string(version()) + " kind=" + std::string(to_string(s.kind())) +
         " seed=" + std::to_string(s.seed());
}

std::string render_csv(const std::string& comment, const std::vector<std::string>& columns,
                       const std::vector<std::vector<std::string>>& rows) {
  std::string out = comment + "\n";
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ",";
      out += cells[i];
    }
    out += "\n";
  };
  line(columns);
  for (const auto& r : rows) line(r);
  return out;
}

Table parse_csv(const std::string& text) {
  Table t;
  std::istringstream in(text);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (header) {
      t.columns = std::move(cells);
      header = false;
    } else {
      if (cells.size() != t.columns.size()) throw Error("replicates.csv: ragged row");
      t.rows.push_back(std::move(cells));
    }
  }
  if (header) throw Error("replicates.csv: missing header");
  return t;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + p.string());
  out << bytes;
  if (!out) throw Error("write failed: " + p.string());
}

json jnum(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
}

std::string radius_tag(double r) {
  std::string s = num(r);
  for (char& c : s) {
    if (c == '-') c = 'm';
  }
  return s;
}

// ---------------------------------------------------------------- experiments

Outcome run_diameter(const Scenario& s) {
  const DiameterConfig cfg = s.diameter();
  const DiameterResult res = estimate_diameter_tail(cfg);
  Outcome o;
  o.table.columns = {"replicate", "seed", "v_min", "lines", "nodes", "diameter", "connected", "shell"};
  for (const auto& r : res.rows) {
    o.table.rows.push_back({num(r.replicate), std::to_string(r.seed), num(r.v_min), num(r.lines), num(r.nodes),
                            num(r.diameter), flag(r.connected), flag(r.shell)});
  }
  o.summary.push_back({"terminals", res.terminals.size()});
  for (const auto& rung : res.rungs) {
    const std::string p = "v_min=" + num(rung.v_min) + ".";
    o.summary.push_back({p + "exponent", jnum(rung.fit.exponent)});
    o.summary.push_back({p + "exponent_se", jnum(rung.fit.std_error)});
    o.summary.push_back({p + "fit_points", rung.fit.points_used});
    o.summary.push_back({p + "mean", jnum(rung.mean)});
    o.summary.push_back({p + "disconnected_fraction", jnum(rung.disconnected_fraction)});
    o.summary.push_back({p + "shell_flagged", rung.shell_flagged});
    if (rung.failed) {
      o.statistical_failure = true;
      o.warnings.push_back("v_min " + num(rung.v_min) + ": disconnected fraction above the limit");
    }
    if (!rung.fit.valid) o.warnings.push_back("v_min " + num(rung.v_min) + ": too few points in the fit band");
    if (rung.shell_flagged > 0) {
      o.warnings.push_back("v_min " + num(rung.v_min) + ": " + std::to_string(rung.shell_flagged) +
                           " replicates reached the window shell");
    }
  }
  return o;
}

Outcome run_route(const Scenario& s) {
  const RouteConfig cfg = s.route();
  const RouteResult res = estimate_route_length(cfg);
  Outcome o;
  o.table.columns = {"replicate", "seed", "lines", "nodes", "time", "length", "support", "connected", "shell"};
  for (const auto& r : res.rows) {
    o.table.rows.push_back({num(r.replicate), std::to_string(r.seed), num(r.lines), num(r.nodes), num(r.time),
                            num(r.length), num(r.support), flag(r.connected), flag(r.shell)});
  }
  o.summary = {{"mean_length", jnum(res.mean_length)},
               {"length_se", jnum(res.length_se)},
               {"running_mean_drift", jnum(res.drift)},
               {"min_length", jnum(res.min_length)},
               {"tail_exponent", jnum(res.fit.exponent)},
               {"tail_exponent_se", jnum(res.fit.std_error)},
               {"disconnected_fraction", jnum(res.disconnected_fraction)},
               {"shell_flagged", res.shell_flagged}};
  if (res.failed) {
    o.statistical_failure = true;
    o.warnings.push_back("disconnected fraction above the limit");
  }
  if (res.shell_flagged > 0) {
    o.warnings.push_back(std::to_string(res.shell_flagged) + " replicates reached the window shell");
  }
  return o;
}

Outcome run_long_distance(const Scenario& s) {
  const LongDistanceConfig cfg = s.long_distance();
  const LongDistanceResult res = measure_long_distance_network(cfg);
  Outcome o;
  o.table.columns = {"replicate", "seed", "points", "outer_points", "pairs", "disconnected_pairs", "capped", "shell"};
  for (double r : res.radii) o.table.columns.push_back("ell_rho_" + radius_tag(r));
  for (const auto& r : res.rows) {
    std::vector<std::string> row{num(r.replicate), std::to_string(r.seed), num(r.points), num(r.outer_points),
                                 num(r.pairs), num(r.disconnected_pairs), flag(r.capped), flag(r.shell)};
    for (double e : r.ell) row.push_back(num(e));
    o.table.rows.push_back(std::move(row));
  }
  for (std::size_t i = 0; i < res.radii.size(); ++i) {
    o.summary.push_back({"rho=" + num(res.radii[i]) + ".mean", jnum(res.mean[i])});
    o.summary.push_back({"rho=" + num(res.radii[i]) + ".se", jnum(res.se[i])});
  }
  o.summary.push_back({"half_split_z", jnum(res.stability.z)});
  o.summary.push_back({"lower_bound", res.lower_bound});
  o.summary.push_back({"shell_flagged", res.shell_flagged});
  if (res.lower_bound) o.warnings.push_back("pair cap reached: ell values are lower bounds");
  if (res.shell_flagged > 0) {
    o.warnings.push_back(std::to_string(res.shell_flagged) + " replicates reached the window shell");
  }
  return o;
}

Outcome run_nested(const Scenario& s) {
  const NestedBallsConfig cfg = s.nested_balls();
  const NestedBallsResult res = simulate_nested_balls(cfg);
  Outcome o;
  o.table.columns = {"replicate", "seed", "own_hits"};
  for (int n : cfg.depths) o.table.columns.push_back("I_" + std::to_string(n));
  for (std::size_t i = 0; i < res.seeds.size(); ++i) {
    std::vector<std::string> row{num(i), std::to_string(res.seeds[i]), num(res.own_hits[i])};
    for (int c : res.counts[i]) row.push_back(num(c));
    o.table.rows.push_back(std::move(row));
  }
  o.summary = {{"p", jnum(res.p)},
               {"lambda_theory", jnum(res.lambda_theory)},
               {"lambda_empirical", jnum(res.lambda_empirical)},
               {"lambda_se", jnum(res.lambda_se)}};
  for (const auto& d : res.depths) {
    const std::string p = "n=" + std::to_string(d.n) + ".";
    o.summary.push_back({p + "exceed", jnum(d.exceed)});
    o.summary.push_back({p + "exceed_se", jnum(d.exceed_se)});
    o.summary.push_back({p + "bound", jnum(d.bound)});
  }
  return o;
}

Outcome run_clumping(const Scenario& s) {
  const ClumpingConfig cfg = s.clumping();
  const ClumpingResult res = direction_clumping_test(cfg);
  Outcome o;
  o.table.columns = {"replicate", "seed", "covered", "event", "exact"};
  for (const auto& r : res.rows) {
    o.table.rows.push_back({num(r.replicate), std::to_string(r.seed), num(r.covered), flag(r.event), flag(r.exact)});
  }
  o.summary = {{"points", res.points}, {"needed", res.needed},       {"balls", res.balls},
               {"radius", jnum(res.radius)}, {"net_size", res.net_size}, {"frequency", jnum(res.frequency)},
               {"fallbacks", res.fallbacks}};
  if (res.fallbacks > 0) {
    o.warnings.push_back(std::to_string(res.fallbacks) + " replicates used the greedy fallback (covered is a lower bound)");
  }
  return o;
}

Outcome run_uniqueness(const Scenario& s) {
  const UniquenessConfig cfg = s.uniqueness();
  const UniquenessResult res = probe_uniqueness_gaps(cfg);
  Outcome o;
  o.table.columns = {"replicate", "seed", "skipped", "found", "best_time", "alt_time", "gap", "paths_examined"};
  for (const auto& r : res.rows) {
    const auto& g = r.gap;
    o.table.rows.push_back({num(r.replicate), std::to_string(r.seed), flag(g.skipped), flag(g.found),
                            num(g.best_time), num(g.alt_time), num(g.gap), num(g.paths_examined)});
  }
  o.summary = {{"positive_fraction", jnum(res.positive_fraction)},
               {"ties", res.ties},
               {"disconnected", res.disconnected}};
  return o;
}

Outcome run_points(const Scenario& s) {
  const int d = static_cast<int>(s.integer("points", "d"));
  const Ball window(origin(d), s.number("points", "window_radius"));
  const int n_max = static_cast<int>(s.integer("points", "n_max"));
  const std::size_t reps = s.replicates();
  std::vector<std::vector<std::size_t>> counts(reps);
  std::vector<char> nested(reps, 1);
  parallel_for(reps, s.threads(), [&](std::size_t i) {
    const CoupledPointSets sets = sample_coupled_points(window, n_max, replicate_seed(s.seed(), i));
    for (int n = 1; n <= n_max; ++n) {
      counts[i].push_back(sets.count(n));
      if (n > 1 && counts[i][static_cast<std::size_t>(n - 1)] < counts[i][static_cast<std::size_t>(n - 2)]) nested[i] = 0;
    }
  });
  Outcome o;
  o.table.columns = {"replicate", "seed", "nested"};
  for (int n = 1; n <= n_max; ++n) o.table.columns.push_back("count_" + std::to_string(n));
  const double volume = unit_ball_volume(d) * std::pow(window.radius, d);
  std::vector<std::vector<double>> per_level(static_cast<std::size_t>(n_max));
  for (std::size_t i = 0; i < reps; ++i) {
    std::vector<std::string> row{num(i), std::to_string(replicate_seed(s.seed(), i)), flag(nested[i] != 0)};
    for (std::size_t k = 0; k < counts[i].size(); ++k) {
      row.push_back(num(counts[i][k]));
      per_level[k].push_back(static_cast<double>(counts[i][k]));
    }
    o.table.rows.push_back(std::move(row));
  }
  for (int n = 1; n <= n_max; ++n) {
    const std::string p = "n=" + std::to_string(n) + ".";
    o.summary.push_back({p + "mean_count", jnum(mean(per_level[static_cast<std::size_t>(n - 1)]))});
    o.summary.push_back({p + "expected_count", jnum(n * volume)});
  }
  return o;
}

Outcome run_net_path(const Scenario& s) {
  const NetPathExperimentConfig cfg = s.net_path();
  const NetPathExperimentResult res = run_net_paths(cfg);
  Outcome o;
  o.table.columns = {"replicate", "seed", "success", "fail_level", "segments",
                     "time", "bridge_time", "network_time", "dominates"};
  for (const auto& r : res.rows) {
    o.table.rows.push_back({num(r.replicate), std::to_string(r.seed), flag(r.success), num(r.fail_level),
                            num(r.segments), num(r.time), num(r.bridge_time), num(r.network_time),
                            flag(r.dominates)});
  }
  o.summary = {{"success_rate", jnum(res.success_rate)},
               {"level0_success", jnum(res.level0_success)},
               {"dominance_violations", res.dominance_violations}};
  if (res.dominance_violations > 0) {
    o.statistical_failure = true;
    o.warnings.push_back("net path faster than the network geodesic in " +
                         std::to_string(res.dominance_violations) + " replicates");
  }
  return o;
}

std::vector<std::string> empty_columns(const Scenario& s) {
  switch (s.kind()) {
    case ExperimentKind::diameter_tail:
      return {"replicate", "seed", "v_min", "lines", "nodes", "diameter", "connected", "shell"};
    case ExperimentKind::route_length:
      return {"replicate", "seed", "lines", "nodes", "time", "length", "support", "connected", "shell"};
    case ExperimentKind::long_distance: {
      std::vector<std::string> c{"replicate", "seed", "points", "outer_points", "pairs", "disconnected_pairs",
                                 "capped", "shell"};
      for (double r : s.numbers("long_distance", "removal_radii")) c.push_back("ell_rho_" + radius_tag(r));
      return c;
    }
    case ExperimentKind::nested_balls: {
      std::vector<std::string> c{"replicate", "seed", "own_hits"};
      for (double n : s.numbers("nested", "depths")) c.push_back("I_" + std::to_string(static_cast<int>(n)));
      return c;
    }
    case ExperimentKind::direction_clumping:
      return {"replicate", "seed", "covered", "event", "exact"};
    case ExperimentKind::uniqueness_gap:
      return {"replicate", "seed", "skipped", "found", "best_time", "alt_time", "gap", "paths_examined"};
    case ExperimentKind::coupled_points: {
      std::vector<std::string> c{"replicate", "seed", "nested"};
      for (long n = 1; n <= s.integer("points", "n_max"); ++n) c.push_back("count_" + std::to_string(n));
      return c;
    }
    case ExperimentKind::net_path:
      return {"replicate", "seed", "success", "fail_level", "segments",
              "time", "bridge_time", "network_time", "dominates"};
  }
  return {};
}

Outcome run_experiment(const Scenario& s) {
  if (s.replicates() == 0) {
    Outcome o;
    o.table.columns = empty_columns(s);
    o.warnings.push_back("replicates = 0: nothing simulated, summary is empty");
    return o;
  }
  switch (s.kind()) {
    case ExperimentKind::diameter_tail:
      return run_diameter(s);
    case ExperimentKind::route_length:
      return run_route(s);
    case ExperimentKind::long_distance:
      return run_long_distance(s);
    case ExperimentKind::nested_balls:
      return run_nested(s);
    case ExperimentKind::direction_clumping:
      return run_clumping(s);
    case ExperimentKind::uniqueness_gap:
      return run_uniqueness(s);
    case ExperimentKind::coupled_points:
      return run_points(s);
    case ExperimentKind::net_path:
      return run_net_path(s);
  }
  throw Error("unhandled experiment kind");
}

// ---------------------------------------------------------------- plots

struct Plot {
  std::string name;
  std::string property;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

std::vector<double> finite_where(const Table& t, const std::string& value, const std::string& keep_col = {},
                                 const std::string& keep_value = {}) {
  const std::size_t vc = t.col(value);
  const std::size_t kc = keep_col.empty() ? 0 : t.col(keep_col);
  std::vector<double> out;
  for (const auto& r : t.rows) {
    if (!keep_col.empty() && std::stod(r[kc]) != std::stod(keep_value)) continue;
    const double v = std::stod(r[vc]);
    if (std::isfinite(v)) out.push_back(v);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Plot survival_plot(const std::string& name, const std::string& property, const std::string& label,
                   const std::vector<double>& sorted) {
  Plot p{name, property, {label, "survival"}, {}};
  for (const auto& pt : survival_points(sorted)) p.rows.push_back({num(pt.value), num(pt.survival)});
  return p;
}

// log(-log S) against log t, and a line of slope `slope` through the centroid
// of the fitted band.
std::vector<Plot> weibull_plots(const std::string& tag, const std::string& property, const std::vector<double>& sorted,
                                double slope, double q_lo, double q_hi) {
  Plot tail{"tail_" + tag + ".csv", property, {"log_t", "log_neg_log_survival"}, {}};
  Plot ref{"tail_reference_" + tag + ".csv",
           property + "; reference line of slope gamma-1 = " + num(slope),
           {"log_t", "reference"},
           {}};
  std::vector<double> xs, ys;
  const auto pts = survival_points(sorted);
  const double n1 = static_cast<double>(sorted.size()) + 1.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!(pts[i].value > 0.0)) continue;
    const double x = std::log(pts[i].value);
    const double y = std::log(-std::log(pts[i].survival));
    tail.rows.push_back({num(x), num(y)});
    const double pos = static_cast<double>(i + 1) / n1;
    if (pos >= q_lo && pos <= q_hi) {
      xs.push_back(x);
      ys.push_back(y);
    }
  }
  if (!xs.empty()) {
    const double xbar = mean(xs);
    const double ybar = mean(ys);
    for (const auto& row : tail.rows) {
      const double x = std::stod(row[0]);
      ref.rows.push_back({row[0], num(ybar + slope * (x - xbar))});
    }
  }
  Plot quant{"quantile_" + tag + ".csv",
             property + "; quantile t_eps against (ln 1/eps)^(1/(gamma-1)), linear under the predicted tail",
             {"ln_inv_eps_pow", "quantile"},
             {}};
  if (!sorted.empty()) {
    for (double eps = 0.5; eps * static_cast<double>(sorted.size()) >= 1.0; eps /= 2.0) {
      quant.rows.push_back({num(std::pow(std::log(1.0 / eps), 1.0 / slope)), num(quantile_sorted(sorted, 1.0 - eps))});
    }
  }
  return {tail, ref, quant};
}

Plot running_mean_plot(const std::string& name, const std::string& property, const std::vector<double>& x) {
  Plot p{name, property, {"replicates", "running_mean"}, {}};
  double acc = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    acc += x[k];
    p.rows.push_back({num(k + 1), num(acc / static_cast<double>(k + 1))});
  }
  return p;
}

std::vector<double> in_order(const Table& t, const std::string& value, const std::string& keep_col) {
  const std::size_t vc = t.col(value);
  const std::size_t kc = t.col(keep_col);
  std::vector<double> out;
  for (const auto& r : t.rows) {
    if (r[kc] == "1") out.push_back(std::stod(r[vc]));
  }
  return out;
}

std::vector<Plot> make_plots(const Scenario& s, const Table& t) {
  std::vector<Plot> plots;
  switch (s.kind()) {
    case ExperimentKind::diameter_tail: {
      const double gamma = s.number("process", "gamma");
      auto ladder = s.numbers("diameter", "v_min_ladder");
      if (ladder.empty()) ladder.push_back(s.number("process", "v_min"));
      const std::string prop = "Weibull-type upper tail of the diameter, exponent gamma-1";
      for (double v : ladder) {
        const std::string tag = "vmin_" + radius_tag(v);
        const auto sorted = finite_where(t, "diameter", "v_min", num(v));
        plots.push_back(survival_plot("survival_" + tag + ".csv", prop, "diameter", sorted));
        for (auto& p : weibull_plots(tag, prop, sorted, gamma - 1.0, s.number("fit", "q_lo"), s.number("fit", "q_hi"))) {
          plots.push_back(std::move(p));
        }
      }
      break;
    }
    case ExperimentKind::route_length: {
      const std::string prop = "finite mean route length between unit-distance terminals";
      const auto sorted = finite_where(t, "length", "connected", "1");
      plots.push_back(survival_plot("survival.csv", prop, "length", sorted));
      Plot tail{"tail.csv", prop + "; slope below -1 means a finite first moment", {"log_length", "log_survival"}, {}};
      for (const auto& pt : survival_points(sorted)) tail.rows.push_back({num(std::log(pt.value)), num(std::log(pt.survival))});
      plots.push_back(std::move(tail));
      plots.push_back(running_mean_plot("running_mean.csv", prop, in_order(t, "length", "connected")));
      break;
    }
    case ExperimentKind::long_distance: {
      const std::string prop = "finite intensity of the long-distance network inside the core";
      const auto radii = s.numbers("long_distance", "removal_radii");
      Plot by_rho{"removal_radius.csv", prop + "; nonincreasing in rho", {"rho", "mean_ell"}, {}};
      for (double r : radii) {
        const auto e = t.column("ell_rho_" + radius_tag(r));
        by_rho.rows.push_back({num(r), e.empty() ? std::string("nan") : num(mean(e))});
      }
      plots.push_back(std::move(by_rho));
      auto ell = t.column("ell_rho_" + radius_tag(radii.front()));
      std::sort(ell.begin(), ell.end());
      Plot quant{"quantile_regression.csv",
                 prop + "; (1-eps)-quantile of ell against (ln 1/eps)^2, growth at most linear",
                 {"ln_inv_eps_sq", "quantile"},
                 {}};
      if (!ell.empty()) {
        for (double eps = 0.5; eps * static_cast<double>(ell.size()) >= 1.0; eps /= 2.0) {
          const double l = std::log(1.0 / eps);
          quant.rows.push_back({num(l * l), num(quantile_sorted(ell, 1.0 - eps))});
        }
      }
      plots.push_back(std::move(quant));
      plots.push_back(running_mean_plot("running_mean.csv", prop, t.column("ell_rho_" + radius_tag(radii.front()))));
      break;
    }
    case ExperimentKind::nested_balls: {
      const NestedBallsConfig cfg = s.nested_balls();
      const double p = std::pow(cfg.alpha, 1.0 - cfg.d);
      const double lambda = nested_ball_lambda(cfg.alpha, cfg.r0, cfg.v0, cfg.gamma, cfg.d);
      const std::string prop = "exponential bound on fast lines hitting many nested balls";
      Plot emp{"exceedance.csv", prop, {"n", "exceedance"}, {}};
      Plot bnd{"bound.csv", prop, {"n", "bound"}, {}};
      for (int n : cfg.depths) {
        const auto c = t.column("I_" + std::to_string(n));
        std::size_t hits = 0;
        for (double v : c) hits += v > cfg.delta * n ? 1 : 0;
        emp.rows.push_back({num(n), c.empty() ? std::string("nan") : num(static_cast<double>(hits) / static_cast<double>(c.size()))});
        bnd.rows.push_back({num(n), num(nested_ball_bound(lambda, cfg.delta, p, n))});
      }
      plots.push_back(std::move(emp));
      plots.push_back(std::move(bnd));
      break;
    }
    case ExperimentKind::direction_clumping: {
      const std::string prop = "rarity of many directions clumping into few small caps";
      std::map<long, std::size_t> hist;
      for (double v : t.column("covered")) ++hist[static_cast<long>(v)];
      Plot p{"coverage.csv", prop, {"covered", "frequency"}, {}};
      for (const auto& [c, k] : hist) p.rows.push_back({std::to_string(c), num(static_cast<double>(k) / static_cast<double>(t.rows.size()))});
      plots.push_back(std::move(p));
      break;
    }
    case ExperimentKind::uniqueness_gap: {
      const std::string prop = "almost-sure uniqueness of geodesics: relative gap to the best other route";
      plots.push_back(survival_plot("gap_survival.csv", prop, "gap", finite_where(t, "gap", "found", "1")));
      break;
    }
    case ExperimentKind::coupled_points: {
      const std::string prop = "coupled Poisson point sets, Xi_n of intensity n nested in Xi_{n+1}";
      const int d = static_cast<int>(s.integer("points", "d"));
      const double vol = unit_ball_volume(d) * std::pow(s.number("points", "window_radius"), d);
      Plot p{"counts.csv", prop, {"n", "mean_count"}, {}};
      Plot r{"counts_reference.csv", prop, {"n", "expected_count"}, {}};
      for (long n = 1; n <= s.integer("points", "n_max"); ++n) {
        const auto c = t.column("count_" + std::to_string(n));
        p.rows.push_back({std::to_string(n), c.empty() ? std::string("nan") : num(mean(c))});
        r.rows.push_back({std::to_string(n), num(static_cast<double>(n) * vol)});
      }
      plots.push_back(std::move(p));
      plots.push_back(std::move(r));
      break;
    }
    case ExperimentKind::net_path: {
      const std::string prop = "recursive net-path construction connects nearby points with bounded time";
      const auto time = t.column("time");
      const auto net = t.column("network_time");
      const auto ok = t.column("success");
      std::vector<double> ratio;
      for (std::size_t i = 0; i < time.size(); ++i) {
        if (ok[i] == 1.0 && std::isfinite(net[i]) && net[i] > 0.0) ratio.push_back(time[i] / net[i]);
      }
      std::sort(ratio.begin(), ratio.end());
      plots.push_back(survival_plot("time_ratio.csv", prop + "; net-path time over network geodesic time",
                                    "time_ratio", ratio));
      std::map<long, std::size_t> levels;
      for (double v : t.column("fail_level")) ++levels[static_cast<long>(v)];
      Plot p{"fail_levels.csv", prop + "; level -1 is success", {"fail_level", "fraction"}, {}};
      for (const auto& [l, k] : levels) p.rows.push_back({std::to_string(l), num(static_cast<double>(k) / static_cast<double>(t.rows.size()))});
      plots.push_back(std::move(p));
      break;
    }
  }
  return plots;
}

std::vector<std::string> write_plots(const fs::path& dir, const Scenario& s, const Table& t) {
  fs::create_directories(dir / kPlots);
  std::vector<std::string> names;
  for (const auto& p : make_plots(s, t)) {
    const std::string comment = stamp(s) + " property=\"" + p.property + "\"";
    write_file(dir / kPlots / p.name, render_csv(comment, p.columns, p.rows));
    names.push_back(std::string(kPlots) + "/" + p.name);
  }
  return names;
}

void remove_owned(const fs::path& dir) {
  for (const char* f : {kManifest, kReplicates, kSummary, kFailure, kPartial}) fs::remove(dir / f);
  const fs::path plots = dir / kPlots;
  if (fs::is_directory(plots)) {
    for (const auto& e : fs::directory_iterator(plots)) {
      if (e.is_regular_file() && e.path().extension() == ".csv") fs::remove(e.path());
    }
    if (fs::is_empty(plots)) fs::remove(plots);
  }
}

std::string overall_checksum(const json& files) {
  std::string joined;
  for (const auto& [name, sum] : files.items()) joined += name + "=" + sum.get<std::string>() + "\n";
  return hex64(fnv1a(joined));
}

Scenario stored_scenario(const json& manifest) { return parse_scenario(manifest.at("scenario").get<std::string>()); }

}  // namespace

RunReport run_scenario(Scenario scenario, const RunOptions& options) {
  RunReport report;
  if (options.seed) scenario.set("experiment", "seed", std::to_string(*options.seed));
  if (options.threads) scenario.set("experiment", "threads", std::to_string(*options.threads));
  const fs::path dir = options.out.empty() ? fs::path(scenario.out()) : fs::path(options.out);
  report.out = dir.string();

  if (fs::exists(dir) && !(fs::is_directory(dir) && fs::is_empty(dir))) {
    if (!options.force) {
      report.exit_code = kExitRefused;
      report.error = "output directory " + dir.string() + " is not empty; pass --force to replace an earlier run";
      return report;
    }
    if (!fs::is_directory(dir)) {
      report.exit_code = kExitRefused;
      report.error = dir.string() + " exists and is not a directory";
      return report;
    }
    remove_owned(dir);
  }
  fs::create_directories(dir);
  write_file(dir / kPartial, stamp(scenario) + "\n");

  const auto t0 = std::chrono::steady_clock::now();
  try {
    Outcome o = run_experiment(scenario);
    const std::string comment = stamp(scenario);
    json files = json::object();
    auto put = [&](const std::string& name, const std::string& bytes) {
      write_file(dir / name, bytes);
      files[name] = hex64(fnv1a(bytes));
    };
    put(kReplicates, render_csv(comment, o.table.columns, o.table.rows));
    std::vector<std::vector<std::string>> srows;
    json summary = json::object();
    for (const auto& [k, v] : o.summary) {
      summary[k] = v;
      srows.push_back({k, v.is_string() ? v.get<std::string>() : v.dump()});
    }
    put(kSummary, render_csv(comment, {"key", "value"}, srows));
    for (const auto& name : write_plots(dir, scenario, o.table)) files[name] = hex64(fnv1a(read_file(dir / name)));

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    json m;
    m["format"] = 1;
    m["version"] = std::string(version());
    m["kind"] = std::string(to_string(scenario.kind()));
    m["master_seed"] = scenario.seed();
    m["seed_rule"] = "replicate i uses derive_key({master_seed, i})";
    m["scenario"] = serialize_scenario(scenario);
    m["status"] = o.statistical_failure ? "statistical_failure" : "ok";
    m["summary"] = summary;
    m["warnings"] = o.warnings;
    m["files"] = files;
    m["checksum"] = overall_checksum(files);
    m["wall_seconds"] = wall;
    write_file(dir / kManifest, m.dump(2) + "\n");
    fs::remove(dir / kPartial);
    report.warnings = std::move(o.warnings);
    report.exit_code = o.statistical_failure ? kExitStatistical : kExitOk;
  } catch (const std::exception& e) {
    json f;
    f["version"] = std::string(version());
    f["kind"] = std::string(to_string(scenario.kind()));
    f["master_seed"] = scenario.seed();
    f["error"] = e.what();
    f["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    try {
      write_file(dir / kFailure, f.dump(2) + "\n");
    } catch (const std::exception&) {
    }
    report.exit_code = kExitError;
    report.error = e.what();
  }
  return report;
}

VerifyReport verify_run(const std::string& dir_name) {
  VerifyReport v;
  const fs::path dir(dir_name);
  auto problem = [&](std::string what) {
    v.ok = false;
    v.problems.push_back(std::move(what));
  };
  if (fs::exists(dir / kPartial)) problem("partial-run marker present: the run did not finish");
  json m;
  try {
    m = json::parse(read_file(dir / kManifest));
  } catch (const std::exception& e) {
    problem(std::string("manifest unreadable: ") + e.what());
    return v;
  }
  if (!m.contains("files") || !m.contains("checksum")) {
    problem("manifest lacks files or checksum");
    return v;
  }
  for (const auto& [name, sum] : m["files"].items()) {
    if (!fs::exists(dir / name)) {
      problem("missing " + name);
      continue;
    }
    const std::string got = hex64(fnv1a(read_file(dir / name)));
    if (got != sum.get<std::string>()) problem(name + ": checksum " + got + " != recorded " + sum.get<std::string>());
  }
  const std::string overall = overall_checksum(m["files"]);
  if (overall != m["checksum"].get<std::string>()) problem("overall checksum mismatch");
  try {
    const Scenario s = stored_scenario(m);
    if (s.seed() != m.at("master_seed").get<std::uint64_t>()) problem("master seed differs from the scenario");
  } catch (const std::exception& e) {
    problem(std::string("stored scenario invalid: ") + e.what());
  }
  return v;
}

ExperimentKind stored_kind(const std::string& dir) {
  const json m = json::parse(read_file(fs::path(dir) / kManifest));
  return parse_kind(m.at("kind").get<std::string>());
}

std::vector<std::string> emit_plot_data(const std::string& dir_name, ExperimentKind kind) {
  const fs::path dir(dir_name);
  const json m = json::parse(read_file(dir / kManifest));
  const Scenario s = stored_scenario(m);
  if (s.kind() != kind) {
    throw Error("plot kind " + std::string(to_string(kind)) + " is incompatible with this run; valid kinds: " +
                std::string(to_string(s.kind())));
  }
  const Table t = parse_csv(read_file(dir / kReplicates));
  return write_plots(dir, s, t);
}

}  // namespace linenet
