#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "linenet/runner.hpp"

using namespace linenet;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("linenet_runner_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Scenario small_route(std::size_t replicates = 12) {
  return parse_scenario("[experiment]\nkind = route_length\nreplicates = " + std::to_string(replicates) +
                        "\n[process]\nv_min = 0.3\n");
}

std::vector<std::string> artifacts(const fs::path& dir) {
  std::vector<std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out.push_back(fs::relative(e.path(), dir).string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(Runner, ThreadCountDoesNotChangeBytes) {
  const auto a = scratch("t1");
  const auto b = scratch("t8");
  RunOptions oa{a.string(), 1, std::nullopt, false};
  RunOptions ob{b.string(), 8, std::nullopt, false};
  ASSERT_EQ(run_scenario(small_route(), oa).exit_code, kExitOk);
  ASSERT_EQ(run_scenario(small_route(), ob).exit_code, kExitOk);
  const auto files = artifacts(a);
  ASSERT_EQ(files, artifacts(b));
  for (const auto& f : files) {
    if (f == "manifest.json") continue;
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  const auto ma = nlohmann::json::parse(slurp(a / "manifest.json"));
  const auto mb = nlohmann::json::parse(slurp(b / "manifest.json"));
  EXPECT_EQ(ma["files"], mb["files"]);
  EXPECT_EQ(ma["checksum"], mb["checksum"]);
  EXPECT_EQ(ma["summary"], mb["summary"]);
}

TEST(Runner, ZeroReplicatesWritesHeadersAndWarns) {
  const auto dir = scratch("zero");
  const auto r = run_scenario(small_route(0), RunOptions{dir.string()});
  EXPECT_EQ(r.exit_code, kExitOk);
  ASSERT_FALSE(r.warnings.empty());
  EXPECT_NE(r.warnings[0].find("replicates = 0"), std::string::npos);
  const auto rep = slurp(dir / "replicates.csv");
  EXPECT_EQ(std::count(rep.begin(), rep.end(), '\n'), 2);
  for (const auto& f : artifacts(dir / "plots")) {
    const auto text = slurp(dir / "plots" / f);
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2) << f;
  }
  EXPECT_TRUE(verify_run(dir.string()).ok);
}

TEST(Runner, RefusesExistingRunUnlessForced) {
  const auto dir = scratch("rerun");
  ASSERT_EQ(run_scenario(small_route(), RunOptions{dir.string()}).exit_code, kExitOk);
  const auto again = run_scenario(small_route(), RunOptions{dir.string()});
  EXPECT_EQ(again.exit_code, kExitRefused);
  EXPECT_NE(again.error.find("--force"), std::string::npos);
  { std::ofstream(dir / "notes.txt") << "mine\n"; }
  RunOptions force{dir.string()};
  force.force = true;
  EXPECT_EQ(run_scenario(small_route(), force).exit_code, kExitOk);
  EXPECT_EQ(slurp(dir / "notes.txt"), "mine\n");
  EXPECT_TRUE(verify_run(dir.string()).ok);
}

TEST(Runner, VerifyDetectsTampering) {
  const auto dir = scratch("tamper");
  ASSERT_EQ(run_scenario(small_route(), RunOptions{dir.string()}).exit_code, kExitOk);
  ASSERT_TRUE(verify_run(dir.string()).ok);
  { std::ofstream(dir / "summary.csv", std::ios::app) << "extra,1\n"; }
  const auto v = verify_run(dir.string());
  EXPECT_FALSE(v.ok);
  ASSERT_FALSE(v.problems.empty());
  EXPECT_NE(v.problems[0].find("summary.csv"), std::string::npos);
}

TEST(Runner, PlotRegenerationIsIdentical) {
  const auto dir = scratch("plots");
  ASSERT_EQ(run_scenario(small_route(), RunOptions{dir.string()}).exit_code, kExitOk);
  std::map<std::string, std::string> before;
  for (const auto& f : artifacts(dir / "plots")) before[f] = slurp(dir / "plots" / f);
  ASSERT_FALSE(before.empty());
  fs::remove_all(dir / "plots");
  const auto written = emit_plot_data(dir.string(), stored_kind(dir.string()));
  EXPECT_EQ(written.size(), before.size());
  for (const auto& [f, text] : before) EXPECT_EQ(slurp(dir / "plots" / f), text) << f;
  try {
    emit_plot_data(dir.string(), ExperimentKind::nested_balls);
    FAIL() << "expected an incompatible-kind error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("route_length"), std::string::npos);
  }
  EXPECT_TRUE(verify_run(dir.string()).ok);
}

TEST(Runner, FailureLeavesMarkerAndReport) {
  const auto dir = scratch("fail");
  auto s = parse_scenario("[experiment]\nkind = diameter_tail\nreplicates = 2\n[diameter]\nv_min_ladder = 0.5,1e-5\n");
  const auto r = run_scenario(s, RunOptions{dir.string()});
  EXPECT_EQ(r.exit_code, kExitError);
  EXPECT_FALSE(r.error.empty());
  EXPECT_TRUE(fs::exists(dir / ".partial"));
  ASSERT_TRUE(fs::exists(dir / "failure.json"));
  const auto f = nlohmann::json::parse(slurp(dir / "failure.json"));
  EXPECT_EQ(f["kind"], "diameter_tail");
  EXPECT_FALSE(verify_run(dir.string()).ok);
}

TEST(Runner, ArtifactHeaders) {
  const auto dir = scratch("headers");
  auto s = small_route();
  s.set("experiment", "seed", "42");
  ASSERT_EQ(run_scenario(s, RunOptions{dir.string()}).exit_code, kExitOk);
  const std::string stamp = "# linenet " + std::string(version()) + " kind=route_length seed=42";
  for (const auto& f : {"replicates.csv", "summary.csv"}) {
    const auto text = slurp(dir / f);
    EXPECT_EQ(text.substr(0, text.find('\n')), stamp) << f;
  }
  const auto rep = slurp(dir / "replicates.csv");
  const auto second = rep.substr(rep.find('\n') + 1);
  EXPECT_EQ(second.substr(0, second.find('\n')), "replicate,seed,lines,nodes,time,length,support,connected,shell");
  const auto plot = slurp(dir / "plots" / "survival.csv");
  EXPECT_EQ(plot.rfind(stamp + " property=", 0), 0u);
  const auto m = nlohmann::json::parse(slurp(dir / "manifest.json"));
  EXPECT_EQ(m["master_seed"], 42u);
  EXPECT_EQ(m["version"], std::string(version()));
  EXPECT_EQ(parse_scenario(m["scenario"].get<std::string>()).values(), s.values());
}
