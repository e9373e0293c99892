#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "linenet/runner.hpp"
#include "linenet/scenario.hpp"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw linenet::Error("cannot read scenario file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cmd_run(const std::string& scenario_path, const std::string& out, std::optional<std::uint64_t> seed,
            std::optional<int> threads, bool force) {
  linenet::RunOptions opt;
  opt.out = out;
  opt.seed = seed;
  opt.threads = threads;
  opt.force = force;
  const auto report = linenet::run_scenario(linenet::parse_scenario(slurp(scenario_path)), opt);
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
  if (!report.error.empty()) std::cerr << "error: " << report.error << "\n";
  if (report.exit_code == linenet::kExitOk || report.exit_code == linenet::kExitStatistical) {
    std::cout << report.out << "\n";
  }
  if (report.exit_code == linenet::kExitStatistical) std::cerr << "run finished with a failed check\n";
  return report.exit_code;
}

int cmd_verify(const std::string& dir) {
  const auto v = linenet::verify_run(dir);
  for (const auto& p : v.problems) std::cerr << p << "\n";
  std::cout << (v.ok ? "ok" : "FAILED") << " " << dir << "\n";
  return v.ok ? 0 : 1;
}

int cmd_plot(const std::string& dir, const std::string& kind) {
  const auto k = kind.empty() ? linenet::stored_kind(dir) : linenet::parse_kind(kind);
  for (const auto& f : linenet::emit_plot_data(dir, k)) std::cout << f << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation harness for scale-invariant random spatial networks built from Poisson line processes"};
  app.require_subcommand(0, 1);
  bool show_defaults = false;
  bool show_version = false;
  app.add_flag("--defaults", show_defaults, "Print the defaults table of every experiment kind");
  app.add_flag("--version", show_version, "Print the version");

  std::string scenario_path;
  std::string out;
  std::uint64_t seed = 0;
  int threads = 1;
  bool force = false;
  auto* run = app.add_subcommand("run", "Run a scenario and write its artifacts");
  run->add_option("--scenario", scenario_path, "Scenario file (INI)")->required()->check(CLI::ExistingFile);
  auto* seed_opt = run->add_option("--seed", seed, "Override the master seed");
  auto* threads_opt = run->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  run->add_option("--out", out, "Output directory");
  run->add_flag("--force", force, "Replace artifacts of an earlier run in --out");

  std::string verify_dir;
  auto* verify = app.add_subcommand("verify", "Re-derive the checksums of a finished run");
  verify->add_option("--out,dir", verify_dir, "Run directory")->required();

  std::string plot_dir;
  std::string plot_kind;
  auto* plot = app.add_subcommand("plot", "Regenerate plot data from stored replicates");
  plot->add_option("--out,dir", plot_dir, "Run directory")->required();
  plot->add_option("--kind", plot_kind, "Experiment kind (default: the stored one)");

  std::string defaults_kind;
  auto* defaults = app.add_subcommand("defaults", "Print defaults, or a kind's default scenario file");
  defaults->add_option("--kind", defaults_kind, "Emit the default scenario of this kind");

  CLI11_PARSE(app, argc, argv);

  try {
    if (show_version) {
      std::cout << "linenet " << linenet::version() << "\n";
      return 0;
    }
    if (show_defaults) {
      linenet::print_defaults(std::cout);
      return 0;
    }
    if (*run) {
      return cmd_run(scenario_path, out, *seed_opt ? std::optional<std::uint64_t>(seed) : std::nullopt,
                     *threads_opt ? std::optional<int>(threads) : std::nullopt, force);
    }
    if (*verify) return cmd_verify(verify_dir);
    if (*plot) return cmd_plot(plot_dir, plot_kind);
    if (*defaults) {
      if (defaults_kind.empty()) {
        linenet::print_defaults(std::cout);
      } else {
        std::cout << linenet::serialize_scenario(linenet::default_scenario(linenet::parse_kind(defaults_kind)));
      }
      return 0;
    }
    std::cout << app.help();
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return linenet::kExitError;
  }
}
