#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "linenet/scenario.hpp"

namespace linenet {

std::string_view version();

// 64-bit FNV-1a, used for artifact checksums.
std::uint64_t fnv1a(std::string_view bytes);

// Exit codes of run_scenario and the CLI.
inline constexpr int kExitOk = 0;
inline constexpr int kExitStatistical = 1;  // ran, but a run-level check failed
inline constexpr int kExitError = 2;        // exception; failure.json written
inline constexpr int kExitRefused = 3;      // output directory in use

struct RunOptions {
  std::string out;                    // empty: scenario's out
  std::optional<int> threads;         // overrides [experiment] threads
  std::optional<std::uint64_t> seed;  // overrides [experiment] seed
  bool force = false;                 // replace artifacts of an earlier run
};

struct RunReport {
  int exit_code = kExitOk;
  std::string out;
  std::vector<std::string> warnings;
  std::string error;  // set for kExitError and kExitRefused
};

// Runs the experiment and writes, under the output directory:
//   manifest.json   version, kind, seeds, canonical scenario, summary, checksums
//   replicates.csv  one row per replicate
//   summary.csv     key,value
//   plots/*.csv     views computed from replicates.csv
// A `.partial` marker exists while the run is in progress and stays behind if
// it aborts, next to failure.json.
RunReport run_scenario(Scenario scenario, const RunOptions& options = {});

struct VerifyReport {
  bool ok = true;
  std::vector<std::string> problems;
};

// Recomputes every checksum listed in the manifest and the overall checksum.
VerifyReport verify_run(const std::string& dir);

// Kind recorded in a run's manifest.
ExperimentKind stored_kind(const std::string& dir);

// Regenerates plots/ from replicates.csv and the manifest's scenario. Throws
// Error naming the valid kinds when `kind` does not match the stored run.
// Returns the files written, relative to dir.
std::vector<std::string> emit_plot_data(const std::string& dir, ExperimentKind kind);

}  // namespace linenet
