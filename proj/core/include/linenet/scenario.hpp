#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "linenet/experiments.hpp"

namespace linenet {

enum class ExperimentKind {
  diameter_tail,
  route_length,
  long_distance,
  nested_balls,
  direction_clumping,
  uniqueness_gap,
  coupled_points,
  net_path,
};

std::string_view to_string(ExperimentKind k);
ExperimentKind parse_kind(std::string_view name);
const std::vector<ExperimentKind>& all_kinds();

// One row of the defaults table.
struct KeySpec {
  std::string section;
  std::string key;
  std::string value;  // default, canonical text
  std::string help;
  bool artifact = false;  // stands in for a constant the model leaves open
};

// Keys accepted for a kind, in serialization order, with that kind's defaults.
std::vector<KeySpec> key_table(ExperimentKind kind);

// Validated sectioned key=value scenario. Values are kept as canonical text;
// the typed accessors below convert on demand.
class Scenario {
 public:
  ExperimentKind kind() const { return kind_; }
  std::uint64_t seed() const;
  std::size_t replicates() const;
  int threads() const;
  std::string out() const;

  const std::string& get(const std::string& section, const std::string& key) const;
  double number(const std::string& section, const std::string& key) const;
  long integer(const std::string& section, const std::string& key) const;
  std::vector<double> numbers(const std::string& section, const std::string& key) const;

  // Overrides used by CLI flags; revalidates.
  void set(const std::string& section, const std::string& key, const std::string& value);

  const std::map<std::pair<std::string, std::string>, std::string>& values() const { return values_; }

  DiameterConfig diameter() const;
  RouteConfig route() const;
  LongDistanceConfig long_distance() const;
  NestedBallsConfig nested_balls() const;
  ClumpingConfig clumping() const;
  UniquenessConfig uniqueness() const;
  NetPathExperimentConfig net_path() const;
  ProcessParams process() const;
  NetworkOptions network() const;

  friend Scenario parse_scenario(std::string_view text);
  friend Scenario default_scenario(ExperimentKind kind);

 private:
  void validate() const;

  ExperimentKind kind_ = ExperimentKind::diameter_tail;
  std::map<std::pair<std::string, std::string>, std::string> values_;
};

// Parses INI-style text. Throws Error naming the section/key and the broken
// constraint for unknown keys, malformed values or invalid parameters.
Scenario parse_scenario(std::string_view text);
Scenario default_scenario(ExperimentKind kind);

// Canonical text: every key of the kind in table order. parse(serialize(s))
// reproduces s exactly.
std::string serialize_scenario(const Scenario& s);

// The defaults table of every kind; artifact choices are marked.
void print_defaults(std::ostream& out);

}  // namespace linenet
