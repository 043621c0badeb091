#pragma once

#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "qgkd/protocol.hpp"

// Configuration front end: JSON scenario documents with angle literals,
// environment-variable overrides, and named payoff-matrix generators.
namespace qgkd {

// Everything one CLI invocation needs. `session` carries the regime, matrix,
// disclosure, mode and adversary; the remaining fields steer the commands.
struct ScenarioConfig {
  SessionConfig session;
  std::uint64_t seed = 1;
  // Fixed strategy C values; when absent, commands draw seeded random ones.
  std::optional<std::array<double, 3>> fixed_C;
  // Payoff-table sweep over random (gamma, delta) instead of a named regime.
  bool general_regime = false;
  // Explicit (gamma, delta) for the payoff table; overrides the regime.
  std::optional<EntanglementConfig> entanglement;
  int table_rows = 25;          // rows emitted by the payoff table command
  std::string out_dir = ".";
  std::string echo;             // canonical dump of the effective document
};

// "0.75", "pi", "pi/4", "3pi/4", "-pi/2" -> radians. Throws std::invalid_argument.
double parse_angle(const std::string& text);
double parse_angle(const nlohmann::json& value);  // number or literal string
inline double parse_angle(const char* text) { return parse_angle(std::string(text)); }

// Named reproducible matrix sources. spec example:
//   {"generator": "case-i", "seed": 5}   or   {"entries": [[..8..],[..],[..]]}
// Generators: case-i, case-ii, case-iii, partial-sym-i, partial-sym-ii,
// partial-sym-iii, not-dual, generic.
PayoffMatrix matrix_from_spec(const nlohmann::json& spec);

// QGKD_-prefixed variables override document fields before parsing. The
// variable name is the uppercased field path with "__" between levels:
//   QGKD_SEED=9  QGKD_MATRIX__SEED=3  QGKD_EAVESDROP__P=0.25
// Values are parsed as JSON when possible, otherwise taken as strings.
void apply_env_overrides(nlohmann::json& doc,
                         const std::map<std::string, std::string>& env);

ScenarioConfig parse_scenario(nlohmann::json doc,
                              const std::map<std::string, std::string>& env = {});
ScenarioConfig load_scenario(const std::string& path,
                             const std::map<std::string, std::string>& env = {});

// The process environment filtered to the QGKD_ prefix.
std::map<std::string, std::string> scenario_env_from_process();

}  // namespace qgkd
