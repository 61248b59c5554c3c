#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "ceasefire/circuit.hpp"
#include "ceasefire/four_mode.hpp"
#include "ceasefire/two_mode.hpp"

namespace ceasefire {

using json = nlohmann::json;

// Parsed, defaulted configuration. `resolved` echoes every value actually
// used, including defaults, and is what the manifest digest covers.
struct Config {
  json resolved;

  bool has(const std::string& section) const { return resolved.contains(section); }
  const json& section(const std::string& name) const;
};

Config load_config(const std::string& path);
Config config_from_json(const json& j);

// FNV-1a 64-bit over the canonical serialization.
std::string config_digest(const json& resolved);

TwoModeParams two_mode_from_config(const Config& c);
CircuitSpec circuit_from_config(const Config& c);
DriveSpec drive_from_config(const Config& c);

// Convenience accessors with "missing key: a.b" config errors.
double require_number(const json& j, const std::string& section, const std::string& key);
double number_or(const json& j, const std::string& key, double fallback);

}  // namespace ceasefire
