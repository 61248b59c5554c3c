#include "ceasefire/config.hpp"

#include <fstream>

namespace ceasefire {

namespace {

json defaults() {
  return json{
      // g, h and kappa_m carry the physics and must be stated explicitly;
      // everything else has documented defaults.
      {"two_mode",
       {{"kappa_l", 1.0},
        {"kappa_a", 1e-6},
        {"n_a", 1.0},
        {"n_t", 0.0},
        {"phi", 0.0}}},
      {"quadrature", {{"tol", 1e-9}}},
      {"grid", {{"omega_min", -60.0}, {"omega_max", 60.0}, {"points", 481}}},
      {"scan_map",
       {{"g_min", 10.0},
        {"g_max", 300.0},
        {"g_points", 25},
        {"ratio_min", 1.0},
        {"ratio_max", 120.0},
        {"ratio_points", 37}}},
      {"mismatch",
       {{"sqrt_cg_max", 2.0},
        {"sqrt_ch_max", 2.0},
        {"grid_points", 81},
        {"h", 110.0},
        {"kappa_m", 19.0},
        {"ratio_min", 0.98},
        {"ratio_max", 1.02},
        {"ratio_points", 81}}},
      {"drive", {{"ell_delta", 0.23}, {"ell_sigma", 0.23}, {"phi", 0.0}}},
      {"four_mode", {{"n_t", 0.0}, {"n_a", 1.0}, {"kappa_a", 1e-6}}},
      {"fsr_sweep",
       {{"delta_points", 41},
        {"delta_span_fsr", 0.9},
        {"lengths_cm", json::array({50.0, 55.0, 60.0, 65.0, 70.0})},
        {"window_mhz", 100.0}}},
  };
}

void merge_defaults(json& base, const json& user) {
  for (auto it = user.begin(); it != user.end(); ++it) {
    if (it->is_object() && base.contains(it.key()) && base[it.key()].is_object()) {
      merge_defaults(base[it.key()], *it);
    } else {
      base[it.key()] = *it;
    }
  }
}

}  // namespace

const json& Config::section(const std::string& name) const {
  if (!resolved.contains(name)) {
    throw Error(ErrorKind::config, "missing key: " + name);
  }
  return resolved.at(name);
}

Config config_from_json(const json& j) {
  if (!j.is_object()) {
    throw Error(ErrorKind::config, "config root must be an object");
  }
  json r = defaults();
  merge_defaults(r, j);
  return Config{std::move(r)};
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::io, "cannot open config file: " + path);
  }
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::config, std::string("config parse error: ") + e.what());
  }
  return config_from_json(j);
}

std::string config_digest(const json& resolved) {
  const std::string bytes = resolved.dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

double require_number(const json& j, const std::string& section, const std::string& key) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    throw Error(ErrorKind::config, "missing key: " + section + "." + key);
  }
  return j.at(key).get<double>();
}

double number_or(const json& j, const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) {
    throw Error(ErrorKind::config, "key is not a number: " + key);
  }
  return j.at(key).get<double>();
}

TwoModeParams two_mode_from_config(const Config& c) {
  const json& t = c.section("two_mode");
  try {
    return TwoModeParams(number_or(t, "kappa_l", 1.0),
                         require_number(t, "two_mode", "kappa_m"),
                         require_number(t, "two_mode", "g"),
                         require_number(t, "two_mode", "h"),
                         number_or(t, "kappa_a", 1e-6), number_or(t, "n_a", 1.0),
                         number_or(t, "n_t", 0.0), number_or(t, "phi", 0.0));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::invalid_params) {
      throw Error(ErrorKind::config, std::string("two_mode: ") + e.what());
    }
    throw;
  }
}

CircuitSpec circuit_from_config(const Config& c) {
  const json& cj = c.section("circuit");
  if (!cj.contains("cavity")) throw Error(ErrorKind::config, "missing key: circuit.cavity");
  if (!cj.contains("readout")) throw Error(ErrorKind::config, "missing key: circuit.readout");
  if (!cj.contains("line")) throw Error(ErrorKind::config, "missing key: circuit.line");
  const json& cav = cj.at("cavity");
  const json& ro = cj.at("readout");
  const json& ln = cj.at("line");

  CavitySpec cavity{require_number(cav, "circuit.cavity", "l_a"),
                    require_number(cav, "circuit.cavity", "c_a"),
                    require_number(cav, "circuit.cavity", "c_c"),
                    number_or(cav, "r_a", 0.0)};
  ReadoutSpec readout{require_number(ro, "circuit.readout", "l0"),
                      require_number(ro, "circuit.readout", "c_b"),
                      number_or(ro, "r_b", 0.0)};
  const double z0 = require_number(ln, "circuit.line", "z0");
  const double length = require_number(ln, "circuit.line", "length_m");
  const double v = require_number(ln, "circuit.line", "wave_speed");
  const int cells = static_cast<int>(number_or(ln, "cells", 400));
  try {
    return CircuitSpec::from_geometry(cavity, readout, z0, length, v, cells);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::invalid_params) {
      throw Error(ErrorKind::config, std::string("circuit: ") + e.what());
    }
    throw;
  }
}

DriveSpec drive_from_config(const Config& c) {
  const json& d = c.section("drive");
  DriveSpec drive{require_number(d, "drive", "ell_delta"),
                  require_number(d, "drive", "ell_sigma"), number_or(d, "phi", 0.0)};
  try {
    drive.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::config, std::string("drive: ") + e.what());
  }
  return drive;
}

}  // namespace ceasefire
