#pragma once

// Scenario description shared by the game, co-simulation and CLI.
//
// File format: `key = value` lines plus one `segment <start_s> <acc>` line per
// lead-profile segment. Unknown keys are rejected.

#include <string>

#include "hcps/supervisor.hpp"
#include "hcps/vehicle.hpp"

namespace hcps {

struct Scenario {
  WorldState initial;
  Dynamics dynamics;
  SensorErrorModel sensor;
  int horizon = 120;  // decision epochs
  Grid grid;
  SupervisorConfig supervisor;

  void validate() const;
};

/// Lead at 50 m / 12 m/s, follower at 0 m / 15 m/s, destination 300 m, lead
/// brakes at -2 m/s^2 during [5, 8) s, sensor offset 1.
Scenario default_scenario();

Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);
/// Canonical text form; parse_scenario(format_scenario(s)) reproduces s.
std::string format_scenario(const Scenario& s);

/// 64-bit FNV-1a digest of the canonical text form.
std::string scenario_fingerprint(const Scenario& s);

std::string fnv1a_hex(const std::string& text);

}  // namespace hcps
