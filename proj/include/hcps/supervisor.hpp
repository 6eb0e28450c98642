#pragma once

// Three-mode shared-control supervisor: hazard predicates, short-horizon risk
// prediction, mode switching with hysteresis, and acceleration arbitration.

#include <string>

#include "hcps/vehicle.hpp"

namespace hcps {

struct HazardThresholds {
  double thw_warn = 1.5;
  double ttc_warn = 2.0;
  double thw_min = 1.2;
  double ttc_min = 1.0;
  double thw_safe = 2.0;
  double ttc_safe = 3.0;

  void validate() const;
};

enum class Mode { Nominal, Advisory, Intervention };

const char* to_string(Mode m);
Mode parse_mode(const std::string& s);

enum class ControllerAction { None, Hint, Override };

const char* to_string(ControllerAction a);

struct SupervisorConfig {
  HazardThresholds thresholds;
  double acc_floor = -3.0;
  double acc_cap = -1.0;
  int lookahead_steps = 2;

  void validate() const;
};

bool risk_warn(double thw, double ttc, const HazardThresholds& th);
bool risk_filter(double thw, double ttc, const HazardThresholds& th);
bool safe_now(double thw, double ttc, const HazardThresholds& th);

struct RiskAssessment {
  bool warn = false;
  bool filter = false;
};

/// Predicates over the current state and `lookahead_steps` epochs rolled out
/// under `driver_acc`. A predicted collision counts as both warn and filter.
RiskAssessment predict_risk(const WorldState& w, double driver_acc, const SupervisorConfig& cfg,
                            const Dynamics& dyn);

/// filter -> Intervention; else warn -> Advisory; else safe -> Nominal;
/// otherwise stay (hysteresis band).
Mode mode_transition(Mode current, bool warn, bool filter, bool safe);

struct Arbitration {
  double applied_acc;
  ControllerAction action;
};

/// Nominal passes through, Advisory passes through with a hint, Intervention
/// clamps into [acc_floor, acc_cap].
Arbitration arbitrate(Mode m, double driver_acc, const SupervisorConfig& cfg);

/// Whether `applied` is a legal outcome of `mode`: equal to the driver's
/// acceleration outside Intervention, within [floor, cap] inside it.
bool consistent_with_arbitration(Mode m, double driver_acc, double applied,
                                 const SupervisorConfig& cfg);

/// Modes the controller may select at a decision point.
///   Nominal      always;
///   Advisory     on predicted warn, or to stay above Nominal while not SafeNow;
///   Intervention on predicted filter or to stay in Intervention, never while SafeNow.
struct ModeGuards {
  bool nominal = true;
  bool advisory = false;
  bool intervention = false;
};

ModeGuards enabled_modes(Mode current, const RiskAssessment& predicted, bool safe);

}  // namespace hcps
