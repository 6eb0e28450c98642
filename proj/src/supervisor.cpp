#include "hcps/supervisor.hpp"

#include <algorithm>

#include "hcps/error.hpp"

namespace hcps {

void HazardThresholds::validate() const {
  if (!(thw_min < thw_warn && thw_warn <= thw_safe))
    throw Error(ErrorKind::RejectedInput, "need thw_min < thw_warn <= thw_safe");
  if (!(ttc_min < ttc_warn && ttc_warn <= ttc_safe))
    throw Error(ErrorKind::RejectedInput, "need ttc_min < ttc_warn <= ttc_safe");
}

void SupervisorConfig::validate() const {
  thresholds.validate();
  if (!(acc_floor <= acc_cap && acc_cap < 0))
    throw Error(ErrorKind::RejectedInput, "need acc_floor <= acc_cap < 0");
  if (lookahead_steps != 1 && lookahead_steps != 2)
    throw Error(ErrorKind::RejectedInput, "lookahead_steps must be 1 or 2");
}

const char* to_string(Mode m) {
  switch (m) {
    case Mode::Nominal: return "Nominal";
    case Mode::Advisory: return "Advisory";
    case Mode::Intervention: return "Intervention";
  }
  return "?";
}

Mode parse_mode(const std::string& s) {
  if (s == "Nominal") return Mode::Nominal;
  if (s == "Advisory") return Mode::Advisory;
  if (s == "Intervention") return Mode::Intervention;
  throw Error(ErrorKind::Parse, "unknown mode '" + s + "'");
}

const char* to_string(ControllerAction a) {
  switch (a) {
    case ControllerAction::None: return "none";
    case ControllerAction::Hint: return "hint";
    case ControllerAction::Override: return "override";
  }
  return "?";
}

bool risk_warn(double thw, double ttc, const HazardThresholds& th) {
  return thw < th.thw_warn || ttc < th.ttc_warn;
}

bool risk_filter(double thw, double ttc, const HazardThresholds& th) {
  return thw < th.thw_min || ttc < th.ttc_min;
}

bool safe_now(double thw, double ttc, const HazardThresholds& th) {
  return thw >= th.thw_safe && ttc >= th.ttc_safe;
}

RiskAssessment predict_risk(const WorldState& w, double driver_acc, const SupervisorConfig& cfg,
                            const Dynamics& dyn) {
  RiskAssessment r;
  WorldState x = w;
  for (int i = 0; i <= cfg.lookahead_steps; ++i) {
    if (i > 0) x = step_world(x, driver_acc, dyn);
    if (x.gap() < 0) return {true, true};
    const double thw = compute_thw(x);
    const double ttc = compute_ttc(x);
    r.warn |= risk_warn(thw, ttc, cfg.thresholds);
    r.filter |= risk_filter(thw, ttc, cfg.thresholds);
  }
  return r;
}

Mode mode_transition(Mode current, bool warn, bool filter, bool safe) {
  if (filter) return Mode::Intervention;
  if (warn) return Mode::Advisory;
  if (safe) return Mode::Nominal;
  return current;
}

Arbitration arbitrate(Mode m, double driver_acc, const SupervisorConfig& cfg) {
  switch (m) {
    case Mode::Nominal: return {driver_acc, ControllerAction::None};
    case Mode::Advisory: return {driver_acc, ControllerAction::Hint};
    case Mode::Intervention:
      return {std::clamp(driver_acc, cfg.acc_floor, cfg.acc_cap), ControllerAction::Override};
  }
  return {driver_acc, ControllerAction::None};
}

bool consistent_with_arbitration(Mode m, double driver_acc, double applied,
                                 const SupervisorConfig& cfg) {
  if (m == Mode::Intervention) return applied >= cfg.acc_floor && applied <= cfg.acc_cap;
  return applied == driver_acc;
}

ModeGuards enabled_modes(Mode current, const RiskAssessment& predicted, bool safe) {
  ModeGuards g;
  g.advisory = predicted.warn || (current != Mode::Nominal && !safe);
  g.intervention = !safe && (predicted.filter || current == Mode::Intervention);
  return g;
}

}  // namespace hcps
