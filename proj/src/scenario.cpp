#include "hcps/scenario.hpp"

#include <cstdio>
#include <sstream>

#include "hcps/automata.hpp"
#include "hcps/config.hpp"
#include "hcps/error.hpp"

namespace hcps {

void Scenario::validate() const {
  supervisor.validate();
  if (!(dynamics.dt > 0 && dynamics.v_max > 0))
    throw Error(ErrorKind::RejectedInput, "dt and v_max must be positive");
  if (!(initial.gap() > 0)) throw Error(ErrorKind::RejectedInput, "initial gap must be positive");
  if (initial.t < 0) throw Error(ErrorKind::RejectedInput, "initial time must be non-negative");
  if (initial.lead.vel < 0 || initial.follow.vel < 0)
    throw Error(ErrorKind::RejectedInput, "initial speeds must be non-negative");
  if (sensor.max_level_offset < 0) throw Error(ErrorKind::RejectedInput, "negative sensor offset");
  if (horizon < 0) throw Error(ErrorKind::RejectedInput, "negative horizon");
  if (!(grid.pos_step > 0 && grid.vel_step > 0))
    throw Error(ErrorKind::RejectedInput, "grid steps must be positive");
}

Scenario default_scenario() {
  Scenario s;
  s.initial.lead = {50.0, 12.0, 0.0};
  s.initial.follow = {0.0, 15.0, 0.0};
  s.initial.dest = 300.0;
  s.dynamics.lead = LeadProfile({{0.0, 0.0}, {5.0, -2.0}, {8.0, 0.0}});
  s.sensor.max_level_offset = 1;
  return s;
}

Scenario parse_scenario(const std::string& text) {
  Scenario s = default_scenario();
  const KeyValues kv = parse_key_values(text);
  auto& th = s.supervisor.thresholds;
  for (const auto& [key, value] : kv.entries) {
    auto num = [&] { return parse_double(key, value); };
    if (key == "lead_pos") s.initial.lead.pos = num();
    else if (key == "lead_vel") s.initial.lead.vel = num();
    else if (key == "follow_pos") s.initial.follow.pos = num();
    else if (key == "follow_vel") s.initial.follow.vel = num();
    else if (key == "dest") s.initial.dest = num();
    else if (key == "dt") s.dynamics.dt = num();
    else if (key == "v_max") s.dynamics.v_max = num();
    else if (key == "sensor_offset") s.sensor.max_level_offset = static_cast<int>(parse_int(key, value));
    else if (key == "horizon") s.horizon = static_cast<int>(parse_int(key, value));
    else if (key == "grid_pos") s.grid.pos_step = num();
    else if (key == "grid_vel") s.grid.vel_step = num();
    else if (key == "thw_warn") th.thw_warn = num();
    else if (key == "ttc_warn") th.ttc_warn = num();
    else if (key == "thw_min") th.thw_min = num();
    else if (key == "ttc_min") th.ttc_min = num();
    else if (key == "thw_safe") th.thw_safe = num();
    else if (key == "ttc_safe") th.ttc_safe = num();
    else if (key == "acc_floor") s.supervisor.acc_floor = num();
    else if (key == "acc_cap") s.supervisor.acc_cap = num();
    else if (key == "lookahead") s.supervisor.lookahead_steps = static_cast<int>(parse_int(key, value));
    else throw Error(ErrorKind::Parse, "unknown scenario key '" + key + "'");
  }
  if (!kv.records.empty()) {
    std::vector<ProfileSegment> segs;
    for (const auto& rec : kv.records) {
      std::istringstream is(rec);
      std::string tag, start, acc, extra;
      if (!(is >> tag >> start >> acc) || tag != "segment" || (is >> extra))
        throw Error(ErrorKind::Parse, "expected 'segment <start> <acc>', got '" + rec + "'");
      segs.push_back({parse_double("segment", start), parse_double("segment", acc)});
    }
    s.dynamics.lead = LeadProfile(std::move(segs));
  }
  s.validate();
  return s;
}

Scenario load_scenario(const std::string& path) { return parse_scenario(load_text(path)); }

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string format_scenario(const Scenario& s) {
  std::ostringstream os;
  const auto& th = s.supervisor.thresholds;
  os << "lead_pos = " << num(s.initial.lead.pos) << '\n'
     << "lead_vel = " << num(s.initial.lead.vel) << '\n'
     << "follow_pos = " << num(s.initial.follow.pos) << '\n'
     << "follow_vel = " << num(s.initial.follow.vel) << '\n'
     << "dest = " << num(s.initial.dest) << '\n'
     << "dt = " << num(s.dynamics.dt) << '\n'
     << "v_max = " << num(s.dynamics.v_max) << '\n'
     << "sensor_offset = " << s.sensor.max_level_offset << '\n'
     << "horizon = " << s.horizon << '\n'
     << "grid_pos = " << num(s.grid.pos_step) << '\n'
     << "grid_vel = " << num(s.grid.vel_step) << '\n'
     << "thw_warn = " << num(th.thw_warn) << '\n'
     << "ttc_warn = " << num(th.ttc_warn) << '\n'
     << "thw_min = " << num(th.thw_min) << '\n'
     << "ttc_min = " << num(th.ttc_min) << '\n'
     << "thw_safe = " << num(th.thw_safe) << '\n'
     << "ttc_safe = " << num(th.ttc_safe) << '\n'
     << "acc_floor = " << num(s.supervisor.acc_floor) << '\n'
     << "acc_cap = " << num(s.supervisor.acc_cap) << '\n'
     << "lookahead = " << s.supervisor.lookahead_steps << '\n';
  for (const auto& seg : s.dynamics.lead.segments())
    os << "segment " << num(seg.start) << ' ' << num(seg.acc) << '\n';
  return os.str();
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string scenario_fingerprint(const Scenario& s) { return fnv1a_hex(format_scenario(s)); }

}  // namespace hcps
