#include "hcps/vehicle.hpp"

#include <algorithm>
#include <cmath>

#include "hcps/error.hpp"

namespace hcps {

LeadProfile::LeadProfile(std::vector<ProfileSegment> segments) : segments_(std::move(segments)) {
  if (segments_.empty() || segments_.front().start != 0.0)
    throw Error(ErrorKind::RejectedInput, "lead profile must start at t = 0");
  for (std::size_t i = 1; i < segments_.size(); ++i)
    if (!(segments_[i - 1].start < segments_[i].start))
      throw Error(ErrorKind::RejectedInput, "lead profile segment times must strictly increase");
}

double LeadProfile::acceleration_at(double t) const {
  double acc = segments_.front().acc;
  for (const auto& s : segments_) {
    if (s.start <= t) acc = s.acc;
    else break;
  }
  return acc;
}

namespace {

VehicleState advance(const VehicleState& v, double acc, double dt, double v_max) {
  VehicleState n;
  n.pos = v.pos + v.vel * dt;
  n.vel = std::clamp(v.vel + acc * dt, 0.0, v_max);
  n.acc = acc;
  return n;
}

}  // namespace

WorldState step_world(const WorldState& w, double follow_acc, double dt, const LeadProfile& lead,
                      double v_max) {
  if (!(dt > 0)) throw Error(ErrorKind::RejectedInput, "time step must be positive");
  WorldState n = w;
  n.lead = advance(w.lead, lead.acceleration_at(w.t), dt, v_max);
  n.follow = advance(w.follow, follow_acc, dt, v_max);
  n.t = w.t + dt;
  return n;
}

double compute_thw(const WorldState& w) {
  const double gap = w.gap();
  if (gap < 0) throw Error(ErrorKind::Collision, "follower is past the lead vehicle");
  if (w.follow.vel <= 0) return kInfinity;
  return gap / w.follow.vel;
}

double compute_ttc(const WorldState& w) {
  const double gap = w.gap();
  if (gap < 0) throw Error(ErrorKind::Collision, "follower is past the lead vehicle");
  const double closing = w.follow.vel - w.lead.vel;
  if (closing <= 0) return kInfinity;
  return gap / closing;
}

int quantize_thw(double thw, const std::vector<double>& boundaries) {
  int level = 1;
  for (double b : boundaries)
    if (thw >= b) ++level;
  return level;
}

std::vector<int> sensor_perturb(int level, const SensorErrorModel& model, int num_levels) {
  if (level < 1 || level > num_levels)
    throw Error(ErrorKind::RejectedInput, "level " + std::to_string(level) + " out of range");
  if (model.max_level_offset < 0) throw Error(ErrorKind::RejectedInput, "negative sensor offset");
  std::vector<int> out;
  const int lo = std::max(1, level - model.max_level_offset);
  const int hi = std::min(num_levels, level + model.max_level_offset);
  for (int l = lo; l <= hi; ++l) out.push_back(l);
  return out;
}

std::int64_t Grid::pos_index(double pos) const { return std::llround(pos / pos_step); }
std::int64_t Grid::vel_index(double vel) const { return std::llround(vel / vel_step); }
double Grid::snap_pos(double pos) const { return static_cast<double>(pos_index(pos)) * pos_step; }
double Grid::snap_vel(double vel) const { return static_cast<double>(vel_index(vel)) * vel_step; }

WorldState snap_to_grid(const WorldState& w, const Grid& g) {
  WorldState s = w;
  s.lead.pos = g.snap_pos(w.lead.pos);
  s.lead.vel = g.snap_vel(w.lead.vel);
  s.follow.pos = g.snap_pos(w.follow.pos);
  s.follow.vel = g.snap_vel(w.follow.vel);
  return s;
}

}  // namespace hcps
