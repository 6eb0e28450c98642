#pragma once

// Longitudinal car-following world at a fixed decision epoch.

#include <cstdint>
#include <limits>
#include <vector>

namespace hcps {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct VehicleState {
  double pos = 0.0;  // m
  double vel = 0.0;  // m/s
  double acc = 0.0;  // m/s^2
};

struct ProfileSegment {
  double start = 0.0;  // s
  double acc = 0.0;    // m/s^2
};

/// Piecewise-constant lead acceleration; segment starts strictly increase
/// from 0.
class LeadProfile {
 public:
  LeadProfile() : segments_{{0.0, 0.0}} {}
  explicit LeadProfile(std::vector<ProfileSegment> segments);

  double acceleration_at(double t) const;
  const std::vector<ProfileSegment>& segments() const { return segments_; }

 private:
  std::vector<ProfileSegment> segments_;
};

struct WorldState {
  VehicleState lead;
  VehicleState follow;
  double t = 0.0;
  double dest = 0.0;

  double gap() const { return lead.pos - follow.pos; }
};

struct SensorErrorModel {
  int max_level_offset = 0;
};

/// Explicit Euler with positions advanced by the old velocity; speeds are
/// clamped to [0, v_max].
WorldState step_world(const WorldState& w, double follow_acc, double dt, const LeadProfile& lead,
                      double v_max = 40.0);

/// Everything step_world needs besides the state itself.
struct Dynamics {
  LeadProfile lead;
  double dt = 0.5;
  double v_max = 40.0;
};

inline WorldState step_world(const WorldState& w, double follow_acc, const Dynamics& d) {
  return step_world(w, follow_acc, d.dt, d.lead, d.v_max);
}

/// Gap over follower speed; +inf when the follower stands still. Throws
/// ErrorKind::Collision on a negative gap.
double compute_thw(const WorldState& w);

/// Gap over closing speed; +inf when the follower is not closing in.
double compute_ttc(const WorldState& w);

/// Level 1 + number of boundaries <= thw (half-open bins); +inf is the top level.
int quantize_thw(double thw, const std::vector<double>& boundaries);

/// Every level within max_level_offset of `level`, clamped to [1, num_levels],
/// ascending and without duplicates.
std::vector<int> sensor_perturb(int level, const SensorErrorModel& model, int num_levels);

/// Position/velocity lattice used by the game arena.
struct Grid {
  double pos_step = 0.25;  // m
  double vel_step = 0.5;   // m/s

  std::int64_t pos_index(double pos) const;
  std::int64_t vel_index(double vel) const;
  double snap_pos(double pos) const;
  double snap_vel(double vel) const;
};

WorldState snap_to_grid(const WorldState& w, const Grid& g);

}  // namespace hcps
