#pragma once

// Finite turn-based safety game between the shared-control automation
// (controller) and the driver/environment.
//
// One decision epoch is: the sensor picks a perceived headway level
// (uncontrollable), the learned driver model answers deterministically, the
// controller picks a mode action, physics advances one epoch. Sensor and
// driver are merged into one environment move; physics is folded into the
// controller move.
//
// The objective is the weak-until  A[ not(follow >= lead) W (follow >= dest) ].

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "hcps/automata.hpp"
#include "hcps/driver.hpp"
#include "hcps/scenario.hpp"
#include "hcps/supervisor.hpp"

namespace hcps {

enum class Turn : std::uint8_t { Environment, Controller };

/// World on the arena lattice: grid indices plus the epoch counter.
struct GridWorld {
  std::int32_t step = 0;
  std::int32_t lead_pos = 0;
  std::int32_t lead_vel = 0;
  std::int32_t follow_pos = 0;
  std::int32_t follow_vel = 0;

  bool operator==(const GridWorld&) const = default;
};

struct GameState {
  std::uint32_t driver = 0;  // HM state (after the driver's answer on controller turns)
  Mode mode = Mode::Nominal; // last selected mode
  GridWorld world;
  std::int8_t perceived_level = 0;  // controller turns only
  double driver_acc = 0.0;          // controller turns only
  bool full_deliberation = false;   // controller turns only
  bool hint_pending = false;        // environment turns only
  Turn turn = Turn::Environment;

  bool operator==(const GameState&) const = default;
};

struct GameStateHash {
  std::size_t operator()(const GameState& s) const noexcept;
};

/// Canonical, whitespace-free key; fields in declaration order.
std::string state_key(const GameState& s);

WorldState to_world(const GridWorld& g, const Scenario& sc);
GridWorld to_grid(const WorldState& w, const Scenario& sc, std::int32_t step);

enum class Variant { Full, NoOverride, AdvisoryOnly };

const char* to_string(Variant v);
Variant parse_variant(const std::string& s);

/// Controllable action chosen at a controller node.
struct ControlAction {
  ControllerAction kind = ControllerAction::None;
  double applied_acc = 0.0;  // only meaningful for Override

  Mode mode() const;
  int severity() const { return static_cast<int>(kind); }
  bool operator==(const ControlAction&) const = default;
};

std::string action_name(const ControlAction& a);
ControlAction parse_action(const std::string& name);

struct ActionLabel {
  std::string name;
  bool controllable = false;
};

struct ArenaEdge {
  std::uint32_t action;
  std::uint32_t target;
};

/// Domain payload attached to arenas built from a driving scenario.
struct ArenaDomain {
  Scenario scenario;
  Variant variant = Variant::Full;
  std::vector<GameState> states;  // indexed like arena nodes
  std::size_t approximate_hint_edges = 0;
};

class GameArena {
 public:
  std::size_t size() const { return turn_.size(); }
  std::uint32_t initial() const { return initial_; }
  Turn turn(std::uint32_t n) const { return turn_[n]; }
  bool bad(std::uint32_t n) const { return flags_[n] & kBad; }
  bool goal(std::uint32_t n) const { return flags_[n] & kGoal; }
  std::span<const ArenaEdge> edges(std::uint32_t n) const {
    return {edges_.data() + offsets_[n], edges_.data() + offsets_[n + 1]};
  }
  std::size_t num_edges() const { return edges_.size(); }
  const std::vector<ActionLabel>& actions() const { return actions_; }
  const std::optional<ArenaDomain>& domain() const { return domain_; }

 private:
  friend class ArenaBuilder;
  static constexpr std::uint8_t kBad = 1, kGoal = 2;

  std::vector<Turn> turn_;
  std::vector<std::uint8_t> flags_;
  std::vector<std::size_t> offsets_;
  std::vector<ArenaEdge> edges_;
  std::vector<ActionLabel> actions_;
  std::uint32_t initial_ = 0;
  std::optional<ArenaDomain> domain_;
};

/// Incremental construction. Controller edges are kept in insertion order,
/// which is the preference order used by extract_strategy.
class ArenaBuilder {
 public:
  std::uint32_t add_node(Turn turn, bool bad = false, bool goal = false);
  std::uint32_t action(const std::string& name, bool controllable);
  void add_edge(std::uint32_t src, std::uint32_t action, std::uint32_t dst);
  void set_initial(std::uint32_t n) { initial_ = n; }
  void set_domain(ArenaDomain d) { domain_ = std::move(d); }
  std::size_t size() const { return turn_.size(); }

  /// Validates Sigma_c / Sigma_u disjointness, edge ownership and that every
  /// controller node can move.
  GameArena finish();

 private:
  struct PendingEdge {
    std::uint32_t src, action, dst;
  };
  std::vector<Turn> turn_;
  std::vector<std::uint8_t> flags_;
  std::vector<PendingEdge> edges_;
  std::vector<ActionLabel> actions_;
  std::unordered_map<std::string, std::uint32_t> action_ids_;
  std::uint32_t initial_ = 0;
  std::optional<ArenaDomain> domain_;
};

struct ArenaConfig {
  Variant variant = Variant::Full;
  std::size_t state_cap = 2'000'000;
};

/// Synchronous product of the learned driver model, the lead/follow
/// kinematics on the scenario grid, the sensor error and the supervisor's
/// mode guards. Only the reachable fragment is built.
GameArena build_arena(const MealyMachine& hm, const Scenario& sc, const DriverParams& params,
                      const ArenaConfig& cfg = {});

class WinningRegion {
 public:
  WinningRegion() = default;
  WinningRegion(std::vector<std::uint8_t> member, std::size_t iterations)
      : member_(std::move(member)), iterations_(iterations) {}

  bool contains(std::uint32_t n) const { return n < member_.size() && member_[n]; }
  std::size_t size() const;
  std::size_t iterations() const { return iterations_; }
  const std::vector<std::uint8_t>& members() const { return member_; }

 private:
  std::vector<std::uint8_t> member_;
  std::size_t iterations_ = 0;
};

/// Greatest fixed point: goal nodes win, bad nodes lose, controller nodes
/// need one winning edge, environment nodes need all edges winning.
/// Computed as the backward attractor of the losing set; `iterations` counts
/// the attractor layers.
WinningRegion solve(const GameArena& arena);

bool realizable(const GameArena& arena, const WinningRegion& w);

/// Memoryless choice per controller node.
class Strategy {
 public:
  Strategy() = default;
  explicit Strategy(std::size_t arena_size) : choice_(arena_size, kUnset) {}

  void set(std::uint32_t node, std::uint32_t action) { choice_.at(node) = action; }
  std::optional<std::uint32_t> action_at(std::uint32_t node) const;
  std::size_t size() const;
  std::size_t arena_size() const { return choice_.size(); }

 private:
  static constexpr std::uint32_t kUnset = 0xFFFFFFFFu;
  std::vector<std::uint32_t> choice_;
};

/// For each controller node in W the first edge (in preference order) that
/// stays in W. Throws ContractViolation when the initial node is not in W.
Strategy extract_strategy(const GameArena& arena, const WinningRegion& w);

struct TemplateReport {
  std::size_t reachable_states = 0;
  bool safety = true;
  std::optional<std::uint32_t> safety_witness;
  bool reachability = true;  // every finite maximal play ends in goal
  std::size_t terminal_non_goal = 0;
  bool infinite_plays = false;  // reachable cycle under the strategy
  bool min_intervention = true;
  std::optional<std::uint32_t> min_intervention_witness;
  bool response = true;
  std::optional<std::uint32_t> response_witness;
  std::size_t undefined_choices = 0;  // controller nodes without a usable choice

  bool all_pass() const { return safety && reachability && min_intervention && response; }
};

/// Exhaustive exploration of the plays consistent with `strategy`.
TemplateReport check_templates(const GameArena& arena, const Strategy& strategy);

struct ArenaStats {
  std::size_t states = 0;
  std::size_t environment_states = 0;
  std::size_t controller_states = 0;
  std::size_t edges = 0;
  std::size_t max_uncontrollable_branching = 0;
  std::size_t iterations = 0;
  std::size_t winning = 0;
  bool realizable = false;
};

ArenaStats arena_stats(const GameArena& arena, const WinningRegion& w);
std::string format_arena_stats(const ArenaStats& s);

std::string arena_to_dot(const GameArena& arena, const WinningRegion* w = nullptr,
                         const Strategy* strategy = nullptr);

/// Strategy keyed by canonical state keys, as stored on disk.
struct StrategyFile {
  std::string scenario_fingerprint;
  std::string hm_fingerprint;
  Variant variant = Variant::Full;
  std::vector<std::pair<std::string, std::string>> entries;  // key, action name
};

StrategyFile to_strategy_file(const GameArena& arena, const Strategy& strategy,
                              const MealyMachine& hm);
std::string serialize_strategy(const StrategyFile& f);
StrategyFile parse_strategy(const std::string& text);

std::string hm_fingerprint(const MealyMachine& hm);

}  // namespace hcps
