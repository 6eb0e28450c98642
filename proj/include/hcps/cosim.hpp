#pragma once

// Closed-loop validation of a synthesized strategy against the full driver
// SUL, trace monitoring, and the counterexample-driven refinement loop.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "hcps/game.hpp"
#include "hcps/learner.hpp"

namespace hcps {

struct TraceRow {
  double t = 0.0;
  WorldState world;
  double thw = 0.0;
  double ttc = 0.0;
  Mode mode = Mode::Nominal;
  double driver_acc = 0.0;
  double applied_acc = 0.0;
  ControllerAction action = ControllerAction::None;
  std::vector<Rule> rule_chain;
  int perceived_level = 0;
  bool lookup_miss = false;
};

struct SimTrace {
  std::vector<TraceRow> rows;
  WorldState final_world;
  std::size_t lookup_misses = 0;

  /// Perceived levels as input indices, one per row.
  Word stimuli() const;
};

/// Maps concrete SUL states onto HM states by replaying every HM state's
/// access word on a fresh SUL.
class HmProjection {
 public:
  HmProjection(const MealyMachine& hm, const DriverParams& params);
  std::optional<StateId> project(const DriverState& s) const;
  std::size_t size() const { return table_.size(); }

 private:
  std::vector<std::pair<DriverState, StateId>> table_;
};

/// Chooses the controller action for a controller-turn state; nullopt is a
/// lookup miss.
using ControlPolicy = std::function<std::optional<ControlAction>(const GameState&)>;

/// Policy backed by a strategy file. Throws RejectedInput when the file was
/// synthesized for another scenario or HM.
ControlPolicy strategy_policy(const StrategyFile& f, const Scenario& sc, const MealyMachine& hm);

/// Every epoch: sample the perceived level, query the SUL (after a pending
/// hint), project onto the HM, look the action up and advance the world.
/// Misses fall back to Intervention at the acceleration floor.
SimTrace execute(const ControlPolicy& policy, const HmProjection& projection, DriverSul& sul,
                 const Scenario& sc, std::uint64_t seed);

enum class VerdictStatus {
  SafeAndReached,
  SafetyViolation,
  GoalNotReached,
  MinInterventionViolation,
  ResponseViolation
};

const char* to_string(VerdictStatus s);

struct Verdict {
  VerdictStatus status = VerdictStatus::SafeAndReached;
  std::optional<std::size_t> witness;  // row index; rows.size() means the final state

  bool pass() const { return status == VerdictStatus::SafeAndReached; }
};

/// Safety, reachability, minimal intervention, response; first failure wins.
Verdict monitor(const SimTrace& trace, double dest, const HazardThresholds& th);

std::string trace_csv(const SimTrace& trace);

struct RefineResult {
  MealyMachine hm;
  std::size_t distinguishing = 0;  // sequences on which HM and SUL disagree
  std::size_t injected = 0;        // of those, still open after re-closing the table
  std::vector<std::string> skipped;  // one diagnostic per skipped sequence
};

/// Rebuilds an observation table on the HM's access words, injects the
/// shortest distinguishing prefix of every stimulus sequence as a
/// counterexample and resumes L*. Sequences on which HM and SUL agree are
/// skipped with a diagnostic.
RefineResult refine(const MealyMachine& hm, const std::vector<Word>& stimuli, Sul& sul,
                    const EquivalenceOracle& oracle, const LearnConfig& cfg);

enum class Termination { AllPass, MaxIterations, Stable, Unrealizable };

const char* to_string(Termination t);

struct RefineLoopConfig {
  Scenario scenario;
  DriverParams driver;
  LearnConfig learn;
  /// Distinct-row budget for the first HM only; 0 learns to convergence.
  std::size_t initial_max_states = 0;
  Variant variant = Variant::Full;
  /// When set, an unrealizable iteration retries with this variant instead of
  /// stopping.
  std::optional<Variant> expanded_variant;
  std::size_t runs = 25;
  std::size_t max_iterations = 10;
  std::size_t state_cap = 2'000'000;
  std::uint64_t seed = 0;
};

struct IterationRecord {
  std::size_t index = 0;
  Variant variant = Variant::Full;
  std::size_t hm_states = 0;
  std::size_t hm_transitions = 0;
  ArenaStats arena;
  std::vector<Verdict> verdicts;
  std::size_t lookup_misses = 0;
  std::size_t distinguishing = 0;
  std::size_t injected = 0;
  std::size_t skipped = 0;

  bool all_pass() const;
};

struct RefinementReport {
  std::string scenario_fingerprint;
  std::uint64_t seed = 0;
  std::vector<IterationRecord> iterations;
  Termination termination = Termination::MaxIterations;
};

/// What an iteration produced, handed to an observer for persisting.
struct IterationArtifacts {
  const IterationRecord& record;
  const MealyMachine& hm;
  const StrategyFile* strategy;  // null when unrealizable
  const std::vector<SimTrace>& traces;
};

RefinementReport refine_loop(const RefineLoopConfig& cfg,
                             const std::function<void(const IterationArtifacts&)>& observer = {});

std::string format_report(const RefinementReport& r);

/// Seed of validation run `run` in iteration `iteration`.
std::uint64_t run_seed(std::uint64_t seed, std::size_t iteration, std::size_t run);

}  // namespace hcps
