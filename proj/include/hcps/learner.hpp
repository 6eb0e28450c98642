#pragma once

// Angluin-style L* for Mealy machines.
//
// The observation table keeps a prefix-closed set S of access words, a suffix
// set E (seeded with every single input), and for each prefix in S and S.Sigma
// the outputs emitted while reading each suffix. Counterexamples are handled
// the classic way: every prefix is added to S.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hcps/automata.hpp"

namespace hcps {

/// System under learning: resettable, deterministic, one output per input.
class Sul {
 public:
  virtual ~Sul() = default;
  virtual const Alphabet& inputs() const = 0;
  virtual void reset() = 0;
  virtual Symbol step(std::size_t input) = 0;
};

/// Wraps a Mealy machine as a SUL (test fixtures, refinement replay).
class MealySul final : public Sul {
 public:
  explicit MealySul(MealyMachine m) : m_(std::move(m)), s_(m_.initial()) {}
  const Alphabet& inputs() const override { return m_.inputs(); }
  void reset() override { s_ = m_.initial(); }
  Symbol step(std::size_t input) override;

 private:
  MealyMachine m_;
  StateId s_;
};

/// Counts resets (membership queries) and steps of an underlying SUL.
class CountingSul final : public Sul {
 public:
  explicit CountingSul(Sul& inner) : inner_(inner) {}
  const Alphabet& inputs() const override { return inner_.inputs(); }
  void reset() override {
    ++resets_;
    inner_.reset();
  }
  Symbol step(std::size_t input) override {
    ++steps_;
    return inner_.step(input);
  }
  std::uint64_t resets() const { return resets_; }
  std::uint64_t steps() const { return steps_; }

 private:
  Sul& inner_;
  std::uint64_t resets_ = 0;
  std::uint64_t steps_ = 0;
};

/// Outputs of `w` from a fresh reset.
std::vector<Symbol> query(Sul& sul, const Word& w);

using Row = std::vector<std::vector<Symbol>>;

class ObservationTable {
 public:
  /// S = {epsilon}, E = all single-input suffixes.
  explicit ObservationTable(Alphabet inputs);
  /// Explicit S and E; S must be prefix-closed and E non-empty.
  ObservationTable(Alphabet inputs, std::vector<Word> prefixes, std::vector<Word> suffixes);

  const Alphabet& inputs() const { return inputs_; }
  const std::vector<Word>& prefixes() const { return s_; }
  const std::vector<Word>& suffixes() const { return e_; }

  bool has_prefix(const Word& w) const;
  /// Appends `w` to S if absent; returns whether it was added.
  bool add_prefix(const Word& w);
  bool add_suffix(const Word& e);

  /// Every word of S and S.Sigma, S first, in insertion order.
  std::vector<Word> all_rows() const;

  bool filled() const;
  /// Cell outputs for (prefix, suffix index); throws when missing.
  const std::vector<Symbol>& cell(const Word& prefix, std::size_t suffix) const;
  const Row& row(const Word& prefix) const;
  void set_cell(const Word& prefix, std::size_t suffix, std::vector<Symbol> outputs);
  std::size_t filled_columns(const Word& prefix) const;

  /// Number of distinct rows over S (hypothesis state count).
  std::size_t distinct_rows() const;

 private:
  Alphabet inputs_;
  std::vector<Word> s_;
  std::vector<Word> e_;
  std::map<Word, Row> rows_;
};

/// Populates every missing cell with reset + prefix + suffix. Returns the
/// number of membership queries issued.
std::size_t fill(ObservationTable& table, Sul& sul);

/// Repairs closedness; returns whether S changed.
bool close(ObservationTable& table, Sul& sul);

/// Repairs consistency; returns whether E changed.
bool make_consistent(ObservationTable& table, Sul& sul);

bool is_closed(const ObservationTable& table);
bool is_consistent(const ObservationTable& table);

/// States are the distinct rows of S, in order of first occurrence.
MealyMachine build_hypothesis(const ObservationTable& table);

/// Hypothesis from a table that may be unclosed: successor rows without a
/// representative are sent to the S-row agreeing on the most cells (earliest
/// on ties). Used only for budget-truncated learning.
MealyMachine build_bounded_hypothesis(const ObservationTable& table);

/// Adds all prefixes of `ce` to S, then refills, closes and makes consistent.
/// Throws ContractViolation when `ce` does not distinguish the current
/// hypothesis from the SUL.
void process_counterexample(ObservationTable& table, const Word& ce, Sul& sul);

struct EqOracleConfig {
  std::size_t num_walks = 500;
  std::size_t max_walk_len = 20;
  double reset_prob = 0.09;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

/// Random walks from reset; each step ends the walk with probability
/// reset_prob. Returns the first diverging input prefix.
std::optional<Word> random_walk_eq(Sul& sul, const MealyMachine& hyp, const EqOracleConfig& cfg);

using EquivalenceOracle = std::function<std::optional<Word>(const MealyMachine&)>;

struct LearnConfig {
  EqOracleConfig oracle;
  std::size_t max_rounds = 100;
  /// 0 = unbounded. Otherwise closure stops once S has this many distinct
  /// rows and the hypothesis is built with build_bounded_hypothesis.
  std::size_t max_states = 0;
};

struct LearnStats {
  std::size_t rounds = 0;
  std::uint64_t membership_queries = 0;
  std::uint64_t steps = 0;
  std::size_t equivalence_queries = 0;
  std::vector<std::size_t> states_per_round;
};

struct LearnResult {
  MealyMachine hm;
  LearnStats stats;
  bool converged = false;
  ObservationTable table;
};

LearnResult learn(Sul& sul, const LearnConfig& cfg);
LearnResult learn(Sul& sul, const EquivalenceOracle& oracle, const LearnConfig& cfg);

/// Continues L* from an existing table, first injecting `counterexamples`.
LearnResult resume_learning(ObservationTable table, const std::vector<Word>& counterexamples,
                            Sul& sul, const EquivalenceOracle& oracle, const LearnConfig& cfg);

/// Exact oracle against a known machine (used in tests and for exactness checks).
EquivalenceOracle exact_oracle(const MealyMachine& target);
EquivalenceOracle random_walk_oracle(Sul& sul, const EqOracleConfig& cfg);

/// Learning report: a CSV header line plus one row.
std::string learn_report_csv(const LearnResult& r);

}  // namespace hcps
