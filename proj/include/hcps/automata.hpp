#pragma once

// Deterministic, input-complete Mealy machines over opaque symbol alphabets.
//
// Symbols are plain strings without whitespace. Inputs and outputs are stored
// by index into their alphabets; machines are immutable values after
// construction. State ids are dense; `canonicalize` renumbers them in BFS
// order from the initial state (inputs visited in alphabet order).

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace hcps {

using Symbol = std::string;
using StateId = std::size_t;

/// Sequence of input indices into a machine's input alphabet.
using Word = std::vector<std::size_t>;

class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::vector<Symbol> symbols);

  std::size_t size() const { return symbols_.size(); }
  bool empty() const { return symbols_.empty(); }
  const Symbol& operator[](std::size_t i) const { return symbols_[i]; }
  const std::vector<Symbol>& symbols() const { return symbols_; }

  std::optional<std::size_t> index_of(std::string_view symbol) const;
  std::size_t require_index(std::string_view symbol) const;

  bool operator==(const Alphabet& other) const { return symbols_ == other.symbols_; }

 private:
  std::vector<Symbol> symbols_;
  std::unordered_map<Symbol, std::size_t> index_;
};

class MealyMachine {
 public:
  /// `next` and `out` are row-major tables of size num_states * |inputs|.
  MealyMachine(Alphabet inputs, Alphabet outputs, std::size_t num_states,
               StateId initial, std::vector<StateId> next,
               std::vector<std::size_t> out);

  const Alphabet& inputs() const { return inputs_; }
  const Alphabet& outputs() const { return outputs_; }
  std::size_t num_states() const { return num_states_; }
  std::size_t num_transitions() const { return next_.size(); }
  StateId initial() const { return initial_; }

  StateId next(StateId s, std::size_t input) const {
    return next_[s * inputs_.size() + input];
  }
  std::size_t output(StateId s, std::size_t input) const {
    return out_[s * inputs_.size() + input];
  }
  const Symbol& output_symbol(StateId s, std::size_t input) const {
    return outputs_[output(s, input)];
  }

  bool operator==(const MealyMachine& other) const = default;

 private:
  Alphabet inputs_;
  Alphabet outputs_;
  std::size_t num_states_ = 0;
  StateId initial_ = 0;
  std::vector<StateId> next_;
  std::vector<std::size_t> out_;
};

struct StepResult {
  StateId state;
  std::size_t output;
};

StepResult step(const MealyMachine& m, StateId s, std::size_t input);
std::pair<StateId, Symbol> step(const MealyMachine& m, StateId s, std::string_view input);

/// Output symbols emitted while reading `w` from the initial state.
std::vector<Symbol> run(const MealyMachine& m, const Word& w);
/// State reached after reading `w` from the initial state.
StateId reach(const MealyMachine& m, const Word& w);

Word parse_word(const Alphabet& inputs, const std::vector<std::string>& symbols);
std::string format_word(const Alphabet& inputs, const Word& w);

/// Renumbers states in BFS order and drops unreachable ones.
MealyMachine canonicalize(const MealyMachine& m);

/// Shortest access word of every state (BFS, inputs in alphabet order).
std::vector<Word> access_words(const MealyMachine& m);

/// Moore partition refinement; result is canonical.
MealyMachine minimize(const MealyMachine& m);

struct EquivalenceVerdict {
  std::optional<Word> counterexample;
  bool equal() const { return !counterexample.has_value(); }
};

/// Exact equivalence by BFS over the product machine. A counterexample is the
/// shortlex-least distinguishing word. Outputs are compared as symbols, so the
/// two machines may index their output alphabets differently.
EquivalenceVerdict equivalent(const MealyMachine& a, const MealyMachine& b);

std::string to_dot(const MealyMachine& m);

/// Versioned text format:
///   mealy v1 <Q> <Sigma> <Gamma>
///   <one input symbol per line>
///   <one output symbol per line>
///   <src input dst output>   (Q * Sigma lines, state 0 is initial)
std::string serialize(const MealyMachine& m);
MealyMachine parse_mealy(std::string_view text);

MealyMachine load_mealy(const std::string& path);
void save_text(const std::string& path, std::string_view text);
std::string load_text(const std::string& path);

}  // namespace hcps
