#include "hcps/learner.hpp"

#include <algorithm>
#include <memory>
#include <set>
#include <sstream>

#include "hcps/error.hpp"
#include "hcps/rng.hpp"

namespace hcps {

Symbol MealySul::step(std::size_t input) {
  auto r = hcps::step(m_, s_, input);
  s_ = r.state;
  return m_.outputs()[r.output];
}

std::vector<Symbol> query(Sul& sul, const Word& w) {
  sul.reset();
  std::vector<Symbol> out;
  out.reserve(w.size());
  for (auto a : w) out.push_back(sul.step(a));
  return out;
}

namespace {

Word concat(const Word& a, const Word& b) {
  Word w = a;
  w.insert(w.end(), b.begin(), b.end());
  return w;
}

Word extend(const Word& a, std::size_t x) {
  Word w = a;
  w.push_back(x);
  return w;
}

}  // namespace

ObservationTable::ObservationTable(Alphabet inputs) : inputs_(std::move(inputs)) {
  s_.push_back({});
  for (std::size_t a = 0; a < inputs_.size(); ++a) e_.push_back({a});
}

ObservationTable::ObservationTable(Alphabet inputs, std::vector<Word> prefixes,
                                   std::vector<Word> suffixes)
    : inputs_(std::move(inputs)) {
  if (suffixes.empty()) throw Error(ErrorKind::ContractViolation, "suffix set must not be empty");
  for (auto& p : prefixes) {
    if (!p.empty()) {
      Word parent(p.begin(), p.end() - 1);
      if (std::find(prefixes.begin(), prefixes.end(), parent) == prefixes.end())
        throw Error(ErrorKind::ContractViolation, "prefix set is not prefix-closed");
    }
    for (auto a : p)
      if (a >= inputs_.size()) throw Error(ErrorKind::RejectedInput, "prefix uses unknown input");
    add_prefix(p);
  }
  if (!has_prefix({})) throw Error(ErrorKind::ContractViolation, "prefix set must contain epsilon");
  for (auto& e : suffixes) {
    if (e.empty()) throw Error(ErrorKind::ContractViolation, "suffixes must be non-empty");
    add_suffix(e);
  }
}

bool ObservationTable::has_prefix(const Word& w) const {
  return std::find(s_.begin(), s_.end(), w) != s_.end();
}

bool ObservationTable::add_prefix(const Word& w) {
  if (has_prefix(w)) return false;
  s_.push_back(w);
  return true;
}

bool ObservationTable::add_suffix(const Word& e) {
  if (std::find(e_.begin(), e_.end(), e) != e_.end()) return false;
  e_.push_back(e);
  return true;
}

std::vector<Word> ObservationTable::all_rows() const {
  std::vector<Word> words = s_;
  std::set<Word> seen(s_.begin(), s_.end());
  for (const auto& s : s_) {
    for (std::size_t a = 0; a < inputs_.size(); ++a) {
      Word w = extend(s, a);
      if (seen.insert(w).second) words.push_back(std::move(w));
    }
  }
  return words;
}

bool ObservationTable::filled() const {
  for (const auto& w : all_rows())
    if (filled_columns(w) < e_.size()) return false;
  return true;
}

std::size_t ObservationTable::filled_columns(const Word& prefix) const {
  auto it = rows_.find(prefix);
  return it == rows_.end() ? 0 : it->second.size();
}

const Row& ObservationTable::row(const Word& prefix) const {
  auto it = rows_.find(prefix);
  if (it == rows_.end() || it->second.size() < e_.size())
    throw Error(ErrorKind::ContractViolation, "row " + format_word(inputs_, prefix) + " not filled");
  return it->second;
}

const std::vector<Symbol>& ObservationTable::cell(const Word& prefix, std::size_t suffix) const {
  auto it = rows_.find(prefix);
  if (it == rows_.end() || suffix >= it->second.size())
    throw Error(ErrorKind::ContractViolation, "cell not filled");
  return it->second[suffix];
}

void ObservationTable::set_cell(const Word& prefix, std::size_t suffix, std::vector<Symbol> outputs) {
  auto& r = rows_[prefix];
  if (suffix != r.size()) throw Error(ErrorKind::ContractViolation, "cells must be filled in column order");
  r.push_back(std::move(outputs));
}

std::size_t ObservationTable::distinct_rows() const {
  std::set<Row> rows;
  for (const auto& s : s_) rows.insert(row(s));
  return rows.size();
}

std::size_t fill(ObservationTable& table, Sul& sul) {
  std::size_t queries = 0;
  for (const auto& w : table.all_rows()) {
    for (std::size_t j = table.filled_columns(w); j < table.suffixes().size(); ++j) {
      const Word& e = table.suffixes()[j];
      auto out = query(sul, concat(w, e));
      ++queries;
      table.set_cell(w, j, std::vector<Symbol>(out.end() - static_cast<std::ptrdiff_t>(e.size()), out.end()));
    }
  }
  return queries;
}

namespace {

// First S.a row with no equal row in S, if any.
std::optional<Word> unclosed_row(const ObservationTable& t) {
  std::set<Row> s_rows;
  for (const auto& s : t.prefixes()) s_rows.insert(t.row(s));
  for (const auto& s : t.prefixes()) {
    for (std::size_t a = 0; a < t.inputs().size(); ++a) {
      Word w = extend(s, a);
      if (!s_rows.count(t.row(w))) return w;
    }
  }
  return std::nullopt;
}

// Distinguishing suffix a.e for the first inconsistency, if any.
std::optional<Word> inconsistency(const ObservationTable& t) {
  const auto& S = t.prefixes();
  for (std::size_t i = 0; i < S.size(); ++i) {
    for (std::size_t j = i + 1; j < S.size(); ++j) {
      if (t.row(S[i]) != t.row(S[j])) continue;
      for (std::size_t a = 0; a < t.inputs().size(); ++a) {
        const Row& r1 = t.row(extend(S[i], a));
        const Row& r2 = t.row(extend(S[j], a));
        for (std::size_t e = 0; e < t.suffixes().size(); ++e) {
          if (r1[e] != r2[e]) return concat(Word{a}, t.suffixes()[e]);
        }
      }
    }
  }
  return std::nullopt;
}

}  // namespace

bool is_closed(const ObservationTable& table) { return !unclosed_row(table); }
bool is_consistent(const ObservationTable& table) { return !inconsistency(table); }

bool close(ObservationTable& table, Sul& sul) {
  bool changed = false;
  fill(table, sul);
  while (auto w = unclosed_row(table)) {
    table.add_prefix(*w);
    fill(table, sul);
    changed = true;
  }
  return changed;
}

bool make_consistent(ObservationTable& table, Sul& sul) {
  bool changed = false;
  fill(table, sul);
  while (auto e = inconsistency(table)) {
    table.add_suffix(*e);
    fill(table, sul);
    changed = true;
  }
  return changed;
}

namespace {

MealyMachine hypothesis_from(const ObservationTable& t, bool bounded) {
  const auto& S = t.prefixes();
  std::map<Row, std::size_t> state_of;
  std::vector<const Word*> reps;
  for (const auto& s : S) {
    if (state_of.emplace(t.row(s), reps.size()).second) reps.push_back(&s);
  }

  // Output alphabet: every symbol observed in the single-input cells, sorted.
  const std::size_t k = t.inputs().size();
  std::set<Symbol> outs;
  auto first_output = [&](const Word& prefix, std::size_t a) -> const Symbol& {
    for (std::size_t e = 0; e < t.suffixes().size(); ++e) {
      if (t.suffixes()[e].front() == a) return t.cell(prefix, e).front();
    }
    throw Error(ErrorKind::ContractViolation, "no suffix starts with input " + t.inputs()[a]);
  };
  for (auto* r : reps)
    for (std::size_t a = 0; a < k; ++a) outs.insert(first_output(*r, a));
  Alphabet outputs(std::vector<Symbol>(outs.begin(), outs.end()));

  auto closest = [&](const Row& row) {
    std::size_t best = 0, best_score = 0;
    for (std::size_t i = 0; i < reps.size(); ++i) {
      const Row& cand = t.row(*reps[i]);
      std::size_t score = 0;
      for (std::size_t e = 0; e < row.size(); ++e) score += row[e] == cand[e];
      if (i == 0 || score > best_score) {
        best = i;
        best_score = score;
      }
    }
    return best;
  };

  std::vector<StateId> next(reps.size() * k);
  std::vector<std::size_t> out(reps.size() * k);
  for (std::size_t i = 0; i < reps.size(); ++i) {
    for (std::size_t a = 0; a < k; ++a) {
      const Row& succ = t.row(extend(*reps[i], a));
      auto it = state_of.find(succ);
      if (it != state_of.end()) {
        next[i * k + a] = it->second;
      } else if (bounded) {
        next[i * k + a] = closest(succ);
      } else {
        throw Error(ErrorKind::ContractViolation, "observation table is not closed");
      }
      out[i * k + a] = outputs.require_index(first_output(*reps[i], a));
    }
  }
  return MealyMachine(t.inputs(), std::move(outputs), reps.size(), state_of.at(t.row(Word{})),
                      std::move(next), std::move(out));
}

}  // namespace

MealyMachine build_hypothesis(const ObservationTable& table) {
  if (!is_closed(table)) throw Error(ErrorKind::ContractViolation, "observation table is not closed");
  if (!is_consistent(table))
    throw Error(ErrorKind::ContractViolation, "observation table is not consistent");
  return hypothesis_from(table, false);
}

MealyMachine build_bounded_hypothesis(const ObservationTable& table) {
  return hypothesis_from(table, true);
}

void process_counterexample(ObservationTable& table, const Word& ce, Sul& sul) {
  fill(table, sul);
  const MealyMachine hyp = build_hypothesis(table);
  if (run(hyp, ce) == query(sul, ce))
    throw Error(ErrorKind::ContractViolation,
                "counterexample " + format_word(table.inputs(), ce) + " does not distinguish");
  for (std::size_t n = 1; n <= ce.size(); ++n) table.add_prefix(Word(ce.begin(), ce.begin() + n));
  fill(table, sul);
  while (close(table, sul) || make_consistent(table, sul)) {
  }
}

void EqOracleConfig::validate() const {
  if (num_walks < 1 || max_walk_len < 1)
    throw Error(ErrorKind::RejectedInput, "oracle needs num_walks >= 1 and max_walk_len >= 1");
  if (!(reset_prob >= 0.0 && reset_prob <= 1.0))
    throw Error(ErrorKind::RejectedInput, "reset_prob must lie in [0, 1]");
}

std::optional<Word> random_walk_eq(Sul& sul, const MealyMachine& hyp, const EqOracleConfig& cfg) {
  cfg.validate();
  if (!(sul.inputs() == hyp.inputs()))
    throw Error(ErrorKind::AlphabetMismatch, "hypothesis and SUL use different inputs");
  SplitMix64 rng(cfg.rng_seed);
  const std::size_t k = hyp.inputs().size();
  for (std::size_t walk = 0; walk < cfg.num_walks; ++walk) {
    sul.reset();
    StateId s = hyp.initial();
    Word w;
    for (std::size_t i = 0; i < cfg.max_walk_len; ++i) {
      std::size_t a = rng.below(k);
      w.push_back(a);
      Symbol got = sul.step(a);
      if (got != hyp.output_symbol(s, a)) return w;
      s = hyp.next(s, a);
      if (rng.uniform() < cfg.reset_prob) break;
    }
  }
  return std::nullopt;
}

EquivalenceOracle exact_oracle(const MealyMachine& target) {
  return [target](const MealyMachine& hyp) { return equivalent(target, hyp).counterexample; };
}

EquivalenceOracle random_walk_oracle(Sul& sul, const EqOracleConfig& cfg) {
  // Each query draws from a fresh stream so re-asking the same hypothesis
  // yields the same verdict.
  auto calls = std::make_shared<std::uint64_t>(0);
  return [&sul, cfg, calls](const MealyMachine& hyp) {
    EqOracleConfig c = cfg;
    c.rng_seed = derive_seed(cfg.rng_seed, "walk-" + std::to_string((*calls)++));
    return random_walk_eq(sul, hyp, c);
  };
}

namespace {

bool saturate(ObservationTable& table, Sul& sul, std::size_t max_states) {
  fill(table, sul);
  for (;;) {
    bool changed = false;
    while (auto w = unclosed_row(table)) {
      if (max_states && table.distinct_rows() >= max_states) return false;
      table.add_prefix(*w);
      fill(table, sul);
      changed = true;
    }
    changed |= make_consistent(table, sul);
    if (!changed) return true;
  }
}

LearnResult learn_loop(ObservationTable table, const std::vector<Word>& injected, Sul& sul,
                       const EquivalenceOracle& oracle, const LearnConfig& cfg) {
  CountingSul counted(sul);
  LearnStats stats;
  for (const auto& ce : injected) {
    fill(table, counted);
    while (close(table, counted) || make_consistent(table, counted)) {
    }
    process_counterexample(table, ce, counted);
  }

  std::optional<MealyMachine> hyp;
  bool converged = false;
  while (stats.rounds < cfg.max_rounds) {
    ++stats.rounds;
    const bool complete = saturate(table, counted, cfg.max_states);
    hyp = complete ? build_hypothesis(table) : build_bounded_hypothesis(table);
    stats.states_per_round.push_back(hyp->num_states());
    ++stats.equivalence_queries;
    auto ce = oracle(*hyp);
    if (!ce) {
      converged = complete;
      break;
    }
    if (!complete || stats.rounds == cfg.max_rounds) break;
    process_counterexample(table, *ce, counted);
  }
  if (!hyp) throw Error(ErrorKind::ContractViolation, "learning needs max_rounds >= 1");
  stats.membership_queries = counted.resets();
  stats.steps = counted.steps();
  return {canonicalize(*hyp), std::move(stats), converged, std::move(table)};
}

}  // namespace

LearnResult learn(Sul& sul, const EquivalenceOracle& oracle, const LearnConfig& cfg) {
  return learn_loop(ObservationTable(sul.inputs()), {}, sul, oracle, cfg);
}

LearnResult learn(Sul& sul, const LearnConfig& cfg) {
  return learn(sul, random_walk_oracle(sul, cfg.oracle), cfg);
}

LearnResult resume_learning(ObservationTable table, const std::vector<Word>& counterexamples,
                            Sul& sul, const EquivalenceOracle& oracle, const LearnConfig& cfg) {
  return learn_loop(std::move(table), counterexamples, sul, oracle, cfg);
}

std::string learn_report_csv(const LearnResult& r) {
  std::ostringstream os;
  os << "rounds,membership_queries,steps,equivalence_queries,states,transitions,converged,states_per_round\n";
  os << r.stats.rounds << ',' << r.stats.membership_queries << ',' << r.stats.steps << ','
     << r.stats.equivalence_queries << ',' << r.hm.num_states() << ',' << r.hm.num_transitions()
     << ',' << (r.converged ? "yes" : "no") << ',';
  for (std::size_t i = 0; i < r.stats.states_per_round.size(); ++i)
    os << (i ? ";" : "") << r.stats.states_per_round[i];
  os << '\n';
  return os.str();
}

}  // namespace hcps
