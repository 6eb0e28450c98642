#include "hcps/automata.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <fstream>
#include <map>
#include <sstream>

#include "hcps/error.hpp"

namespace hcps {

namespace {

bool has_whitespace(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

Alphabet::Alphabet(std::vector<Symbol> symbols) : symbols_(std::move(symbols)) {
  if (symbols_.empty()) throw Error(ErrorKind::RejectedInput, "alphabet must not be empty");
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    const auto& s = symbols_[i];
    if (s.empty() || has_whitespace(s))
      throw Error(ErrorKind::RejectedInput, "invalid alphabet symbol '" + s + "'");
    if (!index_.emplace(s, i).second)
      throw Error(ErrorKind::RejectedInput, "duplicate alphabet symbol '" + s + "'");
  }
}

std::optional<std::size_t> Alphabet::index_of(std::string_view symbol) const {
  auto it = index_.find(Symbol(symbol));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Alphabet::require_index(std::string_view symbol) const {
  auto i = index_of(symbol);
  if (!i) throw Error(ErrorKind::RejectedInput, "unknown symbol '" + std::string(symbol) + "'");
  return *i;
}

MealyMachine::MealyMachine(Alphabet inputs, Alphabet outputs, std::size_t num_states,
                           StateId initial, std::vector<StateId> next,
                           std::vector<std::size_t> out)
    : inputs_(std::move(inputs)),
      outputs_(std::move(outputs)),
      num_states_(num_states),
      initial_(initial),
      next_(std::move(next)),
      out_(std::move(out)) {
  if (inputs_.empty() || outputs_.empty())
    throw Error(ErrorKind::RejectedInput, "machine alphabets must not be empty");
  if (num_states_ == 0) throw Error(ErrorKind::RejectedInput, "machine needs at least one state");
  if (initial_ >= num_states_) throw Error(ErrorKind::RejectedInput, "initial state out of range");
  const std::size_t cells = num_states_ * inputs_.size();
  if (next_.size() != cells || out_.size() != cells)
    throw Error(ErrorKind::RejectedInput, "transition table is not input-complete");
  for (std::size_t i = 0; i < cells; ++i) {
    if (next_[i] >= num_states_) throw Error(ErrorKind::RejectedInput, "transition target out of range");
    if (out_[i] >= outputs_.size()) throw Error(ErrorKind::RejectedInput, "output index out of range");
  }
}

StepResult step(const MealyMachine& m, StateId s, std::size_t input) {
  if (s >= m.num_states()) throw Error(ErrorKind::RejectedInput, "unknown state " + std::to_string(s));
  if (input >= m.inputs().size())
    throw Error(ErrorKind::RejectedInput, "input index " + std::to_string(input) + " outside alphabet");
  return {m.next(s, input), m.output(s, input)};
}

std::pair<StateId, Symbol> step(const MealyMachine& m, StateId s, std::string_view input) {
  auto r = step(m, s, m.inputs().require_index(input));
  return {r.state, m.outputs()[r.output]};
}

std::vector<Symbol> run(const MealyMachine& m, const Word& w) {
  std::vector<Symbol> out;
  out.reserve(w.size());
  StateId s = m.initial();
  for (auto a : w) {
    auto r = step(m, s, a);
    out.push_back(m.outputs()[r.output]);
    s = r.state;
  }
  return out;
}

StateId reach(const MealyMachine& m, const Word& w) {
  StateId s = m.initial();
  for (auto a : w) s = step(m, s, a).state;
  return s;
}

Word parse_word(const Alphabet& inputs, const std::vector<std::string>& symbols) {
  Word w;
  w.reserve(symbols.size());
  for (const auto& s : symbols) w.push_back(inputs.require_index(s));
  return w;
}

std::string format_word(const Alphabet& inputs, const Word& w) {
  std::string s = "(";
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) s += ",";
    s += inputs[w[i]];
  }
  return s + ")";
}

std::vector<Word> access_words(const MealyMachine& m) {
  std::vector<std::optional<Word>> acc(m.num_states());
  std::deque<StateId> queue{m.initial()};
  acc[m.initial()] = Word{};
  while (!queue.empty()) {
    StateId s = queue.front();
    queue.pop_front();
    for (std::size_t a = 0; a < m.inputs().size(); ++a) {
      StateId t = m.next(s, a);
      if (acc[t]) continue;
      Word w = *acc[s];
      w.push_back(a);
      acc[t] = std::move(w);
      queue.push_back(t);
    }
  }
  std::vector<Word> words;
  for (auto& w : acc)
    if (w) words.push_back(std::move(*w));
  return words;
}

MealyMachine canonicalize(const MealyMachine& m) {
  const std::size_t k = m.inputs().size();
  constexpr StateId unset = static_cast<StateId>(-1);
  std::vector<StateId> renum(m.num_states(), unset);
  std::vector<StateId> order;
  renum[m.initial()] = 0;
  order.push_back(m.initial());
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (std::size_t a = 0; a < k; ++a) {
      StateId t = m.next(order[i], a);
      if (renum[t] == unset) {
        renum[t] = order.size();
        order.push_back(t);
      }
    }
  }
  std::vector<StateId> next(order.size() * k);
  std::vector<std::size_t> out(order.size() * k);
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (std::size_t a = 0; a < k; ++a) {
      next[i * k + a] = renum[m.next(order[i], a)];
      out[i * k + a] = m.output(order[i], a);
    }
  }
  return MealyMachine(m.inputs(), m.outputs(), order.size(), 0, std::move(next), std::move(out));
}

MealyMachine minimize(const MealyMachine& input) {
  const MealyMachine m = canonicalize(input);
  const std::size_t n = m.num_states();
  const std::size_t k = m.inputs().size();

  // Initial partition: identical output rows.
  std::vector<std::size_t> block(n);
  {
    std::map<std::vector<std::size_t>, std::size_t> ids;
    for (StateId s = 0; s < n; ++s) {
      std::vector<std::size_t> sig(k);
      for (std::size_t a = 0; a < k; ++a) sig[a] = m.output(s, a);
      block[s] = ids.emplace(std::move(sig), ids.size()).first->second;
    }
  }
  std::size_t num_blocks = 0;
  for (auto b : block) num_blocks = std::max(num_blocks, b + 1);

  for (;;) {
    std::map<std::vector<std::size_t>, std::size_t> ids;
    std::vector<std::size_t> refined(n);
    for (StateId s = 0; s < n; ++s) {
      std::vector<std::size_t> sig(k + 1);
      sig[0] = block[s];
      for (std::size_t a = 0; a < k; ++a) sig[a + 1] = block[m.next(s, a)];
      refined[s] = ids.emplace(std::move(sig), ids.size()).first->second;
    }
    block = std::move(refined);
    if (ids.size() == num_blocks) break;
    num_blocks = ids.size();
  }

  std::vector<StateId> next(num_blocks * k);
  std::vector<std::size_t> out(num_blocks * k);
  for (StateId s = 0; s < n; ++s) {
    for (std::size_t a = 0; a < k; ++a) {
      next[block[s] * k + a] = block[m.next(s, a)];
      out[block[s] * k + a] = m.output(s, a);
    }
  }
  return canonicalize(MealyMachine(m.inputs(), m.outputs(), num_blocks, block[m.initial()],
                                   std::move(next), std::move(out)));
}

EquivalenceVerdict equivalent(const MealyMachine& a, const MealyMachine& b) {
  if (!(a.inputs() == b.inputs()))
    throw Error(ErrorKind::AlphabetMismatch, "machines have different input alphabets");
  const std::size_t k = a.inputs().size();
  const std::size_t nb = b.num_states();
  constexpr std::size_t unseen = static_cast<std::size_t>(-1);
  // parent[pair] = (parent pair, input) for word reconstruction.
  std::vector<std::pair<std::size_t, std::size_t>> parent(a.num_states() * nb, {unseen, 0});
  auto id = [nb](StateId p, StateId q) { return p * nb + q; };

  const std::size_t start = id(a.initial(), b.initial());
  parent[start] = {start, 0};
  std::deque<std::size_t> queue{start};
  auto word_to = [&](std::size_t pair) {
    Word w;
    while (pair != start) {
      w.push_back(parent[pair].second);
      pair = parent[pair].first;
    }
    std::reverse(w.begin(), w.end());
    return w;
  };
  while (!queue.empty()) {
    std::size_t cur = queue.front();
    queue.pop_front();
    StateId p = cur / nb, q = cur % nb;
    for (std::size_t x = 0; x < k; ++x) {
      if (a.output_symbol(p, x) != b.output_symbol(q, x)) {
        Word w = word_to(cur);
        w.push_back(x);
        return {std::move(w)};
      }
    }
    for (std::size_t x = 0; x < k; ++x) {
      std::size_t nxt = id(a.next(p, x), b.next(q, x));
      if (parent[nxt].first != unseen) continue;
      parent[nxt] = {cur, x};
      queue.push_back(nxt);
    }
  }
  return {};
}

namespace {

std::string dot_escape(std::string_view s) {
  std::string r;
  for (char c : s) {
    if (c == '"' || c == '\\') r += '\\';
    r += c;
  }
  return r;
}

}  // namespace

std::string to_dot(const MealyMachine& m) {
  std::ostringstream os;
  os << "digraph mealy {\n";
  os << "  rankdir=LR;\n";
  os << "  __start [shape=point];\n";
  for (StateId s = 0; s < m.num_states(); ++s)
    os << "  s" << s << " [shape=circle, label=\"s" << s << "\"];\n";
  os << "  __start -> s" << m.initial() << ";\n";
  for (StateId s = 0; s < m.num_states(); ++s) {
    for (std::size_t a = 0; a < m.inputs().size(); ++a) {
      os << "  s" << s << " -> s" << m.next(s, a) << " [label=\""
         << dot_escape(m.inputs()[a]) << "/" << dot_escape(m.output_symbol(s, a)) << "\"];\n";
    }
  }
  os << "}\n";
  return os.str();
}

std::string serialize(const MealyMachine& input) {
  const MealyMachine m = canonicalize(input);
  std::ostringstream os;
  os << "mealy v1 " << m.num_states() << ' ' << m.inputs().size() << ' ' << m.outputs().size() << '\n';
  for (const auto& s : m.inputs().symbols()) os << s << '\n';
  for (const auto& s : m.outputs().symbols()) os << s << '\n';
  for (StateId s = 0; s < m.num_states(); ++s)
    for (std::size_t a = 0; a < m.inputs().size(); ++a)
      os << s << ' ' << m.inputs()[a] << ' ' << m.next(s, a) << ' ' << m.output_symbol(s, a) << '\n';
  return os.str();
}

MealyMachine parse_mealy(std::string_view text) {
  std::istringstream is{std::string(text)};
  auto fail = [](const std::string& msg) -> MealyMachine {
    throw Error(ErrorKind::Parse, "mealy: " + msg);
  };
  std::string magic, version;
  std::size_t nq = 0, ns = 0, ng = 0;
  if (!(is >> magic >> version >> nq >> ns >> ng) || magic != "mealy") return fail("bad header");
  if (version != "v1") return fail("unsupported version " + version);
  if (nq == 0 || ns == 0 || ng == 0) return fail("empty machine");
  auto read_symbols = [&](std::size_t count) {
    std::vector<Symbol> syms(count);
    for (auto& s : syms)
      if (!(is >> s)) fail("truncated alphabet");
    return syms;
  };
  Alphabet inputs(read_symbols(ns));
  Alphabet outputs(read_symbols(ng));
  std::vector<StateId> next(nq * ns);
  std::vector<std::size_t> out(nq * ns);
  std::vector<bool> seen(nq * ns, false);
  for (std::size_t i = 0; i < nq * ns; ++i) {
    std::size_t src = 0, dst = 0;
    std::string in, o;
    if (!(is >> src >> in >> dst >> o)) return fail("truncated transition list");
    if (src >= nq || dst >= nq) return fail("state out of range");
    auto a = inputs.index_of(in);
    auto y = outputs.index_of(o);
    if (!a || !y) return fail("transition uses unknown symbol");
    std::size_t cell = src * ns + *a;
    if (seen[cell]) return fail("duplicate transition");
    seen[cell] = true;
    next[cell] = dst;
    out[cell] = *y;
  }
  std::string extra;
  if (is >> extra) return fail("trailing content");
  return MealyMachine(std::move(inputs), std::move(outputs), nq, 0, std::move(next), std::move(out));
}

void save_text(const std::string& path, std::string_view text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::Io, "cannot write " + path);
  f << text;
}

std::string load_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::Io, "cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

MealyMachine load_mealy(const std::string& path) { return parse_mealy(load_text(path)); }

}  // namespace hcps
