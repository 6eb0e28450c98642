#pragma once

// Hand-built machines, micro-arenas and brute-force oracles shared by the
// test binaries. The oracles deliberately avoid the library code they check.

#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <tuple>
#include <vector>

#include "hcps/automata.hpp"
#include "hcps/game.hpp"
#include "hcps/rng.hpp"

namespace fx {

using namespace hcps;

// 2 states, single input "a", output = id of the current state.
inline MealyMachine toggle() {
  return MealyMachine(Alphabet({"a"}), Alphabet({"0", "1"}), 2, 0, {1, 0}, {0, 1});
}

// 1 state, output echoes the input.
inline MealyMachine identity() {
  return MealyMachine(Alphabet({"x", "y"}), Alphabet({"x", "y"}), 1, 0, {0, 0}, {0, 1});
}

inline MealyMachine constant(const Alphabet& in, const std::string& out) {
  return MealyMachine(in, Alphabet({out}), 1, 0, std::vector<StateId>(in.size(), 0),
                      std::vector<std::size_t>(in.size(), 0));
}

// q0 and q1 agree on every single input but differ after "a":
//   q0 -a/0-> q1, q1 -a/0-> q2, q2 -a/1-> q0, b/0 always back to q0.
inline MealyMachine inconsistency_fixture() {
  return MealyMachine(Alphabet({"a", "b"}), Alphabet({"0", "1"}), 3, 0, {1, 0, 2, 0, 0, 0},
                      {0, 0, 0, 0, 1, 0});
}

// Explicit driver machine: BFS over (last_level, last_acc, last_thw) with the
// headway law written out by hand for the default constants.
struct ExplicitDriver {
  MealyMachine machine;
  std::size_t reachable_states;
};

inline double hand_decide(double thw, double prev_thw, double prev_acc) {
  const double raw = prev_acc + 1.0 * (thw - prev_thw) + 0.5 * (thw - 2.0) * 0.5;
  double best = 0;
  double best_d = 1e9;
  for (double a : {0.0, -1.0, 1.0, -2.0, 2.0, -3.0}) {  // closer to zero first wins ties
    const double d = std::abs(raw - a);
    if (d < best_d - 1e-9) {
      best = a;
      best_d = d;
    }
  }
  return best;
}

inline ExplicitDriver explicit_driver() {
  const double reps[4] = {0.5, 1.5, 2.5, 3.5};
  using S = std::tuple<int, double, double>;  // level (0 = none), acc, thw
  std::map<S, std::size_t> id;
  std::vector<S> states{{0, 0.0, 2.0}};
  id[states[0]] = 0;
  std::vector<StateId> next;
  std::vector<std::string> outs;
  for (std::size_t i = 0; i < states.size(); ++i) {
    auto [lvl, acc, thw] = states[i];
    for (int x = 1; x <= 4; ++x) {
      S n;
      std::string out;
      auto fmt = [](double a) { return a == 0 ? std::string("0") : std::to_string(int(a)); };
      if (lvl == x) {
        n = states[i];
        out = "attend,read,encode,n_ret:" + fmt(acc);
      } else {
        const double a = hand_decide(reps[x - 1], thw, acc);
        n = {x, a, reps[x - 1]};
        out = "attend,read,encode,retrieve,decide:" + fmt(a);
      }
      auto [it, fresh] = id.emplace(n, states.size());
      if (fresh) states.push_back(n);
      next.push_back(it->second);
      outs.push_back(out);
    }
  }
  std::vector<std::string> alphabet;
  for (const auto& o : outs)
    if (std::find(alphabet.begin(), alphabet.end(), o) == alphabet.end()) alphabet.push_back(o);
  std::vector<std::size_t> out_idx;
  for (const auto& o : outs)
    out_idx.push_back(std::find(alphabet.begin(), alphabet.end(), o) - alphabet.begin());
  return {MealyMachine(Alphabet({"1", "2", "3", "4"}), Alphabet(alphabet), states.size(), 0, next,
                       out_idx),
          states.size()};
}

// ------------------------------------------------------------ micro-arenas

struct MicroNode {
  Turn turn;
  bool bad = false;
  bool goal = false;
};

struct MicroEdge {
  std::uint32_t src;
  std::string action;
  std::uint32_t dst;
};

struct Micro {
  std::vector<MicroNode> nodes;
  std::vector<MicroEdge> edges;
  std::uint32_t initial = 0;

  GameArena build() const {
    ArenaBuilder b;
    for (const auto& n : nodes) b.add_node(n.turn, n.bad, n.goal);
    for (const auto& e : edges) {
      const bool ctrl = nodes[e.src].turn == Turn::Controller;
      b.add_edge(e.src, b.action(e.action, ctrl), e.dst);
    }
    b.set_initial(initial);
    return b.finish();
  }
};

constexpr Turn E = Turn::Environment;
constexpr Turn C = Turn::Controller;

// Game-tree evaluation: can the controller keep every play out of bad for k
// more moves (goal ends the play as a win)? k = |states| suffices.
class BruteForce {
 public:
  explicit BruteForce(const Micro& m) : m_(m) {}

  std::vector<std::uint8_t> winning() {
    std::vector<std::uint8_t> w;
    for (std::uint32_t n = 0; n < m_.nodes.size(); ++n)
      w.push_back(value(n, static_cast<int>(m_.nodes.size())));
    return w;
  }

 private:
  bool value(std::uint32_t n, int k) {
    const auto& node = m_.nodes[n];
    if (node.goal) return true;
    if (node.bad) return false;
    if (k == 0) return true;
    auto key = std::make_pair(n, k);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    std::vector<std::uint32_t> succ;
    for (const auto& e : m_.edges)
      if (e.src == n) succ.push_back(e.dst);
    bool r;
    if (node.turn == Turn::Controller) {
      r = false;
      for (auto s : succ) r = r || value(s, k - 1);
    } else {
      r = true;
      for (auto s : succ) r = r && value(s, k - 1);
    }
    memo_[key] = r;
    return r;
  }

  const Micro& m_;
  std::map<std::pair<std::uint32_t, int>, bool> memo_;
};

// The six-node example: the environment may push into a branch where every
// controller choice ends in bad.
inline Micro forced_loss() {
  Micro m;
  m.nodes = {{E}, {C}, {C}, {E, true}, {E, false, true}, {E}};
  m.edges = {{0, "u1", 1}, {0, "u2", 2}, {1, "c1", 3}, {1, "c2", 4}, {2, "c1", 3}, {2, "c2", 5},
             {5, "u1", 3}};
  return m;
}

// No bad node at all: W is everything.
inline Micro no_bad() {
  Micro m;
  m.nodes = {{E}, {C}, {C}, {E}, {E, false, true}};
  m.edges = {{0, "u1", 1}, {0, "u2", 2}, {1, "c1", 3}, {2, "c1", 4}, {3, "u1", 0}};
  return m;
}

// Unrealizable: both sensor outcomes lead to controller nodes whose every
// action loses within two moves.
inline Micro unrealizable() {
  Micro m;
  m.nodes = {{E}, {C}, {C}, {E}, {E}, {E, true}, {C}};
  m.edges = {{0, "u1", 1}, {0, "u2", 2}, {1, "c1", 3}, {1, "c2", 5}, {2, "c1", 4},
             {3, "u1", 5}, {3, "u2", 6}, {4, "u1", 5}, {6, "c1", 5}};
  return m;
}

// A safe cycle: staying in the loop forever satisfies weak-until.
inline Micro safe_cycle() {
  Micro m;
  m.nodes = {{E}, {C}, {E}, {E, true}, {C}};
  m.edges = {{0, "u1", 1}, {1, "c1", 2}, {1, "c2", 3}, {2, "u1", 4}, {4, "c1", 0},
             {4, "c2", 3}};
  return m;
}

// Only the harder overrides avoid the crash; edges inserted in the domain
// preference order (severity, then distance to the driver's -1).
inline Micro override_forcing() {
  Micro m;
  m.nodes = {{E}, {C}, {E, true}, {E, true}, {E, true}, {E}, {E}};
  m.edges = {{0, "sense:2", 1},     {1, "none", 2},       {1, "hint", 3},
             {1, "override:-1", 4}, {1, "override:-2", 5}, {1, "override:-3", 6}};
  return m;
}

inline Micro goal_at_start() {
  Micro m;
  m.nodes = {{E, false, true}};
  return m;
}

// Random arenas for property checks; controller nodes always get a move.
inline Micro random_micro(std::uint64_t seed, std::uint32_t n) {
  SplitMix64 rng(seed);
  Micro m;
  for (std::uint32_t i = 0; i < n; ++i) {
    MicroNode node{rng.below(2) ? Turn::Controller : Turn::Environment};
    const auto r = rng.below(10);
    node.bad = r == 0;
    node.goal = r == 1;
    m.nodes.push_back(node);
  }
  for (std::uint32_t i = 0; i < n; ++i) {
    const auto deg = m.nodes[i].turn == Turn::Controller ? 1 + rng.below(3) : rng.below(4);
    for (std::uint64_t d = 0; d < deg; ++d) {
      const bool ctrl = m.nodes[i].turn == Turn::Controller;
      m.edges.push_back({i, (ctrl ? "c" : "u") + std::to_string(d),
                         static_cast<std::uint32_t>(rng.below(n))});
    }
  }
  return m;
}

}  // namespace fx
