#include "hcps/game.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <sstream>
#include <tuple>

#include "hcps/config.hpp"
#include "hcps/error.hpp"

namespace hcps {

namespace {

std::size_t mix(std::size_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  return h;
}

char mode_letter(Mode m) {
  switch (m) {
    case Mode::Nominal: return 'N';
    case Mode::Advisory: return 'A';
    case Mode::Intervention: return 'I';
  }
  return '?';
}

}  // namespace

std::size_t GameStateHash::operator()(const GameState& s) const noexcept {
  std::size_t h = s.driver;
  h = mix(h, static_cast<std::uint64_t>(s.mode));
  h = mix(h, static_cast<std::uint32_t>(s.world.step));
  h = mix(h, static_cast<std::uint32_t>(s.world.lead_pos));
  h = mix(h, static_cast<std::uint32_t>(s.world.lead_vel));
  h = mix(h, static_cast<std::uint32_t>(s.world.follow_pos));
  h = mix(h, static_cast<std::uint32_t>(s.world.follow_vel));
  h = mix(h, static_cast<std::uint64_t>(s.perceived_level));
  h = mix(h, std::hash<double>{}(s.driver_acc));
  h = mix(h, (s.full_deliberation ? 1u : 0u) | (s.hint_pending ? 2u : 0u) |
                 (s.turn == Turn::Controller ? 4u : 0u));
  return h;
}

std::string state_key(const GameState& s) {
  std::ostringstream os;
  os << s.driver << ',' << mode_letter(s.mode) << ',' << s.world.step << ',' << s.world.lead_pos
     << ',' << s.world.lead_vel << ',' << s.world.follow_pos << ',' << s.world.follow_vel << ','
     << static_cast<int>(s.perceived_level) << ',' << format_acc(s.driver_acc) << ','
     << (s.full_deliberation ? 'f' : 's') << ',' << (s.hint_pending ? 1 : 0) << ','
     << (s.turn == Turn::Controller ? 'C' : 'E');
  return os.str();
}

WorldState to_world(const GridWorld& g, const Scenario& sc) {
  WorldState w = sc.initial;
  w.lead.pos = g.lead_pos * sc.grid.pos_step;
  w.lead.vel = g.lead_vel * sc.grid.vel_step;
  w.follow.pos = g.follow_pos * sc.grid.pos_step;
  w.follow.vel = g.follow_vel * sc.grid.vel_step;
  w.t = sc.initial.t + g.step * sc.dynamics.dt;
  return w;
}

GridWorld to_grid(const WorldState& w, const Scenario& sc, std::int32_t step) {
  GridWorld g;
  g.step = step;
  g.lead_pos = static_cast<std::int32_t>(sc.grid.pos_index(w.lead.pos));
  g.lead_vel = static_cast<std::int32_t>(sc.grid.vel_index(w.lead.vel));
  g.follow_pos = static_cast<std::int32_t>(sc.grid.pos_index(w.follow.pos));
  g.follow_vel = static_cast<std::int32_t>(sc.grid.vel_index(w.follow.vel));
  return g;
}

const char* to_string(Variant v) {
  switch (v) {
    case Variant::Full: return "full";
    case Variant::NoOverride: return "no-override";
    case Variant::AdvisoryOnly: return "advisory-only";
  }
  return "?";
}

Variant parse_variant(const std::string& s) {
  if (s == "full") return Variant::Full;
  if (s == "no-override") return Variant::NoOverride;
  if (s == "advisory-only") return Variant::AdvisoryOnly;
  throw Error(ErrorKind::RejectedInput, "unknown variant '" + s + "'");
}

Mode ControlAction::mode() const {
  switch (kind) {
    case ControllerAction::None: return Mode::Nominal;
    case ControllerAction::Hint: return Mode::Advisory;
    case ControllerAction::Override: return Mode::Intervention;
  }
  return Mode::Nominal;
}

std::string action_name(const ControlAction& a) {
  if (a.kind == ControllerAction::Override) return "override:" + format_acc(a.applied_acc);
  return to_string(a.kind);
}

ControlAction parse_action(const std::string& name) {
  if (name == "none") return {ControllerAction::None, 0.0};
  if (name == "hint") return {ControllerAction::Hint, 0.0};
  if (name.rfind("override:", 0) == 0)
    return {ControllerAction::Override, parse_double("action", name.substr(9))};
  throw Error(ErrorKind::Parse, "unknown controller action '" + name + "'");
}

// ---------------------------------------------------------------- builder

std::uint32_t ArenaBuilder::add_node(Turn turn, bool bad, bool goal) {
  turn_.push_back(turn);
  flags_.push_back(static_cast<std::uint8_t>((bad ? GameArena::kBad : 0) |
                                             (goal ? GameArena::kGoal : 0)));
  return static_cast<std::uint32_t>(turn_.size() - 1);
}

std::uint32_t ArenaBuilder::action(const std::string& name, bool controllable) {
  auto it = action_ids_.find(name);
  if (it != action_ids_.end()) {
    if (actions_[it->second].controllable != controllable)
      throw Error(ErrorKind::ContractViolation,
                  "action '" + name + "' declared both controllable and uncontrollable");
    return it->second;
  }
  actions_.push_back({name, controllable});
  const auto id = static_cast<std::uint32_t>(actions_.size() - 1);
  action_ids_.emplace(name, id);
  return id;
}

void ArenaBuilder::add_edge(std::uint32_t src, std::uint32_t action, std::uint32_t dst) {
  if (src >= turn_.size() || dst >= turn_.size() || action >= actions_.size())
    throw Error(ErrorKind::ContractViolation, "edge refers to an unknown node or action");
  const bool ctrl = turn_[src] == Turn::Controller;
  if (ctrl != actions_[action].controllable)
    throw Error(ErrorKind::ContractViolation,
                "edge action '" + actions_[action].name + "' does not belong to the moving player");
  edges_.push_back({src, action, dst});
}

GameArena ArenaBuilder::finish() {
  if (turn_.empty()) throw Error(ErrorKind::ContractViolation, "empty arena");
  if (initial_ >= turn_.size()) throw Error(ErrorKind::ContractViolation, "bad initial node");
  GameArena a;
  a.turn_ = std::move(turn_);
  a.flags_ = std::move(flags_);
  a.actions_ = std::move(actions_);
  a.initial_ = initial_;
  a.domain_ = std::move(domain_);

  // stable counting sort by source keeps per-node insertion order
  a.offsets_.assign(a.turn_.size() + 1, 0);
  for (const auto& e : edges_) ++a.offsets_[e.src + 1];
  for (std::size_t i = 1; i < a.offsets_.size(); ++i) a.offsets_[i] += a.offsets_[i - 1];
  a.edges_.resize(edges_.size());
  std::vector<std::size_t> fill(a.offsets_.begin(), a.offsets_.end() - 1);
  for (const auto& e : edges_) a.edges_[fill[e.src]++] = {e.action, e.dst};
  edges_.clear();

  for (std::uint32_t n = 0; n < a.size(); ++n) {
    if (a.turn(n) == Turn::Controller && !a.goal(n) && !a.bad(n) && a.edges(n).empty())
      throw Error(ErrorKind::ContractViolation,
                  "controller node " + std::to_string(n) + " has no move");
  }
  turn_.clear();
  flags_.clear();
  action_ids_.clear();
  return a;
}

// ---------------------------------------------------------- domain arena

namespace {

struct DriverMove {
  StateId next;
  Response resp;
};

class DriverTable {
 public:
  DriverTable(const MealyMachine& hm, const DriverParams& params) : hm_(hm) {
    const std::size_t n = hm.num_states(), k = hm.inputs().size();
    plain_.resize(n * k);
    hinted_.resize(n * k);
    std::vector<Response> decoded(n * k);
    for (StateId q = 0; q < n; ++q)
      for (std::size_t x = 0; x < k; ++x) {
        auto r = decode_response(hm.output_symbol(q, x));
        if (!r)
          throw Error(ErrorKind::AlphabetMismatch,
                      "HM output '" + hm.output_symbol(q, x) + "' is not a driver response");
        decoded[q * k + x] = *r;
      }
    for (StateId q = 0; q < n; ++q)
      for (std::size_t x = 0; x < k; ++x) {
        const Response& r = decoded[q * k + x];
        plain_[q * k + x] = {hm.next(q, x), r};
        if (r.full_deliberation()) {
          hinted_[q * k + x] = plain_[q * k + x];
          continue;
        }
        // A hint clears the cached level, so the same stimulus is re-deliberated
        // against the cached acceleration. The driver then sits in the state
        // that would answer this level with n_ret and the new acceleration.
        const int level = static_cast<int>(x) + 1;
        const double rep = params.representative_thw(level);
        const double acc = decide_acceleration(rep, rep, params.decision_epoch, params, r.acc);
        const Response want{short_chain(), acc};
        StateId target = hm.next(q, x);
        if (!(decoded[target * k + x] == want)) {
          bool found = false;
          for (StateId p = 0; p < n && !found; ++p)
            if (decoded[p * k + x] == want) {
              target = p;
              found = true;
            }
          if (!found) ++approximate_;
        }
        hinted_[q * k + x] = {target, Response{full_chain(), acc}};
      }
  }

  const DriverMove& move(StateId q, std::size_t x, bool hint) const {
    const std::size_t i = q * hm_.inputs().size() + x;
    return hint ? hinted_[i] : plain_[i];
  }
  std::size_t approximate() const { return approximate_; }

 private:
  const MealyMachine& hm_;
  std::vector<DriverMove> plain_, hinted_;
  std::size_t approximate_ = 0;
};

struct Candidate {
  ControlAction action;
  double deviation;
  int ordinal;
};

}  // namespace

GameArena build_arena(const MealyMachine& hm, const Scenario& sc, const DriverParams& params,
                      const ArenaConfig& cfg) {
  sc.validate();
  params.validate();
  if (!(hm.inputs() == level_alphabet(params.num_levels())))
    throw Error(ErrorKind::AlphabetMismatch,
                "HM inputs do not match the " + std::to_string(params.num_levels()) +
                    " headway levels");
  if (std::abs(params.decision_epoch - sc.dynamics.dt) > 1e-12)
    throw Error(ErrorKind::RejectedInput, "driver decision epoch differs from scenario dt");

  const DriverTable drivers(hm, params);
  const SupervisorConfig& sup = sc.supervisor;
  const HazardThresholds& th = sup.thresholds;

  std::vector<double> overrides;
  for (double a : params.acc_set)
    if (a >= sup.acc_floor && a <= sup.acc_cap) overrides.push_back(a);
  std::sort(overrides.begin(), overrides.end(), std::greater<>());  // gentlest first

  ArenaBuilder b;
  ArenaDomain dom;
  dom.scenario = sc;
  dom.variant = cfg.variant;

  std::vector<std::uint32_t> sense_ids;
  for (int l = 1; l <= params.num_levels(); ++l)
    sense_ids.push_back(b.action("sense:" + std::to_string(l), false));

  std::unordered_map<GameState, std::uint32_t, GameStateHash> index;
  std::deque<std::uint32_t> queue;
  auto intern = [&](const GameState& s, bool bad, bool goal) {
    auto [it, fresh] = index.try_emplace(s, static_cast<std::uint32_t>(dom.states.size()));
    if (fresh) {
      if (dom.states.size() >= cfg.state_cap)
        throw Error(ErrorKind::BuildLimit, "arena exceeds the state cap of " +
                                               std::to_string(cfg.state_cap));
      dom.states.push_back(s);
      b.add_node(s.turn, bad, goal);
      queue.push_back(it->second);
    }
    return it->second;
  };
  auto env_node = [&](const GameState& s) {
    const WorldState w = to_world(s.world, sc);
    return intern(s, w.follow.pos >= w.lead.pos, w.follow.pos >= w.dest);
  };

  GameState init;
  init.driver = static_cast<std::uint32_t>(hm.initial());
  init.world = to_grid(sc.initial, sc, 0);
  b.set_initial(env_node(init));

  while (!queue.empty()) {
    const std::uint32_t n = queue.front();
    queue.pop_front();
    const GameState s = dom.states[n];
    const WorldState w = to_world(s.world, sc);

    if (s.turn == Turn::Environment) {
      if (w.follow.pos >= w.lead.pos || w.follow.pos >= w.dest || s.world.step >= sc.horizon)
        continue;
      const int level = quantize_thw(compute_thw(w), params.thw_levels);
      for (int p : sensor_perturb(level, sc.sensor, params.num_levels())) {
        const DriverMove& m = drivers.move(s.driver, static_cast<std::size_t>(p - 1), s.hint_pending);
        GameState c;
        c.driver = static_cast<std::uint32_t>(m.next);
        c.mode = s.mode;
        c.world = s.world;
        c.perceived_level = static_cast<std::int8_t>(p);
        c.driver_acc = m.resp.acc;
        c.full_deliberation = m.resp.full_deliberation();
        c.turn = Turn::Controller;
        b.add_edge(n, sense_ids[p - 1], intern(c, false, false));
      }
      continue;
    }

    const double thw = compute_thw(w), ttc = compute_ttc(w);
    const bool safe = safe_now(thw, ttc, th);
    const RiskAssessment risk = predict_risk(w, s.driver_acc, sup, sc.dynamics);
    const ModeGuards guards = enabled_modes(s.mode, risk, safe);

    std::vector<Candidate> cands;
    if (cfg.variant != Variant::AdvisoryOnly || !risk.warn)
      cands.push_back({{ControllerAction::None, s.driver_acc}, 0.0, 0});
    if (guards.advisory) cands.push_back({{ControllerAction::Hint, s.driver_acc}, 0.0, 1});
    if (guards.intervention && cfg.variant == Variant::Full)
      for (std::size_t i = 0; i < overrides.size(); ++i)
        cands.push_back({{ControllerAction::Override, overrides[i]},
                         std::abs(overrides[i] - s.driver_acc), 2 + static_cast<int>(i)});
    std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& c) {
      return std::tie(a.action.kind, a.deviation, a.ordinal) <
             std::tie(c.action.kind, c.deviation, c.ordinal);
    });

    for (const Candidate& c : cands) {
      const WorldState nw = step_world(w, c.action.applied_acc, sc.dynamics);
      GameState e;
      e.driver = s.driver;
      e.mode = c.action.mode();
      e.world = to_grid(nw, sc, s.world.step + 1);
      e.hint_pending = c.action.kind == ControllerAction::Hint;
      e.turn = Turn::Environment;
      const std::uint32_t act = b.action(action_name(c.action), true);
      b.add_edge(n, act, env_node(e));
    }
  }

  dom.approximate_hint_edges = drivers.approximate();
  b.set_domain(std::move(dom));
  return b.finish();
}

// ----------------------------------------------------------------- solver

std::size_t WinningRegion::size() const {
  return static_cast<std::size_t>(std::count(member_.begin(), member_.end(), 1));
}

WinningRegion solve(const GameArena& arena) {
  const std::size_t n = arena.size();
  // reverse adjacency in CSR form
  std::vector<std::size_t> roff(n + 1, 0);
  for (std::uint32_t v = 0; v < n; ++v)
    for (const auto& e : arena.edges(v)) ++roff[e.target + 1];
  for (std::size_t i = 1; i <= n; ++i) roff[i] += roff[i - 1];
  std::vector<std::uint32_t> preds(roff[n]);
  {
    std::vector<std::size_t> fill(roff.begin(), roff.end() - 1);
    for (std::uint32_t v = 0; v < n; ++v)
      for (const auto& e : arena.edges(v)) preds[fill[e.target]++] = v;
  }

  std::vector<std::uint8_t> losing(n, 0);
  std::vector<std::size_t> remaining(n, 0);
  std::vector<std::uint32_t> frontier;
  for (std::uint32_t v = 0; v < n; ++v) {
    remaining[v] = arena.edges(v).size();
    if (arena.goal(v)) continue;
    const bool stuck_ctrl = arena.turn(v) == Turn::Controller && remaining[v] == 0;
    if (arena.bad(v) || stuck_ctrl) {
      losing[v] = 1;
      frontier.push_back(v);
    }
  }

  std::size_t iterations = 0;
  while (!frontier.empty()) {
    ++iterations;
    std::vector<std::uint32_t> next;
    for (std::uint32_t v : frontier) {
      for (std::size_t i = roff[v]; i < roff[v + 1]; ++i) {
        const std::uint32_t p = preds[i];
        if (losing[p] || arena.goal(p)) continue;
        if (arena.turn(p) == Turn::Environment || --remaining[p] == 0) {
          losing[p] = 1;
          next.push_back(p);
        }
      }
    }
    frontier = std::move(next);
  }

  std::vector<std::uint8_t> win(n);
  for (std::size_t v = 0; v < n; ++v) win[v] = losing[v] ? 0 : 1;
  return WinningRegion(std::move(win), iterations);
}

bool realizable(const GameArena& arena, const WinningRegion& w) {
  return w.contains(arena.initial());
}

std::optional<std::uint32_t> Strategy::action_at(std::uint32_t node) const {
  if (node >= choice_.size() || choice_[node] == kUnset) return std::nullopt;
  return choice_[node];
}

std::size_t Strategy::size() const {
  return static_cast<std::size_t>(
      std::count_if(choice_.begin(), choice_.end(), [](auto c) { return c != kUnset; }));
}

Strategy extract_strategy(const GameArena& arena, const WinningRegion& w) {
  if (!realizable(arena, w))
    throw Error(ErrorKind::ContractViolation, "no strategy: the initial state is not winning");
  Strategy s(arena.size());
  for (std::uint32_t v = 0; v < arena.size(); ++v) {
    if (arena.turn(v) != Turn::Controller || !w.contains(v)) continue;
    for (const auto& e : arena.edges(v))
      if (w.contains(e.target)) {
        s.set(v, e.action);
        break;
      }
  }
  return s;
}

// -------------------------------------------------------------- templates

TemplateReport check_templates(const GameArena& arena, const Strategy& strategy) {
  TemplateReport r;
  const auto& dom = arena.domain();
  const std::size_t n = arena.size();
  std::vector<std::uint8_t> seen(n, 0);
  std::vector<std::uint32_t> order, stack{arena.initial()};
  seen[arena.initial()] = 1;

  // successor lists of the strategy-restricted graph, for cycle detection
  std::vector<std::vector<std::uint32_t>> succ(n);

  auto record = [&](std::optional<std::uint32_t>& slot, bool& flag, std::uint32_t v) {
    if (!slot) slot = v;
    flag = false;
  };

  while (!stack.empty()) {
    const std::uint32_t v = stack.back();
    stack.pop_back();
    order.push_back(v);

    if (arena.goal(v)) continue;
    if (arena.bad(v)) {
      record(r.safety_witness, r.safety, v);
      continue;
    }

    if (arena.turn(v) == Turn::Environment) {
      if (arena.edges(v).empty()) ++r.terminal_non_goal;
      for (const auto& e : arena.edges(v)) succ[v].push_back(e.target);
    } else {
      const auto choice = strategy.action_at(v);
      if (!choice) {
        ++r.undefined_choices;
        record(r.safety_witness, r.safety, v);
        continue;
      }
      const std::string& name = arena.actions().at(*choice).name;
      if (dom) {
        const GameState& s = dom->states[v];
        const WorldState w = to_world(s.world, dom->scenario);
        const auto& th = dom->scenario.supervisor.thresholds;
        const double thw = compute_thw(w), ttc = compute_ttc(w);
        const ControlAction act = parse_action(name);
        if (act.mode() == Mode::Intervention && safe_now(thw, ttc, th) && !risk_warn(thw, ttc, th))
          record(r.min_intervention_witness, r.min_intervention, v);
        if (act.kind == ControllerAction::Hint) {
          for (const auto& e : arena.edges(v)) {
            if (e.action != *choice) continue;
            for (const auto& d : arena.edges(e.target))
              if (!dom->states[d.target].full_deliberation)
                record(r.response_witness, r.response, d.target);
          }
        }
      }
      bool moved = false;
      for (const auto& e : arena.edges(v))
        if (e.action == *choice) {
          succ[v].push_back(e.target);
          moved = true;
          break;
        }
      if (!moved) {
        ++r.undefined_choices;
        record(r.safety_witness, r.safety, v);
      }
    }
    for (std::uint32_t t : succ[v])
      if (!seen[t]) {
        seen[t] = 1;
        stack.push_back(t);
      }
  }
  r.reachable_states = order.size();
  r.reachability = r.terminal_non_goal == 0;

  // Kahn on the reachable subgraph: leftovers sit on or behind a cycle
  std::vector<std::size_t> indeg(n, 0);
  for (std::uint32_t v : order)
    for (std::uint32_t t : succ[v]) ++indeg[t];
  std::vector<std::uint32_t> ready;
  for (std::uint32_t v : order)
    if (indeg[v] == 0) ready.push_back(v);
  std::size_t removed = 0;
  while (!ready.empty()) {
    const std::uint32_t v = ready.back();
    ready.pop_back();
    ++removed;
    for (std::uint32_t t : succ[v])
      if (--indeg[t] == 0) ready.push_back(t);
  }
  r.infinite_plays = removed != order.size();
  return r;
}

// ------------------------------------------------------------ reporting

ArenaStats arena_stats(const GameArena& arena, const WinningRegion& w) {
  ArenaStats s;
  s.states = arena.size();
  s.edges = arena.num_edges();
  for (std::uint32_t v = 0; v < arena.size(); ++v) {
    if (arena.turn(v) == Turn::Environment) {
      ++s.environment_states;
      s.max_uncontrollable_branching = std::max(s.max_uncontrollable_branching, arena.edges(v).size());
    } else {
      ++s.controller_states;
    }
  }
  s.iterations = w.iterations();
  s.winning = w.size();
  s.realizable = realizable(arena, w);
  return s;
}

std::string format_arena_stats(const ArenaStats& s) {
  std::ostringstream os;
  os << "states " << s.states << '\n'
     << "environment_states " << s.environment_states << '\n'
     << "controller_states " << s.controller_states << '\n'
     << "edges " << s.edges << '\n'
     << "max_uncontrollable_branching " << s.max_uncontrollable_branching << '\n'
     << "iterations " << s.iterations << '\n'
     << "winning " << s.winning << '\n'
     << "realizable " << (s.realizable ? "yes" : "no") << '\n';
  return os.str();
}

std::string arena_to_dot(const GameArena& arena, const WinningRegion* w, const Strategy* strategy) {
  std::ostringstream os;
  os << "digraph arena {\n  __start [shape=point];\n  __start -> n" << arena.initial() << ";\n";
  for (std::uint32_t v = 0; v < arena.size(); ++v) {
    os << "  n" << v << " [shape=" << (arena.turn(v) == Turn::Controller ? "box" : "ellipse");
    if (arena.bad(v)) os << ", color=red";
    if (arena.goal(v)) os << ", color=green";
    if (w && w->contains(v)) os << ", style=filled, fillcolor=lightgrey";
    os << "];\n";
  }
  for (std::uint32_t v = 0; v < arena.size(); ++v) {
    const auto chosen = strategy ? strategy->action_at(v) : std::nullopt;
    for (const auto& e : arena.edges(v)) {
      os << "  n" << v << " -> n" << e.target << " [label=\"" << arena.actions()[e.action].name
         << "\"";
      if (!arena.actions()[e.action].controllable) os << ", style=dashed";
      if (chosen && *chosen == e.action) os << ", penwidth=2";
      os << "];\n";
    }
  }
  os << "}\n";
  return os.str();
}

// --------------------------------------------------------- strategy file

std::string hm_fingerprint(const MealyMachine& hm) { return fnv1a_hex(serialize(hm)); }

StrategyFile to_strategy_file(const GameArena& arena, const Strategy& strategy,
                              const MealyMachine& hm) {
  const auto& dom = arena.domain();
  if (!dom) throw Error(ErrorKind::ContractViolation, "arena carries no driving-scenario states");
  StrategyFile f;
  f.scenario_fingerprint = scenario_fingerprint(dom->scenario);
  f.hm_fingerprint = hm_fingerprint(hm);
  f.variant = dom->variant;
  for (std::uint32_t v = 0; v < arena.size(); ++v)
    if (auto a = strategy.action_at(v))
      f.entries.emplace_back(state_key(dom->states[v]), arena.actions()[*a].name);
  return f;
}

namespace {
constexpr const char* kFields = "drv,mode,k,lp,lv,fp,fv,lvl,acc,chain,hint,turn";
}

std::string serialize_strategy(const StrategyFile& f) {
  std::string out;
  out.reserve(f.entries.size() * 48 + 256);
  out += "strategy v1\n";
  out += "scenario " + f.scenario_fingerprint + "\n";
  out += "hm " + f.hm_fingerprint + "\n";
  out += std::string("variant ") + to_string(f.variant) + "\n";
  out += std::string("fields ") + kFields + "\n";
  out += "entries " + std::to_string(f.entries.size()) + "\n";
  for (const auto& [k, a] : f.entries) {
    out += k;
    out += ' ';
    out += a;
    out += '\n';
  }
  return out;
}

StrategyFile parse_strategy(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  auto header = [&](const std::string& key) {
    if (!std::getline(in, line)) throw Error(ErrorKind::Parse, "strategy file truncated");
    if (key.empty()) return line;
    if (line.rfind(key + " ", 0) != 0)
      throw Error(ErrorKind::Parse, "strategy file: expected '" + key + "' line");
    return line.substr(key.size() + 1);
  };
  if (header("") != "strategy v1") throw Error(ErrorKind::Parse, "not a strategy v1 file");
  StrategyFile f;
  f.scenario_fingerprint = header("scenario");
  f.hm_fingerprint = header("hm");
  f.variant = parse_variant(header("variant"));
  if (header("fields") != kFields) throw Error(ErrorKind::Parse, "strategy file: unknown key layout");
  const long long count = parse_int("entries", header("entries"));
  if (count < 0) throw Error(ErrorKind::Parse, "strategy file: negative entry count");
  f.entries.reserve(static_cast<std::size_t>(count));
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto sp = line.find(' ');
    if (sp == std::string::npos || line.find(' ', sp + 1) != std::string::npos)
      throw Error(ErrorKind::Parse, "strategy file: malformed entry '" + line + "'");
    std::string action = line.substr(sp + 1);
    parse_action(action);
    f.entries.emplace_back(line.substr(0, sp), std::move(action));
  }
  if (f.entries.size() != static_cast<std::size_t>(count))
    throw Error(ErrorKind::Parse, "strategy file: entry count mismatch");
  return f;
}

}  // namespace hcps
