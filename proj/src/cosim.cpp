#include "hcps/cosim.hpp"

#include <cstdio>
#include <memory>
#include <sstream>

#include "hcps/error.hpp"
#include "hcps/rng.hpp"

namespace hcps {

Word SimTrace::stimuli() const {
  Word w;
  w.reserve(rows.size());
  for (const auto& r : rows) w.push_back(static_cast<std::size_t>(r.perceived_level - 1));
  return w;
}

HmProjection::HmProjection(const MealyMachine& hm, const DriverParams& params) {
  DriverSul sul(params);
  if (!(sul.inputs() == hm.inputs()))
    throw Error(ErrorKind::AlphabetMismatch, "HM inputs do not match the driver's levels");
  const auto words = access_words(hm);
  for (StateId q = 0; q < words.size(); ++q) {
    sul.reset();
    for (std::size_t x : words[q]) sul.step(x);
    if (!project(sul.state())) table_.emplace_back(sul.state(), q);
  }
}

std::optional<StateId> HmProjection::project(const DriverState& s) const {
  for (const auto& [d, q] : table_)
    if (d == s) return q;
  return std::nullopt;
}

ControlPolicy strategy_policy(const StrategyFile& f, const Scenario& sc, const MealyMachine& hm) {
  if (f.scenario_fingerprint != scenario_fingerprint(sc))
    throw Error(ErrorKind::RejectedInput, "strategy was synthesized for a different scenario");
  if (f.hm_fingerprint != hm_fingerprint(hm))
    throw Error(ErrorKind::RejectedInput, "strategy was synthesized for a different HM");
  auto table = std::make_shared<std::unordered_map<std::string, ControlAction>>();
  table->reserve(f.entries.size());
  for (const auto& [k, a] : f.entries) table->emplace(k, parse_action(a));
  return [table](const GameState& s) -> std::optional<ControlAction> {
    auto it = table->find(state_key(s));
    if (it == table->end()) return std::nullopt;
    return it->second;
  };
}

SimTrace execute(const ControlPolicy& policy, const HmProjection& projection, DriverSul& sul,
                 const Scenario& sc, std::uint64_t seed) {
  sc.validate();
  const DriverParams& params = sul.params();
  SplitMix64 rng(seed);
  SimTrace trace;
  sul.reset();
  WorldState w = sc.initial;
  Mode mode = Mode::Nominal;
  bool hint_pending = false;

  for (int step = 0;; ++step) {
    if (w.follow.pos >= w.lead.pos || w.follow.pos >= w.dest || step >= sc.horizon) break;
    TraceRow row;
    row.t = w.t;
    row.world = w;
    row.thw = compute_thw(w);
    row.ttc = compute_ttc(w);

    const auto levels =
        sensor_perturb(quantize_thw(row.thw, params.thw_levels), sc.sensor, params.num_levels());
    row.perceived_level = levels[rng.below(levels.size())];
    if (hint_pending) sul.apply_hint();
    const Response resp = sul.query(row.perceived_level);
    row.driver_acc = resp.acc;
    row.rule_chain = resp.rule_chain;

    std::optional<ControlAction> act;
    if (auto q = projection.project(sul.state())) {
      GameState s;
      s.driver = static_cast<std::uint32_t>(*q);
      s.mode = mode;
      s.world = to_grid(w, sc, step);
      s.perceived_level = static_cast<std::int8_t>(row.perceived_level);
      s.driver_acc = resp.acc;
      s.full_deliberation = resp.full_deliberation();
      s.turn = Turn::Controller;
      act = policy(s);
    }
    if (!act) {
      // SUL left the abstraction: brake as hard as allowed
      act = ControlAction{ControllerAction::Override, sc.supervisor.acc_floor};
      row.lookup_miss = true;
      ++trace.lookup_misses;
    }
    row.mode = act->mode();
    row.action = act->kind;
    row.applied_acc = act->kind == ControllerAction::Override ? act->applied_acc : resp.acc;
    trace.rows.push_back(row);

    w = step_world(w, row.applied_acc, sc.dynamics);
    mode = row.mode;
    hint_pending = act->kind == ControllerAction::Hint;
  }
  trace.final_world = w;
  return trace;
}

const char* to_string(VerdictStatus s) {
  switch (s) {
    case VerdictStatus::SafeAndReached: return "safe-and-reached";
    case VerdictStatus::SafetyViolation: return "safety-violation";
    case VerdictStatus::GoalNotReached: return "goal-not-reached";
    case VerdictStatus::MinInterventionViolation: return "min-intervention-violation";
    case VerdictStatus::ResponseViolation: return "response-violation";
  }
  return "?";
}

Verdict monitor(const SimTrace& trace, double dest, const HazardThresholds& th) {
  const auto& rows = trace.rows;
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (!(rows[i].world.follow.pos < rows[i].world.lead.pos))
      return {VerdictStatus::SafetyViolation, i};
  if (!(trace.final_world.follow.pos < trace.final_world.lead.pos) &&
      !(trace.final_world.follow.pos >= dest))
    return {VerdictStatus::SafetyViolation, rows.size()};

  if (!(trace.final_world.follow.pos >= dest)) return {VerdictStatus::GoalNotReached, rows.size()};

  for (std::size_t i = 0; i < rows.size(); ++i)
    if (rows[i].mode == Mode::Intervention && safe_now(rows[i].thw, rows[i].ttc, th))
      return {VerdictStatus::MinInterventionViolation, i};

  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    if (rows[i].action != ControllerAction::Hint) continue;
    if (rows[i + 1].rule_chain != full_chain()) return {VerdictStatus::ResponseViolation, i + 1};
  }
  return {};
}

namespace {

std::string num(double v) {
  if (v == kInfinity) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string chain_text(const std::vector<Rule>& chain) {
  std::string s;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    if (i) s += ';';
    s += to_string(chain[i]);
  }
  return s;
}

}  // namespace

std::string trace_csv(const SimTrace& trace) {
  std::ostringstream os;
  os << "t,lead_pos,follow_pos,lead_vel,follow_vel,thw,ttc,control_mode,driver_acc,follow_acc,"
        "controller_action,perceived_level,rule_chain,lookup_miss\n";
  for (const auto& r : trace.rows) {
    os << num(r.t) << ',' << num(r.world.lead.pos) << ',' << num(r.world.follow.pos) << ','
       << num(r.world.lead.vel) << ',' << num(r.world.follow.vel) << ',' << num(r.thw) << ','
       << num(r.ttc) << ',' << to_string(r.mode) << ',' << format_acc(r.driver_acc) << ','
       << format_acc(r.applied_acc) << ',' << to_string(r.action) << ',' << r.perceived_level
       << ',' << chain_text(r.rule_chain) << ',' << (r.lookup_miss ? 1 : 0) << '\n';
  }
  const WorldState& f = trace.final_world;
  os << num(f.t) << ',' << num(f.lead.pos) << ',' << num(f.follow.pos) << ',' << num(f.lead.vel)
     << ',' << num(f.follow.vel) << ",,,end,,,,,,\n";
  return os.str();
}

// ------------------------------------------------------------- refinement

RefineResult refine(const MealyMachine& hm, const std::vector<Word>& stimuli, Sul& sul,
                    const EquivalenceOracle& oracle, const LearnConfig& cfg) {
  if (!(sul.inputs() == hm.inputs()))
    throw Error(ErrorKind::AlphabetMismatch, "HM and SUL inputs differ");
  RefineResult out{hm, 0, 0, {}};

  auto diverging_prefix = [&](const MealyMachine& m, const Word& w) -> std::optional<Word> {
    sul.reset();
    StateId q = m.initial();
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (sul.step(w[i]) != m.output_symbol(q, w[i])) return Word(w.begin(), w.begin() + i + 1);
      q = m.next(q, w[i]);
    }
    return std::nullopt;
  };

  std::vector<Word> ces;
  for (std::size_t i = 0; i < stimuli.size(); ++i) {
    if (auto p = diverging_prefix(hm, stimuli[i])) ces.push_back(std::move(*p));
    else
      out.skipped.push_back("sequence " + std::to_string(i) +
                            " agrees with the HM; violation not caused by model fidelity");
  }
  out.distinguishing = ces.size();
  if (ces.empty()) return out;

  std::vector<Word> singles;
  for (std::size_t x = 0; x < hm.inputs().size(); ++x) singles.push_back({x});
  ObservationTable table(hm.inputs(), access_words(hm), singles);
  fill(table, sul);
  while (close(table, sul) || make_consistent(table, sul)) {
  }
  for (const Word& ce : ces) {
    if (!diverging_prefix(build_hypothesis(table), ce)) continue;  // fixed by an earlier one
    process_counterexample(table, ce, sul);
    ++out.injected;
  }

  LearnConfig unbounded = cfg;
  unbounded.max_states = 0;
  out.hm = resume_learning(std::move(table), {}, sul, oracle, unbounded).hm;
  return out;
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::AllPass: return "all-pass";
    case Termination::MaxIterations: return "max-iterations";
    case Termination::Stable: return "stable";
    case Termination::Unrealizable: return "unrealizable";
  }
  return "?";
}

bool IterationRecord::all_pass() const {
  for (const auto& v : verdicts)
    if (!v.pass()) return false;
  return arena.realizable;
}

std::uint64_t run_seed(std::uint64_t seed, std::size_t iteration, std::size_t run) {
  return derive_seed(seed, "run-" + std::to_string(iteration) + "-" + std::to_string(run));
}

RefinementReport refine_loop(const RefineLoopConfig& cfg,
                             const std::function<void(const IterationArtifacts&)>& observer) {
  if (cfg.max_iterations == 0) throw Error(ErrorKind::RejectedInput, "max_iterations must be >= 1");
  cfg.scenario.validate();
  RefinementReport report;
  report.scenario_fingerprint = scenario_fingerprint(cfg.scenario);
  report.seed = cfg.seed;

  DriverSul sul(cfg.driver);
  LearnConfig lc = cfg.learn;
  lc.oracle.rng_seed = derive_seed(cfg.seed, "oracle");
  lc.max_states = cfg.initial_max_states;
  MealyMachine hm = learn(sul, lc).hm;
  lc.max_states = 0;
  auto oracle = random_walk_oracle(sul, [&] {
    EqOracleConfig o = lc.oracle;
    o.rng_seed = derive_seed(cfg.seed, "refine-oracle");
    return o;
  }());

  Variant variant = cfg.variant;
  for (std::size_t i = 1;; ++i) {
    IterationRecord rec;
    rec.index = i;
    rec.variant = variant;
    rec.hm_states = hm.num_states();
    rec.hm_transitions = hm.num_transitions();

    const GameArena arena =
        build_arena(hm, cfg.scenario, cfg.driver, ArenaConfig{variant, cfg.state_cap});
    const WinningRegion w = solve(arena);
    rec.arena = arena_stats(arena, w);

    std::vector<SimTrace> traces;
    if (!rec.arena.realizable) {
      report.iterations.push_back(rec);
      if (observer) observer({report.iterations.back(), hm, nullptr, traces});
      if (cfg.expanded_variant && variant != *cfg.expanded_variant && i < cfg.max_iterations) {
        variant = *cfg.expanded_variant;
        continue;
      }
      report.termination = Termination::Unrealizable;
      break;
    }

    const StrategyFile file = to_strategy_file(arena, extract_strategy(arena, w), hm);
    const ControlPolicy policy = strategy_policy(file, cfg.scenario, hm);
    const HmProjection projection(hm, cfg.driver);
    std::vector<Word> violating;
    for (std::size_t r = 0; r < cfg.runs; ++r) {
      DriverSul run_sul(cfg.driver);
      traces.push_back(execute(policy, projection, run_sul, cfg.scenario, run_seed(cfg.seed, i, r)));
      const Verdict v = monitor(traces.back(), cfg.scenario.initial.dest,
                                cfg.scenario.supervisor.thresholds);
      rec.verdicts.push_back(v);
      rec.lookup_misses += traces.back().lookup_misses;
      if (!v.pass()) violating.push_back(traces.back().stimuli());
    }

    const bool pass = rec.all_pass();
    std::optional<RefineResult> refined;
    if (!pass && i < cfg.max_iterations) {
      refined = refine(hm, violating, sul, oracle, lc);
      rec.distinguishing = refined->distinguishing;
      rec.injected = refined->injected;
      rec.skipped = refined->skipped.size();
    }
    report.iterations.push_back(rec);
    if (observer) observer({report.iterations.back(), hm, &file, traces});

    if (pass) {
      report.termination = Termination::AllPass;
      break;
    }
    if (i >= cfg.max_iterations) {
      report.termination = Termination::MaxIterations;
      break;
    }
    if (minimize(refined->hm) == minimize(hm)) {
      report.termination = Termination::Stable;
      break;
    }
    hm = std::move(refined->hm);
  }
  return report;
}

std::string format_report(const RefinementReport& r) {
  std::ostringstream os;
  os << "refinement report v1\n"
     << "scenario " << r.scenario_fingerprint << '\n'
     << "seed " << r.seed << '\n'
     << "iterations " << r.iterations.size() << '\n';
  for (const auto& it : r.iterations) {
    std::size_t passed = 0;
    std::size_t counts[5] = {0, 0, 0, 0, 0};
    for (const auto& v : it.verdicts) {
      passed += v.pass();
      ++counts[static_cast<int>(v.status)];
    }
    os << "iteration " << it.index << '\n'
       << "  variant " << to_string(it.variant) << '\n'
       << "  hm_states " << it.hm_states << '\n'
       << "  hm_transitions " << it.hm_transitions << '\n'
       << "  arena_states " << it.arena.states << '\n'
       << "  arena_edges " << it.arena.edges << '\n'
       << "  solver_iterations " << it.arena.iterations << '\n'
       << "  winning " << it.arena.winning << '\n'
       << "  realizable " << (it.arena.realizable ? "yes" : "no") << '\n'
       << "  runs " << it.verdicts.size() << '\n'
       << "  passed " << passed << '\n';
    for (int s = 0; s < 5; ++s)
      os << "  verdict " << to_string(static_cast<VerdictStatus>(s)) << ' ' << counts[s] << '\n';
    os << "  lookup_misses " << it.lookup_misses << '\n'
       << "  distinguishing " << it.distinguishing << '\n'
       << "  injected " << it.injected << '\n'
       << "  skipped " << it.skipped << '\n';
  }
  os << "termination " << to_string(r.termination) << '\n';
  return os.str();
}

}  // namespace hcps
