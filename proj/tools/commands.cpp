#include "commands.hpp"

#include <cstdio>
#include <filesystem>
#include <iostream>

#include "hcps/cosim.hpp"
#include "hcps/error.hpp"
#include "hcps/rng.hpp"

namespace fs = std::filesystem;

namespace hcps::cli {

namespace {

Scenario scenario_of(const RunConfig& cfg) {
  return cfg.scenario_path.empty() ? default_scenario() : load_scenario(cfg.scenario_path);
}

DriverParams driver_of(const RunConfig& cfg) {
  return cfg.driver_path.empty() ? DriverParams{} : load_driver_params(cfg.driver_path);
}

// Each run owns its output directory.
fs::path prepare_out(const std::string& out) {
  if (out.empty()) throw Error(ErrorKind::Io, "--out is required");
  const fs::path p(out);
  std::error_code ec;
  if (fs::exists(p, ec)) {
    if (!fs::is_directory(p, ec) || !fs::is_empty(p, ec))
      throw Error(ErrorKind::Io, "output directory '" + out + "' exists and is not empty");
  } else if (!fs::create_directories(p, ec) || ec) {
    throw Error(ErrorKind::Io, "cannot create output directory '" + out + "'");
  }
  return p;
}

LearnConfig learn_config(const RunConfig& cfg) {
  LearnConfig lc;
  lc.oracle = cfg.oracle;
  lc.oracle.rng_seed = derive_seed(cfg.seed, "oracle");
  lc.oracle.validate();
  lc.max_rounds = cfg.max_rounds;
  lc.max_states = cfg.max_states;
  return lc;
}

std::string verdicts_csv(const std::vector<Verdict>& vs, const std::vector<SimTrace>& traces,
                         const std::vector<std::uint64_t>& seeds) {
  std::string s = "run,seed,status,witness,rows,lookup_misses\n";
  for (std::size_t i = 0; i < vs.size(); ++i) {
    s += std::to_string(i) + ',' + std::to_string(seeds[i]) + ',' + to_string(vs[i].status) + ',' +
         (vs[i].witness ? std::to_string(*vs[i].witness) : std::string()) + ',' +
         std::to_string(traces[i].rows.size()) + ',' + std::to_string(traces[i].lookup_misses) +
         '\n';
  }
  return s;
}

std::string two_digits(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02zu", i);
  return buf;
}

template <class F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
  }
  return kUsage;
}

}  // namespace

int cmd_learn(const RunConfig& cfg) {
  return guarded([&] {
    const DriverParams params = driver_of(cfg);
    if (!cfg.scenario_path.empty()) load_scenario(cfg.scenario_path);  // fail early on bad paths
    const fs::path out = prepare_out(cfg.out);
    DriverSul sul(params);
    const LearnResult r = learn(sul, learn_config(cfg));
    save_text((out / "hm.mealy").string(), serialize(r.hm));
    save_text((out / "hm.dot").string(), to_dot(r.hm));
    save_text((out / "learn_report.csv").string(), learn_report_csv(r));
    std::cout << "learned HM: " << r.hm.num_states() << " states, " << r.hm.num_transitions()
              << " transitions, " << r.stats.rounds << " rounds\n";
    if (!r.converged) {
      std::cerr << "learning did not converge within the round or state budget\n";
      return int(kUsage);
    }
    return int(kOk);
  });
}

int cmd_synth(const RunConfig& cfg) {
  return guarded([&] {
    if (cfg.hm_path.empty()) throw Error(ErrorKind::Io, "--hm is required");
    const Scenario sc = scenario_of(cfg);
    const DriverParams params = driver_of(cfg);
    const MealyMachine hm = load_mealy(cfg.hm_path);
    const Variant variant = parse_variant(cfg.variant);
    const fs::path out = prepare_out(cfg.out);

    const GameArena arena = build_arena(hm, sc, params, ArenaConfig{variant, cfg.state_cap});
    const WinningRegion w = solve(arena);
    const ArenaStats stats = arena_stats(arena, w);
    save_text((out / "arena_stats.txt").string(),
              std::string("variant ") + to_string(variant) + "\n" + format_arena_stats(stats));
    std::cout << "arena: " << stats.states << " states, " << stats.edges << " edges, "
              << stats.iterations << " solver iterations, |W| = " << stats.winning << '\n';
    if (!stats.realizable) {
      std::cout << "unrealizable: variant '" << to_string(variant)
                << "' cannot keep the initial state winning; revise the automation design\n";
      return int(kUnrealizable);
    }
    const StrategyFile f = to_strategy_file(arena, extract_strategy(arena, w), hm);
    save_text((out / "strategy.txt").string(), serialize_strategy(f));
    std::cout << "strategy: " << f.entries.size() << " entries\n";
    return int(kOk);
  });
}

int cmd_validate(const RunConfig& cfg) {
  return guarded([&] {
    if (cfg.hm_path.empty()) throw Error(ErrorKind::Io, "--hm is required");
    const Scenario sc = scenario_of(cfg);
    const DriverParams params = driver_of(cfg);
    const MealyMachine hm = load_mealy(cfg.hm_path);
    ControlPolicy policy;
    if (cfg.policy == "nominal") {
      policy = [](const GameState&) { return ControlAction{}; };
    } else if (cfg.policy == "strategy") {
      if (cfg.strategy_path.empty()) throw Error(ErrorKind::Io, "--strategy is required");
      policy = strategy_policy(parse_strategy(load_text(cfg.strategy_path)), sc, hm);
    } else {
      throw Error(ErrorKind::RejectedInput, "unknown policy '" + cfg.policy + "'");
    }
    const HmProjection projection(hm, params);
    const fs::path out = prepare_out(cfg.out);
    fs::create_directories(out / "traces");

    if (cfg.runs == 0) std::cerr << "warning: zero runs requested; nothing validated\n";
    std::vector<SimTrace> traces;
    std::vector<Verdict> verdicts;
    std::vector<std::uint64_t> seeds;
    bool pass = true;
    for (std::size_t r = 0; r < cfg.runs; ++r) {
      DriverSul sul(params);
      seeds.push_back(run_seed(cfg.seed, 1, r));
      traces.push_back(execute(policy, projection, sul, sc, seeds.back()));
      verdicts.push_back(monitor(traces.back(), sc.initial.dest, sc.supervisor.thresholds));
      pass &= verdicts.back().pass();
      save_text((out / "traces" / ("run_" + two_digits(r) + ".csv")).string(),
                trace_csv(traces.back()));
    }
    save_text((out / "verdicts.csv").string(), verdicts_csv(verdicts, traces, seeds));
    std::size_t passed = 0;
    for (const auto& v : verdicts) passed += v.pass();
    std::cout << passed << "/" << verdicts.size() << " runs passed\n";
    return int(pass ? kOk : kValidationFailed);
  });
}

int cmd_refine(const RunConfig& cfg) {
  return guarded([&] {
    RefineLoopConfig rc;
    rc.scenario = scenario_of(cfg);
    rc.driver = driver_of(cfg);
    rc.learn = learn_config(cfg);
    rc.learn.max_states = 0;
    rc.initial_max_states = cfg.max_states;
    rc.variant = parse_variant(cfg.variant);
    if (!cfg.expand_variant.empty()) rc.expanded_variant = parse_variant(cfg.expand_variant);
    rc.runs = cfg.runs;
    rc.max_iterations = cfg.max_iterations;
    rc.state_cap = cfg.state_cap;
    rc.seed = cfg.seed;
    const fs::path out = prepare_out(cfg.out);

    const RefinementReport report = refine_loop(rc, [&](const IterationArtifacts& a) {
      const fs::path dir = out / ("iter_" + two_digits(a.record.index));
      fs::create_directories(dir);
      save_text((dir / "hm.mealy").string(), serialize(a.hm));
      save_text((dir / "arena_stats.txt").string(),
                std::string("variant ") + to_string(a.record.variant) + "\n" +
                    format_arena_stats(a.record.arena));
      if (a.strategy) save_text((dir / "strategy.txt").string(), serialize_strategy(*a.strategy));
      std::vector<std::uint64_t> seeds;
      for (std::size_t r = 0; r < a.traces.size(); ++r) seeds.push_back(run_seed(rc.seed, a.record.index, r));
      save_text((dir / "verdicts.csv").string(), verdicts_csv(a.record.verdicts, a.traces, seeds));
      std::cout << "iteration " << a.record.index << ": HM " << a.record.hm_states << " states, "
                << (a.record.arena.realizable ? "realizable" : "unrealizable") << '\n';
    });
    save_text((out / "report.txt").string(), format_report(report));
    std::cout << "termination: " << to_string(report.termination) << '\n';
    switch (report.termination) {
      case Termination::AllPass: return int(kOk);
      case Termination::Unrealizable: return int(kUnrealizable);
      default: return int(kValidationFailed);
    }
  });
}

int cmd_demo(const RunConfig& cfg) {
  return guarded([&] {
    const Scenario sc = scenario_of(cfg);
    const DriverParams params = driver_of(cfg);
    const Variant variant = parse_variant(cfg.variant);
    DriverSul sul(params);
    const LearnResult lr = learn(sul, learn_config(cfg));
    std::cout << "1. learned HM from the reference driver: " << lr.hm.num_states() << " states, "
              << lr.hm.num_transitions() << " transitions\n";
    const GameArena arena = build_arena(lr.hm, sc, params, ArenaConfig{variant, cfg.state_cap});
    const WinningRegion w = solve(arena);
    const ArenaStats st = arena_stats(arena, w);
    std::cout << "2. game arena: " << st.states << " states, " << st.edges << " edges; |W| = "
              << st.winning << " after " << st.iterations << " solver iterations\n";
    if (!st.realizable) {
      std::cout << "   variant '" << to_string(variant) << "' is unrealizable\n";
      return int(kUnrealizable);
    }
    const StrategyFile f = to_strategy_file(arena, extract_strategy(arena, w), lr.hm);
    std::cout << "3. strategy synthesized: " << f.entries.size() << " controller states\n";
    const HmProjection projection(lr.hm, params);
    DriverSul run_sul(params);
    const SimTrace trace =
        execute(strategy_policy(f, sc, lr.hm), projection, run_sul, sc, run_seed(cfg.seed, 1, 0));
    const Verdict v = monitor(trace, sc.initial.dest, sc.supervisor.thresholds);
    std::cout << "4. supervised co-simulation against the full driver model:\n\n";
    std::printf("%6s %9s %10s %6s %6s  %-13s %10s %10s  %s\n", "t", "lead_pos", "follow_pos",
                "thw", "ttc", "control_mode", "driver_acc", "follow_acc", "controller_action");
    for (const auto& r : trace.rows) {
      std::printf("%6.1f %9.2f %10.2f %6.2f %6.2f  %-13s %10s %10s  %s\n", r.t, r.world.lead.pos,
                  r.world.follow.pos, r.thw, r.ttc, to_string(r.mode),
                  format_acc(r.driver_acc).c_str(), format_acc(r.applied_acc).c_str(),
                  to_string(r.action));
    }
    std::cout << "\n5. monitor verdict: " << to_string(v.status) << '\n';
    return int(v.pass() ? kOk : kValidationFailed);
  });
}

}  // namespace hcps::cli
