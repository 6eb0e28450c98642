#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fixtures.hpp"
#include "hcps/driver.hpp"
#include "hcps/error.hpp"
#include "hcps/learner.hpp"

using namespace hcps;

namespace {

std::vector<std::uint8_t> members(const WinningRegion& w) { return w.members(); }

std::vector<std::uint8_t> expect(std::size_t n, std::initializer_list<std::uint32_t> in) {
  std::vector<std::uint8_t> v(n, 0);
  for (auto i : in) v[i] = 1;
  return v;
}

// close follower, quick goal, exact sensing: a few hundred states
Scenario small_scenario(int offset) {
  return parse_scenario("dest = 60\nhorizon = 30\nsensor_offset = " + std::to_string(offset) + "\n");
}

const MealyMachine& driver_hm() {
  static const MealyMachine hm = [] {
    DriverSul sul;
    return learn(sul, exact_oracle(fx::explicit_driver().machine), LearnConfig{}).hm;
  }();
  return hm;
}

}  // namespace

TEST_CASE("micro-arenas against hand-derived regions") {
  const auto fl = fx::forced_loss().build();
  auto w = solve(fl);
  CHECK(members(w) == expect(6, {1, 4}));
  CHECK_FALSE(realizable(fl, w));
  CHECK_THROWS_AS(extract_strategy(fl, w), Error);

  const auto nb = fx::no_bad().build();
  CHECK(solve(nb).size() == nb.size());
  CHECK(solve(nb).iterations() == 0);

  const auto un = fx::unrealizable().build();
  CHECK(solve(un).size() == 0);

  const auto sc = fx::safe_cycle().build();
  w = solve(sc);
  CHECK(members(w) == expect(5, {0, 1, 2, 4}));
  const auto strat = extract_strategy(sc, w);
  CHECK(sc.actions()[*strat.action_at(1)].name == "c1");
  CHECK(sc.actions()[*strat.action_at(4)].name == "c1");
  const auto rep = check_templates(sc, strat);
  CHECK(rep.safety);
  CHECK(rep.infinite_plays);
  CHECK(rep.reachability);  // no finite maximal play at all
  CHECK(rep.reachable_states == 4);

  const auto g = fx::goal_at_start().build();
  CHECK(realizable(g, solve(g)));
  CHECK(check_templates(g, extract_strategy(g, solve(g))).all_pass());
}

TEST_CASE("attractor layers") {
  // chain of environment nodes into bad: one layer per hop
  fx::Micro m;
  m.nodes = {{fx::E}, {fx::E}, {fx::E}, {fx::E, true}};
  m.edges = {{0, "u", 1}, {1, "u", 2}, {2, "u", 3}};
  const auto w = solve(m.build());
  CHECK(w.size() == 0);
  CHECK(w.iterations() == 4);  // the last layer adds nothing
}

TEST_CASE("override forcing picks the gentlest safe override") {
  const auto a = fx::override_forcing().build();
  const auto w = solve(a);
  CHECK(members(w) == expect(7, {0, 1, 5, 6}));
  const auto s = extract_strategy(a, w);
  CHECK(a.actions()[*s.action_at(1)].name == "override:-2");
  CHECK(s.size() == 1);
  const auto rep = check_templates(a, s);
  CHECK(rep.safety);
  CHECK_FALSE(rep.reachability);
  CHECK(rep.terminal_non_goal == 1);
  CHECK_FALSE(rep.infinite_plays);
}

TEST_CASE("solver agrees with brute force on random arenas") {
  for (std::uint64_t seed = 1; seed <= 300; ++seed) {
    const auto m = fx::random_micro(seed, 3 + static_cast<std::uint32_t>(seed % 12));
    const auto w = solve(m.build());
    fx::BruteForce bf(m);
    REQUIRE_MESSAGE(w.members() == bf.winning(), "seed " << seed);
  }
}

TEST_CASE("strategy stays inside the winning region") {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const auto m = fx::random_micro(seed * 7919, 12);
    const auto a = m.build();
    const auto w = solve(a);
    if (!realizable(a, w)) continue;
    const auto s = extract_strategy(a, w);
    for (std::uint32_t v = 0; v < a.size(); ++v) {
      // goal nodes end the play, they need no move
      if (a.turn(v) != Turn::Controller || !w.contains(v) || a.goal(v)) continue;
      const auto c = s.action_at(v);
      REQUIRE(c.has_value());
      for (const auto& e : a.edges(v))
        if (e.action == *c) CHECK(w.contains(e.target));
    }
    CHECK(check_templates(a, s).safety);
  }
}

TEST_CASE("builder validation") {
  ArenaBuilder b;
  const auto c = b.add_node(Turn::Controller);
  b.add_node(Turn::Environment);
  CHECK_THROWS_AS(b.finish(), Error);  // controller node without a move

  ArenaBuilder d;
  const auto x = d.add_node(Turn::Environment);
  const auto y = d.add_node(Turn::Controller);
  const auto u = d.action("u", false);
  CHECK_THROWS_AS(d.action("u", true), Error);   // same name on both sides
  CHECK_THROWS_AS(d.add_edge(y, u, x), Error);   // controller taking an environment move
  CHECK_THROWS_AS(d.add_edge(x, u, 9), Error);
  (void)c;
  CHECK_THROWS_AS(ArenaBuilder{}.finish(), Error);
}

TEST_CASE("dot output") {
  const auto a = fx::override_forcing().build();
  const auto w = solve(a);
  const auto s = extract_strategy(a, w);
  const auto dot = arena_to_dot(a, &w, &s);
  CHECK(dot.rfind("digraph arena {", 0) == 0);
  CHECK(dot.find("n1 -> n5 [label=\"override:-2\", penwidth=2]") != std::string::npos);
  CHECK(dot.find("n0 -> n1 [label=\"sense:2\", style=dashed]") != std::string::npos);
  CHECK(dot.find("n2 [shape=ellipse, color=red]") != std::string::npos);
}

TEST_CASE("action names") {
  CHECK(action_name({ControllerAction::None, 1.0}) == "none");
  CHECK(action_name({ControllerAction::Hint, 1.0}) == "hint");
  CHECK(action_name({ControllerAction::Override, -2.0}) == "override:-2");
  CHECK(parse_action("override:-3") == ControlAction{ControllerAction::Override, -3.0});
  CHECK(parse_action("hint").mode() == Mode::Advisory);
  CHECK_THROWS_AS(parse_action("brake"), Error);
  CHECK(parse_variant("no-override") == Variant::NoOverride);
  CHECK_THROWS_AS(parse_variant("partial"), Error);
}

TEST_CASE("domain arena on a small scenario") {
  const auto& hm = driver_hm();
  const DriverParams params;
  const auto sc = small_scenario(0);
  const auto a = build_arena(hm, sc, params);
  const auto w = solve(a);
  const auto stats = arena_stats(a, w);
  CHECK(stats.max_uncontrollable_branching == 1);
  CHECK(stats.environment_states + stats.controller_states == stats.states);
  CHECK(stats.realizable);
  REQUIRE(a.domain().has_value());
  CHECK(a.domain()->approximate_hint_edges == 0);

  // node structure mirrors the payload
  for (std::uint32_t v = 0; v < a.size(); ++v) {
    const auto& st = a.domain()->states[v];
    CHECK(st.turn == a.turn(v));
    const auto wv = to_world(st.world, sc);
    CHECK(a.bad(v) == (st.turn == Turn::Environment && wv.follow.pos >= wv.lead.pos));
    for (const auto& e : a.edges(v)) {
      CHECK(a.actions()[e.action].controllable == (a.turn(v) == Turn::Controller));
      CHECK(a.turn(e.target) != a.turn(v));
    }
  }

  const auto s = extract_strategy(a, w);
  const auto rep = check_templates(a, s);
  CHECK(rep.all_pass());
  CHECK(rep.undefined_choices == 0);
  CHECK_FALSE(rep.infinite_plays);

  const auto wider = build_arena(hm, small_scenario(1), params);
  CHECK(arena_stats(wider, solve(wider)).max_uncontrollable_branching == 3);
}

TEST_CASE("variants shrink the controller's options") {
  const auto& hm = driver_hm();
  const DriverParams params;
  const auto sc = small_scenario(1);
  const auto full = build_arena(hm, sc, params);
  const auto no = build_arena(hm, sc, params, {Variant::NoOverride});
  for (const auto& act : no.actions()) CHECK(act.name.rfind("override", 0) != 0);
  CHECK(no.domain()->variant == Variant::NoOverride);
  // anything the weaker controller wins, the full one wins too
  if (realizable(no, solve(no))) CHECK(realizable(full, solve(full)));
}

TEST_CASE("refining an exact grid leaves the game unchanged") {
  const auto& hm = driver_hm();
  const DriverParams params;
  const auto coarse = small_scenario(1);
  auto fine = coarse;
  fine.grid.pos_step = 0.125;
  fine.grid.vel_step = 0.25;
  const auto a = build_arena(hm, coarse, params), b = build_arena(hm, fine, params);
  const auto sa = arena_stats(a, solve(a)), sb = arena_stats(b, solve(b));
  CHECK(sa.states == sb.states);
  CHECK(sa.edges == sb.edges);
  CHECK(sa.winning == sb.winning);
  CHECK(sa.realizable == sb.realizable);
}

TEST_CASE("build errors") {
  const DriverParams params;
  const auto sc = small_scenario(1);
  try {
    build_arena(driver_hm(), sc, params, {Variant::Full, 50});
    FAIL("expected a build limit");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::BuildLimit);
  }
  try {
    build_arena(fx::toggle(), sc, params);
    FAIL("expected an alphabet mismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::AlphabetMismatch);
  }
  // right inputs, outputs that are not driver responses
  const auto junk = fx::constant(Alphabet({"1", "2", "3", "4"}), "zzz");
  try {
    build_arena(junk, sc, params);
    FAIL("expected an alphabet mismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::AlphabetMismatch);
  }
  auto slow = params;
  slow.decision_epoch = 1.0;
  CHECK_THROWS_AS(build_arena(driver_hm(), sc, slow), Error);
}

TEST_CASE("strategy file round trip") {
  const auto& hm = driver_hm();
  const auto a = build_arena(hm, small_scenario(1), DriverParams{});
  const auto w = solve(a);
  const auto s = extract_strategy(a, w);
  const auto f = to_strategy_file(a, s, hm);
  CHECK(f.entries.size() == s.size());
  CHECK(f.hm_fingerprint == hm_fingerprint(hm));
  const auto text = serialize_strategy(f);
  CHECK(text.rfind("strategy v1\n", 0) == 0);
  const auto back = parse_strategy(text);
  CHECK(back.entries == f.entries);
  CHECK(back.scenario_fingerprint == f.scenario_fingerprint);
  CHECK(serialize_strategy(back) == text);

  CHECK_THROWS_AS(parse_strategy("strategy v2\n"), Error);
  auto broken = text;
  broken.replace(broken.find("entries "), 8, "entries 9");
  CHECK_THROWS_AS(parse_strategy(broken), Error);
  CHECK_THROWS_AS(to_strategy_file(fx::safe_cycle().build(), s, hm), Error);
}

TEST_CASE("state keys") {
  GameState s;
  s.world = {3, 200, 24, 0, 30};
  const auto k = state_key(s);
  CHECK(k.find(' ') == std::string::npos);
  GameState t = s;
  t.hint_pending = true;
  CHECK(state_key(t) != k);
  CHECK(GameStateHash{}(s) == GameStateHash{}(GameState(s)));
}
