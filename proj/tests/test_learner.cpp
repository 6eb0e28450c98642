#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fixtures.hpp"
#include "hcps/driver.hpp"
#include "hcps/error.hpp"
#include "hcps/learner.hpp"

using namespace hcps;

namespace {
const std::string kFull = "attend,read,encode,retrieve,decide:";
const std::string kShort = "attend,read,encode,n_ret:";
}  // namespace

TEST_CASE("fill on the reference driver") {
  DriverSul sul;
  ObservationTable t(sul.inputs(), {{}}, {{0}, {1}});
  fill(t, sul);
  // fresh: level 1 -> -1.5 - 0.375 = -1.875 -> -2 ; level 2 -> -0.5 - 0.125 -> -1
  CHECK(t.cell({}, 0) == std::vector<Symbol>{kFull + "-2"});
  CHECK(t.cell({}, 1) == std::vector<Symbol>{kFull + "-1"});
  CHECK(t.cell({0}, 0) == std::vector<Symbol>{kShort + "-2"});

  const Row before = t.row({0});
  CHECK(fill(t, sul) == 0);  // idempotent, no new queries
  CHECK(t.row({0}) == before);
}

TEST_CASE("closing the toggle table adds one length-1 prefix") {
  MealySul sul(fx::toggle());
  ObservationTable t(sul.inputs());
  fill(t, sul);
  CHECK_FALSE(is_closed(t));
  CHECK(close(t, sul));
  CHECK(t.prefixes() == std::vector<Word>{{}, {0}});
  CHECK(is_closed(t));
  CHECK_FALSE(close(t, sul));  // already closed
}

TEST_CASE("consistency repair on the three-state fixture") {
  MealySul sul(fx::inconsistency_fixture());
  // eps and "a" share a row under single inputs; after one more "a" they differ
  ObservationTable t(sul.inputs(), {{}, {0}, {0, 0}}, {{0}, {1}});
  fill(t, sul);
  CHECK(t.row({}) == t.row({0}));
  CHECK_FALSE(is_consistent(t));
  const auto before = t.suffixes().size();
  CHECK(make_consistent(t, sul));
  CHECK(t.suffixes().size() == before + 1);
  CHECK(t.suffixes().back() == Word{0, 0});
  CHECK(is_consistent(t));

  // injective rows: nothing to do
  MealySul tog(fx::toggle());
  ObservationTable u(tog.inputs(), {{}, {0}}, {{0}});
  fill(u, tog);
  CHECK_FALSE(make_consistent(u, tog));
}

TEST_CASE("hypotheses") {
  MealySul c(fx::constant(Alphabet({"a", "b"}), "z"));
  ObservationTable t(c.inputs());
  fill(t, c);
  CHECK(build_hypothesis(t).num_states() == 1);

  MealySul tog(fx::toggle());
  ObservationTable u(tog.inputs());
  fill(u, tog);
  close(u, tog);
  const auto h = build_hypothesis(u);
  CHECK(h.num_states() == 2);
  CHECK(equivalent(h, fx::toggle()).equal());
  // replaying an S word reproduces its row
  for (const auto& s : u.prefixes())
    for (std::size_t e = 0; e < u.suffixes().size(); ++e) {
      Word w = s;
      w.insert(w.end(), u.suffixes()[e].begin(), u.suffixes()[e].end());
      auto outs = run(h, w);
      std::vector<Symbol> tail(outs.end() - u.suffixes()[e].size(), outs.end());
      CHECK(tail == u.cell(s, e));
    }

  ObservationTable open(tog.inputs());
  fill(open, tog);
  CHECK_THROWS_AS(build_hypothesis(open), Error);
}

TEST_CASE("counterexample processing") {
  MealySul sul(fx::inconsistency_fixture());
  ObservationTable t(sul.inputs());
  fill(t, sul);
  while (close(t, sul) || make_consistent(t, sul)) {
  }
  const auto h0 = build_hypothesis(t);
  CHECK(h0.num_states() == 1);
  const Word ce{0, 0, 0};  // third "a" outputs 1 on the machine
  const auto s0 = t.prefixes().size();
  process_counterexample(t, ce, sul);
  CHECK(t.prefixes().size() > s0);
  const auto h1 = build_hypothesis(t);
  CHECK(h1.num_states() > h0.num_states());
  CHECK(run(h1, ce) == run(fx::inconsistency_fixture(), ce));
  // a fixed counterexample is rejected on resubmission
  CHECK_THROWS_AS(process_counterexample(t, ce, sul), Error);

  // with single-input suffixes in E a length-1 word never distinguishes, so
  // it is rejected and S keeps its size
  const auto s1 = t.prefixes().size();
  CHECK_THROWS_AS(process_counterexample(t, {1}, sul), Error);
  CHECK(t.prefixes().size() == s1);
}

TEST_CASE("random-walk equivalence oracle") {
  MealySul tog(fx::toggle());
  EqOracleConfig cfg;
  cfg.rng_seed = 7;
  CHECK_FALSE(random_walk_eq(tog, fx::toggle(), cfg).has_value());

  const auto stub = fx::constant(tog.inputs(), "0");
  const auto ce = random_walk_eq(tog, stub, cfg);
  REQUIRE(ce.has_value());
  CHECK(*ce == Word{0, 0});
  CHECK(random_walk_eq(tog, stub, cfg) == ce);

  EqOracleConfig bad = cfg;
  bad.reset_prob = 1.5;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("learning small machines") {
  MealySul tog(fx::toggle());
  auto r = learn(tog, LearnConfig{});
  CHECK(r.converged);
  CHECK(r.hm.num_states() == 2);
  CHECK(r.stats.rounds >= 1);
  CHECK(r.stats.rounds <= 2);

  MealySul fix(fx::inconsistency_fixture());
  auto r2 = learn(fix, exact_oracle(fx::inconsistency_fixture()), LearnConfig{});
  CHECK(r2.converged);
  CHECK(equivalent(r2.hm, fx::inconsistency_fixture()).equal());
}

TEST_CASE("learning the reference driver") {
  const auto oracle = fx::explicit_driver();
  DriverSul sul;
  auto r = learn(sul, exact_oracle(oracle.machine), LearnConfig{});
  CHECK(r.converged);
  CHECK(equivalent(r.hm, oracle.machine).equal());
  CHECK(r.hm.num_states() == minimize(oracle.machine).num_states());
  CHECK(r.hm.num_transitions() == r.hm.num_states() * 4);
  // counterexamples strictly grow the hypothesis
  for (std::size_t i = 1; i < r.stats.states_per_round.size(); ++i)
    CHECK(r.stats.states_per_round[i] > r.stats.states_per_round[i - 1]);

  // random walks reach the same machine, and the same seed is byte-identical
  LearnConfig cfg;
  cfg.oracle.rng_seed = 42;
  DriverSul a, b;
  const auto ra = learn(a, cfg), rb = learn(b, cfg);
  CHECK(equivalent(ra.hm, oracle.machine).equal());
  CHECK(serialize(ra.hm) == serialize(rb.hm));
  CHECK(learn_report_csv(ra) == learn_report_csv(rb));
}

TEST_CASE("state budget truncates learning") {
  DriverSul sul;
  LearnConfig cfg;
  cfg.max_states = 3;
  const auto r = learn(sul, cfg);
  CHECK_FALSE(r.converged);
  CHECK(r.hm.num_states() <= 3);
  CHECK(r.hm.num_transitions() == r.hm.num_states() * 4);
}
