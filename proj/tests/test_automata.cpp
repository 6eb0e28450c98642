#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fixtures.hpp"
#include "hcps/error.hpp"

using namespace hcps;

TEST_CASE("step on the toggle and identity machines") {
  const auto t = fx::toggle();
  auto [q, out] = step(t, 0, "a");
  CHECK(q == 1);
  CHECK(out == "0");

  const auto id = fx::identity();
  auto [q2, out2] = step(id, 0, "y");
  CHECK(q2 == 0);
  CHECK(out2 == "y");
}

TEST_CASE("unknown symbols are rejected") {
  const auto t = fx::toggle();
  try {
    step(t, 0, "b");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::RejectedInput);
  }
  CHECK_THROWS_AS(step(t, 5, std::size_t{0}), Error);
}

TEST_CASE("run") {
  const auto t = fx::toggle();
  CHECK(run(t, {}).empty());
  CHECK(run(t, {0, 0, 0}) == std::vector<Symbol>{"0", "1", "0"});

  // symbol by symbol agreement with step
  const auto m = fx::inconsistency_fixture();
  const Word w{0, 0, 1, 0, 0, 0, 1};
  const auto outs = run(m, w);
  StateId s = m.initial();
  for (std::size_t i = 0; i < w.size(); ++i) {
    const auto r = step(m, s, w[i]);
    CHECK(m.outputs()[r.output] == outs[i]);
    s = r.state;
  }
}

TEST_CASE("machine construction validates its tables") {
  CHECK_THROWS_AS(MealyMachine(Alphabet({"a"}), Alphabet({"0"}), 2, 0, {0}, {0}), Error);
  CHECK_THROWS_AS(MealyMachine(Alphabet({"a"}), Alphabet({"0"}), 1, 0, {1}, {0}), Error);
  CHECK_THROWS_AS(MealyMachine(Alphabet({"a"}), Alphabet({"0"}), 1, 0, {0}, {3}), Error);
  CHECK_THROWS_AS(Alphabet({"a", "a"}), Error);
  CHECK_THROWS_AS(Alphabet({"a b"}), Error);
}

TEST_CASE("minimize merges equivalent states") {
  // q0 and q1 behave identically (both output 0 and swap); q2 unreachable
  const MealyMachine m(Alphabet({"a"}), Alphabet({"0", "1"}), 3, 0, {1, 0, 2}, {0, 0, 1});
  const auto min = minimize(m);
  CHECK(min.num_states() == 1);
  CHECK(equivalent(m, min).equal());

  const auto t = minimize(fx::toggle());
  CHECK(t.num_states() == 2);
  CHECK(minimize(t).num_states() == t.num_states());
  CHECK(minimize(fx::inconsistency_fixture()).num_states() == 3);
}

TEST_CASE("equivalence via product BFS") {
  const auto t = fx::toggle();
  CHECK(equivalent(t, t).equal());
  CHECK(equivalent(t, minimize(t)).equal());

  // constant "0": first divergence is at the second symbol
  const auto c = fx::constant(t.inputs(), "0");
  const auto v = equivalent(t, c);
  REQUIRE_FALSE(v.equal());
  CHECK(*v.counterexample == Word{0, 0});

  const auto c1 = fx::constant(t.inputs(), "1");
  CHECK(*equivalent(t, c1).counterexample == Word{0});

  CHECK_THROWS_AS(equivalent(t, fx::identity()), Error);
}

TEST_CASE("canonical numbering and access words") {
  // states listed out of BFS order
  const MealyMachine m(Alphabet({"a", "b"}), Alphabet({"0", "1"}), 3, 2, {2, 2, 0, 1, 0, 1},
                       {1, 1, 0, 0, 0, 0});
  const auto c = canonicalize(m);
  CHECK(c.initial() == 0);
  CHECK(equivalent(m, c).equal());
  const auto words = access_words(c);
  REQUIRE(words.size() == 3);
  CHECK(words[0].empty());
  CHECK(words[1] == Word{0});
  CHECK(words[2] == Word{1});
}

TEST_CASE("text format round trip") {
  const auto m = fx::inconsistency_fixture();
  const auto text = serialize(m);
  CHECK(text.rfind("mealy v1 3 2 2\n", 0) == 0);
  const auto back = parse_mealy(text);
  CHECK(back == canonicalize(m));
  CHECK(serialize(back) == text);

  CHECK_THROWS_AS(parse_mealy("mealy v2 1 1 1\na\n0\n0 a 0 0\n"), Error);
  CHECK_THROWS_AS(parse_mealy("mealy v1 1 1 1\na\n0\n"), Error);                 // truncated
  CHECK_THROWS_AS(parse_mealy("mealy v1 1 1 1\na\n0\n0 a 0 0\n0 a 0 0\n"), Error);  // trailing
  CHECK_THROWS_AS(parse_mealy("mealy v1 1 1 1\na\n0\n0 a 1 0\n"), Error);        // bad target
}

TEST_CASE("dot export") {
  const auto id = fx::identity();
  const auto dot = to_dot(id);
  CHECK(dot.rfind("digraph", 0) == 0);
  std::size_t edges = 0;
  for (std::size_t p = dot.find("->"); p != std::string::npos; p = dot.find("->", p + 1)) ++edges;
  CHECK(edges == 1 + id.inputs().size());  // start arrow plus one self-loop per input
  CHECK(dot.find("x/x") != std::string::npos);
  CHECK(to_dot(fx::toggle()) == to_dot(fx::toggle()));
  CHECK(dot.back() == '\n');
}
