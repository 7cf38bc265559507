#include "doctest.h"

#include <random>

#include "nsq/formula.hpp"
#include "nsq/sequent.hpp"

using namespace nsq;

TEST_CASE("parsing respects precedence and associativity") {
  Formula a = Formula::atom("a"), b = Formula::atom("b");
  CHECK(parse_formula("a -> b -> a") == Formula::imp(a, Formula::imp(b, a)));
  CHECK(parse_formula("[1](a & b)") == Formula::box(1, Formula::conj(a, b)));
  CHECK(parse_formula("~a") == Formula::imp(a, Formula::bottom()));
  CHECK(parse_formula("top") == Formula::imp(Formula::bottom(), Formula::bottom()));
  CHECK(parse_formula("a <-> b") ==
        Formula::conj(Formula::imp(a, b), Formula::imp(b, a)));
  CHECK(parse_formula("a | b & c") ==
        Formula::disj(a, Formula::conj(b, Formula::atom("c"))));
  CHECK(parse_formula("[]a") == Formula::box(1, a));
  CHECK(parse_formula("[2]a") == Formula::box(2, a));
  CHECK(parse_formula("~[]a") == Formula::neg(Formula::box(1, a)));
}

TEST_CASE("parse errors carry a position") {
  CHECK_THROWS_AS(parse_formula("a ->"), ParseError);
  CHECK_THROWS_AS(parse_formula("(a -> b"), ParseError);
  CHECK_THROWS_AS(parse_formula("a b"), ParseError);
  CHECK_THROWS_AS(parse_formula("A"), ParseError);
  CHECK_THROWS_AS(parse_formula("[1 a"), ParseError);
}

TEST_CASE("rendering round-trips") {
  Formula a = Formula::atom("a"), b = Formula::atom("b");
  CHECK(render_formula(Formula::imp(a, Formula::imp(b, a))) == "a -> b -> a");
  CHECK(render_formula(Formula::box(2, Formula::disj(a, b))) == "[2](a | b)");
  CHECK(render_formula(Formula::bottom()) == "bot");
  CHECK(render_formula(Formula::imp(Formula::imp(a, b), a)) == "(a -> b) -> a");
}

namespace {

Formula random_formula(std::mt19937_64& rng, int depth, int box_budget) {
  auto pick = [&](int n) { return static_cast<int>(rng() % n); };
  const char* atoms[] = {"a", "b", "c"};
  if (depth <= 1) {
    int k = pick(4);
    if (k == 3) return Formula::bottom();
    return Formula::atom(atoms[k]);
  }
  int k = pick(box_budget > 0 ? 6 : 5);
  switch (k) {
    case 0: return Formula::atom(atoms[pick(3)]);
    case 1: return Formula::conj(random_formula(rng, depth - 1, box_budget),
                                 random_formula(rng, depth - 1, box_budget));
    case 2: return Formula::disj(random_formula(rng, depth - 1, box_budget),
                                 random_formula(rng, depth - 1, box_budget));
    case 3: return Formula::imp(random_formula(rng, depth - 1, box_budget),
                                random_formula(rng, depth - 1, box_budget));
    case 4: return Formula::bottom();
    default: return Formula::box(1 + pick(2), random_formula(rng, depth - 1, box_budget - 1));
  }
}

}  // namespace

TEST_CASE("parse(render(f)) == f on generated formulas") {
  std::mt19937_64 rng(20240817);
  for (int i = 0; i < 500; i++) {
    Formula f = random_formula(rng, 1 + static_cast<int>(rng() % 5), 2);
    CAPTURE(render_formula(f));
    CHECK(parse_formula(render_formula(f)) == f);
  }
}

TEST_CASE("sequent text syntax") {
  Sequent s = parse_sequent("a, a -> b |- b, c");
  CHECK(s.ante.size() == 2);
  CHECK(s.succ.size() == 2);
  CHECK(parse_sequent(render_sequent(s)) == s);
  CHECK(parse_sequent("|- a").ante.empty());
  CHECK(parse_sequent("a |-").succ.empty());
  CHECK(parse_sequent("|-").empty());
  CHECK_THROWS_AS(parse_sequent("a, b"), ParseError);
}

TEST_CASE("multisets keep duplicates but keys do not") {
  Sequent s = parse_sequent("a, a |- b");
  CHECK(s.ante.size() == 2);
  CHECK(sequent_key(s) == sequent_key(parse_sequent("a |- b")));
}
