#include "doctest.h"

#include "nsq/linear_nested.hpp"
#include "nsq/nested_calculus.hpp"
#include "nsq/sequent_calculus.hpp"

using namespace nsq;

namespace {

LinearNested goal_formula(const std::string& text) {
  Sequent s;
  ms_insert(s.succ, parse_formula(text));
  return line_of(std::move(s));
}

SearchResult<LinearNested> prove(const LogicSpec& logic, const std::string& f,
                                 long nodes = 100000) {
  Budget b;
  b.nodes = nodes;
  return lns_prove(logic, goal_formula(f), b);
}

}  // namespace

TEST_CASE("lns text syntax round-trips") {
  const char* samples[] = {
      "a |- b",
      "a |- b // c |- d",
      "a |- b //^1 c |- d //*^2 e |-",
      "|- a //* < |- b ; b |- >",
  };
  for (const char* s : samples) {
    CAPTURE(s);
    LinearNested g = parse_lns(s);
    CHECK(parse_lns(render_lns(g)) == g);
  }
  LinearNested g = parse_lns("a |- b //*^2 e |-");
  CHECK(g.seps[0].kind == SepKind::BlockedSep);
  CHECK(g.seps[0].index == 2);
  CHECK(g.block_open());
}

TEST_CASE("lns fixtures across the logics") {
  CHECK(prove(LogicSpec::mlj(), "a -> b -> a").proved());
  CHECK_FALSE(prove(LogicSpec::mlj(), "((a -> b) -> a) -> a").proved());
  CHECK(prove(LogicSpec::mlj(), "~~(a | ~a)").proved());
  CHECK(prove(preset_logic("kd"), "~[]bot").proved());
  CHECK(prove(preset_logic("s4"), "[]a -> [][]a").proved());
  CHECK_FALSE(prove(preset_logic("kt"), "[]a -> [][]a").proved());
  CHECK(prove(preset_logic("kt"), "[]a -> a").proved());
  CHECK(prove(preset_logic("bimodal"), "[2]a -> [1]a").proved());
  CHECK_FALSE(prove(preset_logic("bimodal"), "[1]a -> [2]a").proved());
  CHECK(prove(LogicSpec::e(), "[](a & b) -> [](b & a)").proved());
  CHECK_FALSE(prove(LogicSpec::e(), "[](a & b) -> []a").proved());
  CHECK(prove(LogicSpec::m(), "[](a & b) -> []a").proved());
  CHECK_FALSE(prove(LogicSpec::m(), "[]top").proved());
  // Termination on the transitive chains.
  CHECK(lns_prove(preset_logic("kd4"), line_of(parse_sequent("[]a |- bot")), {}).status ==
        SearchStatus::Refuted);
}

TEST_CASE("the KD block for seriality") {
  // The d_1_1 block on []bot |- bot emits a blocked component, then closes.
  auto kd = preset_logic("kd");
  auto r = lns_prove(kd, line_of(parse_sequent("[]bot |- bot")), {});
  REQUIRE(r.proved());
  CHECK(lns_check(kd, *r.derivation).ok);
  // Walk the proof: expect a d_1_1 node whose premise has a blocked separator.
  const Derivation<LinearNested>* n = &*r.derivation;
  bool saw_d = false, saw_blocked = false, saw_close = false;
  while (!n->premises.empty()) {
    if (n->rule == "d_1_1") saw_d = true;
    if (n->conclusion.block_open()) saw_blocked = true;
    if (n->rule == "close") saw_close = true;
    n = &n->premises[0];
  }
  CHECK(saw_d);
  CHECK(saw_blocked);
  CHECK(saw_close);
}

TEST_CASE("M consumes the pair with a monotonisation step") {
  auto m = LogicSpec::m();
  auto r = prove(m, "[](a & b) -> []a");
  REQUIRE(r.proved());
  CHECK(lns_check(m, *r.derivation).ok);
  bool saw_m = false, saw_pair = false;
  std::vector<const Derivation<LinearNested>*> stack{&*r.derivation};
  while (!stack.empty()) {
    auto* n = stack.back();
    stack.pop_back();
    if (n->rule == "m") saw_m = true;
    if (n->conclusion.last().is_pair) saw_pair = true;
    for (const auto& p : n->premises) stack.push_back(&p);
  }
  CHECK(saw_m);
  CHECK(saw_pair);
}

TEST_CASE("lns_check rejects broken proofs") {
  auto mlj = LogicSpec::mlj();
  auto r = prove(mlj, "a -> b -> a");
  REQUIRE(r.proved());
  // Mutate a premise.
  auto broken = *r.derivation;
  Derivation<LinearNested>* n = &broken;
  while (!n->premises.empty() && !n->premises[0].premises.empty()) n = &n->premises[0];
  REQUIRE(!n->premises.empty());
  ms_insert(n->premises[0].conclusion.components.back().seq.ante, Formula::atom("zz"));
  CHECK_FALSE(lns_check(mlj, broken).ok);

  // A rule pretending to act on a non-rightmost component cannot check: the
  // principal is not in the end-active component.
  LinearNested g = parse_lns("a & b |- c // d |- e");
  Selection sel;
  sel.left = 0;
  CHECK_THROWS_AS(lns_apply(mlj, "and_l", g, sel), NotApplicable);

  // An axiom with an open block is rejected.
  LinearNested g2 = parse_lns("a |- a //* c |- c");
  Selection sel2;
  sel2.left = 0;
  sel2.right = 0;
  CHECK_THROWS_AS(lns_apply(mlj, "init", g2, sel2), NotApplicable);
  Derivation<LinearNested> bad{g2, "init", sel2, {}};
  CHECK_FALSE(lns_check(mlj, bad).ok);
}

TEST_CASE("linearise maps nested proofs onto their active paths") {
  const std::pair<LogicSpec, const char*> cases[] = {
      {LogicSpec::mlj(), "a -> b -> a"},
      {LogicSpec::mlj(), "~~(a | ~a)"},
      {LogicSpec::mlj(), "(a & b) -> (b & a)"},
      {preset_logic("k"), "[](a -> b) -> []a -> []b"},
      {preset_logic("s4"), "[]a -> [][]a"},
      {preset_logic("kd"), "~[]bot"},
      {preset_logic("kd4"), "[]a -> ~[]~a"},
      {preset_logic("bimodal"), "[2]a -> [1]a"},
      {LogicSpec::e(), "[](a & b) -> [](b & a)"},
      {LogicSpec::m(), "[](a & b) -> []a"},
  };
  for (const auto& [logic, f] : cases) {
    CAPTURE(f);
    NestedSequent g;
    ms_insert(g.succ, parse_formula(f));
    auto ns = ns_prove(logic, g, {});
    REQUIRE(ns.proved());
    auto lns = linearise(logic, *ns.derivation);
    CHECK(lns_check(logic, lns).ok);
    // Endpoint preservation.
    REQUIRE(lns.conclusion.components.size() == 1);
    CHECK(lns.conclusion.last().seq == ns.derivation->conclusion.top().contracted());
    // Linearisation never grows the proof, not counting the close steps
    // that merely flip a separator.
    std::vector<const Derivation<LinearNested>*> stack{&lns};
    int inference_nodes = 0;
    while (!stack.empty()) {
      auto* n = stack.back();
      stack.pop_back();
      if (n->rule != "close") inference_nodes++;
      for (const auto& p : n->premises) stack.push_back(&p);
    }
    CHECK(inference_nodes <= ns.derivation->node_count());
  }
}

TEST_CASE("linearise without nestings yields the sequent-shaped line") {
  auto mlj = LogicSpec::mlj();
  NestedSequent g;
  ms_insert(g.succ, parse_formula("(a & b) -> (b & a)"));
  auto ns = ns_prove(mlj, g, {});
  REQUIRE(ns.proved());
  auto lns = linearise(mlj, *ns.derivation);
  // One implication block opens; inside it everything is single-component
  // local reasoning, so the line never exceeds two components.
  std::vector<const Derivation<LinearNested>*> stack{&lns};
  size_t max_len = 0;
  while (!stack.empty()) {
    auto* n = stack.back();
    stack.pop_back();
    max_len = std::max(max_len, n->conclusion.components.size());
    for (const auto& p : n->premises) stack.push_back(&p);
  }
  CHECK(max_len == 2);
}

TEST_CASE("collapse_blocks produces checkable sequent proofs") {
  const std::pair<LogicSpec, const char*> cases[] = {
      {LogicSpec::mlj(), "a -> b -> a"},
      {LogicSpec::mlj(), "~~(a | ~a)"},
      {LogicSpec::mlj(), "(a -> b) -> (b -> c) -> a -> c"},
      {preset_logic("k"), "[](a -> b) -> []a -> []b"},
      {preset_logic("kt"), "[]a -> a"},
      {preset_logic("s4"), "[]a -> [][]a"},
      {preset_logic("kd"), "~[]bot"},
      {preset_logic("kd4"), "[]a -> ~[]~a"},
      {preset_logic("bimodal"), "[2]a -> [1]a"},
      {LogicSpec::e(), "[](a & b) -> [](b & a)"},
      {LogicSpec::m(), "[](a & b) -> []a"},
  };
  for (const auto& [logic, f] : cases) {
    CAPTURE(f);
    auto r = prove(logic, f);
    REQUIRE(r.proved());
    auto sc = collapse_blocks(logic, *r.derivation);
    CHECK(sc_check(logic, sc).ok);
    CHECK(sc.conclusion == r.derivation->conclusion.last().seq);
  }
}

TEST_CASE("collapse of a blockless proof is the identity on rules") {
  auto mlj = LogicSpec::mlj();
  auto r = lns_prove(mlj, line_of(parse_sequent("a & b |- b & a")), {});
  REQUIRE(r.proved());
  auto sc = collapse_blocks(mlj, *r.derivation);
  CHECK(sc_check(mlj, sc).ok);
  CHECK(sc.node_count() == r.derivation->node_count());
}

TEST_CASE("collapse rejects malformed blocks") {
  auto mlj = LogicSpec::mlj();
  // close with no block below it.
  LinearNested g = parse_lns("|- a");
  Derivation<LinearNested> bad{g, "close", {}, {}};
  CHECK_THROWS_AS(collapse_blocks(mlj, bad), std::invalid_argument);
}

TEST_CASE("lns agrees with sc and ns on mixed fixtures") {
  const std::pair<LogicSpec, const char*> cases[] = {
      {LogicSpec::mlj(), "((a | b) & ~a) -> b"},
      {LogicSpec::mlj(), "~~a -> a"},
      {preset_logic("k"), "[]a -> []a | []b"},
      {preset_logic("s4"), "[](a -> b) -> []([]a -> []b)"},
      {preset_logic("kt"), "[]([]a -> a)"},
      {LogicSpec::e(), "[]a -> []a"},
      {LogicSpec::e(), "[]a -> []b"},
      {LogicSpec::m(), "[](a & b) -> ([]a & []b)"},
  };
  for (const auto& [logic, f] : cases) {
    CAPTURE(f);
    Sequent s;
    ms_insert(s.succ, parse_formula(f));
    NestedSequent n;
    ms_insert(n.succ, parse_formula(f));
    auto sc = sc_prove(logic, s);
    auto ns = ns_prove(logic, n, {});
    auto ln = prove(logic, f);
    REQUIRE(sc.status != SearchStatus::Exhausted);
    REQUIRE(ns.status != SearchStatus::Exhausted);
    REQUIRE(ln.status != SearchStatus::Exhausted);
    CHECK(sc.proved() == ns.proved());
    CHECK(sc.proved() == ln.proved());
  }
}
