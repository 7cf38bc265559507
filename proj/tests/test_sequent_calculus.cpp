#include "doctest.h"

#include "nsq/sequent_calculus.hpp"
#include "support/oracle.hpp"

using namespace nsq;

namespace {

Sequent goal_of(const std::string& text) { return parse_sequent(text); }

SearchResult<Sequent> prove_text(const LogicSpec& logic, const std::string& text, long nodes = 100000) {
  Budget b;
  b.nodes = nodes;
  return sc_prove(logic, goal_of(text), b);
}

int occ(const FormulaSet& side, const std::string& f) {
  Formula fm = parse_formula(f);
  for (size_t i = 0; i < side.size(); i++)
    if (side[i] == fm) return static_cast<int>(i);
  return -1;
}

}  // namespace

TEST_CASE("sc rule tables") {
  auto mlj = sc_rule_table(LogicSpec::mlj());
  CHECK(mlj.size() == 8);  // exactly the multi-conclusion intuitionistic rules
  for (const char* r : {"imp_l", "imp_r", "and_l", "and_r", "or_l", "or_r", "bot_l", "init"})
    CHECK(mlj.contains(r));

  auto k = sc_rule_table(preset_logic("k"));
  CHECK(k.contains("k_1"));
  CHECK_FALSE(k.contains("d_1"));
  CHECK_FALSE(k.contains("t_1"));
  CHECK(k.size() == 9);

  auto kt = sc_rule_table(preset_logic("kt"));
  CHECK(kt.contains("t_1"));
  CHECK(kt.contains("d_1"));  // T yields D

  auto e = sc_rule_table(LogicSpec::e());
  CHECK(e.contains("e"));
  CHECK(e.find("e")->arity == 2);
  auto m = sc_rule_table(LogicSpec::m());
  CHECK(m.contains("m"));
  CHECK(m.find("m")->arity == 1);
}

TEST_CASE("sc_apply on schema examples") {
  // imp_r on |- a -> b has premise a |- b.
  {
    Selection sel;
    sel.right = 0;
    auto prem = sc_apply(LogicSpec::mlj(), "imp_r", goal_of("|- a -> b"), sel);
    REQUIRE(prem.size() == 1);
    CHECK(prem[0] == goal_of("a |- b"));
  }
  // The intuitionistic imp_r deletes the succedent context.
  {
    Sequent g = goal_of("|- a -> b, c");
    Selection sel;
    sel.right = occ(g.succ, "a -> b");
    auto prem = sc_apply(LogicSpec::mlj(), "imp_r", g, sel);
    REQUIRE(prem.size() == 1);
    CHECK(prem[0] == goal_of("a |- b"));
  }
  // The classical variant keeps it.
  {
    Sequent g = goal_of("|- a -> b, c");
    Selection sel;
    sel.right = occ(g.succ, "a -> b");
    auto prem = sc_apply(preset_logic("k"), "imp_r", g, sel);
    REQUIRE(prem.size() == 1);
    CHECK(prem[0] == goal_of("a |- b, c"));
  }
  // k_1 in K: [](a) |- [](b) has premise a |- b.
  {
    Selection sel;
    sel.right = 0;
    auto prem = sc_apply(preset_logic("k"), "k_1", goal_of("[]a |- []b"), sel);
    REQUIRE(prem.size() == 1);
    CHECK(prem[0] == goal_of("a |- b"));
  }
  // In K4 the boxed formulas keep a boxed copy.
  {
    Selection sel;
    sel.right = 0;
    auto prem = sc_apply(preset_logic("k4"), "k_1", goal_of("[]a |- []b"), sel);
    REQUIRE(prem.size() == 1);
    CHECK(prem[0] == goal_of("a, []a |- b"));
  }
  // E on []a |- []b has premises a |- b and b |- a.
  {
    Selection sel;
    sel.left = 0;
    sel.right = 0;
    auto prem = sc_apply(LogicSpec::e(), "e", goal_of("[]a |- []b"), sel);
    REQUIRE(prem.size() == 2);
    CHECK(prem[0] == goal_of("a |- b"));
    CHECK(prem[1] == goal_of("b |- a"));
  }
  // init is atomic only.
  {
    Selection sel;
    sel.left = 0;
    sel.right = 0;
    CHECK_THROWS_AS(sc_apply(LogicSpec::mlj(), "init", goal_of("a -> b |- a -> b"), sel),
                    NotApplicable);
    auto prem = sc_apply(LogicSpec::mlj(), "init", goal_of("a |- a"), sel);
    CHECK(prem.empty());
  }
}

TEST_CASE("mLJ proof search agrees with the naive oracle on fixtures") {
  auto mlj = LogicSpec::mlj();
  struct Fixture {
    const char* text;
    bool provable;
  };
  const Fixture fixtures[] = {
      {"|- a -> b -> a", true},
      {"|- ((a -> b) -> a) -> a", false},       // Peirce
      {"|- a | ~a", false},                     // excluded middle
      {"|- ~~(a | ~a)", true},
      {"|- (a -> b) -> (b -> c) -> a -> c", true},
      {"|- (a & b) -> (b & a)", true},
      {"|- ~~a -> a", false},
      {"|- a -> ~~a", true},
      {"|- (a -> b) | (b -> a)", false},
      {"|- bot -> a", true},
      {"a & (a -> b) |- b", true},
      {"|- ((a | b) & ~a) -> b", true},
  };
  for (const auto& fx : fixtures) {
    CAPTURE(fx.text);
    auto r = prove_text(mlj, fx.text);
    REQUIRE(r.status != SearchStatus::Exhausted);
    CHECK(r.proved() == fx.provable);
    if (fx.provable) CHECK(oracle::provable_within(mlj, oracle::Goal{goal_of(fx.text).ante, goal_of(fx.text).succ}, 12));
    if (r.proved()) CHECK(sc_check(mlj, *r.derivation).ok);
  }
}

TEST_CASE("modal fixtures per preset") {
  CHECK(prove_text(preset_logic("kt"), "|- []a -> a").proved());
  CHECK_FALSE(prove_text(preset_logic("k"), "|- []a -> a").proved());
  CHECK(prove_text(preset_logic("kd"), "|- []bot -> bot").proved());
  CHECK_FALSE(prove_text(preset_logic("k"), "|- []bot -> bot").proved());
  CHECK(prove_text(preset_logic("k4"), "|- []a -> [][]a").proved());
  CHECK_FALSE(prove_text(preset_logic("kt"), "|- []a -> [][]a").proved());
  CHECK(prove_text(preset_logic("s4"), "|- []a -> [][]a").proved());
  CHECK(prove_text(preset_logic("s4"), "|- []a -> a").proved());
  CHECK(prove_text(preset_logic("k"), "|- [](a -> b) -> []a -> []b").proved());
  CHECK(prove_text(preset_logic("bimodal"), "|- [2]a -> [1]a").proved());
  CHECK_FALSE(prove_text(preset_logic("bimodal"), "|- [1]a -> [2]a").proved());
  // D propagates upward in the order.
  {
    Description d;
    d.indices = {1, 2};
    d.order.insert({1, 2});
    d.axioms[1] = {Axiom::D};
    auto logic = LogicSpec::multimodal(d);
    CHECK(prove_text(logic, "|- ~[2]bot").proved());
    CHECK(prove_text(logic, "|- ~[1]bot").proved());
  }
  // ...but not downward.
  {
    Description d;
    d.indices = {1, 2};
    d.order.insert({1, 2});
    d.axioms[2] = {Axiom::D};
    auto logic = LogicSpec::multimodal(d);
    CHECK(prove_text(logic, "|- ~[2]bot").proved());
    CHECK_FALSE(prove_text(logic, "|- ~[1]bot").proved());
  }
}

TEST_CASE("E and M fixtures") {
  auto e = LogicSpec::e();
  auto m = LogicSpec::m();
  CHECK(prove_text(e, "|- [](a & b) -> [](b & a)").proved());
  CHECK_FALSE(prove_text(e, "|- [](a & b) -> []a").proved());
  CHECK(prove_text(m, "|- [](a & b) -> []a").proved());
  CHECK_FALSE(prove_text(m, "|- ([]a & []b) -> [](a & b)").proved());
  CHECK_FALSE(prove_text(e, "|- [](a -> b) -> []a -> []b").proved());
  CHECK_FALSE(prove_text(m, "|- [](a -> b) -> []a -> []b").proved());
  CHECK_FALSE(prove_text(m, "|- []top").proved());
}

TEST_CASE("sc_check rejects a mutated premise") {
  auto mlj = LogicSpec::mlj();
  auto r = prove_text(mlj, "|- a -> b -> a");
  REQUIRE(r.proved());
  auto broken = *r.derivation;
  // Walk to the first non-leaf and corrupt its premise.
  Derivation<Sequent>* n = &broken;
  while (!n->premises.empty() && !n->premises[0].premises.empty()) n = &n->premises[0];
  REQUIRE(!n->premises.empty());
  ms_insert(n->premises[0].conclusion.ante, Formula::atom("zz"));
  auto check = sc_check(mlj, broken);
  CHECK_FALSE(check.ok);
  CHECK(!check.message.empty());
}

TEST_CASE("budget exhaustion is distinguished from refutation") {
  auto r = prove_text(LogicSpec::mlj(), "|- ((a -> b) -> a) -> a", 3);
  CHECK(r.status == SearchStatus::Exhausted);
}

TEST_CASE("search is deterministic") {
  auto a = prove_text(preset_logic("s4"), "|- [](a & b) -> ([]a & []b)");
  auto b = prove_text(preset_logic("s4"), "|- [](a & b) -> ([]a & []b)");
  REQUIRE(a.proved());
  REQUIRE(b.proved());
  CHECK(a.nodes_used == b.nodes_used);
  CHECK(a.derivation->node_count() == b.derivation->node_count());
  CHECK(render_sequent(a.derivation->conclusion) == render_sequent(b.derivation->conclusion));
}

TEST_CASE("generalized init is admissible") {
  auto mlj = LogicSpec::mlj();
  for (const char* f : {"a -> b", "a & (b | c)", "~a", "(a -> b) -> c"}) {
    Sequent s;
    Formula fm = parse_formula(f);
    ms_insert(s.ante, fm);
    ms_insert(s.ante, Formula::atom("x"));
    ms_insert(s.succ, fm);
    ms_insert(s.succ, Formula::atom("y"));
    CAPTURE(f);
    CHECK(sc_prove(mlj, s).proved());
  }
}
