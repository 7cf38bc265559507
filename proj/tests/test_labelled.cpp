#include "doctest.h"

#include "nsq/labelled_calculus.hpp"
#include "nsq/nested_calculus.hpp"
#include "nsq/sequent_calculus.hpp"

using namespace nsq;

namespace {

LabelledSequent goal_formula(const std::string& f, const std::string& label = "x") {
  LabelledSequent s;
  s.add_right(label, parse_formula(f));
  return s;
}

NestedSequent nested_goal(const std::string& f) {
  NestedSequent u;
  ms_insert(u.succ, parse_formula(f));
  return u;
}

}  // namespace

TEST_CASE("labelled text syntax round-trips") {
  const char* samples[] = {
      "x: a |- x: b",
      "x R y, x <= y ; x: a, y: a -> b |- y: b",
      "x R1 y, x R2 y ; x: [2]a |- y: a",
      "x N y, x Ne(y1,y2) ; y2: b |- y1: b",
      "a1 in N(x), x in a1, a1 ||- a & b, a & b <| a1 ; x: a |- x: b, x in a1",
  };
  for (const char* s : samples) {
    CAPTURE(s);
    LabelledSequent g = parse_labelled(s);
    CHECK(parse_labelled(render_labelled(g)) == g);
  }
  LabelledSequent g = parse_labelled("x <= y ; x: a |- y: a");
  CHECK(g.relations.size() == 1);
  CHECK(g.relations[0].kind == RelKind::Leq);
  CHECK(parse_labelled("x: a |- x: a").relations.empty());
  CHECK(parse_labelled("|- x in a").right_atoms.size() == 1);
}

TEST_CASE("tl_map") {
  auto mlj = LogicSpec::mlj();
  // A plain sequent maps to labelled formulas with an empty relation set.
  {
    auto s = tl_map(mlj, "x", parse_nested("a |- b"));
    CHECK(s.relations.empty());
    CHECK(s.left.size() == 1);
    CHECK(s.left[0].label == "x");
    CHECK(s.right[0].label == "x");
  }
  // Children become edges to positional names.
  {
    auto s = tl_map(mlj, "x", parse_nested("a |- b, [c |- d], [|- e]"));
    CHECK(s.relations.size() == 2);
    CHECK(s.has_term(RelationTerm::rel("x", "x.1")));
    CHECK(s.has_term(RelationTerm::rel("x", "x.2")));
    CHECK(s.has_left("x.1", parse_formula("c")));
    auto c = check_lbns_conditions(s);
    CHECK(c.all());
  }
  // Indexed children carry their index; pairs become Ne terms.
  {
    auto s = tl_map(preset_logic("bimodal"), "x", parse_nested("|- [a |- b]^2"));
    CHECK(s.has_term(RelationTerm::rel_idx(2, "x", "x.1")));
  }
  {
    auto s = tl_map(LogicSpec::e(), "x", parse_nested("|- < |- b ; b |- >"));
    CHECK(s.has_term(RelationTerm::nbr_pair("x", "x.1.1", "x.1.2")));
    CHECK(s.has_right("x.1.1", parse_formula("b")));
    CHECK(s.has_left("x.1.2", parse_formula("b")));
    CHECK(check_lbns_conditions(s).all());
  }
  // read_tree inverts tl_map.
  {
    NestedSequent u = parse_nested("a |- b, [c |- d, [|- e]], [f |- ]");
    auto s = tl_map(mlj, "x", u);
    auto back = read_tree(mlj, s);
    CHECK(back.nested == u);
  }
}

TEST_CASE("lbns conditions on hand-built sequents") {
  // Two labels without relations violate the single-label condition.
  LabelledSequent s = parse_labelled("x: a |- y: a");
  CHECK_FALSE(check_lbns_conditions(s).single_label);
  // A label missing from the relation set violates coverage.
  LabelledSequent s2 = parse_labelled("x R y ; z: a |- x: a");
  CHECK(check_lbns_conditions(s2).treelike);
  CHECK_FALSE(check_lbns_conditions(s2).coverage);
  // A two-parent node is not treelike.
  LabelledSequent s3 = parse_labelled("x R z, y R z ; x: a |- x: a");
  CHECK_FALSE(check_lbns_conditions(s3).treelike);
}

TEST_CASE("tl_translate preserves shape and checks") {
  const std::pair<LogicSpec, const char*> cases[] = {
      {LogicSpec::mlj(), "a -> b -> a"},
      {LogicSpec::mlj(), "~~(a | ~a)"},
      {preset_logic("k"), "[](a -> b) -> []a -> []b"},
      {preset_logic("s4"), "[]a -> [][]a"},
      {preset_logic("kd"), "~[]bot"},
      {preset_logic("bimodal"), "[2]a -> [1]a"},
      {LogicSpec::e(), "[](a & b) -> [](b & a)"},
      {LogicSpec::m(), "[](a & b) -> []a"},
  };
  for (const auto& [logic, f] : cases) {
    CAPTURE(f);
    auto ns = ns_prove(logic, nested_goal(f), {});
    REQUIRE(ns.proved());
    auto lb = tl_translate(logic, *ns.derivation);
    CHECK(lb.node_count() == ns.derivation->node_count());
    CHECK(lb.height() == ns.derivation->height());
    CHECK(lb_check(LbSystem::image(logic), lb).ok);
    // Every node of the image satisfies the labelled-nested conditions.
    std::vector<const Derivation<LabelledSequent>*> stack{&lb};
    while (!stack.empty()) {
      auto* n = stack.back();
      stack.pop_back();
      CHECK(check_lbns_conditions(n->conclusion).all());
      for (const auto& p : n->premises) stack.push_back(&p);
    }
  }
}

TEST_CASE("image proof search agrees with the nested engine") {
  const std::pair<LogicSpec, const char*> cases[] = {
      {LogicSpec::mlj(), "a -> b -> a"},
      {LogicSpec::mlj(), "((a -> b) -> a) -> a"},
      {preset_logic("kt"), "[]a -> a"},
      {preset_logic("kt"), "[]a -> [][]a"},
      {LogicSpec::e(), "[](a & b) -> []a"},
      {LogicSpec::m(), "[](a & b) -> []a"},
  };
  for (const auto& [logic, f] : cases) {
    CAPTURE(f);
    auto ns = ns_prove(logic, nested_goal(f), {});
    auto lb = lb_prove(LbSystem::image(logic), goal_formula(f), {});
    CHECK(ns.proved() == lb.proved());
    if (lb.proved()) CHECK(lb_check(LbSystem::image(logic), *lb.derivation).ok);
  }
}

TEST_CASE("GtI fixtures") {
  auto gti = LbSystem::gt(LogicSpec::mlj());
  CHECK(lb_prove(gti, goal_formula("a -> b -> a")).proved());
  CHECK(lb_prove(gti, goal_formula("~~(a | ~a)")).proved());
  CHECK_FALSE(lb_prove(gti, goal_formula("((a -> b) -> a) -> a")).proved());
  CHECK_FALSE(lb_prove(gti, goal_formula("a | ~a")).proved());
  CHECK(lb_prove(gti, goal_formula("(a -> b) -> (b -> c) -> a -> c")).proved());
  CHECK_FALSE(lb_prove(gti, goal_formula("~~a -> a")).proved());
  // A proof that needs both Ref and Trans at the leaves.
  auto r = lb_prove(gti, parse_labelled("x: a -> b, x: a |- x: b"));
  REQUIRE(r.proved());
  CHECK(lb_check(gti, *r.derivation).ok);
  bool saw_ref = false;
  std::vector<const Derivation<LabelledSequent>*> stack{&*r.derivation};
  while (!stack.empty()) {
    auto* n = stack.back();
    stack.pop_back();
    if (n->rule == "ref") saw_ref = true;
    for (const auto& p : n->premises) stack.push_back(&p);
  }
  CHECK(saw_ref);
}

TEST_CASE("Gtmm fixtures") {
  auto gtmm = [](const char* preset) { return LbSystem::gt(preset_logic(preset)); };
  CHECK(lb_prove(gtmm("k"), goal_formula("[](a -> b) -> []a -> []b")).proved());
  CHECK(lb_prove(gtmm("kt"), goal_formula("[]a -> a")).proved());
  CHECK_FALSE(lb_prove(gtmm("k"), goal_formula("[]a -> a")).proved());
  CHECK(lb_prove(gtmm("kd"), goal_formula("~[]bot")).proved());
  CHECK_FALSE(lb_prove(gtmm("k"), goal_formula("~[]bot")).proved());
  CHECK(lb_prove(gtmm("k4"), goal_formula("[]a -> [][]a")).proved());
  CHECK_FALSE(lb_prove(gtmm("kt"), goal_formula("[]a -> [][]a")).proved());
  CHECK(lb_prove(gtmm("s4"), goal_formula("[]a -> [][]a")).proved());
  CHECK(lb_prove(gtmm("kd4"), goal_formula("[]a -> ~[]~a")).proved());
  CHECK(lb_prove(gtmm("bimodal"), goal_formula("[2]a -> [1]a")).proved());
  CHECK_FALSE(lb_prove(gtmm("bimodal"), goal_formula("[1]a -> [2]a")).proved());
  // The seriality proof goes through Ser then Int then box_l.
  auto r = lb_prove(gtmm("kd"), parse_labelled("x: []bot |- x: bot"));
  REQUIRE(r.proved());
  bool saw_ser = false;
  std::vector<const Derivation<LabelledSequent>*> stack{&*r.derivation};
  while (!stack.empty()) {
    auto* n = stack.back();
    stack.pop_back();
    if (n->rule.rfind("ser_", 0) == 0) saw_ser = true;
    for (const auto& p : n->premises) stack.push_back(&p);
  }
  CHECK(saw_ser);
  // Termination with transitive interplay.
  CHECK(lb_prove(gtmm("s4"), goal_formula("[]([]a -> b) -> []c"), {}).status ==
        SearchStatus::Refuted);
}

TEST_CASE("GtE and GtM fixtures") {
  auto gte = LbSystem::gt(LogicSpec::e());
  auto gtm = LbSystem::gt(LogicSpec::m());
  CHECK(lb_prove(gte, goal_formula("[](a & b) -> [](b & a)")).proved());
  CHECK_FALSE(lb_prove(gte, goal_formula("[](a & b) -> []a")).proved());
  CHECK(lb_prove(gtm, goal_formula("[](a & b) -> []a")).proved());
  CHECK_FALSE(lb_prove(gtm, goal_formula("[](a -> b) -> []a -> []b")).proved());
  CHECK_FALSE(lb_prove(gtm, goal_formula("[]top")).proved());
  auto r = lb_prove(gtm, parse_labelled("x: [](a & b) |- x: []a"));
  REQUIRE(r.proved());
  CHECK(lb_check(gtm, *r.derivation).ok);
}

TEST_CASE("lb_check enforces freshness and side conditions") {
  auto gti = LbSystem::gt(LogicSpec::mlj());
  // imp_r_t reusing an existing label is rejected.
  LabelledSequent g = parse_labelled("x <= y ; y: a |- x: a -> b");
  Selection sel;
  sel.right = 0;
  sel.label2 = "y";
  CHECK_THROWS_AS(lb_apply(gti, "imp_r_t", g, sel), NotApplicable);
  sel.label2 = "z";
  CHECK(lb_apply(gti, "imp_r_t", g, sel).size() == 1);
  // init_t without the <= atom is rejected.
  LabelledSequent g2 = parse_labelled("x: a |- y: a");
  Selection isel;
  isel.left = 0;
  isel.right = 0;
  CHECK_THROWS_AS(lb_apply(gti, "init_t", g2, isel), NotApplicable);
  LabelledSequent g3 = parse_labelled("x <= y ; x: a |- y: a");
  CHECK(lb_apply(gti, "init_t", g3, isel).empty());
  // A mutated premise is rejected by the checker.
  auto r = lb_prove(gti, goal_formula("a -> b -> a"));
  REQUIRE(r.proved());
  auto broken = *r.derivation;
  Derivation<LabelledSequent>* n = &broken;
  while (!n->premises.empty() && !n->premises[0].premises.empty()) n = &n->premises[0];
  REQUIRE(!n->premises.empty());
  n->premises[0].conclusion.add_left("x", Formula::atom("zz"));
  CHECK_FALSE(lb_check(gti, broken).ok);
}

TEST_CASE("lbns_to_labelled preserves the endpoint formulas") {
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
    auto ns = ns_prove(logic, nested_goal(f), {});
    REQUIRE(ns.proved());
    auto image = tl_translate(logic, *ns.derivation);
    auto gt = lbns_to_labelled(logic, image);
    CHECK(lb_check(LbSystem::gt(logic), gt).ok);
    // Label preservation at the root.
    CHECK(gt.conclusion.left == image.conclusion.left);
    CHECK(gt.conclusion.right == image.conclusion.right);
  }
}

TEST_CASE("labelled_to_lbns restricts semantic proofs back to the image") {
  const std::pair<LogicSpec, const char*> cases[] = {
      {LogicSpec::mlj(), "a -> b -> a"},
      {preset_logic("kt"), "[]a -> a"},
      {LogicSpec::e(), "[](a & b) -> [](b & a)"},
      {LogicSpec::m(), "[](a & b) -> []a"},
  };
  for (const auto& [logic, f] : cases) {
    CAPTURE(f);
    auto gt = lb_prove(LbSystem::gt(logic), goal_formula(f));
    REQUIRE(gt.proved());
    auto image = labelled_to_lbns(logic, *gt.derivation);
    CHECK(lb_check(LbSystem::image(logic), image).ok);
    CHECK(image.conclusion.right == gt.derivation->conclusion.right);
  }
}

TEST_CASE("cross-system agreement on a fixture battery") {
  const std::pair<LogicSpec, const char*> cases[] = {
      {LogicSpec::mlj(), "((a | b) & ~a) -> b"},
      {LogicSpec::mlj(), "(a -> b) | (b -> a)"},
      {preset_logic("k"), "[]a -> []a | []b"},
      {preset_logic("s4"), "[](a -> b) -> []([]a -> []b)"},
      {preset_logic("kd"), "[]a -> ~[]~a"},
      {LogicSpec::e(), "[]a -> []b"},
      {LogicSpec::e(), "[]~~a -> []a"},
      {LogicSpec::m(), "[](a & b) -> ([]a & []b)"},
  };
  for (const auto& [logic, f] : cases) {
    CAPTURE(f);
    auto image = lb_prove(LbSystem::image(logic), goal_formula(f));
    auto gt = lb_prove(LbSystem::gt(logic), goal_formula(f));
    REQUIRE(image.status != SearchStatus::Exhausted);
    REQUIRE(gt.status != SearchStatus::Exhausted);
    CHECK(image.proved() == gt.proved());
  }
}
