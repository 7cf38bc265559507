#include "doctest.h"

#include "nsq/semantics.hpp"
#include "nsq/sequent_calculus.hpp"

using namespace nsq;

TEST_CASE("eval clauses on hand-built models") {
  // Empty neighbourhood family never forces a box.
  {
    NeighbourhoodModel m;
    m.world_count = 1;
    m.nbr = {{}};
    m.valuation["a"] = {0};
    CHECK_FALSE(eval(m, 0, parse_formula("[]a"), EvalMode::NbrE));
    CHECK_FALSE(eval(m, 0, parse_formula("[]a"), EvalMode::NbrM));
  }
  // Two-world intuitionistic model falsifying Peirce.
  {
    KripkeModel m;
    m.world_count = 2;
    m.relations[0] = {{0, 0}, {0, 1}, {1, 1}};
    m.valuation["a"] = {1};
    CHECK(check_frame(m, LogicSpec::mlj()).ok);
    CHECK_FALSE(eval(m, 0, parse_formula("((a -> b) -> a) -> a"), EvalMode::Int));
  }
  // u ||- []a in E when the neighbourhood is exactly the truth set of a.
  {
    NeighbourhoodModel m;
    m.world_count = 2;
    m.nbr = {{0b11}, {}};
    m.valuation["a"] = {0, 1};
    CHECK(eval(m, 0, parse_formula("[]a"), EvalMode::NbrE));
    // Remove one a-world: the covering conjunct fails.
    m.valuation["a"] = {1};
    CHECK_FALSE(eval(m, 0, parse_formula("[]a"), EvalMode::NbrE));
  }
}

TEST_CASE("check_frame catches violations") {
  KripkeModel irr;
  irr.world_count = 2;
  irr.relations[1] = {{0, 1}};
  auto r = check_frame(irr, preset_logic("kt"));
  CHECK_FALSE(r.ok);
  CHECK(r.violated.find("reflexivity") != std::string::npos);

  KripkeModel inc;
  inc.world_count = 2;
  inc.relations[1] = {{0, 1}};
  inc.relations[2] = {};
  auto r2 = check_frame(inc, preset_logic("bimodal"));
  CHECK_FALSE(r2.ok);
  CHECK(r2.violated.find("inclusion") != std::string::npos);

  NeighbourhoodModel nm;
  nm.world_count = 2;
  nm.nbr = {{0b01}, {}};
  auto r3 = check_frame(nm, LogicSpec::m());
  CHECK_FALSE(r3.ok);
  CHECK(r3.violated == "supplementation");
  CHECK(check_frame(nm, LogicSpec::e()).ok);
}

TEST_CASE("countermodels for the negative fixtures") {
  struct Fixture {
    LogicSpec logic;
    const char* formula;
  };
  const Fixture fixtures[] = {
      {LogicSpec::mlj(), "((a -> b) -> a) -> a"},
      {preset_logic("kt"), "[]a -> [][]a"},
      {preset_logic("k4"), "[]a -> a"},
      {preset_logic("k"), "[]bot -> bot"},
      {LogicSpec::e(), "[](a & b) -> []a"},
      {LogicSpec::e(), "[](a -> b) -> []a -> []b"},
      {LogicSpec::m(), "[](a -> b) -> []a -> []b"},
  };
  for (const auto& fx : fixtures) {
    CAPTURE(fx.formula);
    auto cm = countermodel(fx.logic, parse_formula(fx.formula));
    REQUIRE(cm.has_value());
    if (std::holds_alternative<KripkeModel>(cm->model)) {
      const auto& m = std::get<KripkeModel>(cm->model);
      CHECK(check_frame(m, fx.logic).ok);
      EvalMode mode = fx.logic.kind == LogicKind::Intuitionistic ? EvalMode::Int : EvalMode::Multi;
      CHECK_FALSE(eval(m, cm->world, parse_formula(fx.formula), mode));
    } else {
      const auto& m = std::get<NeighbourhoodModel>(cm->model);
      CHECK(check_frame(m, fx.logic).ok);
      EvalMode mode = fx.logic.kind == LogicKind::NonNormalE ? EvalMode::NbrE : EvalMode::NbrM;
      CHECK_FALSE(eval(m, cm->world, parse_formula(fx.formula), mode));
    }
  }
}

TEST_CASE("no countermodel for theorems") {
  CHECK_FALSE(countermodel(LogicSpec::mlj(), parse_formula("a -> b -> a")).has_value());
  CHECK_FALSE(countermodel(preset_logic("kt"), parse_formula("[]a -> a")).has_value());
  CHECK_FALSE(countermodel(LogicSpec::m(), parse_formula("[](a & b) -> []a")).has_value());
}

TEST_CASE("minimal countermodels come first") {
  auto cm = countermodel(LogicSpec::mlj(), parse_formula("((a -> b) -> a) -> a"));
  REQUIRE(cm.has_value());
  CHECK(std::get<KripkeModel>(cm->model).world_count == 2);
  auto cm2 = countermodel(preset_logic("kt"), parse_formula("[]a -> [][]a"));
  REQUIRE(cm2.has_value());
  CHECK(std::get<KripkeModel>(cm2->model).world_count == 3);
}

TEST_CASE("soundness bridge: proved sequents are never falsified") {
  // Spot fixtures proved by the sequent engine evaluated over every
  // frame-accepted model within small bounds.
  struct Case {
    LogicSpec logic;
    const char* formula;
  };
  const Case cases[] = {
      {LogicSpec::mlj(), "~~(a | ~a)"},
      {preset_logic("s4"), "[]a -> [][]a"},
      {preset_logic("kd"), "~[]bot"},
      {preset_logic("bimodal"), "[2]a -> [1]a"},
      {LogicSpec::e(), "[](a & b) -> [](b & a)"},
      {LogicSpec::m(), "[](a & b) -> []a"},
  };
  for (const auto& c : cases) {
    CAPTURE(c.formula);
    Sequent s;
    ms_insert(s.succ, parse_formula(c.formula));
    REQUIRE(sc_prove(c.logic, s).proved());
    Bounds b;
    b.kripke_worlds = 2;
    b.nbr_worlds = 2;
    CHECK_FALSE(countermodel(c.logic, parse_formula(c.formula), b).has_value());
  }
}

TEST_CASE("persistence holds in enumerated intuitionistic models") {
  auto cm = countermodel(LogicSpec::mlj(), parse_formula("a | ~a"));
  REQUIRE(cm.has_value());
  const auto& m = std::get<KripkeModel>(cm->model);
  for (const auto& [atom, worlds] : m.valuation)
    for (int w : worlds)
      for (int v = 0; v < m.world_count; v++)
        if (m.related(0, w, v)) CHECK(worlds.count(v) == 1);
}

TEST_CASE("model rendering") {
  auto cm = countermodel(preset_logic("k"), parse_formula("[]bot -> bot"));
  REQUIRE(cm.has_value());
  auto text = render_countermodel(*cm);
  CHECK(text.find("worlds: 1") != std::string::npos);
  CHECK(text.find("falsified at world 0") != std::string::npos);
}
