#include "doctest.h"

#include "nsq/logic.hpp"

using namespace nsq;

namespace {

Description make_desc(std::vector<int> idx, std::set<std::pair<int, int>> order,
                      std::map<int, std::set<Axiom>> ax) {
  Description d;
  d.indices = std::move(idx);
  d.order = std::move(order);
  d.axioms = std::move(ax);
  return d;
}

}  // namespace

TEST_CASE("validate_description") {
  // K: a single index with no axioms.
  CHECK(validate_description(make_desc({1}, {}, {})).ok());
  // 1 <= 2 with 4 only below fails transitive-closedness at (1,2).
  auto r = validate_description(make_desc({1, 2}, {{1, 2}}, {{1, {Axiom::Four}}}));
  REQUIRE_FALSE(r.ok());
  CHECK(r.violations[0].condition == "transitive-closed");
  CHECK(r.violations[0].j == 1);
  CHECK(r.violations[0].i == 2);
  // A two-cycle breaks antisymmetry.
  auto r2 = validate_description(make_desc({1, 2}, {{1, 2}, {2, 1}}, {}));
  REQUIRE_FALSE(r2.ok());
  CHECK(r2.violations[0].condition == "antisymmetry");
  // Missing transitive pair.
  auto r3 = validate_description(make_desc({1, 2, 3}, {{1, 2}, {2, 3}}, {}));
  REQUIRE_FALSE(r3.ok());
  CHECK(r3.violations[0].condition == "transitivity");
  CHECK(validate_description(make_desc({1, 2, 3}, {{1, 2}, {2, 3}, {1, 3}}, {})).ok());
}

TEST_CASE("upsets") {
  auto d = make_desc({1, 2}, {{1, 2}}, {{2, {Axiom::Four}}});
  CHECK(upset(d, 1, UpsetFilter::All) == std::vector<int>{1, 2});
  CHECK(upset(d, 1, UpsetFilter::Ax, Axiom::Four) == std::vector<int>{2});
  CHECK(upset(d, 1, UpsetFilter::NotAx, Axiom::Four) == std::vector<int>{1});
  CHECK(upset(d, 2, UpsetFilter::All) == std::vector<int>{2});
  CHECK_THROWS(upset(d, 7, UpsetFilter::All));
}

TEST_CASE("upsets contain their index and are upward closed") {
  auto d = make_desc({1, 2, 3}, {{1, 2}, {2, 3}, {1, 3}}, {});
  for (int j : d.indices) {
    auto up = upset(d, j, UpsetFilter::All);
    CHECK(std::find(up.begin(), up.end(), j) != up.end());
    for (int i : up)
      for (int k : d.indices)
        if (d.leq(i, k)) CHECK(std::find(up.begin(), up.end(), k) != up.end());
  }
}

TEST_CASE("D and T propagate upward, 4 does not") {
  auto d = make_desc({1, 2}, {{1, 2}}, {{1, {Axiom::D}}});
  CHECK(d.has_d(2));
  CHECK_FALSE(d.has_t(2));
  auto dt = make_desc({1, 2}, {{1, 2}}, {{1, {Axiom::T}}});
  CHECK(dt.has_t(2));
  CHECK(dt.has_d(1));  // T yields D
  CHECK(dt.has_d(2));
  CHECK_FALSE(dt.has_4(2));
}

TEST_CASE("presets") {
  for (const auto& name : preset_names()) {
    auto logic = preset_logic(name);
    CHECK(validate_description(logic.desc).ok());
    CHECK(logic.id() == name);
  }
  CHECK(preset_logic("s4").desc.has_t(1));
  CHECK(preset_logic("s4").desc.has_4(1));
  CHECK(preset_logic("bimodal").desc.leq(1, 2));
  CHECK_FALSE(preset_logic("bimodal").desc.leq(2, 1));
  CHECK_THROWS(preset_logic("s5"));
}

TEST_CASE("description config round-trips") {
  Description d = parse_description("# bimodal with axioms\nindices: 1 2\norder: 1 <= 2\naxioms 2: D 4\naxioms 1: 4\n");
  CHECK(d.indices == std::vector<int>{1, 2});
  CHECK(d.order.count({1, 2}) == 1);
  CHECK(d.axioms[2] == std::set<Axiom>{Axiom::D, Axiom::Four});
  CHECK(validate_description(d).ok());
  Description d2 = parse_description(render_description(d));
  CHECK(d2.indices == d.indices);
  CHECK(d2.order == d.order);
  CHECK(d2.axioms == d.axioms);
  CHECK_THROWS(parse_description("indices 1 2"));
  CHECK_THROWS(parse_description("order: 1 < 2"));
}
