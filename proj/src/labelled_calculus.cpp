#include "nsq/labelled_calculus.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "nsq/nested_calculus.hpp"

namespace nsq {

std::string LbSystem::name() const {
  if (kind == Image) return "lbns_" + logic.id();
  switch (logic.kind) {
    case LogicKind::Intuitionistic: return "gti";
    case LogicKind::Multimodal: return "gtmm";
    case LogicKind::NonNormalE: return "gte";
    case LogicKind::NonNormalM: return "gtm";
  }
  return "gt";
}

RuleTable lb_rule_table(const LbSystem& system) {
  RuleTable t;
  t.calculus = system.kind == LbSystem::Image ? "lbns" : "labelled";
  if (system.kind == LbSystem::Image) {
    RuleTable ns = ns_rule_table(system.logic);
    for (const auto& r : ns.rules)
      t.rules.push_back({"tl_" + r.name, r.phase, r.arity, r.inter_nested, r.n_directed, r.shallow});
    return t;
  }
  const LogicSpec& logic = system.logic;
  auto props = [&] {
    t.rules.push_back({"imp_l", Phase::Local, 2});
    t.rules.push_back({"imp_r", Phase::Local, 1});
    t.rules.push_back({"and_l", Phase::Local, 1});
    t.rules.push_back({"and_r", Phase::Local, 2});
    t.rules.push_back({"or_l", Phase::Local, 2});
    t.rules.push_back({"or_r", Phase::Local, 1});
    t.rules.push_back({"bot_l", Phase::AxiomRule, 0});
    t.rules.push_back({"init", Phase::AxiomRule, 0});
  };
  switch (logic.kind) {
    case LogicKind::Intuitionistic:
      props();
      t.rules.push_back({"ref", Phase::Local, 1});
      t.rules.push_back({"trans", Phase::Local, 1});
      break;
    case LogicKind::Multimodal: {
      props();
      const Description& d = logic.desc;
      for (int i : d.indices) {
        std::string s = std::to_string(i);
        t.rules.push_back({"box_l_" + s, Phase::Local, 1});
        t.rules.push_back({"box_r_" + s, Phase::Local, 1});
        if (d.has_t(i)) t.rules.push_back({"ref_" + s, Phase::Local, 1});
        if (d.has_4(i)) t.rules.push_back({"trans_" + s, Phase::Local, 1});
        if (d.has_d(i)) t.rules.push_back({"ser_" + s, Phase::Local, 1});
      }
      for (int j : d.indices)
        for (int i : d.indices)
          if (j != i && d.leq(j, i))
            t.rules.push_back(
                {"int_" + std::to_string(j) + "_" + std::to_string(i), Phase::Local, 1});
      break;
    }
    case LogicKind::NonNormalE:
    case LogicKind::NonNormalM:
      props();
      t.rules.push_back({"init_mem", Phase::AxiomRule, 0});
      t.rules.push_back({"forces_all", Phase::Local, 1});
      t.rules.push_back({"covers", Phase::Local, 2});
      if (logic.kind == LogicKind::NonNormalE) {
        t.rules.push_back({"box_l_e", Phase::Local, 1});
        t.rules.push_back({"box_r_e", Phase::Local, 2});
      } else {
        t.rules.push_back({"box_l_m", Phase::Local, 1});
        t.rules.push_back({"box_r_m", Phase::Local, 1});
      }
      break;
  }
  return t;
}

// ---------------------------------------------------------------------------
// Shared helpers

namespace {

const LabelledFormula& occ_left(const LabelledSequent& s, int idx) {
  if (idx < 0 || idx >= static_cast<int>(s.left.size()))
    throw NotApplicable("no such left occurrence");
  return s.left[idx];
}

const LabelledFormula& occ_right(const LabelledSequent& s, int idx) {
  if (idx < 0 || idx >= static_cast<int>(s.right.size()))
    throw NotApplicable("no such right occurrence");
  return s.right[idx];
}

const RelationTerm& occ_rel(const LabelledSequent& s, int idx) {
  if (idx < 0 || idx >= static_cast<int>(s.relations.size()))
    throw NotApplicable("no such relation occurrence");
  return s.relations[idx];
}

void remove_left(LabelledSequent& s, const std::string& label, const Formula& f) {
  LabelledFormula lf{label, f};
  auto it = std::lower_bound(s.left.begin(), s.left.end(), lf);
  if (it == s.left.end() || !(*it == lf)) throw NotApplicable("principal not on the left");
  s.left.erase(it);
}

void remove_right(LabelledSequent& s, const std::string& label, const Formula& f) {
  LabelledFormula lf{label, f};
  auto it = std::lower_bound(s.right.begin(), s.right.end(), lf);
  if (it == s.right.end() || !(*it == lf)) throw NotApplicable("principal not on the right");
  s.right.erase(it);
}

void require_fresh(const LabelledSequent& s, const std::string& name) {
  if (name.empty()) throw NotApplicable("missing fresh label");
  if (s.label_used(name)) throw NotApplicable("label " + name + " is not fresh");
}

// Policy name for a fresh child of x: the first unused x.k.
std::string fresh_child(const LabelledSequent& s, const std::string& x) {
  for (int k = 1;; k++) {
    std::string name = x + "." + std::to_string(k);
    if (!s.label_used(name)) return name;
  }
}

std::string fresh_nbr(const LabelledSequent& s) {
  for (int k = 1;; k++) {
    std::string name = "n" + std::to_string(k);
    if (!s.label_used(name)) return name;
  }
}

void drop_label(LabelledSequent& s, const std::string& y) {
  s.left.erase(std::remove_if(s.left.begin(), s.left.end(),
                              [&](const LabelledFormula& f) { return f.label == y; }),
               s.left.end());
  s.right.erase(std::remove_if(s.right.begin(), s.right.end(),
                               [&](const LabelledFormula& f) { return f.label == y; }),
                s.right.end());
}

}  // namespace

// ---------------------------------------------------------------------------
// Image system rules (the labelled translations of the nested rules)

namespace {

std::vector<LabelledSequent> image_apply(const LogicSpec& logic, const std::string& rule,
                                         const LabelledSequent& goal, const Selection& sel) {
  const bool mlj = logic.kind == LogicKind::Intuitionistic;

  if (rule == "tl_bot_l") {
    const auto& lf = occ_left(goal, sel.left);
    if (!lf.formula.is_bottom()) throw NotApplicable("tl_bot_l needs bottom");
    return {};
  }
  if (rule == "tl_init") {
    const auto& lf = occ_left(goal, sel.left);
    const auto& rf = occ_right(goal, sel.right);
    if (!lf.formula.is_atom() || lf.formula != rf.formula || lf.label != rf.label)
      throw NotApplicable("tl_init needs a shared atom at one label");
    return {};
  }
  if (rule == "tl_and_l" || rule == "tl_or_l" || rule == "tl_imp_l" ||
      rule.rfind("tl_t_", 0) == 0) {
    const auto& lf = occ_left(goal, sel.left);
    const std::string& x = lf.label;
    const Formula& f = lf.formula;
    if (rule == "tl_and_l") {
      if (f.tag() != Conn::And) throw NotApplicable("tl_and_l needs a conjunction");
      LabelledSequent p = goal;
      remove_left(p, x, f);
      p.add_left(x, f.left());
      p.add_left(x, f.right());
      return {p};
    }
    if (rule == "tl_or_l") {
      if (f.tag() != Conn::Or) throw NotApplicable("tl_or_l needs a disjunction");
      LabelledSequent p1 = goal, p2 = goal;
      remove_left(p1, x, f);
      p1.add_left(x, f.left());
      remove_left(p2, x, f);
      p2.add_left(x, f.right());
      return {p1, p2};
    }
    if (rule == "tl_imp_l") {
      if (f.tag() != Conn::Imp) throw NotApplicable("tl_imp_l needs an implication");
      LabelledSequent p1 = goal, p2 = goal;
      p1.add_right(x, f.left());
      remove_left(p2, x, f);
      p2.add_left(x, f.right());
      return {p1, p2};
    }
    // tl_t_i
    int i = std::stoi(rule.substr(5));
    if (logic.kind != LogicKind::Multimodal || !logic.desc.has_t(i))
      throw NotApplicable("tl_t_i unavailable");
    if (!f.is_box() || f.box_index() != i) throw NotApplicable("tl_t_i needs a matching box");
    LabelledSequent p = goal;
    p.add_left(x, f.body());
    return {p};
  }
  if (rule == "tl_and_r" || rule == "tl_or_r") {
    const auto& rf = occ_right(goal, sel.right);
    const std::string& x = rf.label;
    const Formula& f = rf.formula;
    if (rule == "tl_and_r") {
      if (f.tag() != Conn::And) throw NotApplicable("tl_and_r needs a conjunction");
      LabelledSequent p1 = goal, p2 = goal;
      remove_right(p1, x, f);
      p1.add_right(x, f.left());
      remove_right(p2, x, f);
      p2.add_right(x, f.right());
      return {p1, p2};
    }
    if (f.tag() != Conn::Or) throw NotApplicable("tl_or_r needs a disjunction");
    LabelledSequent p = goal;
    remove_right(p, x, f);
    p.add_right(x, f.left());
    p.add_right(x, f.right());
    return {p};
  }
  if (rule == "tl_imp_r") {
    const auto& rf = occ_right(goal, sel.right);
    const std::string x = rf.label;
    const Formula f = rf.formula;
    if (f.tag() != Conn::Imp) throw NotApplicable("tl_imp_r needs an implication");
    LabelledSequent p = goal;
    remove_right(p, x, f);
    if (mlj) {
      std::string y = sel.label2.empty() ? fresh_child(goal, x) : sel.label2;
      require_fresh(goal, y);
      p.add_term(RelationTerm::rel(x, y));
      p.add_left(y, f.left());
      p.add_right(y, f.right());
      return {p};
    }
    p.add_left(x, f.left());
    p.add_right(x, f.right());
    return {p};
  }
  if (rule == "tl_lift") {
    if (!mlj) throw NotApplicable("tl_lift belongs to the intuitionistic image");
    const auto& lf = occ_left(goal, sel.left);
    if (!goal.has_term(RelationTerm::rel(lf.label, sel.label2)))
      throw NotApplicable("tl_lift needs the edge " + lf.label + " R " + sel.label2);
    LabelledSequent p = goal;
    p.add_left(sel.label2, lf.formula);
    return {p};
  }

  if (logic.kind == LogicKind::Multimodal) {
    const Description& d = logic.desc;
    if (rule.rfind("tl_box_r_", 0) == 0) {
      int i = std::stoi(rule.substr(9));
      const auto& rf = occ_right(goal, sel.right);
      if (!rf.formula.is_box() || rf.formula.box_index() != i)
        throw NotApplicable("tl_box_r_i needs a matching box");
      std::string y = sel.label2.empty() ? fresh_child(goal, rf.label) : sel.label2;
      require_fresh(goal, y);
      LabelledSequent p = goal;
      remove_right(p, rf.label, rf.formula);
      p.add_term(RelationTerm::rel_idx(i, rf.label, y));
      p.add_right(y, rf.formula.body());
      return {p};
    }
    auto two = [&](size_t prefix) {
      std::string suffix = rule.substr(prefix);
      size_t us = suffix.find('_');
      if (us == std::string::npos) throw NotApplicable("malformed rule name");
      return std::pair<int, int>{std::stoi(suffix.substr(0, us)),
                                 std::stoi(suffix.substr(us + 1))};
    };
    if (rule.rfind("tl_box_l_", 0) == 0 || rule.rfind("tl_four_", 0) == 0) {
      bool four = rule.rfind("tl_four_", 0) == 0;
      auto [i, j] = two(four ? 8 : 9);
      if (!d.leq(j, i)) throw NotApplicable("needs j below i");
      if (four && !d.has_4(i)) throw NotApplicable("tl_four_ij needs the transitivity axiom");
      const auto& lf = occ_left(goal, sel.left);
      if (!lf.formula.is_box() || lf.formula.box_index() != i)
        throw NotApplicable("needs a matching box");
      if (!goal.has_term(RelationTerm::rel_idx(j, lf.label, sel.label2)))
        throw NotApplicable("needs the edge " + lf.label + " R" + std::to_string(j) + " " +
                            sel.label2);
      LabelledSequent p = goal;
      p.add_left(sel.label2, four ? lf.formula : lf.formula.body());
      return {p};
    }
    if (rule.rfind("tl_d_", 0) == 0) {
      auto [i, j] = two(5);
      if (!d.has_d(j) || !d.leq(j, i)) throw NotApplicable("tl_d_ij unavailable");
      const auto& lf = occ_left(goal, sel.left);
      if (!lf.formula.is_box() || lf.formula.box_index() != i)
        throw NotApplicable("tl_d_ij needs a matching box");
      std::string y = sel.label2.empty() ? fresh_child(goal, lf.label) : sel.label2;
      require_fresh(goal, y);
      LabelledSequent p = goal;
      p.add_term(RelationTerm::rel_idx(j, lf.label, y));
      p.add_left(y, lf.formula.body());
      return {p};
    }
  }

  if (logic.kind == LogicKind::NonNormalE || logic.kind == LogicKind::NonNormalM) {
    if (rule == "tl_box_r_e") {
      const auto& rf = occ_right(goal, sel.right);
      if (!rf.formula.is_box()) throw NotApplicable("tl_box_r_e needs a box");
      std::string base = sel.label2.empty() ? fresh_child(goal, rf.label) : "";
      std::string y1 = sel.label2.empty() ? base + ".1" : sel.label2;
      std::string y2 = sel.label3.empty() ? base + ".2" : sel.label3;
      require_fresh(goal, y1);
      require_fresh(goal, y2);
      if (y1 == y2) throw NotApplicable("pair labels must differ");
      LabelledSequent p = goal;
      remove_right(p, rf.label, rf.formula);
      p.add_term(RelationTerm::nbr_pair(rf.label, y1, y2));
      p.add_right(y1, rf.formula.body());
      p.add_left(y2, rf.formula.body());
      return {p};
    }
    if (rule == "tl_m") {
      if (logic.kind != LogicKind::NonNormalM) throw NotApplicable("tl_m is monotone only");
      const auto& t = occ_rel(goal, sel.rel);
      if (t.kind != RelKind::NbrPair) throw NotApplicable("tl_m needs a pair term");
      LabelledSequent p = goal;
      p.add_left(t.c, Formula::bottom());
      return {p};
    }
    if (rule == "tl_box_l_e") {
      const auto& lf = occ_left(goal, sel.left);
      if (!lf.formula.is_box()) throw NotApplicable("tl_box_l_e needs a box");
      const auto t = occ_rel(goal, sel.rel);
      if (t.kind != RelKind::NbrPair || t.a != lf.label)
        throw NotApplicable("tl_box_l_e needs a pair rooted at the principal's label");
      LabelledSequent p1 = goal, p2 = goal;
      auto drop_term = [&](LabelledSequent& s) {
        auto it = std::lower_bound(s.relations.begin(), s.relations.end(), t);
        s.relations.erase(it);
      };
      drop_term(p1);
      drop_label(p1, t.c);
      p1.add_term(RelationTerm::nbr(t.a, t.b));
      p1.add_left(t.b, lf.formula.body());
      drop_term(p2);
      drop_label(p2, t.b);
      p2.add_term(RelationTerm::nbr(t.a, t.c));
      p2.add_right(t.c, lf.formula.body());
      return {p1, p2};
    }
  }

  throw NotApplicable("rule '" + rule + "' not in the " + logic.id() + " image table");
}

}  // namespace

// ---------------------------------------------------------------------------
// Semantic systems GtI, Gtmm, GtE, GtM

namespace {

std::vector<LabelledSequent> gt_apply(const LogicSpec& logic, const std::string& rule,
                                      const LabelledSequent& goal, const Selection& sel) {
  const bool intuitionistic = logic.kind == LogicKind::Intuitionistic;

  if (rule == "bot_l") {
    const auto& lf = occ_left(goal, sel.left);
    if (!lf.formula.is_bottom()) throw NotApplicable("bot_l needs bottom");
    return {};
  }
  if (rule == "init") {
    if (intuitionistic) throw NotApplicable("the intuitionistic axiom is init_t");
    const auto& lf = occ_left(goal, sel.left);
    const auto& rf = occ_right(goal, sel.right);
    if (!lf.formula.is_atom() || lf.formula != rf.formula || lf.label != rf.label)
      throw NotApplicable("init needs a shared atom at one label");
    return {};
  }
  if (rule == "init_t") {
    if (!intuitionistic) throw NotApplicable("init_t belongs to the intuitionistic system");
    const auto& lf = occ_left(goal, sel.left);
    const auto& rf = occ_right(goal, sel.right);
    if (!lf.formula.is_atom() || lf.formula != rf.formula)
      throw NotApplicable("init_t needs a shared atom");
    if (!goal.has_term(RelationTerm::leq(lf.label, rf.label)))
      throw NotApplicable("init_t needs " + lf.label + " <= " + rf.label);
    return {};
  }
  if (rule == "and_l") {
    const auto& lf = occ_left(goal, sel.left);
    if (lf.formula.tag() != Conn::And) throw NotApplicable("and_l needs a conjunction");
    LabelledSequent p = goal;
    remove_left(p, lf.label, lf.formula);
    p.add_left(lf.label, lf.formula.left());
    p.add_left(lf.label, lf.formula.right());
    return {p};
  }
  if (rule == "or_l") {
    const auto& lf = occ_left(goal, sel.left);
    if (lf.formula.tag() != Conn::Or) throw NotApplicable("or_l needs a disjunction");
    LabelledSequent p1 = goal, p2 = goal;
    remove_left(p1, lf.label, lf.formula);
    p1.add_left(lf.label, lf.formula.left());
    remove_left(p2, lf.label, lf.formula);
    p2.add_left(lf.label, lf.formula.right());
    return {p1, p2};
  }
  if (rule == "and_r") {
    const auto& rf = occ_right(goal, sel.right);
    if (rf.formula.tag() != Conn::And) throw NotApplicable("and_r needs a conjunction");
    LabelledSequent p1 = goal, p2 = goal;
    remove_right(p1, rf.label, rf.formula);
    p1.add_right(rf.label, rf.formula.left());
    remove_right(p2, rf.label, rf.formula);
    p2.add_right(rf.label, rf.formula.right());
    return {p1, p2};
  }
  if (rule == "or_r") {
    const auto& rf = occ_right(goal, sel.right);
    if (rf.formula.tag() != Conn::Or) throw NotApplicable("or_r needs a disjunction");
    LabelledSequent p = goal;
    remove_right(p, rf.label, rf.formula);
    p.add_right(rf.label, rf.formula.left());
    p.add_right(rf.label, rf.formula.right());
    return {p};
  }
  if (rule == "imp_l") {
    if (intuitionistic) throw NotApplicable("the intuitionistic rule is imp_l_t");
    const auto& lf = occ_left(goal, sel.left);
    if (lf.formula.tag() != Conn::Imp) throw NotApplicable("imp_l needs an implication");
    LabelledSequent p1 = goal, p2 = goal;
    p1.add_right(lf.label, lf.formula.left());
    remove_left(p2, lf.label, lf.formula);
    p2.add_left(lf.label, lf.formula.right());
    return {p1, p2};
  }
  if (rule == "imp_r") {
    if (intuitionistic) throw NotApplicable("the intuitionistic rule is imp_r_t");
    const auto& rf = occ_right(goal, sel.right);
    if (rf.formula.tag() != Conn::Imp) throw NotApplicable("imp_r needs an implication");
    LabelledSequent p = goal;
    remove_right(p, rf.label, rf.formula);
    p.add_left(rf.label, rf.formula.left());
    p.add_right(rf.label, rf.formula.right());
    return {p};
  }
  if (rule == "imp_l_t") {
    // G3-style: the principal stays in both premises, so the rule is
    // height-preserving invertible and search can saturate without
    // backtracking.
    const auto& lf = occ_left(goal, sel.left);
    if (lf.formula.tag() != Conn::Imp) throw NotApplicable("imp_l_t needs an implication");
    if (!goal.has_term(RelationTerm::leq(lf.label, sel.label2)))
      throw NotApplicable("imp_l_t needs " + lf.label + " <= " + sel.label2);
    LabelledSequent p1 = goal, p2 = goal;
    p1.add_right(sel.label2, lf.formula.left());
    p2.add_left(sel.label2, lf.formula.right());
    return {p1, p2};
  }
  if (rule == "imp_r_t") {
    const auto& rf = occ_right(goal, sel.right);
    if (rf.formula.tag() != Conn::Imp) throw NotApplicable("imp_r_t needs an implication");
    std::string y = sel.label2.empty() ? fresh_child(goal, rf.label) : sel.label2;
    require_fresh(goal, y);
    LabelledSequent p = goal;
    remove_right(p, rf.label, rf.formula);
    p.add_term(RelationTerm::leq(rf.label, y));
    p.add_left(y, rf.formula.left());
    p.add_right(y, rf.formula.right());
    return {p};
  }
  if (rule == "ref") {
    if (!intuitionistic) throw NotApplicable("ref belongs to the intuitionistic system");
    if (sel.label.empty() || !goal.label_used(sel.label))
      throw NotApplicable("ref needs a label of the sequent");
    LabelledSequent p = goal;
    p.add_term(RelationTerm::leq(sel.label, sel.label));
    return {p};
  }
  if (rule == "trans") {
    if (!intuitionistic) throw NotApplicable("trans belongs to the intuitionistic system");
    if (!goal.has_term(RelationTerm::leq(sel.label, sel.label2)) ||
        !goal.has_term(RelationTerm::leq(sel.label2, sel.label3)))
      throw NotApplicable("trans needs the two chained atoms");
    LabelledSequent p = goal;
    p.add_term(RelationTerm::leq(sel.label, sel.label3));
    return {p};
  }

  if (logic.kind == LogicKind::Multimodal) {
    const Description& d = logic.desc;
    if (rule.rfind("box_l_", 0) == 0) {
      int i = std::stoi(rule.substr(6));
      const auto& lf = occ_left(goal, sel.left);
      if (!lf.formula.is_box() || lf.formula.box_index() != i)
        throw NotApplicable("box_l_i needs a matching box");
      if (!goal.has_term(RelationTerm::rel_idx(i, lf.label, sel.label2)))
        throw NotApplicable("box_l_i needs the accessibility atom");
      LabelledSequent p = goal;
      p.add_left(sel.label2, lf.formula.body());
      return {p};
    }
    if (rule.rfind("box_r_", 0) == 0) {
      int i = std::stoi(rule.substr(6));
      const auto& rf = occ_right(goal, sel.right);
      if (!rf.formula.is_box() || rf.formula.box_index() != i)
        throw NotApplicable("box_r_i needs a matching box");
      std::string y = sel.label2.empty() ? fresh_child(goal, rf.label) : sel.label2;
      require_fresh(goal, y);
      LabelledSequent p = goal;
      remove_right(p, rf.label, rf.formula);
      p.add_term(RelationTerm::rel_idx(i, rf.label, y));
      p.add_right(y, rf.formula.body());
      return {p};
    }
    if (rule.rfind("ref_", 0) == 0) {
      int i = std::stoi(rule.substr(4));
      if (!d.has_t(i)) throw NotApplicable("ref_i needs the reflexivity condition");
      if (sel.label.empty() || !goal.label_used(sel.label))
        throw NotApplicable("ref_i needs a label of the sequent");
      LabelledSequent p = goal;
      p.add_term(RelationTerm::rel_idx(i, sel.label, sel.label));
      return {p};
    }
    if (rule.rfind("trans_", 0) == 0) {
      int i = std::stoi(rule.substr(6));
      if (!d.has_4(i)) throw NotApplicable("trans_i needs the transitivity condition");
      if (!goal.has_term(RelationTerm::rel_idx(i, sel.label, sel.label2)) ||
          !goal.has_term(RelationTerm::rel_idx(i, sel.label2, sel.label3)))
        throw NotApplicable("trans_i needs the two chained atoms");
      LabelledSequent p = goal;
      p.add_term(RelationTerm::rel_idx(i, sel.label, sel.label3));
      return {p};
    }
    if (rule.rfind("ser_", 0) == 0) {
      int i = std::stoi(rule.substr(4));
      if (!d.has_d(i)) throw NotApplicable("ser_i needs the seriality condition");
      if (sel.label.empty() || !goal.label_used(sel.label))
        throw NotApplicable("ser_i needs a label of the sequent");
      std::string y = sel.label2.empty() ? fresh_child(goal, sel.label) : sel.label2;
      require_fresh(goal, y);
      LabelledSequent p = goal;
      p.add_term(RelationTerm::rel_idx(i, sel.label, y));
      return {p};
    }
    if (rule.rfind("int_", 0) == 0) {
      std::string suffix = rule.substr(4);
      size_t us = suffix.find('_');
      if (us == std::string::npos) throw NotApplicable("malformed rule name");
      int j = std::stoi(suffix.substr(0, us));
      int i = std::stoi(suffix.substr(us + 1));
      if (j == i || !d.leq(j, i)) throw NotApplicable("int needs j strictly below i");
      if (!goal.has_term(RelationTerm::rel_idx(j, sel.label, sel.label2)))
        throw NotApplicable("int needs the j-atom");
      LabelledSequent p = goal;
      p.add_term(RelationTerm::rel_idx(i, sel.label, sel.label2));
      return {p};
    }
  }

  if (logic.kind == LogicKind::NonNormalE || logic.kind == LogicKind::NonNormalM) {
    const bool monotone = logic.kind == LogicKind::NonNormalM;
    if (rule == "init_mem") {
      const auto& t = occ_rel(goal, sel.rel);
      if (t.kind != RelKind::InSet) throw NotApplicable("init_mem needs a membership atom");
      if (sel.right < 0 || sel.right >= static_cast<int>(goal.right_atoms.size()) ||
          !(goal.right_atoms[sel.right] == t))
        throw NotApplicable("init_mem needs the same atom on the right");
      return {};
    }
    if (rule == "forces_all") {
      const auto& t = occ_rel(goal, sel.rel);
      if (t.kind != RelKind::ForcesAll) throw NotApplicable("forces_all needs a forcing term");
      if (!goal.has_term(RelationTerm::in_set(sel.label2, t.a)))
        throw NotApplicable("forces_all needs " + sel.label2 + " in " + t.a);
      LabelledSequent p = goal;
      p.add_left(sel.label2, t.formula);
      return {p};
    }
    if (rule == "covers") {
      const auto& t = occ_rel(goal, sel.rel);
      if (t.kind != RelKind::Covers) throw NotApplicable("covers needs a covering term");
      if (sel.label3.empty() || !goal.label_used(sel.label3))
        throw NotApplicable("covers instantiates an existing world label");
      LabelledSequent p1 = goal, p2 = goal;
      p1.add_right(sel.label3, t.formula);
      p2.add_term(RelationTerm::in_set(sel.label3, t.a));
      return {p1, p2};
    }
    if ((rule == "box_l_e" && !monotone) || (rule == "box_l_m" && monotone)) {
      const auto& lf = occ_left(goal, sel.left);
      if (!lf.formula.is_box()) throw NotApplicable("needs a box");
      std::string a = sel.label2.empty() ? fresh_nbr(goal) : sel.label2;
      require_fresh(goal, a);
      LabelledSequent p = goal;
      remove_left(p, lf.label, lf.formula);
      p.add_term(RelationTerm::nbr_of(a, lf.label));
      p.add_term(RelationTerm::forces_all(a, lf.formula.body()));
      if (!monotone) p.add_term(RelationTerm::covers(lf.formula.body(), a));
      return {p};
    }
    if (rule == "box_r_e" && !monotone) {
      const auto& rf = occ_right(goal, sel.right);
      if (!rf.formula.is_box()) throw NotApplicable("box_r_e needs a box");
      const auto& t = occ_rel(goal, sel.rel);
      if (t.kind != RelKind::NbrOf || t.b != rf.label)
        throw NotApplicable("box_r_e needs a neighbourhood of the principal's label");
      std::string z = sel.label3.empty() ? fresh_child(goal, t.a) : sel.label3;
      require_fresh(goal, z);
      LabelledSequent p1 = goal;
      p1.add_term(RelationTerm::in_set(z, t.a));
      p1.add_right(z, rf.formula.body());
      std::string y = sel.label4.empty() ? fresh_child(p1, t.a) : sel.label4;
      require_fresh(p1, y);
      LabelledSequent p2 = goal;
      p2.add_left(y, rf.formula.body());
      p2.add_right_atom(RelationTerm::in_set(y, t.a));
      return {p1, p2};
    }
    if (rule == "box_r_m" && monotone) {
      const auto& rf = occ_right(goal, sel.right);
      if (!rf.formula.is_box()) throw NotApplicable("box_r_m needs a box");
      const auto& t = occ_rel(goal, sel.rel);
      if (t.kind != RelKind::NbrOf || t.b != rf.label)
        throw NotApplicable("box_r_m needs a neighbourhood of the principal's label");
      std::string y = sel.label3.empty() ? fresh_child(goal, t.a) : sel.label3;
      require_fresh(goal, y);
      LabelledSequent p = goal;
      p.add_term(RelationTerm::in_set(y, t.a));
      p.add_right(y, rf.formula.body());
      return {p};
    }
  }

  throw NotApplicable("rule '" + rule + "' not in the " + logic.id() + " labelled table");
}

}  // namespace

std::vector<LabelledSequent> lb_apply(const LbSystem& system, const std::string& rule,
                                      const LabelledSequent& goal, const Selection& sel) {
  if (system.kind == LbSystem::Image) return image_apply(system.logic, rule, goal, sel);
  return gt_apply(system.logic, rule, goal, sel);
}

// ---------------------------------------------------------------------------
// Relational closure with explicit materialization steps

namespace {

using Steps = std::vector<std::pair<std::string, Selection>>;

Selection label_sel(std::string x, std::string y = "", std::string z = "") {
  Selection s;
  s.label = std::move(x);
  s.label2 = std::move(y);
  s.label3 = std::move(z);
  return s;
}

// Steps deriving x <= y in the intuitionistic system (Ref for x <= x, Trans
// folded along an atom path).
std::optional<Steps> leq_steps(const LabelledSequent& L, const std::string& x,
                               const std::string& y) {
  if (L.has_term(RelationTerm::leq(x, y))) return Steps{};
  if (x == y) return Steps{{"ref", label_sel(x)}};
  // BFS over the <= atoms.
  std::map<std::string, std::string> parent;
  std::vector<std::string> queue{x};
  parent[x] = x;
  for (size_t q = 0; q < queue.size(); q++) {
    for (const auto& t : L.relations) {
      if (t.kind != RelKind::Leq || t.a != queue[q] || parent.count(t.b)) continue;
      parent[t.b] = queue[q];
      queue.push_back(t.b);
    }
  }
  if (!parent.count(y)) return std::nullopt;
  std::vector<std::string> path{y};
  while (path.back() != x) path.push_back(parent[path.back()]);
  std::reverse(path.begin(), path.end());
  Steps out;
  for (size_t k = 2; k < path.size(); k++) {
    Selection s = label_sel(x, path[k - 1], path[k]);
    out.push_back({"trans", s});
  }
  return out;
}

// Steps deriving x Ri y in the multimodal system (Int lifts lower-index
// atoms, Ref_i closes reflexively, Trans_i folds a path when 4 holds at i).
std::optional<Steps> ridx_steps(const LabelledSequent& L, const Description& d, int i,
                                const std::string& x, const std::string& y) {
  if (L.has_term(RelationTerm::rel_idx(i, x, y))) return Steps{};
  auto edge = [&](const std::string& u, const std::string& v) -> std::optional<int> {
    // smallest usable index of an atom u Rj v with j <= i
    std::optional<int> best;
    for (const auto& t : L.relations)
      if (t.kind == RelKind::RelIdx && t.a == u && t.b == v && d.leq(t.index, i))
        if (!best || t.index == i || (*best != i && t.index < *best)) best = t.index;
    return best;
  };
  auto lift = [&](Steps& out, const std::string& u, const std::string& v, int j) {
    if (j != i)
      out.push_back({"int_" + std::to_string(j) + "_" + std::to_string(i), label_sel(u, v)});
  };
  if (x == y && d.has_t(i)) return Steps{{"ref_" + std::to_string(i), label_sel(x)}};
  if (auto j = edge(x, y); j && x != y) {
    Steps out;
    lift(out, x, y, *j);
    return out;
  }
  if (!d.has_4(i)) return std::nullopt;
  // BFS for a path of j <= i atoms (at least two hops, or a cycle back to x).
  std::map<std::string, std::pair<std::string, int>> parent;  // node -> (pred, atom index)
  std::vector<std::string> queue;
  auto expand_from = [&](const std::string& u) {
    for (const auto& t : L.relations) {
      if (t.kind != RelKind::RelIdx || t.a != u || !d.leq(t.index, i)) continue;
      if (t.b == x || parent.count(t.b)) continue;  // handle the cycle target separately
      parent[t.b] = {u, t.index};
      queue.push_back(t.b);
    }
  };
  auto assemble = [&](const std::string& last, int last_idx,
                      const std::string& dest) -> Steps {
    std::vector<std::pair<std::string, int>> hops;  // (target, atom index)
    hops.push_back({dest, last_idx});
    std::string cur = last;
    while (cur != x) {
      auto [pred, idx] = parent[cur];
      hops.push_back({cur, idx});
      cur = pred;
    }
    std::reverse(hops.begin(), hops.end());
    Steps out;
    std::string prev = x;
    for (auto& [v, idx] : hops) {
      lift(out, prev, v, idx);
      prev = v;
    }
    prev = hops[0].first;
    for (size_t k = 1; k < hops.size(); k++) {
      out.push_back({"trans_" + std::to_string(i), label_sel(x, prev, hops[k].first)});
      prev = hops[k].first;
    }
    return out;
  };
  expand_from(x);
  for (size_t q = 0; q < queue.size(); q++) {
    const std::string u = queue[q];
    if (u == y && u != x) {
      auto [pred, idx] = parent[u];
      // path x .. pred -> y
      if (pred == x) break;  // single hop already handled
      return assemble(pred, idx, y);
    }
    if (x == y)
      if (auto j = edge(u, x)) return assemble(u, *j, x);
    expand_from(u);
  }
  if (x != y && parent.count(y)) {
    auto [pred, idx] = parent[y];
    if (pred != x) return assemble(pred, idx, y);
  }
  return std::nullopt;
}

bool leq_reaches(const LabelledSequent& L, const std::string& z, const std::string& x) {
  if (z == x) return true;
  return leq_steps(L, z, x).has_value();
}

bool ridx_reaches(const LabelledSequent& L, const Description& d, int j, const std::string& z,
                  const std::string& x) {
  if (z == x) return true;
  return ridx_steps(L, d, j, z, x).has_value();
}

std::set<std::string> world_labels(const LabelledSequent& L) {
  std::set<std::string> out;
  for (const auto& f : L.left) out.insert(f.label);
  for (const auto& f : L.right) out.insert(f.label);
  for (const auto& t : L.relations) {
    if (t.kind == RelKind::Leq || t.kind == RelKind::RelIdx || t.kind == RelKind::Rel ||
        t.kind == RelKind::Nbr) {
      out.insert(t.a);
      out.insert(t.b);
    }
    if (t.kind == RelKind::InSet) out.insert(t.a);
    if (t.kind == RelKind::NbrOf) out.insert(t.b);
  }
  for (const auto& t : L.right_atoms) out.insert(t.a);
  return out;
}

// ---------------------------------------------------------------------------
// Subproblem slices for creation blocking

std::string gti_slice(const LabelledSequent& L, const std::string& x, const Formula& new_left,
                      const Formula& new_right) {
  std::set<std::string> left;
  for (const auto& f : L.left)
    if (leq_reaches(L, f.label, x)) left.insert(render_formula(f.formula));
  left.insert(render_formula(new_left));
  std::string out = "L{";
  for (const auto& s : left) out += s + ";";
  out += "}R{" + render_formula(new_right) + "}";
  return out;
}

std::string gtmm_slice(const LabelledSequent& L, const Description& d, const std::string& x,
                       int creation_index, const Formula& new_right) {
  std::set<std::string> content;
  for (const auto& f : L.left) {
    if (!f.formula.is_box()) continue;
    int j = f.formula.box_index();
    if (!d.leq(creation_index, j)) continue;
    bool direct = f.label == x;
    bool multi = d.has_4(j) && ridx_reaches(L, d, j, f.label, x);
    if (!direct && !multi) continue;
    content.insert(render_formula(f.formula.body()));
    if (d.has_4(j)) content.insert("#" + render_formula(f.formula));
  }
  std::string out = "L{";
  for (const auto& s : content) out += s + ";";
  out += "}R{" + (new_right.is_null() ? std::string() : render_formula(new_right)) + "}";
  return out;
}

// ---------------------------------------------------------------------------
// Backward search for the semantic systems

struct GtProver {
  const LogicSpec& logic;
  LbSystem system;
  BudgetMeter meter;

  GtProver(const LogicSpec& l, Budget b) : logic(l), system(LbSystem::gt(l)), meter(b.nodes) {}

  using Deriv = Derivation<LabelledSequent>;

  struct GtMove {
    Steps pre;
    std::string rule;
    Selection sel;
    std::string done_key;                  // once per branch when nonempty
    std::string parent_label, new_label;   // creations
    std::string slice;                     // creation blocking key
    bool invertible = true;                // committed without backtracking
  };

  // Applies materialization steps, returning the judgments along the way.
  std::vector<std::pair<std::pair<std::string, Selection>, LabelledSequent>> run_steps(
      const Steps& steps, LabelledSequent& L) const {
    std::vector<std::pair<std::pair<std::string, Selection>, LabelledSequent>> chain;
    for (const auto& [rule, sel] : steps) {
      auto premises = lb_apply(system, rule, L, sel);
      chain.push_back({{rule, sel}, L});
      L = premises.at(0);
    }
    return chain;
  }

  static Deriv fold_chain(
      std::vector<std::pair<std::pair<std::string, Selection>, LabelledSequent>>& chain,
      Deriv tail) {
    Deriv out = std::move(tail);
    for (auto it = chain.rbegin(); it != chain.rend(); ++it)
      out = Deriv{it->second, it->first.first, it->first.second, {std::move(out)}};
    return out;
  }

  std::optional<Deriv> axiom(const LabelledSequent& L) {
    for (size_t i = 0; i < L.left.size(); i++)
      if (L.left[i].formula.is_bottom()) {
        Selection sel;
        sel.left = static_cast<int>(i);
        return Deriv{L, "bot_l", sel, {}};
      }
    if (logic.kind == LogicKind::Intuitionistic) {
      for (size_t i = 0; i < L.left.size(); i++) {
        if (!L.left[i].formula.is_atom()) continue;
        for (size_t j = 0; j < L.right.size(); j++) {
          if (!(L.left[i].formula == L.right[j].formula)) continue;
          auto steps = leq_steps(L, L.left[i].label, L.right[j].label);
          if (!steps) continue;
          Selection sel;
          sel.left = static_cast<int>(i);
          sel.right = static_cast<int>(j);
          // Occurrence indices stay valid: the steps only add relation terms.
          LabelledSequent cur = L;
          auto chain = run_steps(*steps, cur);
          return fold_chain(chain, Deriv{cur, "init_t", sel, {}});
        }
      }
      return std::nullopt;
    }
    for (size_t i = 0; i < L.left.size(); i++) {
      if (!L.left[i].formula.is_atom()) continue;
      for (size_t j = 0; j < L.right.size(); j++)
        if (L.left[i].formula == L.right[j].formula && L.left[i].label == L.right[j].label) {
          Selection sel;
          sel.left = static_cast<int>(i);
          sel.right = static_cast<int>(j);
          return Deriv{L, "init", sel, {}};
        }
    }
    if (logic.kind == LogicKind::NonNormalE || logic.kind == LogicKind::NonNormalM) {
      for (size_t r = 0; r < L.relations.size(); r++) {
        if (L.relations[r].kind != RelKind::InSet) continue;
        for (size_t j = 0; j < L.right_atoms.size(); j++)
          if (L.right_atoms[j] == L.relations[r]) {
            Selection sel;
            sel.rel = static_cast<int>(r);
            sel.right = static_cast<int>(j);
            return Deriv{L, "init_mem", sel, {}};
          }
      }
    }
    return std::nullopt;
  }

  void push_branching(const LabelledSequent& L, std::vector<GtMove>& out) {
    const bool classical = logic.classical_base();
    auto add_occ = [&](std::string rule, int left, int right) {
      GtMove m;
      m.rule = std::move(rule);
      m.sel.left = left;
      m.sel.right = right;
      out.push_back(std::move(m));
    };
    for (size_t i = 0; i < L.right.size(); i++)
      if (L.right[i].formula.tag() == Conn::And) add_occ("and_r", -1, static_cast<int>(i));
    for (size_t i = 0; i < L.left.size(); i++)
      if (L.left[i].formula.tag() == Conn::Or) add_occ("or_l", static_cast<int>(i), -1);
    if (classical)
      for (size_t i = 0; i < L.left.size(); i++)
        if (L.left[i].formula.tag() == Conn::Imp) add_occ("imp_l", static_cast<int>(i), -1);
  }

  void enumerate(const LabelledSequent& L, std::vector<GtMove>& out) {
    const bool classical = logic.classical_base();
    auto add_occ = [&](std::string rule, int left, int right) {
      GtMove m;
      m.rule = std::move(rule);
      m.sel.left = left;
      m.sel.right = right;
      out.push_back(std::move(m));
    };
    // Everything is invertible and committed, so order is a cost matter
    // only: unary rules first, branching rules last (they split the
    // saturation work into subtrees).
    for (size_t i = 0; i < L.left.size(); i++)
      if (L.left[i].formula.tag() == Conn::And) add_occ("and_l", static_cast<int>(i), -1);
    for (size_t i = 0; i < L.right.size(); i++)
      if (L.right[i].formula.tag() == Conn::Or) add_occ("or_r", -1, static_cast<int>(i));
    if (classical)
      for (size_t i = 0; i < L.right.size(); i++)
        if (L.right[i].formula.tag() == Conn::Imp) add_occ("imp_r", -1, static_cast<int>(i));

    switch (logic.kind) {
      case LogicKind::Intuitionistic: {
        auto labels = world_labels(L);
        for (size_t i = 0; i < L.right.size(); i++) {
          if (L.right[i].formula.tag() != Conn::Imp) continue;
          GtMove m;
          m.rule = "imp_r_t";
          m.sel.right = static_cast<int>(i);
          m.parent_label = L.right[i].label;
          m.new_label = fresh_child(L, m.parent_label);
          m.sel.label2 = m.new_label;
          m.slice = gti_slice(L, m.parent_label, L.right[i].formula.left(),
                              L.right[i].formula.right());
          out.push_back(std::move(m));
        }
        push_branching(L, out);
        for (size_t i = 0; i < L.left.size(); i++) {
          if (L.left[i].formula.tag() != Conn::Imp) continue;
          for (const auto& y : labels) {
            if (L.has_right(y, L.left[i].formula.left()) &&
                L.has_left(y, L.left[i].formula.right()))
              continue;  // both auxiliaries already present
            auto steps = leq_steps(L, L.left[i].label, y);
            if (!steps) continue;
            GtMove m;
            m.pre = *steps;
            m.rule = "imp_l_t";
            m.sel.left = static_cast<int>(i);
            m.sel.label2 = y;
            out.push_back(std::move(m));
          }
        }
        break;
      }
      case LogicKind::Multimodal: {
        const Description& d = logic.desc;
        auto labels = world_labels(L);
        for (size_t i = 0; i < L.left.size(); i++) {
          if (!L.left[i].formula.is_box()) continue;
          int bi = L.left[i].formula.box_index();
          for (const auto& y : labels) {
            if (L.has_left(y, L.left[i].formula.body())) continue;
            auto steps = ridx_steps(L, d, bi, L.left[i].label, y);
            if (!steps) continue;
            GtMove m;
            m.pre = *steps;
            m.rule = "box_l_" + std::to_string(bi);
            m.sel.left = static_cast<int>(i);
            m.sel.label2 = y;
            out.push_back(std::move(m));
          }
        }
        push_branching(L, out);
        for (size_t i = 0; i < L.right.size(); i++) {
          if (!L.right[i].formula.is_box()) continue;
          int bi = L.right[i].formula.box_index();
          GtMove m;
          m.rule = "box_r_" + std::to_string(bi);
          m.sel.right = static_cast<int>(i);
          m.parent_label = L.right[i].label;
          m.new_label = fresh_child(L, m.parent_label);
          m.sel.label2 = m.new_label;
          m.slice = gtmm_slice(L, d, m.parent_label, bi, L.right[i].formula.body());
          out.push_back(std::move(m));
        }
        for (int i : d.indices) {
          if (!d.has_d(i)) continue;
          for (const auto& x : labels) {
            std::string slice = gtmm_slice(L, d, x, i, Formula());
            if (slice.find(';') == std::string::npos) continue;  // nothing transfers
            GtMove m;
            m.rule = "ser_" + std::to_string(i);
            m.sel.label = x;
            m.done_key = "ser:" + std::to_string(i) + ":" + x;
            m.parent_label = x;
            m.new_label = fresh_child(L, x);
            m.sel.label2 = m.new_label;
            m.slice = std::move(slice);
            out.push_back(std::move(m));
          }
        }
        break;
      }
      case LogicKind::NonNormalE:
      case LogicKind::NonNormalM: {
        const bool monotone = logic.kind == LogicKind::NonNormalM;
        for (size_t r = 0; r < L.relations.size(); r++) {
          const auto& t = L.relations[r];
          if (t.kind != RelKind::ForcesAll) continue;
          for (const auto& u : L.relations) {
            if (u.kind != RelKind::InSet || u.b != t.a) continue;
            if (L.has_left(u.a, t.formula)) continue;
            GtMove m;
            m.rule = "forces_all";
            m.sel.rel = static_cast<int>(r);
            m.sel.label2 = u.a;
            out.push_back(std::move(m));
          }
        }
        for (size_t i = 0; i < L.left.size(); i++) {
          if (!L.left[i].formula.is_box()) continue;
          GtMove m;
          m.rule = monotone ? "box_l_m" : "box_l_e";
          m.sel.left = static_cast<int>(i);
          m.sel.label2 = fresh_nbr(L);
          out.push_back(std::move(m));
        }
        push_branching(L, out);
        for (size_t i = 0; i < L.right.size(); i++) {
          if (!L.right[i].formula.is_box()) continue;
          for (size_t r = 0; r < L.relations.size(); r++) {
            const auto& t = L.relations[r];
            if (t.kind != RelKind::NbrOf || t.b != L.right[i].label) continue;
            GtMove m;
            m.rule = monotone ? "box_r_m" : "box_r_e";
            m.sel.right = static_cast<int>(i);
            m.sel.rel = static_cast<int>(r);
            m.done_key = "boxr:" + t.a + ":" + render_formula(L.right[i].formula);
            out.push_back(std::move(m));
          }
        }
        for (size_t r = 0; r < L.relations.size(); r++) {
          const auto& t = L.relations[r];
          if (t.kind != RelKind::Covers) continue;
          for (const auto& z : world_labels(L)) {
            GtMove m;
            m.rule = "covers";
            m.sel.rel = static_cast<int>(r);
            m.sel.label3 = z;
            m.done_key = "cov:" + t.a + ":" + render_formula(t.formula) + ":" + z;
            out.push_back(std::move(m));
          }
        }
        break;
      }
    }
  }

  std::optional<Deriv> solve(const LabelledSequent& L, std::vector<std::string>& hist,
                             const std::set<std::string>& slices,
                             const std::set<std::string>& done) {
    if (!meter.spend()) return std::nullopt;
    if (auto leaf = axiom(L)) return leaf;

    std::vector<GtMove> moves;
    enumerate(L, moves);
    hist.push_back(labelled_key(L));
    std::optional<Deriv> found;
    for (auto& mv : moves) {
      if (!mv.done_key.empty() && done.count(mv.done_key)) continue;
      if (!mv.slice.empty() && slices.count(mv.slice)) continue;
      LabelledSequent cur = L;
      std::vector<std::pair<std::pair<std::string, Selection>, LabelledSequent>> chain;
      bool bad = false;
      for (const auto& [rule, sel] : mv.pre) {
        try {
          auto premises = lb_apply(system, rule, cur, sel);
          chain.push_back({{rule, sel}, cur});
          cur = premises.at(0);
        } catch (const NotApplicable&) {
          bad = true;
          break;
        }
      }
      if (bad) continue;
      std::vector<LabelledSequent> premises;
      try {
        premises = lb_apply(system, mv.rule, cur, mv.sel);
      } catch (const NotApplicable&) {
        continue;
      }
      bool looping = false;
      for (const auto& p : premises)
        if (std::find(hist.begin(), hist.end(), labelled_key(p)) != hist.end()) {
          looping = true;
          break;
        }
      if (looping) continue;
      auto done2 = done;
      if (!mv.done_key.empty()) done2.insert(mv.done_key);
      auto slices2 = slices;
      if (!mv.slice.empty()) slices2.insert(mv.slice);
      std::vector<Deriv> subs;
      bool all = true;
      for (const auto& p : premises) {
        auto sub = solve(p, hist, slices2, done2);
        if (!sub) {
          all = false;
          break;
        }
        subs.push_back(std::move(*sub));
      }
      if (all) {
        Deriv node{cur, mv.rule, mv.sel, std::move(subs)};
        found = fold_chain(chain, std::move(node));
        break;
      }
      if (meter.out) break;
      // Invertible rules are committed: a failed premise refutes the goal.
      if (mv.invertible) break;
    }
    hist.pop_back();
    return found;
  }
};

}  // namespace

// ---------------------------------------------------------------------------
// Translation of nested derivations

namespace {

std::string poskey(const Position& p) {
  std::string out = "e";
  for (int k : p.path) out += "." + std::to_string(k);
  return out;
}

int find_left_occ(const LabelledSequent& L, const std::string& x, const Formula& f) {
  LabelledFormula lf{x, f};
  auto it = std::lower_bound(L.left.begin(), L.left.end(), lf);
  if (it == L.left.end() || !(*it == lf)) throw std::invalid_argument("missing left formula");
  return static_cast<int>(it - L.left.begin());
}

int find_right_occ(const LabelledSequent& L, const std::string& x, const Formula& f) {
  LabelledFormula lf{x, f};
  auto it = std::lower_bound(L.right.begin(), L.right.end(), lf);
  if (it == L.right.end() || !(*it == lf)) throw std::invalid_argument("missing right formula");
  return static_cast<int>(it - L.right.begin());
}

int find_term_occ(const LabelledSequent& L, const RelationTerm& t) {
  auto it = std::lower_bound(L.relations.begin(), L.relations.end(), t);
  if (it == L.relations.end() || !(*it == t)) throw std::invalid_argument("missing relation term");
  return static_cast<int>(it - L.relations.begin());
}

// Builds the image judgment of u with the given position->label assignment,
// extending the assignment positionally where names are missing.
LabelledSequent image_of(const LogicSpec& logic, const NestedSequent& u,
                         std::map<std::string, std::string>& names, const std::string& pos,
                         bool top = true) {
  LabelledSequent out;
  std::function<void(const NestedSequent&, const std::string&)> walk =
      [&](const NestedSequent& v, const std::string& p) {
        if (!names.count(p)) {
          if (p == "e")
            names[p] = "x";
          else {
            size_t dot = p.rfind('.');
            names[p] = names.at(p.substr(0, dot)) + "." + p.substr(dot + 1);
          }
        }
        const std::string& x = names[p];
        for (const auto& f : v.ante) out.add_left(x, f);
        for (const auto& f : v.succ) out.add_right(x, f);
        for (size_t k = 0; k < v.children.size(); k++) {
          std::string cp = p + "." + std::to_string(k + 1);
          const Child& c = v.children[k];
          if (c.kind == Child::Plain) {
            if (!names.count(cp)) {
              std::string base = x + "." + std::to_string(k + 1);
              int bump = 0;
              while (out.label_used(base) || /* reserved */ false) {
                bump++;
                base = x + "." + std::to_string(k + 1) + "_" + std::to_string(bump);
              }
              names[cp] = base;
            }
            switch (logic.kind) {
              case LogicKind::Intuitionistic: out.add_term(RelationTerm::rel(x, names[cp])); break;
              case LogicKind::Multimodal:
                out.add_term(RelationTerm::rel_idx(c.index.value_or(1), x, names[cp]));
                break;
              default: out.add_term(RelationTerm::nbr(x, names[cp])); break;
            }
            walk(*c.body, cp);
          } else if (c.kind == Child::Marked) {
            if (!names.count(cp + ".1")) {
              names[cp + ".1"] = x + "." + std::to_string(k + 1) + ".1";
              names[cp + ".2"] = x + "." + std::to_string(k + 1) + ".2";
            }
            out.add_term(RelationTerm::nbr_pair(x, names[cp + ".1"], names[cp + ".2"]));
            for (const auto& f : c.pair_left.ante) out.add_left(names[cp + ".1"], f);
            for (const auto& f : c.pair_left.succ) out.add_right(names[cp + ".1"], f);
            for (const auto& f : c.pair_right.ante) out.add_left(names[cp + ".2"], f);
            for (const auto& f : c.pair_right.succ) out.add_right(names[cp + ".2"], f);
          }
        }
      };
  (void)top;
  walk(u, pos);
  return out;
}

struct TlTranslator {
  const LogicSpec& logic;

  Derivation<LabelledSequent> walk(const Derivation<NestedSequent>& d, const LabelledSequent& L,
                                   std::map<std::string, std::string> names) {
    const NestedSequent* node = node_at(d.conclusion, d.selection.at);
    if (!node) throw std::invalid_argument("bad position in nested derivation");
    std::string pk = poskey(d.selection.at);
    const std::string& x = names.at(pk);
    std::string rule = "tl_" + d.rule;
    Selection sel;

    auto left_f = [&] { return node->ante[d.selection.left]; };
    auto right_f = [&] { return node->succ[d.selection.right]; };

    if (d.rule == "init") {
      sel.left = find_left_occ(L, x, left_f());
      sel.right = find_right_occ(L, x, right_f());
    } else if (d.rule == "bot_l") {
      sel.left = find_left_occ(L, x, left_f());
    } else if (d.rule == "and_l" || d.rule == "or_l" || d.rule == "imp_l" ||
               d.rule.rfind("t_", 0) == 0) {
      sel.left = find_left_occ(L, x, left_f());
    } else if (d.rule == "and_r" || d.rule == "or_r") {
      sel.right = find_right_occ(L, x, right_f());
    } else if (d.rule == "imp_r") {
      sel.right = find_right_occ(L, x, right_f());
      if (logic.kind == LogicKind::Intuitionistic) {
        const NestedSequent* after = node_at(d.premises.at(0).conclusion, d.selection.at);
        int ordinal = static_cast<int>(after->children.size());
        std::string cp = pk + "." + std::to_string(ordinal);
        std::string base = x + "." + std::to_string(ordinal);
        int bump = 0;
        while (L.label_used(base)) base = x + "." + std::to_string(ordinal) + "_" + std::to_string(++bump);
        names[cp] = base;
        sel.label2 = base;
      }
    } else if (d.rule.rfind("box_r_", 0) == 0 && d.rule != "box_r_e") {
      sel.right = find_right_occ(L, x, right_f());
      const NestedSequent* after = node_at(d.premises.at(0).conclusion, d.selection.at);
      int ordinal = static_cast<int>(after->children.size());
      std::string cp = pk + "." + std::to_string(ordinal);
      std::string base = x + "." + std::to_string(ordinal);
      int bump = 0;
      while (L.label_used(base)) base = x + "." + std::to_string(ordinal) + "_" + std::to_string(++bump);
      names[cp] = base;
      sel.label2 = base;
    } else if (d.rule.rfind("d_", 0) == 0) {
      sel.left = find_left_occ(L, x, left_f());
      const NestedSequent* after = node_at(d.premises.at(0).conclusion, d.selection.at);
      int ordinal = static_cast<int>(after->children.size());
      std::string cp = pk + "." + std::to_string(ordinal);
      std::string base = x + "." + std::to_string(ordinal);
      int bump = 0;
      while (L.label_used(base)) base = x + "." + std::to_string(ordinal) + "_" + std::to_string(++bump);
      names[cp] = base;
      sel.label2 = base;
    } else if (d.rule == "lift" || d.rule.rfind("box_l_", 0) == 0 ||
               d.rule.rfind("four_", 0) == 0) {
      if (d.rule == "box_l_e") {
        sel.left = find_left_occ(L, x, left_f());
        std::string cp = pk + "." + std::to_string(d.selection.child + 1);
        sel.rel = find_term_occ(
            L, RelationTerm::nbr_pair(x, names.at(cp + ".1"), names.at(cp + ".2")));
        auto premises = image_apply(logic, rule, L, sel);
        std::vector<Derivation<LabelledSequent>> subs;
        for (size_t b = 0; b < premises.size(); b++) {
          auto names_b = names;
          names_b[cp] = names.at(cp + (b == 0 ? ".1" : ".2"));
          subs.push_back(walk(d.premises[b], premises[b], names_b));
        }
        return {L, rule, sel, std::move(subs)};
      }
      sel.left = find_left_occ(L, x, left_f());
      sel.label2 = names.at(pk + "." + std::to_string(d.selection.child + 1));
    } else if (d.rule == "box_r_e") {
      sel.right = find_right_occ(L, x, right_f());
      const NestedSequent* after = node_at(d.premises.at(0).conclusion, d.selection.at);
      int ordinal = static_cast<int>(after->children.size());
      std::string cp = pk + "." + std::to_string(ordinal);
      std::string base = x + "." + std::to_string(ordinal);
      int bump = 0;
      while (L.label_used(base + ".1") || L.label_used(base + ".2"))
        base = x + "." + std::to_string(ordinal) + "_" + std::to_string(++bump);
      names[cp + ".1"] = base + ".1";
      names[cp + ".2"] = base + ".2";
      sel.label2 = base + ".1";
      sel.label3 = base + ".2";
    } else if (d.rule == "m") {
      std::string cp = pk + "." + std::to_string(d.selection.child + 1);
      sel.rel = find_term_occ(
          L, RelationTerm::nbr_pair(x, names.at(cp + ".1"), names.at(cp + ".2")));
    } else {
      throw std::invalid_argument("untranslatable nested rule " + d.rule);
    }

    auto premises = image_apply(logic, rule, L, sel);
    if (premises.size() != d.premises.size())
      throw std::invalid_argument("image premise count mismatch for " + d.rule);
    std::vector<Derivation<LabelledSequent>> subs;
    for (size_t i = 0; i < premises.size(); i++)
      subs.push_back(walk(d.premises[i], premises[i], names));
    return {L, rule, sel, std::move(subs)};
  }
};

}  // namespace

Derivation<LabelledSequent> tl_translate(const LogicSpec& logic,
                                         const Derivation<NestedSequent>& d) {
  std::map<std::string, std::string> names;
  LabelledSequent root = image_of(logic, d.conclusion, names, "e");
  TlTranslator tr{logic};
  return tr.walk(d, root, std::move(names));
}

// ---------------------------------------------------------------------------
// Proof search and checking

SearchResult<LabelledSequent> lb_prove(const LbSystem& system, const LabelledSequent& goal,
                                       Budget budget) {
  SearchResult<LabelledSequent> out;
  if (system.kind == LbSystem::Image) {
    // The translation is a 1-1 correspondence, so the nested engine searches
    // the image system faithfully.
    TreeReading reading = read_tree(system.logic, goal.contracted());
    auto ns = ns_prove(system.logic, reading.nested, budget);
    out.status = ns.status;
    out.nodes_used = ns.nodes_used;
    if (ns.derivation) {
      std::map<std::string, std::string> names = reading.label_of_position;
      LabelledSequent root = image_of(system.logic, ns.derivation->conclusion, names, "e");
      TlTranslator tr{system.logic};
      out.derivation = tr.walk(*ns.derivation, root, std::move(names));
    }
    return out;
  }
  GtProver prover(system.logic, budget);
  std::vector<std::string> hist;
  auto d = prover.solve(goal.contracted(), hist, {}, {});
  out.nodes_used = prover.meter.used;
  if (d) {
    out.status = SearchStatus::Proved;
    out.derivation = std::move(d);
  } else {
    out.status = prover.meter.out ? SearchStatus::Exhausted : SearchStatus::Refuted;
  }
  return out;
}

namespace {

CheckResult lb_check_node(const LbSystem& system, const Derivation<LabelledSequent>& d,
                          std::vector<int>& path) {
  std::vector<LabelledSequent> premises;
  try {
    premises = lb_apply(system, d.rule, d.conclusion, d.selection);
  } catch (const NotApplicable& e) {
    return {false, std::string("rule not applicable: ") + e.what(), path};
  }
  if (premises.size() != d.premises.size())
    return {false, "premise count mismatch for rule " + d.rule, path};
  for (size_t i = 0; i < premises.size(); i++) {
    if (!(premises[i] == d.premises[i].conclusion))
      return {false,
              "premise " + std::to_string(i) + " of " + d.rule + " differs from the rule schema",
              path};
    path.push_back(static_cast<int>(i));
    auto sub = lb_check_node(system, d.premises[i], path);
    if (!sub.ok) return sub;
    path.pop_back();
  }
  return {};
}

}  // namespace

CheckResult lb_check(const LbSystem& system, const Derivation<LabelledSequent>& d) {
  std::vector<int> path;
  return lb_check_node(system, d, path);
}

// ---------------------------------------------------------------------------
// Expanding image derivations into the semantic systems

namespace {

// Rewrites an image proof into GtI/Gtmm/GtE/GtM by structural recursion.
// Lifted copies are never materialized: an alias map sends each copied
// occurrence to its home label, and uses of a copy become relational steps
// (Ref/Trans/Int/Ser) from the home label, exactly the restriction strategy.
struct ImageExpander {
  const LogicSpec& logic;
  LbSystem target;

  using LbDeriv = Derivation<LabelledSequent>;
  using Alias = std::map<std::string, std::string>;  // label|formula -> home label
  struct PendingPair {
    Formula boxed;  // the box that created the pair
    bool monotonised = false;
  };
  using Pending = std::map<std::string, PendingPair>;  // pair term key

  explicit ImageExpander(const LogicSpec& l) : logic(l), target(LbSystem::gt(l)) {}

  static std::string akey(const std::string& label, const Formula& f) {
    return label + "|" + render_formula(f);
  }
  static std::string home(const Alias& alias, const std::string& label, const Formula& f) {
    auto it = alias.find(akey(label, f));
    return it == alias.end() ? label : it->second;
  }

  LbDeriv emit(const LabelledSequent& cur, const std::string& rule, const Selection& sel,
               std::vector<LbDeriv> subs) const {
    return LbDeriv{cur, rule, sel, std::move(subs)};
  }

  // One unary step; returns the premise.
  LabelledSequent step(std::vector<std::pair<std::pair<std::string, Selection>, LabelledSequent>>& chain,
                       LabelledSequent cur, const std::string& rule, const Selection& sel) const {
    auto premises = lb_apply(target, rule, cur, sel);
    chain.push_back({{rule, sel}, cur});
    return premises.at(0);
  }

  LbDeriv fold(std::vector<std::pair<std::pair<std::string, Selection>, LabelledSequent>>& chain,
               LbDeriv tail) const {
    LbDeriv out = std::move(tail);
    for (auto it = chain.rbegin(); it != chain.rend(); ++it)
      out = LbDeriv{it->second, it->first.first, it->first.second, {std::move(out)}};
    return out;
  }

  // The principal of an image node, resolved in the image judgment.
  LabelledFormula image_left(const LbDeriv& d) const {
    return d.conclusion.left.at(static_cast<size_t>(d.selection.left));
  }
  LabelledFormula image_right(const LbDeriv& d) const {
    return d.conclusion.right.at(static_cast<size_t>(d.selection.right));
  }

  LbDeriv walk(const LbDeriv& d, LabelledSequent cur, Alias alias, Pending pending) const {
    const std::string& r = d.rule;
    std::vector<std::pair<std::pair<std::string, Selection>, LabelledSequent>> chain;

    auto relational_steps = [&](const std::string& from, const std::string& to,
                                int index) -> Steps {
      if (logic.kind == LogicKind::Intuitionistic) {
        auto s = leq_steps(cur, from, to);
        if (!s) throw std::invalid_argument("no preorder path " + from + " -> " + to);
        return *s;
      }
      auto s = ridx_steps(cur, logic.desc, index, from, to);
      if (!s)
        throw std::invalid_argument("no R" + std::to_string(index) + " path " + from + " -> " + to);
      return *s;
    };

    if (r == "tl_bot_l") {
      auto lf = image_left(d);
      std::string h = home(alias, lf.label, lf.formula);
      Selection sel;
      sel.left = find_left_occ(cur, h, lf.formula);
      return fold(chain, emit(cur, "bot_l", sel, {}));
    }
    if (r == "tl_init") {
      auto lf = image_left(d);
      std::string h = home(alias, lf.label, lf.formula);
      if (logic.kind == LogicKind::Intuitionistic) {
        for (const auto& [rule, sel] : relational_steps(h, lf.label, 0))
          cur = step(chain, cur, rule, sel);
        Selection sel;
        sel.left = find_left_occ(cur, h, lf.formula);
        sel.right = find_right_occ(cur, lf.label, lf.formula);
        return fold(chain, emit(cur, "init_t", sel, {}));
      }
      Selection sel;
      sel.left = find_left_occ(cur, h, lf.formula);
      sel.right = find_right_occ(cur, lf.label, lf.formula);
      if (h != lf.label) throw std::invalid_argument("classical init on a lifted copy");
      return fold(chain, emit(cur, "init", sel, {}));
    }
    if (r == "tl_and_l" || r == "tl_or_l") {
      auto lf = image_left(d);
      std::string h = home(alias, lf.label, lf.formula);
      Selection sel;
      sel.left = find_left_occ(cur, h, lf.formula);
      auto premises = lb_apply(target, r == "tl_and_l" ? "and_l" : "or_l", cur, sel);
      std::vector<LbDeriv> subs;
      for (size_t b = 0; b < premises.size(); b++) {
        Alias alias_b = alias;
        if (h != lf.label) {
          if (r == "tl_and_l") {
            alias_b[akey(lf.label, lf.formula.left())] = h;
            alias_b[akey(lf.label, lf.formula.right())] = h;
          } else {
            alias_b[akey(lf.label, b == 0 ? lf.formula.left() : lf.formula.right())] = h;
          }
        }
        subs.push_back(walk(d.premises[b], premises[b], alias_b, pending));
      }
      return fold(chain, emit(cur, r == "tl_and_l" ? "and_l" : "or_l", sel, std::move(subs)));
    }
    if (r == "tl_and_r" || r == "tl_or_r") {
      auto rf = image_right(d);
      Selection sel;
      sel.right = find_right_occ(cur, rf.label, rf.formula);
      std::string rule = r == "tl_and_r" ? "and_r" : "or_r";
      auto premises = lb_apply(target, rule, cur, sel);
      std::vector<LbDeriv> subs;
      for (size_t b = 0; b < premises.size(); b++)
        subs.push_back(walk(d.premises[b], premises[b], alias, pending));
      return fold(chain, emit(cur, rule, sel, std::move(subs)));
    }
    if (r == "tl_imp_l") {
      auto lf = image_left(d);
      std::string h = home(alias, lf.label, lf.formula);
      if (logic.kind == LogicKind::Intuitionistic) {
        for (const auto& [rule, sel] : relational_steps(h, lf.label, 0))
          cur = step(chain, cur, rule, sel);
        Selection sel;
        sel.left = find_left_occ(cur, h, lf.formula);
        sel.label2 = lf.label;
        auto premises = lb_apply(target, "imp_l_t", cur, sel);
        std::vector<LbDeriv> subs;
        for (size_t b = 0; b < premises.size(); b++)
          subs.push_back(walk(d.premises[b], premises[b], alias, pending));
        return fold(chain, emit(cur, "imp_l_t", sel, std::move(subs)));
      }
      Selection sel;
      sel.left = find_left_occ(cur, h, lf.formula);
      if (h != lf.label) throw std::invalid_argument("classical imp_l on a lifted copy");
      auto premises = lb_apply(target, "imp_l", cur, sel);
      std::vector<LbDeriv> subs;
      for (size_t b = 0; b < premises.size(); b++)
        subs.push_back(walk(d.premises[b], premises[b], alias, pending));
      return fold(chain, emit(cur, "imp_l", sel, std::move(subs)));
    }
    if (r == "tl_imp_r") {
      auto rf = image_right(d);
      Selection sel;
      sel.right = find_right_occ(cur, rf.label, rf.formula);
      std::string rule;
      if (logic.kind == LogicKind::Intuitionistic) {
        rule = "imp_r_t";
        sel.label2 = d.selection.label2;  // the image's fresh label
      } else {
        rule = "imp_r";
      }
      auto premises = lb_apply(target, rule, cur, sel);
      return fold(chain,
                  emit(cur, rule, sel, {walk(d.premises.at(0), premises.at(0), alias, pending)}));
    }
    if (r == "tl_lift") {
      auto lf = image_left(d);
      alias[akey(d.selection.label2, lf.formula)] = home(alias, lf.label, lf.formula);
      return walk(d.premises.at(0), cur, alias, pending);
    }
    if (r.rfind("tl_four_", 0) == 0) {
      auto lf = image_left(d);
      alias[akey(d.selection.label2, lf.formula)] = home(alias, lf.label, lf.formula);
      return walk(d.premises.at(0), cur, alias, pending);
    }
    if (r.rfind("tl_t_", 0) == 0) {
      int i = std::stoi(r.substr(5));
      auto lf = image_left(d);
      std::string h = home(alias, lf.label, lf.formula);
      for (const auto& [rule, sel] : relational_steps(h, lf.label, i))
        cur = step(chain, cur, rule, sel);
      Selection sel;
      sel.left = find_left_occ(cur, h, lf.formula);
      sel.label2 = lf.label;
      std::string rule = "box_l_" + std::to_string(i);
      auto premises = lb_apply(target, rule, cur, sel);
      return fold(chain,
                  emit(cur, rule, sel, {walk(d.premises.at(0), premises.at(0), alias, pending)}));
    }
    if (r.rfind("tl_box_l_", 0) == 0 && r != "tl_box_l_e") {
      std::string suffix = r.substr(9);
      int i = std::stoi(suffix.substr(0, suffix.find('_')));
      auto lf = image_left(d);
      std::string h = home(alias, lf.label, lf.formula);
      std::string y = d.selection.label2;
      for (const auto& [rule, sel] : relational_steps(h, y, i)) cur = step(chain, cur, rule, sel);
      Selection sel;
      sel.left = find_left_occ(cur, h, lf.formula);
      sel.label2 = y;
      std::string rule = "box_l_" + std::to_string(i);
      auto premises = lb_apply(target, rule, cur, sel);
      return fold(chain,
                  emit(cur, rule, sel, {walk(d.premises.at(0), premises.at(0), alias, pending)}));
    }
    if (r.rfind("tl_box_r_", 0) == 0 && r != "tl_box_r_e") {
      int i = std::stoi(r.substr(9));
      auto rf = image_right(d);
      Selection sel;
      sel.right = find_right_occ(cur, rf.label, rf.formula);
      sel.label2 = d.selection.label2;
      std::string rule = "box_r_" + std::to_string(i);
      auto premises = lb_apply(target, rule, cur, sel);
      return fold(chain,
                  emit(cur, rule, sel, {walk(d.premises.at(0), premises.at(0), alias, pending)}));
    }
    if (r.rfind("tl_d_", 0) == 0) {
      std::string suffix = r.substr(5);
      size_t us = suffix.find('_');
      int i = std::stoi(suffix.substr(0, us));
      int j = std::stoi(suffix.substr(us + 1));
      auto lf = image_left(d);
      std::string h = home(alias, lf.label, lf.formula);
      std::string y = d.selection.label2;
      {
        Selection sel;
        sel.label = lf.label;
        sel.label2 = y;
        cur = step(chain, cur, "ser_" + std::to_string(j), sel);
      }
      for (const auto& [rule, sel] : relational_steps(h, y, i)) cur = step(chain, cur, rule, sel);
      Selection sel;
      sel.left = find_left_occ(cur, h, lf.formula);
      sel.label2 = y;
      std::string rule = "box_l_" + std::to_string(i);
      auto premises = lb_apply(target, rule, cur, sel);
      return fold(chain,
                  emit(cur, rule, sel, {walk(d.premises.at(0), premises.at(0), alias, pending)}));
    }
    if (r == "tl_box_r_e") {
      auto rf = image_right(d);
      const RelationTerm& pair =
          d.premises.at(0).conclusion.relations.at(static_cast<size_t>([&] {
            // locate the pair created by this step
            for (size_t k = 0; k < d.premises.at(0).conclusion.relations.size(); k++) {
              const auto& t = d.premises.at(0).conclusion.relations[k];
              if (t.kind == RelKind::NbrPair && t.b == d.selection.label2) return k;
            }
            throw std::invalid_argument("created pair not found");
          }()));
      pending[pair.to_string()] = {rf.formula, false};
      return walk(d.premises.at(0), cur, alias, pending);
    }
    if (r == "tl_m") {
      const auto& t = d.conclusion.relations.at(static_cast<size_t>(d.selection.rel));
      auto it = pending.find(t.to_string());
      if (it == pending.end()) throw std::invalid_argument("monotonisation of an unknown pair");
      it->second.monotonised = true;
      return walk(d.premises.at(0), cur, alias, pending);
    }
    if (r == "tl_box_l_e") {
      auto lf = image_left(d);
      const auto t = d.conclusion.relations.at(static_cast<size_t>(d.selection.rel));
      auto it = pending.find(t.to_string());
      if (it == pending.end()) throw std::invalid_argument("consuming an unknown pair");
      PendingPair pp = it->second;
      pending.erase(it);
      const bool monotone = logic.kind == LogicKind::NonNormalM;
      const Formula body_a = lf.formula.body();
      const Formula body_b = pp.boxed.body();
      // Unpack the antecedent box into a fresh neighbourhood.
      std::string a = fresh_nbr(cur);
      {
        Selection sel;
        sel.left = find_left_occ(cur, lf.label, lf.formula);
        sel.label2 = a;
        cur = step(chain, cur, monotone ? "box_l_m" : "box_l_e", sel);
      }
      // Verify the created neighbourhood against the boxed succedent formula.
      Selection bsel;
      bsel.right = find_right_occ(cur, lf.label, pp.boxed);
      bsel.rel = find_term_occ(cur, RelationTerm::nbr_of(a, lf.label));
      bsel.label3 = t.b;  // the pair's worlds keep their names
      if (!monotone) bsel.label4 = t.c;
      std::string brule = monotone ? "box_r_m" : "box_r_e";
      auto premises = lb_apply(target, brule, cur, bsel);

      // Branch one: the fresh member of the neighbourhood forces the body.
      auto expand_forces = [&](const LabelledSequent& p,
                               const LbDeriv& image_premise) -> LbDeriv {
        Selection fsel;
        fsel.rel = find_term_occ(p, RelationTerm::forces_all(a, body_a));
        fsel.label2 = t.b;
        auto fprem = lb_apply(target, "forces_all", p, fsel);
        return LbDeriv{p, "forces_all", fsel,
                       {walk(image_premise, fprem.at(0), alias, pending)}};
      };

      if (monotone) {
        // The second image branch closes by bottom; it has no counterpart.
        const LbDeriv& discarded = d.premises.at(1);
        if (discarded.rule != "tl_bot_l" || !discarded.premises.empty())
          throw std::invalid_argument("the monotone branch must close by bottom");
        LbDeriv sub = expand_forces(premises.at(0), d.premises.at(0));
        return fold(chain, emit(cur, brule, bsel, {std::move(sub)}));
      }

      LbDeriv sub1 = expand_forces(premises.at(0), d.premises.at(0));
      // Branch two: the covering conjunct sends the fresh world into a.
      const LabelledSequent& p2 = premises.at(1);
      Selection csel;
      csel.rel = find_term_occ(p2, RelationTerm::covers(body_a, a));
      csel.label3 = t.c;
      auto cprem = lb_apply(target, "covers", p2, csel);
      LbDeriv cover_a = walk(d.premises.at(1), cprem.at(0), alias, pending);
      Selection msel;
      msel.rel = find_term_occ(cprem.at(1), RelationTerm::in_set(t.c, a));
      {
        const auto& atoms = cprem.at(1).right_atoms;
        auto itr = std::lower_bound(atoms.begin(), atoms.end(), RelationTerm::in_set(t.c, a));
        if (itr == atoms.end() || !(*itr == RelationTerm::in_set(t.c, a)))
          throw std::invalid_argument("membership atom missing on the right");
        msel.right = static_cast<int>(itr - atoms.begin());
      }
      LbDeriv cover_b{cprem.at(1), "init_mem", msel, {}};
      LbDeriv cover{p2, "covers", csel, {std::move(cover_a), std::move(cover_b)}};
      (void)body_b;
      return fold(chain, emit(cur, brule, bsel, {std::move(sub1), std::move(cover)}));
    }

    throw std::invalid_argument("image rule " + r + " has no expansion");
  }
};

LabelledSequent map_image_root(const LogicSpec& logic, const LabelledSequent& root) {
  LabelledSequent out;
  for (const auto& t : root.relations) {
    switch (t.kind) {
      case RelKind::Rel:
        if (logic.kind != LogicKind::Intuitionistic)
          throw std::invalid_argument("unindexed edge outside the intuitionistic image");
        out.add_term(RelationTerm::leq(t.a, t.b));
        break;
      case RelKind::RelIdx:
        out.add_term(t);
        break;
      default:
        throw std::invalid_argument(
            "expansion starts from relational endpoints; consume pairs first");
    }
  }
  for (const auto& f : root.left) out.add_left(f.label, f.formula);
  for (const auto& f : root.right) out.add_right(f.label, f.formula);
  if (!root.right_atoms.empty()) throw std::invalid_argument("unexpected membership atoms");
  return out;
}

}  // namespace

Derivation<LabelledSequent> lbns_to_labelled(const LogicSpec& logic,
                                             const Derivation<LabelledSequent>& d) {
  auto check = lb_check(LbSystem::image(logic), d);
  if (!check.ok)
    throw std::invalid_argument("input is not a valid image derivation: " + check.message);
  ImageExpander ex(logic);
  return ex.walk(d, map_image_root(logic, d.conclusion), {}, {});
}

Derivation<LabelledSequent> labelled_to_lbns(const LogicSpec& logic,
                                             const Derivation<LabelledSequent>& d,
                                             Budget budget) {
  auto check = lb_check(LbSystem::gt(logic), d);
  if (!check.ok)
    throw std::invalid_argument("input is not a valid labelled derivation: " + check.message);
  // Restrict: the endpoint is tree-readable, and the image engine re-derives
  // it; by the equivalence theorems this succeeds on endpoints the semantic
  // search proved.
  LabelledSequent root = d.conclusion.contracted();
  // The Gt systems carry <= where the image carries R.
  LabelledSequent image_root;
  for (const auto& t : root.relations) {
    if (t.kind == RelKind::Leq)
      image_root.add_term(RelationTerm::rel(t.a, t.b));
    else
      image_root.add_term(t);
  }
  for (const auto& f : root.left) image_root.add_left(f.label, f.formula);
  for (const auto& f : root.right) image_root.add_right(f.label, f.formula);
  auto r = lb_prove(LbSystem::image(logic), image_root, budget);
  if (!r.proved())
    throw std::invalid_argument("the image engine could not rebuild a proof of the endpoint");
  return *r.derivation;
}

}  // namespace nsq

