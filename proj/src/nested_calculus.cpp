#include "nsq/nested_calculus.hpp"

#include <algorithm>

namespace nsq {

RuleTable ns_rule_table(const LogicSpec& logic) {
  RuleTable t;
  t.calculus = "ns";
  const bool mlj = logic.kind == LogicKind::Intuitionistic;
  t.rules.push_back({"imp_l", Phase::Local, 2});
  t.rules.push_back({"imp_r", mlj ? Phase::Nesting : Phase::Local, 1});
  t.rules.push_back({"and_l", Phase::Local, 1});
  t.rules.push_back({"and_r", Phase::Local, 2});
  t.rules.push_back({"or_l", Phase::Local, 2});
  t.rules.push_back({"or_r", Phase::Local, 1});
  t.rules.push_back({"bot_l", Phase::AxiomRule, 0});
  t.rules.push_back({"init", Phase::AxiomRule, 0});
  switch (logic.kind) {
    case LogicKind::Intuitionistic:
      t.rules.push_back({"lift", Phase::Lift, 1, true});
      break;
    case LogicKind::Multimodal: {
      const Description& d = logic.desc;
      for (int i : d.indices) t.rules.push_back({"box_r_" + std::to_string(i), Phase::Nesting, 1});
      for (int i : d.indices)
        if (d.has_t(i)) t.rules.push_back({"t_" + std::to_string(i), Phase::Local, 1});
      for (int j : d.indices)
        for (int i : d.indices) {
          if (!d.leq(j, i)) continue;
          std::string suffix = std::to_string(i) + "_" + std::to_string(j);
          t.rules.push_back({"box_l_" + suffix, Phase::Lift, 1, true});
          if (d.has_d(j)) t.rules.push_back({"d_" + suffix, Phase::Nesting, 1});
          if (d.has_4(i)) t.rules.push_back({"four_" + suffix, Phase::Lift, 1, true});
        }
      break;
    }
    case LogicKind::NonNormalE:
      t.rules.push_back({"box_r_e", Phase::Nesting, 1});
      t.rules.push_back({"box_l_e", Phase::Lift, 2, true});
      break;
    case LogicKind::NonNormalM:
      t.rules.push_back({"box_r_e", Phase::Nesting, 1});
      t.rules.push_back({"box_l_e", Phase::Lift, 2, true});
      t.rules.push_back({"m", Phase::MarkedLocal, 1});
      break;
  }
  return t;
}

std::optional<std::string> ns_axiom_rejection(const std::string& axiom) {
  if (axiom == "5" || axiom == "b")
    return "the nested rule for " + axiom +
           " moves auxiliary formulas upward in the nesting tree: not n-directed";
  if (axiom == "D" || axiom == "T" || axiom == "4") return std::nullopt;
  return "unknown axiom '" + axiom + "'";
}

void validate_nested_goal(const LogicSpec& logic, const NestedSequent& u) {
  auto check_side = [&](const FormulaSet& side) {
    for (const auto& f : side)
      if (auto bad = find_unknown_index(logic, f))
        throw std::invalid_argument("box index " + std::to_string(*bad) + " not in the logic");
  };
  check_side(u.ante);
  check_side(u.succ);
  for (const auto& c : u.children) {
    switch (c.kind) {
      case Child::Plain:
        if (logic.kind == LogicKind::Multimodal) {
          if (!c.index) throw std::invalid_argument("multimodal nestings must carry an index");
          if (!logic.desc.has_index(*c.index))
            throw std::invalid_argument("nesting index " + std::to_string(*c.index) +
                                        " not in the logic");
        } else if (c.index) {
          throw std::invalid_argument("indexed nesting outside the multimodal system");
        }
        validate_nested_goal(logic, *c.body);
        break;
      case Child::Marked:
        if (logic.kind != LogicKind::NonNormalE && logic.kind != LogicKind::NonNormalM)
          throw std::invalid_argument("marked nestings exist only for E and M");
        check_side(c.pair_left.ante);
        check_side(c.pair_left.succ);
        check_side(c.pair_right.ante);
        check_side(c.pair_right.succ);
        break;
      case Child::Hole:
        throw std::invalid_argument("holed context used as a goal");
    }
  }
}

// ---------------------------------------------------------------------------
// Rule application

namespace {

FormulaSet contracted(FormulaSet s) {
  ms_sort(s);
  return ms_dedup(s);
}

Formula at_occ(const FormulaSet& side, int idx, const char* what) {
  if (idx < 0 || idx >= static_cast<int>(side.size()))
    throw NotApplicable(std::string("no such ") + what + " occurrence");
  return side[idx];
}

NestedSequent with_top(const NestedSequent& u, FormulaSet ante, FormulaSet succ) {
  NestedSequent out = u;
  out.ante = contracted(std::move(ante));
  out.succ = contracted(std::move(succ));
  return out;
}

const Child& child_at(const NestedSequent& u, int k) {
  if (k < 0 || k >= static_cast<int>(u.children.size()))
    throw NotApplicable("no such child");
  return u.children[k];
}

NestedSequent add_to_child_ante(const NestedSequent& u, int k, const Formula& f) {
  const Child& c = child_at(u, k);
  if (c.kind != Child::Plain) throw NotApplicable("child is not a plain nesting");
  NestedSequent body = *c.body;
  ms_insert(body.ante, f);
  body.ante = contracted(std::move(body.ante));
  NestedSequent out = u;
  out.children[k] = Child::plain(std::move(body), c.index);
  return out;
}

// Applies a rule at the root of `u`; the caller handles the addressed node.
std::vector<NestedSequent> apply_at_root(const LogicSpec& logic, const std::string& rule,
                                         const NestedSequent& u, const Selection& sel) {
  const bool mlj = logic.kind == LogicKind::Intuitionistic;
  auto remove_l = [&](const Formula& f) {
    FormulaSet a = u.ante;
    if (!ms_erase_one(a, f)) throw NotApplicable("principal not in antecedent");
    return a;
  };
  auto remove_r = [&](const Formula& f) {
    FormulaSet s = u.succ;
    if (!ms_erase_one(s, f)) throw NotApplicable("principal not in succedent");
    return s;
  };

  if (rule == "bot_l") {
    Formula f = at_occ(u.ante, sel.left, "antecedent");
    if (!f.is_bottom()) throw NotApplicable("bot_l needs bottom");
    return {};
  }
  if (rule == "init") {
    Formula l = at_occ(u.ante, sel.left, "antecedent");
    Formula r = at_occ(u.succ, sel.right, "succedent");
    if (!l.is_atom() || l != r) throw NotApplicable("init needs a shared atom");
    return {};
  }
  if (rule == "and_l") {
    Formula f = at_occ(u.ante, sel.left, "antecedent");
    if (f.tag() != Conn::And) throw NotApplicable("and_l needs a conjunction");
    FormulaSet a = remove_l(f);
    a.push_back(f.left());
    a.push_back(f.right());
    return {with_top(u, std::move(a), u.succ)};
  }
  if (rule == "and_r") {
    Formula f = at_occ(u.succ, sel.right, "succedent");
    if (f.tag() != Conn::And) throw NotApplicable("and_r needs a conjunction");
    FormulaSet s1 = remove_r(f), s2 = s1;
    s1.push_back(f.left());
    s2.push_back(f.right());
    return {with_top(u, u.ante, std::move(s1)), with_top(u, u.ante, std::move(s2))};
  }
  if (rule == "or_l") {
    Formula f = at_occ(u.ante, sel.left, "antecedent");
    if (f.tag() != Conn::Or) throw NotApplicable("or_l needs a disjunction");
    FormulaSet a1 = remove_l(f), a2 = a1;
    a1.push_back(f.left());
    a2.push_back(f.right());
    return {with_top(u, std::move(a1), u.succ), with_top(u, std::move(a2), u.succ)};
  }
  if (rule == "or_r") {
    Formula f = at_occ(u.succ, sel.right, "succedent");
    if (f.tag() != Conn::Or) throw NotApplicable("or_r needs a disjunction");
    FormulaSet s = remove_r(f);
    s.push_back(f.left());
    s.push_back(f.right());
    return {with_top(u, u.ante, std::move(s))};
  }
  if (rule == "imp_l") {
    Formula f = at_occ(u.ante, sel.left, "antecedent");
    if (f.tag() != Conn::Imp) throw NotApplicable("imp_l needs an implication");
    FormulaSet s1 = u.succ;
    s1.push_back(f.left());
    FormulaSet a2 = remove_l(f);
    a2.push_back(f.right());
    return {with_top(u, u.ante, std::move(s1)), with_top(u, std::move(a2), u.succ)};
  }
  if (rule == "imp_r") {
    Formula f = at_occ(u.succ, sel.right, "succedent");
    if (f.tag() != Conn::Imp) throw NotApplicable("imp_r needs an implication");
    if (mlj) {
      // Nesting rule: the succedent context stays, a nesting [A |- B] opens.
      NestedSequent out = u;
      out.succ = contracted(remove_r(f));
      out.children.push_back(Child::plain(nested_of(Sequent{{f.left()}, {f.right()}})));
      return {out};
    }
    FormulaSet a = u.ante;
    a.push_back(f.left());
    FormulaSet s = remove_r(f);
    s.push_back(f.right());
    return {with_top(u, std::move(a), std::move(s))};
  }
  if (rule == "lift") {
    if (!mlj) throw NotApplicable("lift belongs to the intuitionistic system");
    Formula f = at_occ(u.ante, sel.left, "antecedent");
    return {add_to_child_ante(u, sel.child, f)};
  }

  if (logic.kind == LogicKind::Multimodal) {
    const Description& d = logic.desc;
    if (rule.rfind("box_r_", 0) == 0) {
      int i = std::stoi(rule.substr(6));
      Formula f = at_occ(u.succ, sel.right, "succedent");
      if (!f.is_box() || f.box_index() != i) throw NotApplicable("box_r_i needs a matching box");
      NestedSequent out = u;
      out.succ = contracted(remove_r(f));
      out.children.push_back(Child::plain(nested_of(Sequent{{}, {f.body()}}), i));
      return {out};
    }
    auto two_indices = [&](size_t prefix) {
      std::string suffix = rule.substr(prefix);
      size_t us = suffix.find('_');
      if (us == std::string::npos) throw NotApplicable("malformed rule name");
      return std::pair<int, int>{std::stoi(suffix.substr(0, us)), std::stoi(suffix.substr(us + 1))};
    };
    if (rule.rfind("box_l_", 0) == 0) {
      auto [i, j] = two_indices(6);
      Formula f = at_occ(u.ante, sel.left, "antecedent");
      if (!f.is_box() || f.box_index() != i) throw NotApplicable("box_l_ij needs a matching box");
      const Child& c = child_at(u, sel.child);
      if (c.kind != Child::Plain || !c.index || *c.index != j || !d.leq(j, i))
        throw NotApplicable("box_l_ij needs a j-nesting below i");
      return {add_to_child_ante(u, sel.child, f.body())};
    }
    if (rule.rfind("four_", 0) == 0) {
      auto [i, j] = two_indices(5);
      if (!d.has_4(i)) throw NotApplicable("four_ij needs the transitivity axiom at i");
      Formula f = at_occ(u.ante, sel.left, "antecedent");
      if (!f.is_box() || f.box_index() != i) throw NotApplicable("four_ij needs a matching box");
      const Child& c = child_at(u, sel.child);
      if (c.kind != Child::Plain || !c.index || *c.index != j || !d.leq(j, i))
        throw NotApplicable("four_ij needs a j-nesting below i");
      return {add_to_child_ante(u, sel.child, f)};
    }
    if (rule.rfind("d_", 0) == 0) {
      auto [i, j] = two_indices(2);
      if (!d.has_d(j)) throw NotApplicable("d_ij needs the seriality axiom at j");
      if (!d.leq(j, i)) throw NotApplicable("d_ij needs j below i");
      Formula f = at_occ(u.ante, sel.left, "antecedent");
      if (!f.is_box() || f.box_index() != i) throw NotApplicable("d_ij needs a matching box");
      NestedSequent out = u;
      out.children.push_back(Child::plain(nested_of(Sequent{{f.body()}, {}}), j));
      return {out};
    }
    if (rule.rfind("t_", 0) == 0) {
      int i = std::stoi(rule.substr(2));
      if (!d.has_t(i)) throw NotApplicable("t_i needs the reflexivity axiom at i");
      Formula f = at_occ(u.ante, sel.left, "antecedent");
      if (!f.is_box() || f.box_index() != i) throw NotApplicable("t_i needs a matching box");
      FormulaSet a = u.ante;
      a.push_back(f.body());
      return {with_top(u, std::move(a), u.succ)};
    }
  }

  if (logic.kind == LogicKind::NonNormalE || logic.kind == LogicKind::NonNormalM) {
    if (rule == "box_r_e") {
      Formula f = at_occ(u.succ, sel.right, "succedent");
      if (!f.is_box()) throw NotApplicable("box_r_e needs a box");
      NestedSequent out = u;
      out.succ = contracted(remove_r(f));
      out.children.push_back(
          Child::marked(Sequent{{}, {f.body()}}, Sequent{{f.body()}, {}}));
      return {out};
    }
    if (rule == "m") {
      if (logic.kind != LogicKind::NonNormalM) throw NotApplicable("m belongs to the monotone system");
      const Child& c = child_at(u, sel.child);
      if (c.kind != Child::Marked) throw NotApplicable("m needs a marked nesting");
      NestedSequent out = u;
      Sequent right = c.pair_right;
      ms_insert_new(right.ante, Formula::bottom());
      out.children[sel.child] = Child::marked(c.pair_left, std::move(right));
      return {out};
    }
    if (rule == "box_l_e") {
      Formula f = at_occ(u.ante, sel.left, "antecedent");
      if (!f.is_box()) throw NotApplicable("box_l_e needs a box");
      const Child& c = child_at(u, sel.child);
      if (c.kind != Child::Marked) throw NotApplicable("box_l_e needs a marked nesting");
      NestedSequent left_body = nested_of(c.pair_left);
      ms_insert_new(left_body.ante, f.body());
      NestedSequent right_body = nested_of(c.pair_right);
      ms_insert_new(right_body.succ, f.body());
      NestedSequent p1 = u, p2 = u;
      p1.children[sel.child] = Child::plain(std::move(left_body));
      p2.children[sel.child] = Child::plain(std::move(right_body));
      return {p1, p2};
    }
  }

  throw NotApplicable("rule '" + rule + "' not in the " + logic.id() + " nested table");
}

}  // namespace

std::vector<NestedSequent> ns_apply(const LogicSpec& logic, const std::string& rule,
                                    const NestedSequent& goal, const Selection& sel) {
  const NestedSequent* node = node_at(goal, sel.at);
  if (!node) throw NotApplicable("no node at position " + sel.at.to_string());
  auto premises = apply_at_root(logic, rule, *node, sel);
  if (sel.at.is_root()) return premises;
  std::vector<NestedSequent> out;
  out.reserve(premises.size());
  for (auto& p : premises) out.push_back(replace_node(goal, sel.at, std::move(p)));
  return out;
}

// ---------------------------------------------------------------------------
// Proof search

namespace {

struct NsProver {
  const LogicSpec& logic;
  BudgetMeter meter;

  NsProver(const LogicSpec& l, Budget b) : logic(l), meter(b.nodes) {}

  using Deriv = Derivation<NestedSequent>;

  // Rebases a subtree derivation into the parent judgment at child ordinal k.
  static Deriv rebase(Deriv sub, const NestedSequent& parent, int ordinal) {
    Deriv out;
    NestedSequent judgment = parent;
    judgment.children[ordinal] =
        Child::plain(sub.conclusion, parent.children[ordinal].index);
    out.conclusion = judgment;
    out.rule = std::move(sub.rule);
    out.selection = std::move(sub.selection);
    out.selection.at.path.insert(out.selection.at.path.begin(), ordinal + 1);
    for (auto& p : sub.premises) out.premises.push_back(rebase(std::move(p), judgment, ordinal));
    return out;
  }

  std::optional<Deriv> axiom_leaf(const NestedSequent& u) const {
    for (size_t i = 0; i < u.ante.size(); i++)
      if (u.ante[i].is_bottom()) {
        Selection sel;
        sel.left = static_cast<int>(i);
        return Deriv{u, "bot_l", sel, {}};
      }
    for (size_t i = 0; i < u.ante.size(); i++) {
      if (!u.ante[i].is_atom()) continue;
      for (size_t j = 0; j < u.succ.size(); j++)
        if (u.ante[i] == u.succ[j]) {
          Selection sel;
          sel.left = static_cast<int>(i);
          sel.right = static_cast<int>(j);
          return Deriv{u, "init", sel, {}};
        }
    }
    return std::nullopt;
  }

  struct Move {
    std::string rule;
    Selection sel;
  };

  void local_moves(const NestedSequent& u, std::vector<Move>& out) const {
    const bool classical = logic.classical_base();
    auto add_l = [&](std::string r, int i) {
      Move m{std::move(r), {}};
      m.sel.left = i;
      out.push_back(std::move(m));
    };
    auto add_r = [&](std::string r, int i) {
      Move m{std::move(r), {}};
      m.sel.right = i;
      out.push_back(std::move(m));
    };
    for (size_t i = 0; i < u.ante.size(); i++)
      if (u.ante[i].tag() == Conn::And) add_l("and_l", static_cast<int>(i));
    for (size_t i = 0; i < u.succ.size(); i++)
      if (u.succ[i].tag() == Conn::Or) add_r("or_r", static_cast<int>(i));
    if (logic.kind == LogicKind::Multimodal)
      for (size_t i = 0; i < u.ante.size(); i++)
        if (u.ante[i].is_box() && logic.desc.has_t(u.ante[i].box_index()))
          add_l("t_" + std::to_string(u.ante[i].box_index()), static_cast<int>(i));
    if (classical)
      for (size_t i = 0; i < u.succ.size(); i++)
        if (u.succ[i].tag() == Conn::Imp) add_r("imp_r", static_cast<int>(i));
    for (size_t i = 0; i < u.succ.size(); i++)
      if (u.succ[i].tag() == Conn::And) add_r("and_r", static_cast<int>(i));
    for (size_t i = 0; i < u.ante.size(); i++)
      if (u.ante[i].tag() == Conn::Or) add_l("or_l", static_cast<int>(i));
    for (size_t i = 0; i < u.ante.size(); i++)
      if (u.ante[i].tag() == Conn::Imp) add_l("imp_l", static_cast<int>(i));
  }

  // Solves the subtree u as a standalone judgment. `ancestors` holds the
  // entry keys of the pending subproblems on this branch of the nesting
  // recursion; an identical re-entry is blocked.
  std::optional<Deriv> solve(const NestedSequent& u, std::vector<std::string>& ancestors) {
    std::string key = nested_key(u);
    if (std::find(ancestors.begin(), ancestors.end(), key) != ancestors.end())
      return std::nullopt;
    ancestors.push_back(key);
    std::vector<std::string> local_hist;
    auto out = expand(u, ancestors, local_hist);
    ancestors.pop_back();
    return out;
  }

  std::optional<Deriv> expand(const NestedSequent& u, std::vector<std::string>& ancestors,
                              std::vector<std::string>& local_hist) {
    if (!meter.spend()) return std::nullopt;
    if (auto leaf = axiom_leaf(u)) return leaf;

    // Local phase: if any instance makes progress, only local rules are
    // tried (they are invertible, and the normal form puts them first).
    std::vector<Move> locals;
    local_moves(u, locals);
    std::string my_key = sequent_key(u.top());
    bool any_local = false;
    std::optional<Deriv> found;
    local_hist.push_back(my_key);
    for (const auto& mv : locals) {
      std::vector<NestedSequent> premises;
      try {
        premises = apply_at_root(logic, mv.rule, u, mv.sel);
      } catch (const NotApplicable&) {
        continue;
      }
      bool looping = false;
      for (const auto& p : premises)
        if (std::find(local_hist.begin(), local_hist.end(), sequent_key(p.top())) !=
            local_hist.end()) {
          looping = true;
          break;
        }
      if (looping) continue;
      any_local = true;
      std::vector<Deriv> subs;
      bool all = true;
      for (const auto& p : premises) {
        auto sub = expand(p, ancestors, local_hist);
        if (!sub) {
          all = false;
          break;
        }
        subs.push_back(std::move(*sub));
      }
      if (all) {
        found = Deriv{u, mv.rule, mv.sel, std::move(subs)};
        break;
      }
      if (meter.out) break;
    }
    local_hist.pop_back();
    if (found || any_local || meter.out) return found;

    return frontier(u, ancestors);
  }

  // Nesting creation, lifts, and the descent into sub-nestings, emitted as a
  // deterministic chain of derivation nodes.
  std::optional<Deriv> frontier(const NestedSequent& u, std::vector<std::string>& ancestors) {
    std::vector<std::pair<Move, NestedSequent>> chain;  // forced steps
    NestedSequent cur = u;

    auto push_step = [&](Move mv) {
      auto premises = apply_at_root(logic, mv.rule, cur, mv.sel);
      chain.push_back({std::move(mv), cur});
      cur = premises.at(0);
    };

    // Nesting phase: consume succedent material into new nestings.
    bool repeat = true;
    while (repeat) {
      repeat = false;
      for (size_t i = 0; i < cur.succ.size(); i++) {
        const Formula& f = cur.succ[i];
        if (logic.kind == LogicKind::Intuitionistic && f.tag() == Conn::Imp) {
          Move mv{"imp_r", {}};
          mv.sel.right = static_cast<int>(i);
          push_step(std::move(mv));
          repeat = true;
          break;
        }
        if (logic.kind == LogicKind::Multimodal && f.is_box()) {
          Move mv{"box_r_" + std::to_string(f.box_index()), {}};
          mv.sel.right = static_cast<int>(i);
          push_step(std::move(mv));
          repeat = true;
          break;
        }
        if ((logic.kind == LogicKind::NonNormalE || logic.kind == LogicKind::NonNormalM) &&
            f.is_box()) {
          Move mv{"box_r_e", {}};
          mv.sel.right = static_cast<int>(i);
          push_step(std::move(mv));
          repeat = true;
          break;
        }
      }
    }
    if (logic.kind == LogicKind::Multimodal) {
      // Serial nestings, once per (body, target index).
      for (size_t i = 0; i < cur.ante.size(); i++) {
        const Formula& f = cur.ante[i];
        if (!f.is_box()) continue;
        int bi = f.box_index();
        for (int j : logic.desc.indices) {
          if (!logic.desc.leq(j, bi) || !logic.desc.has_d(j)) continue;
          bool have = false;
          for (const auto& c : cur.children)
            have = have || (c.kind == Child::Plain && c.index && *c.index == j &&
                            c.body->children.empty() && c.body->succ.empty() &&
                            c.body->ante == FormulaSet{f.body()});
          if (have) continue;
          Move mv{"d_" + std::to_string(bi) + "_" + std::to_string(j), {}};
          mv.sel.left = static_cast<int>(i);
          mv.sel.index_i = bi;
          mv.sel.index_j = j;
          push_step(std::move(mv));
        }
      }
    }
    if (logic.kind == LogicKind::NonNormalM) {
      // Monotonisation of every marked nesting.
      for (size_t k = 0; k < cur.children.size(); k++) {
        const Child& c = cur.children[k];
        if (c.kind != Child::Marked) continue;
        if (ms_contains(c.pair_right.ante, Formula::bottom())) continue;
        Move mv{"m", {}};
        mv.sel.child = static_cast<int>(k);
        push_step(std::move(mv));
      }
    }

    // Lift phase: saturate transfers from this node into its plain children.
    if (logic.kind == LogicKind::Intuitionistic) {
      for (size_t k = 0; k < cur.children.size(); k++) {
        for (size_t i = 0; i < cur.ante.size(); i++) {
          if (cur.children[k].kind != Child::Plain) continue;
          if (ms_contains(cur.children[k].body->ante, cur.ante[i])) continue;
          Move mv{"lift", {}};
          mv.sel.left = static_cast<int>(i);
          mv.sel.child = static_cast<int>(k);
          push_step(std::move(mv));
        }
      }
    } else if (logic.kind == LogicKind::Multimodal) {
      for (size_t k = 0; k < cur.children.size(); k++) {
        if (cur.children[k].kind != Child::Plain) continue;
        int j = *cur.children[k].index;
        for (size_t i = 0; i < cur.ante.size(); i++) {
          const Formula& f = cur.ante[i];
          if (!f.is_box() || !logic.desc.leq(j, f.box_index())) continue;
          std::string suffix = std::to_string(f.box_index()) + "_" + std::to_string(j);
          if (!ms_contains(cur.children[k].body->ante, f.body())) {
            Move mv{"box_l_" + suffix, {}};
            mv.sel.left = static_cast<int>(i);
            mv.sel.child = static_cast<int>(k);
            push_step(std::move(mv));
          }
          if (logic.desc.has_4(f.box_index()) &&
              !ms_contains(cur.children[k].body->ante, f)) {
            Move mv{"four_" + suffix, {}};
            mv.sel.left = static_cast<int>(i);
            mv.sel.child = static_cast<int>(k);
            push_step(std::move(mv));
          }
        }
      }
    }

    // Deep phase: one sub-nesting carries the rest of the proof; for E and M
    // a marked nesting may first be consumed against an antecedent box.
    std::optional<Deriv> tail = deep_choices(cur, ancestors);
    if (!tail) return std::nullopt;

    // Fold the forced chain around the tail derivation.
    Deriv out = std::move(*tail);
    for (auto it = chain.rbegin(); it != chain.rend(); ++it)
      out = Deriv{it->second, it->first.rule, it->first.sel, {std::move(out)}};
    return out;
  }

  std::optional<Deriv> deep_choices(const NestedSequent& u, std::vector<std::string>& ancestors) {
    if (!meter.spend()) return std::nullopt;
    if (auto leaf = axiom_leaf(u)) return leaf;
    // Descend into a plain child.
    for (size_t k = 0; k < u.children.size(); k++) {
      if (u.children[k].kind != Child::Plain) continue;
      auto sub = solve(*u.children[k].body, ancestors);
      if (meter.out) return std::nullopt;
      if (sub) return rebase(std::move(*sub), u, static_cast<int>(k));
    }
    // Consume a marked nesting; each premise continues inside the plain
    // nesting it just produced (one binary nesting per branch suffices,
    // mirroring the sequent rules for E and M).
    if (logic.kind == LogicKind::NonNormalE || logic.kind == LogicKind::NonNormalM) {
      for (size_t k = 0; k < u.children.size(); k++) {
        if (u.children[k].kind != Child::Marked) continue;
        for (size_t i = 0; i < u.ante.size(); i++) {
          if (!u.ante[i].is_box()) continue;
          Move mv{"box_l_e", {}};
          mv.sel.left = static_cast<int>(i);
          mv.sel.child = static_cast<int>(k);
          auto premises = apply_at_root(logic, mv.rule, u, mv.sel);
          std::vector<Deriv> subs;
          bool all = true;
          for (const auto& p : premises) {
            auto sub = solve(*p.children[k].body, ancestors);
            if (!sub) {
              all = false;
              break;
            }
            subs.push_back(rebase(std::move(*sub), p, static_cast<int>(k)));
          }
          if (all) return Deriv{u, mv.rule, mv.sel, std::move(subs)};
          if (meter.out) return std::nullopt;
        }
      }
    }
    return std::nullopt;
  }
};

}  // namespace

SearchResult<NestedSequent> ns_prove(const LogicSpec& logic, const NestedSequent& goal,
                                     Budget budget) {
  validate_nested_goal(logic, goal);
  NsProver prover(logic, budget);
  std::vector<std::string> ancestors;
  NestedSequent start = goal;
  start.ante = ms_dedup(start.ante);
  start.succ = ms_dedup(start.succ);
  SearchResult<NestedSequent> out;
  auto d = prover.solve(start, ancestors);
  out.nodes_used = prover.meter.used;
  if (d) {
    out.status = SearchStatus::Proved;
    out.derivation = std::move(d);
  } else {
    out.status = prover.meter.out ? SearchStatus::Exhausted : SearchStatus::Refuted;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Checking

namespace {

CheckResult ns_check_node(const LogicSpec& logic, const Derivation<NestedSequent>& d,
                          std::vector<int>& path) {
  std::vector<NestedSequent> premises;
  try {
    premises = ns_apply(logic, d.rule, d.conclusion, d.selection);
  } catch (const NotApplicable& e) {
    return {false, std::string("rule not applicable: ") + e.what(), path};
  }
  if (premises.size() != d.premises.size())
    return {false, "premise count mismatch for rule " + d.rule, path};
  for (size_t i = 0; i < premises.size(); i++) {
    if (!(premises[i] == d.premises[i].conclusion))
      return {false, "premise " + std::to_string(i) + " of " + d.rule + " differs from the rule schema",
              path};
    path.push_back(static_cast<int>(i));
    auto sub = ns_check_node(logic, d.premises[i], path);
    if (!sub.ok) return sub;
    path.pop_back();
  }
  return {};
}

struct PhaseWalker {
  const RuleTable& table;

  CheckResult walk(const Derivation<NestedSequent>& d,
                   std::vector<std::pair<Position, int>> ranks,  // position -> max rank seen
                   std::vector<Position> seen,                   // positions already used
                   std::vector<int>& path) {
    const RuleInfo* info = table.find(d.rule);
    if (!info) return {false, "unknown rule " + d.rule, path};
    if (info->phase != Phase::AxiomRule) {
      const Position& pos = d.selection.at;
      for (const auto& q : seen)
        if (position_order(pos, q) == PositionOrder::Below)
          return {false, "rule at " + pos.to_string() + " fires after a rule strictly below it",
                  path};
      int rank = phase_rank(info->phase);
      bool recorded = false;
      for (auto& [p, r] : ranks)
        if (p == pos) {
          if (rank < r)
            return {false,
                    phase_name(info->phase) + " rule at " + pos.to_string() +
                        " fires after a later phase",
                    path};
          r = rank;
          recorded = true;
          break;
        }
      if (!recorded) ranks.push_back({pos, rank});
      if (std::find(seen.begin(), seen.end(), pos) == seen.end()) seen.push_back(pos);
    }
    for (size_t i = 0; i < d.premises.size(); i++) {
      path.push_back(static_cast<int>(i));
      auto sub = walk(d.premises[i], ranks, seen, path);
      if (!sub.ok) return sub;
      path.pop_back();
    }
    return {};
  }
};

}  // namespace

CheckResult ns_check(const LogicSpec& logic, const Derivation<NestedSequent>& d) {
  std::vector<int> path;
  return ns_check_node(logic, d, path);
}

CheckResult phase_check(const LogicSpec& logic, const Derivation<NestedSequent>& d) {
  RuleTable table = ns_rule_table(logic);
  PhaseWalker walker{table};
  std::vector<int> path;
  return walker.walk(d, {}, {}, path);
}

}  // namespace nsq
