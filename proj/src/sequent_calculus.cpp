#include "nsq/sequent_calculus.hpp"

#include <set>

namespace nsq {

int phase_rank(Phase p) {
  switch (p) {
    case Phase::Local: return 0;
    case Phase::Nesting: return 1;
    case Phase::MarkedLocal: return 2;
    case Phase::Lift: return 3;
    case Phase::AxiomRule: return 4;
  }
  return 4;
}

std::string phase_name(Phase p) {
  switch (p) {
    case Phase::Local: return "local";
    case Phase::Nesting: return "nesting";
    case Phase::MarkedLocal: return "marked-local";
    case Phase::Lift: return "lift";
    case Phase::AxiomRule: return "axiom";
  }
  return "?";
}

static void push_props(RuleTable& t) {
  t.rules.push_back({"imp_l", Phase::Local, 2});
  t.rules.push_back({"imp_r", Phase::Local, 1});
  t.rules.push_back({"and_l", Phase::Local, 1});
  t.rules.push_back({"and_r", Phase::Local, 2});
  t.rules.push_back({"or_l", Phase::Local, 2});
  t.rules.push_back({"or_r", Phase::Local, 1});
  t.rules.push_back({"bot_l", Phase::AxiomRule, 0});
  t.rules.push_back({"init", Phase::AxiomRule, 0});
}

RuleTable sc_rule_table(const LogicSpec& logic) {
  RuleTable t;
  t.calculus = "sc";
  push_props(t);
  switch (logic.kind) {
    case LogicKind::Intuitionistic:
      break;
    case LogicKind::Multimodal:
      for (int i : logic.desc.indices) t.rules.push_back({"k_" + std::to_string(i), Phase::Local, 1});
      for (int i : logic.desc.indices)
        if (logic.desc.has_d(i)) t.rules.push_back({"d_" + std::to_string(i), Phase::Local, 1});
      for (int i : logic.desc.indices)
        if (logic.desc.has_t(i)) t.rules.push_back({"t_" + std::to_string(i), Phase::Local, 1});
      break;
    case LogicKind::NonNormalE:
      t.rules.push_back({"e", Phase::Local, 2});
      break;
    case LogicKind::NonNormalM:
      t.rules.push_back({"m", Phase::Local, 1});
      break;
  }
  return t;
}

namespace {

Formula at_occ(const FormulaSet& side, int idx, const char* what) {
  if (idx < 0 || idx >= static_cast<int>(side.size()))
    throw NotApplicable(std::string("no such ") + what + " occurrence");
  return side[idx];
}

Sequent contract(FormulaSet ante, FormulaSet succ) {
  ms_sort(ante);
  ms_sort(succ);
  return Sequent{ms_dedup(ante), ms_dedup(succ)};
}

// Antecedent of the premise of k_i / d_i: boxed formulas whose index lies in
// the upset of i are unboxed, and those whose logic has 4 keep a boxed copy;
// everything else is deleted.
FormulaSet modal_transfer(const Description& d, int i, const FormulaSet& ante) {
  FormulaSet out;
  for (const auto& f : ante) {
    if (!f.is_box()) continue;
    int j = f.box_index();
    if (!d.leq(i, j)) continue;
    out.push_back(f.body());
    if (d.has_4(j)) out.push_back(f);
  }
  return out;
}

}  // namespace

std::vector<Sequent> sc_apply(const LogicSpec& logic, const std::string& rule,
                              const Sequent& goal, const Selection& sel) {
  const bool classical = logic.classical_base();
  auto remove_l = [&](const Formula& f) {
    FormulaSet a = goal.ante;
    if (!ms_erase_one(a, f)) throw NotApplicable("principal not in antecedent");
    return a;
  };
  auto remove_r = [&](const Formula& f) {
    FormulaSet s = goal.succ;
    if (!ms_erase_one(s, f)) throw NotApplicable("principal not in succedent");
    return s;
  };

  if (rule == "bot_l") {
    Formula f = at_occ(goal.ante, sel.left, "antecedent");
    if (!f.is_bottom()) throw NotApplicable("bot_l needs bottom");
    return {};
  }
  if (rule == "init") {
    Formula l = at_occ(goal.ante, sel.left, "antecedent");
    Formula r = at_occ(goal.succ, sel.right, "succedent");
    if (!l.is_atom() || l != r) throw NotApplicable("init needs a shared atom");
    return {};
  }
  if (rule == "and_l") {
    Formula f = at_occ(goal.ante, sel.left, "antecedent");
    if (f.tag() != Conn::And) throw NotApplicable("and_l needs a conjunction");
    FormulaSet a = remove_l(f);
    ms_insert(a, f.left());
    ms_insert(a, f.right());
    return {contract(a, goal.succ)};
  }
  if (rule == "and_r") {
    Formula f = at_occ(goal.succ, sel.right, "succedent");
    if (f.tag() != Conn::And) throw NotApplicable("and_r needs a conjunction");
    FormulaSet s1 = remove_r(f), s2 = s1;
    ms_insert(s1, f.left());
    ms_insert(s2, f.right());
    return {contract(goal.ante, s1), contract(goal.ante, s2)};
  }
  if (rule == "or_l") {
    Formula f = at_occ(goal.ante, sel.left, "antecedent");
    if (f.tag() != Conn::Or) throw NotApplicable("or_l needs a disjunction");
    FormulaSet a1 = remove_l(f), a2 = a1;
    ms_insert(a1, f.left());
    ms_insert(a2, f.right());
    return {contract(a1, goal.succ), contract(a2, goal.succ)};
  }
  if (rule == "or_r") {
    Formula f = at_occ(goal.succ, sel.right, "succedent");
    if (f.tag() != Conn::Or) throw NotApplicable("or_r needs a disjunction");
    FormulaSet s = remove_r(f);
    ms_insert(s, f.left());
    ms_insert(s, f.right());
    return {contract(goal.ante, s)};
  }
  if (rule == "imp_l") {
    Formula f = at_occ(goal.ante, sel.left, "antecedent");
    if (f.tag() != Conn::Imp) throw NotApplicable("imp_l needs an implication");
    FormulaSet s1 = goal.succ;
    ms_insert(s1, f.left());
    FormulaSet a2 = remove_l(f);
    ms_insert(a2, f.right());
    return {contract(goal.ante, s1), contract(a2, goal.succ)};
  }
  if (rule == "imp_r") {
    Formula f = at_occ(goal.succ, sel.right, "succedent");
    if (f.tag() != Conn::Imp) throw NotApplicable("imp_r needs an implication");
    FormulaSet a = goal.ante;
    ms_insert(a, f.left());
    if (classical) {
      FormulaSet s = remove_r(f);
      ms_insert(s, f.right());
      return {contract(a, s)};
    }
    // Intuitionistic right implication: the succedent context is deleted.
    return {contract(a, {f.right()})};
  }

  if (logic.kind == LogicKind::Multimodal) {
    const Description& d = logic.desc;
    if (rule.rfind("k_", 0) == 0) {
      int i = std::stoi(rule.substr(2));
      if (!d.has_index(i)) throw NotApplicable("unknown index");
      Formula f = at_occ(goal.succ, sel.right, "succedent");
      if (!f.is_box() || f.box_index() != i) throw NotApplicable("k_i needs a boxed succedent formula");
      FormulaSet a = modal_transfer(d, i, goal.ante);
      return {contract(std::move(a), {f.body()})};
    }
    if (rule.rfind("d_", 0) == 0) {
      int i = std::stoi(rule.substr(2));
      if (!d.has_index(i) || !d.has_d(i)) throw NotApplicable("d_i unavailable");
      FormulaSet a = modal_transfer(d, i, goal.ante);
      if (a.empty()) throw NotApplicable("d_i transfers no formula");
      return {contract(std::move(a), {})};
    }
    if (rule.rfind("t_", 0) == 0) {
      int i = std::stoi(rule.substr(2));
      if (!d.has_index(i) || !d.has_t(i)) throw NotApplicable("t_i unavailable");
      Formula f = at_occ(goal.ante, sel.left, "antecedent");
      if (!f.is_box() || f.box_index() != i) throw NotApplicable("t_i needs a boxed formula");
      FormulaSet a = goal.ante;
      ms_insert(a, f.body());
      return {contract(std::move(a), goal.succ)};
    }
  }

  if (logic.kind == LogicKind::NonNormalE && rule == "e") {
    Formula l = at_occ(goal.ante, sel.left, "antecedent");
    Formula r = at_occ(goal.succ, sel.right, "succedent");
    if (!l.is_box() || !r.is_box()) throw NotApplicable("e needs boxes on both sides");
    return {Sequent{{l.body()}, {r.body()}}, Sequent{{r.body()}, {l.body()}}};
  }
  if (logic.kind == LogicKind::NonNormalM && rule == "m") {
    Formula l = at_occ(goal.ante, sel.left, "antecedent");
    Formula r = at_occ(goal.succ, sel.right, "succedent");
    if (!l.is_box() || !r.is_box()) throw NotApplicable("m needs boxes on both sides");
    return {Sequent{{l.body()}, {r.body()}}};
  }

  throw NotApplicable("rule '" + rule + "' not in the " + logic.id() + " sequent table");
}

// ---------------------------------------------------------------------------
// Backward proof search

namespace {

struct Move {
  std::string rule;
  Selection sel;
};

struct ScProver {
  const LogicSpec& logic;
  BudgetMeter meter;
  int max_height;

  ScProver(const LogicSpec& l, Budget b) : logic(l), meter(b.nodes), max_height(b.max_height) {}

  std::optional<Move> axiom(const Sequent& g) const {
    for (size_t i = 0; i < g.ante.size(); i++)
      if (g.ante[i].is_bottom()) {
        Move m{"bot_l", {}};
        m.sel.left = static_cast<int>(i);
        return m;
      }
    for (size_t i = 0; i < g.ante.size(); i++) {
      if (!g.ante[i].is_atom()) continue;
      for (size_t j = 0; j < g.succ.size(); j++)
        if (g.ante[i] == g.succ[j]) {
          Move m{"init", {}};
          m.sel.left = static_cast<int>(i);
          m.sel.right = static_cast<int>(j);
          return m;
        }
    }
    return std::nullopt;
  }

  void enumerate(const Sequent& g, std::vector<Move>& out) const {
    const bool classical = logic.classical_base();
    auto add_l = [&](const char* r, int i) {
      Move m{r, {}};
      m.sel.left = i;
      out.push_back(m);
    };
    auto add_r = [&](const char* r, int i) {
      Move m{r, {}};
      m.sel.right = i;
      out.push_back(m);
    };
    // Non-branching invertible rules first, then branching, then the rules
    // that commit the proof (intuitionistic imp_r and the modal rules).
    for (size_t i = 0; i < g.ante.size(); i++)
      if (g.ante[i].tag() == Conn::And) add_l("and_l", static_cast<int>(i));
    for (size_t i = 0; i < g.succ.size(); i++)
      if (g.succ[i].tag() == Conn::Or) add_r("or_r", static_cast<int>(i));
    if (logic.kind == LogicKind::Multimodal)
      for (size_t i = 0; i < g.ante.size(); i++)
        if (g.ante[i].is_box() && logic.desc.has_t(g.ante[i].box_index())) {
          Move m{"t_" + std::to_string(g.ante[i].box_index()), {}};
          m.sel.left = static_cast<int>(i);
          out.push_back(m);
        }
    if (classical)
      for (size_t i = 0; i < g.succ.size(); i++)
        if (g.succ[i].tag() == Conn::Imp) add_r("imp_r", static_cast<int>(i));
    for (size_t i = 0; i < g.succ.size(); i++)
      if (g.succ[i].tag() == Conn::And) add_r("and_r", static_cast<int>(i));
    for (size_t i = 0; i < g.ante.size(); i++)
      if (g.ante[i].tag() == Conn::Or) add_l("or_l", static_cast<int>(i));
    for (size_t i = 0; i < g.ante.size(); i++)
      if (g.ante[i].tag() == Conn::Imp) add_l("imp_l", static_cast<int>(i));
    if (!classical)
      for (size_t i = 0; i < g.succ.size(); i++)
        if (g.succ[i].tag() == Conn::Imp) add_r("imp_r", static_cast<int>(i));
    switch (logic.kind) {
      case LogicKind::Multimodal: {
        for (size_t i = 0; i < g.succ.size(); i++)
          if (g.succ[i].is_box()) {
            Move m{"k_" + std::to_string(g.succ[i].box_index()), {}};
            m.sel.right = static_cast<int>(i);
            out.push_back(m);
          }
        for (int i : logic.desc.indices) {
          if (!logic.desc.has_d(i)) continue;
          Move m{"d_" + std::to_string(i), {}};
          m.sel.index_i = i;
          out.push_back(m);
        }
        break;
      }
      case LogicKind::NonNormalE:
      case LogicKind::NonNormalM: {
        const char* r = logic.kind == LogicKind::NonNormalE ? "e" : "m";
        for (size_t i = 0; i < g.ante.size(); i++) {
          if (!g.ante[i].is_box()) continue;
          for (size_t j = 0; j < g.succ.size(); j++) {
            if (!g.succ[j].is_box()) continue;
            Move m{r, {}};
            m.sel.left = static_cast<int>(i);
            m.sel.right = static_cast<int>(j);
            out.push_back(m);
          }
        }
        break;
      }
      default:
        break;
    }
  }

  std::optional<Derivation<Sequent>> solve(const Sequent& goal, std::vector<std::string>& history,
                                           int height_left) {
    if (!meter.spend()) return std::nullopt;
    if (auto ax = axiom(goal))
      return Derivation<Sequent>{goal, ax->rule, ax->sel, {}};
    if (height_left == 0) return std::nullopt;

    std::vector<Move> moves;
    enumerate(goal, moves);
    std::string my_key = sequent_key(goal);
    history.push_back(my_key);
    std::optional<Derivation<Sequent>> found;
    for (const auto& mv : moves) {
      std::vector<Sequent> premises;
      try {
        premises = sc_apply(logic, mv.rule, goal, mv.sel);
      } catch (const NotApplicable&) {
        continue;
      }
      bool looping = false;
      for (const auto& p : premises)
        if (std::find(history.begin(), history.end(), sequent_key(p)) != history.end()) {
          looping = true;
          break;
        }
      if (looping) continue;
      std::vector<Derivation<Sequent>> subs;
      bool all = true;
      for (const auto& p : premises) {
        auto sub = solve(p, history, height_left < 0 ? -1 : height_left - 1);
        if (!sub) {
          all = false;
          break;
        }
        subs.push_back(std::move(*sub));
      }
      if (all) {
        found = Derivation<Sequent>{goal, mv.rule, mv.sel, std::move(subs)};
        break;
      }
      if (meter.out) break;
    }
    history.pop_back();
    return found;
  }
};

}  // namespace

SearchResult<Sequent> sc_prove(const LogicSpec& logic, const Sequent& goal, Budget budget) {
  for (const auto& f : goal.ante)
    if (auto bad = find_unknown_index(logic, f))
      throw std::invalid_argument("box index " + std::to_string(*bad) + " not in the logic");
  for (const auto& f : goal.succ)
    if (auto bad = find_unknown_index(logic, f))
      throw std::invalid_argument("box index " + std::to_string(*bad) + " not in the logic");

  ScProver prover(logic, budget);
  std::vector<std::string> history;
  SearchResult<Sequent> out;
  auto d = prover.solve(goal.contracted(), history, budget.max_height);
  out.nodes_used = prover.meter.used;
  if (d) {
    out.status = SearchStatus::Proved;
    out.derivation = std::move(d);
  } else {
    out.status = prover.meter.out ? SearchStatus::Exhausted : SearchStatus::Refuted;
  }
  return out;
}

static CheckResult check_node(const LogicSpec& logic, const Derivation<Sequent>& d,
                              std::vector<int>& path) {
  std::vector<Sequent> premises;
  try {
    premises = sc_apply(logic, d.rule, d.conclusion, d.selection);
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
    auto sub = check_node(logic, d.premises[i], path);
    if (!sub.ok) return sub;
    path.pop_back();
  }
  return {};
}

CheckResult sc_check(const LogicSpec& logic, const Derivation<Sequent>& d) {
  std::vector<int> path;
  return check_node(logic, d, path);
}

}  // namespace nsq
