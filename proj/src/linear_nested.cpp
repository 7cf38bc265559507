#include "nsq/linear_nested.hpp"

#include <algorithm>
#include <map>

#include "nsq/nested_calculus.hpp"
#include "nsq/sequent_calculus.hpp"

namespace nsq {

LinearNested line_of(Sequent s) {
  LinearNested g;
  g.components.push_back({false, std::move(s), {}});
  return g;
}

// ---------------------------------------------------------------------------
// Text syntax

LinearNested parse_lns(std::string_view text) {
  LinearNested out;
  size_t pos = 0;
  bool first = true;
  Separator pending_sep;
  while (true) {
    size_t next = std::string_view::npos;
    int depth = 0;
    for (size_t i = pos; i + 1 < text.size(); i++) {
      char c = text[i];
      if (c == '(' || c == '[') depth++;
      if (c == ')' || c == ']') depth--;
      if (depth == 0 && c == '/' && text[i + 1] == '/') {
        next = i;
        break;
      }
    }
    std::string_view piece =
        next == std::string_view::npos ? text.substr(pos) : text.substr(pos, next - pos);
    size_t a = piece.find_first_not_of(" \t");
    if (a == std::string_view::npos) throw ParseError("empty component", pos);
    size_t b = piece.find_last_not_of(" \t");
    piece = piece.substr(a, b - a + 1);
    LnsComponent comp;
    if (piece.front() == '<') {
      if (piece.back() != '>') throw ParseError("unterminated '<'", pos);
      auto inner = piece.substr(1, piece.size() - 2);
      size_t semi = inner.find(';');
      if (semi == std::string_view::npos) throw ParseError("expected ';'", pos);
      comp.is_pair = true;
      comp.seq = parse_sequent(inner.substr(0, semi));
      comp.right = parse_sequent(inner.substr(semi + 1));
    } else {
      comp.seq = parse_sequent(piece);
    }
    if (!first) out.seps.push_back(pending_sep);
    out.components.push_back(std::move(comp));
    first = false;
    if (next == std::string_view::npos) break;
    pos = next + 2;
    pending_sep = Separator{};
    if (pos < text.size() && text[pos] == '*') {
      pending_sep.kind = SepKind::BlockedSep;
      pos++;
    }
    if (pos < text.size() && text[pos] == '^') {
      pos++;
      size_t start = pos;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) pos++;
      if (start == pos) throw ParseError("expected index after '^'", pos);
      pending_sep.index = std::stoi(std::string(text.substr(start, pos - start)));
    }
  }
  return out;
}

std::string render_lns(const LinearNested& g) {
  std::string out;
  for (size_t i = 0; i < g.components.size(); i++) {
    if (i) {
      out += g.seps[i - 1].kind == SepKind::BlockedSep ? " //*" : " //";
      if (g.seps[i - 1].index) out += "^" + std::to_string(*g.seps[i - 1].index);
      out += " ";
    }
    const auto& c = g.components[i];
    if (c.is_pair)
      out += "< " + render_sequent(c.seq) + " ; " + render_sequent(c.right) + " >";
    else
      out += render_sequent(c.seq);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rules

RuleTable lns_rule_table(const LogicSpec& logic) {
  RuleTable t = ns_rule_table(logic);
  t.calculus = "lns";
  if (logic.kind == LogicKind::Intuitionistic || logic.kind == LogicKind::Multimodal)
    t.rules.push_back({"close", Phase::Lift, 1});
  return t;
}

namespace {

Formula at_occ(const FormulaSet& side, int idx, const char* what) {
  if (idx < 0 || idx >= static_cast<int>(side.size()))
    throw NotApplicable(std::string("no such ") + what + " occurrence");
  return side[idx];
}

Sequent contract2(FormulaSet a, FormulaSet s) {
  ms_sort(a);
  ms_sort(s);
  return Sequent{ms_dedup(a), ms_dedup(s)};
}

bool is_local_rule(const LogicSpec& logic, const std::string& rule) {
  for (const char* r : {"imp_l", "and_l", "and_r", "or_l", "or_r", "bot_l", "init"})
    if (rule == r) return true;
  if (rule == "imp_r") return logic.classical_base();
  if (logic.kind == LogicKind::Multimodal && rule.rfind("t_", 0) == 0) return true;
  return false;
}

std::pair<int, int> rule_indices(const std::string& rule, size_t prefix) {
  std::string suffix = rule.substr(prefix);
  size_t us = suffix.find('_');
  if (us == std::string::npos) throw NotApplicable("malformed rule name");
  return {std::stoi(suffix.substr(0, us)), std::stoi(suffix.substr(us + 1))};
}

}  // namespace

std::vector<LinearNested> lns_apply(const LogicSpec& logic, const std::string& rule,
                                    const LinearNested& goal, const Selection& sel) {
  if (goal.components.empty()) throw NotApplicable("empty line");
  const bool mlj = logic.kind == LogicKind::Intuitionistic;
  const LnsComponent& last = goal.last();
  const bool open = goal.block_open();
  const size_t n = goal.components.size();

  auto with_last = [&](Sequent s) {
    LinearNested out = goal;
    out.components.back() = {false, std::move(s), {}};
    return out;
  };

  if (is_local_rule(logic, rule)) {
    if (last.is_pair) throw NotApplicable("propositional rules never act inside a pair");
    if (open) throw NotApplicable("the open block must be closed first");
    auto premises = sc_apply(logic, rule, last.seq, sel);
    std::vector<LinearNested> out;
    for (auto& p : premises) out.push_back(with_last(std::move(p)));
    return out;
  }

  auto append_blocked = [&](Sequent prev, LnsComponent fresh, std::optional<int> idx) {
    LinearNested out = goal;
    out.components.back() = {false, std::move(prev), {}};
    out.seps.push_back({SepKind::BlockedSep, idx});
    out.components.push_back(std::move(fresh));
    return out;
  };

  // Nesting-phase rules: they open a blocked component at the end.
  if (rule == "imp_r" && mlj) {
    if (open || last.is_pair) throw NotApplicable("imp_r opens a block at a plain end");
    Formula f = at_occ(last.seq.succ, sel.right, "succedent");
    if (f.tag() != Conn::Imp) throw NotApplicable("imp_r needs an implication");
    FormulaSet s = last.seq.succ;
    ms_erase_one(s, f);
    return {append_blocked(Sequent{last.seq.ante, std::move(s)},
                           {false, contract2({f.left()}, {f.right()}), {}}, std::nullopt)};
  }
  if (logic.kind == LogicKind::Multimodal && rule.rfind("box_r_", 0) == 0) {
    if (open || last.is_pair) throw NotApplicable("box_r_i opens a block at a plain end");
    int i = std::stoi(rule.substr(6));
    Formula f = at_occ(last.seq.succ, sel.right, "succedent");
    if (!f.is_box() || f.box_index() != i) throw NotApplicable("box_r_i needs a matching box");
    FormulaSet s = last.seq.succ;
    ms_erase_one(s, f);
    return {append_blocked(Sequent{last.seq.ante, std::move(s)},
                           {false, contract2({}, {f.body()}), {}}, i)};
  }
  if (logic.kind == LogicKind::Multimodal && rule.rfind("d_", 0) == 0) {
    if (open || last.is_pair) throw NotApplicable("d_ij opens a block at a plain end");
    auto [i, j] = rule_indices(rule, 2);
    if (!logic.desc.has_d(j) || !logic.desc.leq(j, i)) throw NotApplicable("d_ij unavailable");
    Formula f = at_occ(last.seq.ante, sel.left, "antecedent");
    if (!f.is_box() || f.box_index() != i) throw NotApplicable("d_ij needs a matching box");
    return {append_blocked(last.seq, {false, contract2({f.body()}, {}), {}}, j)};
  }
  if ((logic.kind == LogicKind::NonNormalE || logic.kind == LogicKind::NonNormalM) &&
      rule == "box_r_e") {
    if (open || last.is_pair) throw NotApplicable("box_r_e opens a block at a plain end");
    Formula f = at_occ(last.seq.succ, sel.right, "succedent");
    if (!f.is_box()) throw NotApplicable("box_r_e needs a box");
    FormulaSet s = last.seq.succ;
    ms_erase_one(s, f);
    LnsComponent pair;
    pair.is_pair = true;
    pair.seq = Sequent{{}, {f.body()}};
    pair.right = Sequent{{f.body()}, {}};
    return {append_blocked(Sequent{last.seq.ante, std::move(s)}, std::move(pair), std::nullopt)};
  }

  // Rules acting across the final blocked separator.
  if (!open) throw NotApplicable("rule '" + rule + "' needs an open block");
  if (n < 2) throw NotApplicable("no previous component");
  const LnsComponent& prev = goal.components[n - 2];
  if (prev.is_pair) throw NotApplicable("previous component is a pair");

  if (rule == "lift") {
    if (!mlj) throw NotApplicable("lift belongs to the intuitionistic system");
    if (last.is_pair) throw NotApplicable("lift targets a plain component");
    Formula f = at_occ(prev.seq.ante, sel.left, "antecedent");
    LinearNested out = goal;
    FormulaSet pa = prev.seq.ante;
    ms_erase_one(pa, f);
    out.components[n - 2].seq.ante = std::move(pa);
    FormulaSet la = last.seq.ante;
    ms_insert_new(la, f);
    out.components.back().seq.ante = std::move(la);
    return {out};
  }
  if (logic.kind == LogicKind::Multimodal &&
      (rule.rfind("box_l_", 0) == 0 || rule.rfind("four_", 0) == 0)) {
    bool four = rule.rfind("four_", 0) == 0;
    auto [i, j] = rule_indices(rule, four ? 5 : 6);
    if (last.is_pair) throw NotApplicable("the block end is a pair");
    if (!goal.seps.back().index || *goal.seps.back().index != j)
      throw NotApplicable("separator index mismatch");
    if (!logic.desc.leq(j, i)) throw NotApplicable("needs j below i");
    if (four && !logic.desc.has_4(i)) throw NotApplicable("four_ij needs the transitivity axiom");
    Formula f = at_occ(prev.seq.ante, sel.left, "antecedent");
    if (!f.is_box() || f.box_index() != i) throw NotApplicable("needs a matching box");
    LinearNested out = goal;
    FormulaSet la = last.seq.ante;
    ms_insert_new(la, four ? f : f.body());
    out.components.back().seq.ante = std::move(la);
    return {out};
  }
  if (rule == "close") {
    if (logic.kind != LogicKind::Intuitionistic && logic.kind != LogicKind::Multimodal)
      throw NotApplicable("close belongs to the blocked relational systems");
    if (last.is_pair) throw NotApplicable("close needs a plain block end");
    LinearNested out = goal;
    out.seps.back().kind = SepKind::PlainSep;
    return {out};
  }
  if (logic.kind == LogicKind::NonNormalM && rule == "m") {
    if (!last.is_pair) throw NotApplicable("m needs a pair");
    LinearNested out = goal;
    ms_insert_new(out.components.back().right.ante, Formula::bottom());
    return {out};
  }
  if ((logic.kind == LogicKind::NonNormalE || logic.kind == LogicKind::NonNormalM) &&
      rule == "box_l_e") {
    if (!last.is_pair) throw NotApplicable("box_l_e needs a pair");
    Formula f = at_occ(prev.seq.ante, sel.left, "antecedent");
    if (!f.is_box()) throw NotApplicable("box_l_e needs a box");
    FormulaSet pa = prev.seq.ante;
    ms_erase_one(pa, f);
    Sequent new_prev{std::move(pa), prev.seq.succ};
    FormulaSet a1 = last.seq.ante;
    ms_insert_new(a1, f.body());
    Sequent s1{std::move(a1), last.seq.succ};
    FormulaSet s2s = last.right.succ;
    ms_insert_new(s2s, f.body());
    Sequent s2{last.right.ante, std::move(s2s)};
    LinearNested p1 = goal, p2 = goal;
    p1.components[n - 2].seq = new_prev;
    p1.seps.back() = {SepKind::PlainSep, std::nullopt};
    p1.components.back() = {false, std::move(s1), {}};
    p2.components[n - 2].seq = new_prev;
    p2.seps.back() = {SepKind::PlainSep, std::nullopt};
    p2.components.back() = {false, std::move(s2), {}};
    return {p1, p2};
  }

  throw NotApplicable("rule '" + rule + "' not in the " + logic.id() + " linear nested table");
}

// ---------------------------------------------------------------------------
// Proof search

namespace {

struct LnsProver {
  const LogicSpec& logic;
  BudgetMeter meter;

  LnsProver(const LogicSpec& l, Budget b) : logic(l), meter(b.nodes) {}

  using Deriv = Derivation<LinearNested>;

  struct Move {
    std::string rule;
    Selection sel;
  };

  std::optional<Move> axiom(const LinearNested& g) const {
    if (g.block_open() || g.last().is_pair) return std::nullopt;
    const Sequent& s = g.last().seq;
    for (size_t i = 0; i < s.ante.size(); i++)
      if (s.ante[i].is_bottom()) {
        Move m{"bot_l", {}};
        m.sel.left = static_cast<int>(i);
        return m;
      }
    for (size_t i = 0; i < s.ante.size(); i++) {
      if (!s.ante[i].is_atom()) continue;
      for (size_t j = 0; j < s.succ.size(); j++)
        if (s.ante[i] == s.succ[j]) {
          Move m{"init", {}};
          m.sel.left = static_cast<int>(i);
          m.sel.right = static_cast<int>(j);
          return m;
        }
    }
    return std::nullopt;
  }

  void local_moves(const LinearNested& g, std::vector<Move>& out) const {
    const Sequent& s = g.last().seq;
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
    for (size_t i = 0; i < s.ante.size(); i++)
      if (s.ante[i].tag() == Conn::And) add_l("and_l", static_cast<int>(i));
    for (size_t i = 0; i < s.succ.size(); i++)
      if (s.succ[i].tag() == Conn::Or) add_r("or_r", static_cast<int>(i));
    if (logic.kind == LogicKind::Multimodal)
      for (size_t i = 0; i < s.ante.size(); i++)
        if (s.ante[i].is_box() && logic.desc.has_t(s.ante[i].box_index()))
          add_l("t_" + std::to_string(s.ante[i].box_index()), static_cast<int>(i));
    if (classical)
      for (size_t i = 0; i < s.succ.size(); i++)
        if (s.succ[i].tag() == Conn::Imp) add_r("imp_r", static_cast<int>(i));
    for (size_t i = 0; i < s.succ.size(); i++)
      if (s.succ[i].tag() == Conn::And) add_r("and_r", static_cast<int>(i));
    for (size_t i = 0; i < s.ante.size(); i++)
      if (s.ante[i].tag() == Conn::Or) add_l("or_l", static_cast<int>(i));
    for (size_t i = 0; i < s.ante.size(); i++)
      if (s.ante[i].tag() == Conn::Imp) add_l("imp_l", static_cast<int>(i));
  }

  void creation_moves(const LinearNested& g, std::vector<Move>& out) const {
    const Sequent& s = g.last().seq;
    switch (logic.kind) {
      case LogicKind::Intuitionistic:
        for (size_t i = 0; i < s.succ.size(); i++)
          if (s.succ[i].tag() == Conn::Imp) {
            Move m{"imp_r", {}};
            m.sel.right = static_cast<int>(i);
            out.push_back(std::move(m));
          }
        break;
      case LogicKind::Multimodal:
        for (size_t i = 0; i < s.succ.size(); i++)
          if (s.succ[i].is_box()) {
            Move m{"box_r_" + std::to_string(s.succ[i].box_index()), {}};
            m.sel.right = static_cast<int>(i);
            out.push_back(std::move(m));
          }
        for (size_t i = 0; i < s.ante.size(); i++) {
          if (!s.ante[i].is_box()) continue;
          int bi = s.ante[i].box_index();
          for (int j : logic.desc.indices) {
            if (!logic.desc.leq(j, bi) || !logic.desc.has_d(j)) continue;
            Move m{"d_" + std::to_string(bi) + "_" + std::to_string(j), {}};
            m.sel.left = static_cast<int>(i);
            out.push_back(std::move(m));
          }
        }
        break;
      default:
        for (size_t i = 0; i < s.succ.size(); i++)
          if (s.succ[i].is_box()) {
            Move m{"box_r_e", {}};
            m.sel.right = static_cast<int>(i);
            out.push_back(std::move(m));
          }
        break;
    }
  }

  // Saturates the block with lifts (left to right) and closes it. Returns
  // the chain of forced steps.
  std::vector<std::pair<Move, LinearNested>> block_macro(LinearNested& cur) const {
    std::vector<std::pair<Move, LinearNested>> chain;
    auto push_step = [&](Move mv) {
      auto premises = lns_apply(logic, mv.rule, cur, mv.sel);
      chain.push_back({std::move(mv), cur});
      cur = premises.at(0);
    };
    size_t n = cur.components.size();
    if (logic.kind == LogicKind::Intuitionistic) {
      while (!cur.components[n - 2].seq.ante.empty()) {
        Move mv{"lift", {}};
        mv.sel.left = 0;
        mv.sel.child = static_cast<int>(n - 1);
        push_step(std::move(mv));
      }
    } else if (logic.kind == LogicKind::Multimodal) {
      int j = *cur.seps.back().index;
      const FormulaSet ante = cur.components[n - 2].seq.ante;
      for (size_t i = 0; i < ante.size(); i++) {
        const Formula& f = ante[i];
        if (!f.is_box() || !logic.desc.leq(j, f.box_index())) continue;
        std::string suffix = std::to_string(f.box_index()) + "_" + std::to_string(j);
        if (!ms_contains(cur.last().seq.ante, f.body())) {
          Move mv{"box_l_" + suffix, {}};
          mv.sel.left = static_cast<int>(i);
          push_step(std::move(mv));
        }
        if (logic.desc.has_4(f.box_index()) && !ms_contains(cur.last().seq.ante, f)) {
          Move mv{"four_" + suffix, {}};
          mv.sel.left = static_cast<int>(i);
          push_step(std::move(mv));
        }
      }
    }
    push_step({{"close"}, {}});
    return chain;
  }

  std::optional<Deriv> solve(const LinearNested& g, std::vector<std::string>& entry_hist,
                             std::vector<std::string>& comp_hist) {
    if (!meter.spend()) return std::nullopt;

    if (g.block_open()) {
      if (g.last().is_pair) return pair_block(g, entry_hist);
      // Forced: lift everything liftable, close, then continue.
      LinearNested cur = g;
      auto chain = block_macro(cur);
      std::string key = sequent_key(cur.last().seq);
      if (std::find(entry_hist.begin(), entry_hist.end(), key) != entry_hist.end())
        return std::nullopt;
      entry_hist.push_back(key);
      std::vector<std::string> fresh;
      auto tail = solve(cur, entry_hist, fresh);
      entry_hist.pop_back();
      if (!tail) return std::nullopt;
      Deriv out = std::move(*tail);
      for (auto it = chain.rbegin(); it != chain.rend(); ++it)
        out = Deriv{it->second, it->first.rule, it->first.sel, {std::move(out)}};
      return out;
    }

    if (auto ax = axiom(g)) return Deriv{g, ax->rule, ax->sel, {}};
    if (g.last().is_pair) return std::nullopt;  // a pair without a block is stuck

    std::vector<Move> locals;
    local_moves(g, locals);
    std::string my_key = sequent_key(g.last().seq);
    bool any_local = false;
    std::optional<Deriv> found;
    comp_hist.push_back(my_key);
    for (const auto& mv : locals) {
      std::vector<LinearNested> premises;
      try {
        premises = lns_apply(logic, mv.rule, g, mv.sel);
      } catch (const NotApplicable&) {
        continue;
      }
      bool looping = false;
      for (const auto& p : premises)
        if (std::find(comp_hist.begin(), comp_hist.end(), sequent_key(p.last().seq)) !=
            comp_hist.end()) {
          looping = true;
          break;
        }
      if (looping) continue;
      any_local = true;
      std::vector<Deriv> subs;
      bool all = true;
      for (const auto& p : premises) {
        auto sub = solve(p, entry_hist, comp_hist);
        if (!sub) {
          all = false;
          break;
        }
        subs.push_back(std::move(*sub));
      }
      if (all) {
        found = Deriv{g, mv.rule, mv.sel, std::move(subs)};
        break;
      }
      if (meter.out) break;
    }
    comp_hist.pop_back();
    if (found || any_local || meter.out) return found;

    std::vector<Move> creations;
    creation_moves(g, creations);
    for (const auto& mv : creations) {
      auto premises = lns_apply(logic, mv.rule, g, mv.sel);
      std::vector<std::string> fresh;
      auto sub = solve(premises[0], entry_hist, fresh);
      if (sub) return Deriv{g, mv.rule, mv.sel, {std::move(*sub)}};
      if (meter.out) return std::nullopt;
    }
    return std::nullopt;
  }

  // Block whose end is a pair: monotonise if the logic is M, then consume it
  // against an antecedent box of the previous component.
  std::optional<Deriv> pair_block(const LinearNested& g, std::vector<std::string>& entry_hist) {
    LinearNested cur = g;
    std::vector<std::pair<Move, LinearNested>> chain;
    if (logic.kind == LogicKind::NonNormalM &&
        !ms_contains(cur.last().right.ante, Formula::bottom())) {
      Move mv{"m", {}};
      auto premises = lns_apply(logic, mv.rule, cur, mv.sel);
      chain.push_back({std::move(mv), cur});
      cur = premises.at(0);
    }
    const Sequent& prev = cur.components[cur.components.size() - 2].seq;
    std::optional<Deriv> found;
    for (size_t i = 0; i < prev.ante.size() && !found; i++) {
      if (!prev.ante[i].is_box()) continue;
      Move mv{"box_l_e", {}};
      mv.sel.left = static_cast<int>(i);
      auto premises = lns_apply(logic, mv.rule, cur, mv.sel);
      std::vector<Deriv> subs;
      bool all = true;
      for (const auto& p : premises) {
        std::vector<std::string> fresh;
        auto sub = solve(p, entry_hist, fresh);
        if (!sub) {
          all = false;
          break;
        }
        subs.push_back(std::move(*sub));
      }
      if (all) found = Deriv{cur, mv.rule, mv.sel, std::move(subs)};
      if (meter.out) return std::nullopt;
    }
    if (!found) return std::nullopt;
    Deriv out = std::move(*found);
    for (auto it = chain.rbegin(); it != chain.rend(); ++it)
      out = Deriv{it->second, it->first.rule, it->first.sel, {std::move(out)}};
    return out;
  }
};

}  // namespace

SearchResult<LinearNested> lns_prove(const LogicSpec& logic, const LinearNested& goal,
                                     Budget budget) {
  for (const auto& sep : goal.seps)
    if (sep.kind == SepKind::BlockedSep)
      throw std::invalid_argument("initial goals must not contain a blocked separator");
  for (const auto& c : goal.components)
    if (c.is_pair && logic.kind != LogicKind::NonNormalE && logic.kind != LogicKind::NonNormalM)
      throw std::invalid_argument("pair components exist only for E and M");
  LinearNested start = goal;
  for (auto& c : start.components) {
    c.seq = c.seq.contracted();
    c.right = c.right.contracted();
  }
  LnsProver prover(logic, budget);
  std::vector<std::string> entry_hist, comp_hist;
  if (!start.components.empty() && !start.last().is_pair)
    entry_hist.push_back(sequent_key(start.last().seq));
  SearchResult<LinearNested> out;
  auto d = prover.solve(start, entry_hist, comp_hist);
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

CheckResult lns_check_node(const LogicSpec& logic, const Derivation<LinearNested>& d,
                           std::vector<int>& path) {
  std::vector<LinearNested> premises;
  try {
    premises = lns_apply(logic, d.rule, d.conclusion, d.selection);
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
    auto sub = lns_check_node(logic, d.premises[i], path);
    if (!sub.ok) return sub;
    path.pop_back();
  }
  return {};
}

}  // namespace

CheckResult lns_check(const LogicSpec& logic, const Derivation<LinearNested>& d) {
  std::vector<int> path;
  return lns_check_node(logic, d, path);
}

// ---------------------------------------------------------------------------
// Linearisation of nested proofs

namespace {

int find_occ(const FormulaSet& side, const Formula& f) {
  auto it = std::lower_bound(side.begin(), side.end(), f);
  if (it == side.end() || !(*it == f)) throw std::invalid_argument("formula not found");
  return static_cast<int>(it - side.begin());
}

struct PendingBlock {
  std::string creation_rule;
  Formula principal;
  bool monotonised = false;
  std::vector<std::pair<std::string, Formula>> lifts;  // rule name, lifted formula
};

struct Lineariser {
  const LogicSpec& logic;
  RuleTable table;

  using NsDeriv = Derivation<NestedSequent>;
  using LnsDeriv = Derivation<LinearNested>;
  using Step = std::pair<std::pair<std::string, Selection>, LinearNested>;

  explicit Lineariser(const LogicSpec& l) : logic(l), table(ns_rule_table(l)) {}

  static std::string block_key(const Position& p, int ordinal) {
    return p.to_string() + "#" + std::to_string(ordinal);
  }

  static LnsDeriv fold(std::vector<Step>& chain, LnsDeriv tail) {
    LnsDeriv out = std::move(tail);
    for (auto it = chain.rbegin(); it != chain.rend(); ++it)
      out = LnsDeriv{it->second, it->first.first, it->first.second, {std::move(out)}};
    return out;
  }

  LnsDeriv walk(const NsDeriv& d, LinearNested line, Position active,
                std::map<std::string, PendingBlock> pending) {
    const RuleInfo* info = table.find(d.rule);
    if (!info) throw std::invalid_argument("unknown nested rule " + d.rule);
    const Position& p = d.selection.at;
    const NestedSequent* node = node_at(d.conclusion, p);
    if (!node) throw std::invalid_argument("bad rule position");

    std::vector<Step> chain;
    auto push_step = [&](std::string rule, Selection sel) {
      auto premises = lns_apply(logic, rule, line, sel);
      chain.push_back({{std::move(rule), std::move(sel)}, line});
      line = premises.at(0);
    };

    // Descend: emit the pending block of each nesting on the way to p.
    while (active != p) {
      if (position_order(active, p) != PositionOrder::Below)
        throw std::invalid_argument("rule addressed outside the active path");
      int ordinal = p.path[active.path.size()];
      auto it = pending.find(block_key(active, ordinal));
      if (it == pending.end())
        throw std::invalid_argument("descent into a nesting that was never created");
      PendingBlock blk = it->second;
      pending.erase(it);
      Selection csel;
      if (blk.creation_rule.rfind("d_", 0) == 0)
        csel.left = find_occ(line.last().seq.ante, blk.principal);
      else
        csel.right = find_occ(line.last().seq.succ, blk.principal);
      push_step(blk.creation_rule, csel);
      for (const auto& [lrule, lf] : blk.lifts) {
        Selection lsel;
        lsel.left = find_occ(line.components[line.components.size() - 2].seq.ante, lf);
        push_step(lrule, lsel);
      }
      push_step("close", {});
      active = active.extended(ordinal);
    }

    switch (info->phase) {
      case Phase::AxiomRule: {
        if (line.block_open()) push_step("close", {});
        Selection sel;
        if (d.rule == "init") {
          sel.left = find_occ(line.last().seq.ante, node->ante[d.selection.left]);
          sel.right = find_occ(line.last().seq.succ, node->succ[d.selection.right]);
        } else {
          sel.left = find_occ(line.last().seq.ante, node->ante[d.selection.left]);
        }
        return fold(chain, LnsDeriv{line, d.rule, sel, {}});
      }
      case Phase::Local: {
        // Propositional or t rule on the active component.
        Selection sel;
        if (d.selection.left >= 0)
          sel.left = find_occ(line.last().seq.ante, node->ante[d.selection.left]);
        if (d.selection.right >= 0)
          sel.right = find_occ(line.last().seq.succ, node->succ[d.selection.right]);
        auto premises = lns_apply(logic, d.rule, line, sel);
        if (premises.size() != d.premises.size())
          throw std::invalid_argument("premise mismatch in linearise");
        std::vector<LnsDeriv> subs;
        for (size_t i = 0; i < premises.size(); i++)
          subs.push_back(walk(d.premises[i], premises[i], active, pending));
        return fold(chain, LnsDeriv{line, d.rule, sel, std::move(subs)});
      }
      case Phase::MarkedLocal: {
        // Monotonisation is replayed when the pair is consumed.
        auto it = pending.find(block_key(p, d.selection.child + 1));
        if (it == pending.end())
          throw std::invalid_argument("monotonisation of an unknown pair");
        it->second.monotonised = true;
        return fold(chain, walk(d.premises.at(0), line, active, pending));
      }
      case Phase::Nesting: {
        const NestedSequent* after = node_at(d.premises.at(0).conclusion, p);
        int ordinal = static_cast<int>(after->children.size());
        PendingBlock blk;
        blk.creation_rule = d.rule;
        blk.principal = d.rule.rfind("d_", 0) == 0 ? node->ante[d.selection.left]
                                                   : node->succ[d.selection.right];
        pending[block_key(p, ordinal)] = std::move(blk);
        return fold(chain, walk(d.premises.at(0), line, active, pending));
      }
      case Phase::Lift: {
        if (d.rule == "box_l_e") {
          auto it = pending.find(block_key(p, d.selection.child + 1));
          if (it == pending.end())
            throw std::invalid_argument("consuming a pair that was never created");
          PendingBlock blk = it->second;
          pending.erase(it);
          Selection csel;
          csel.right = find_occ(line.last().seq.succ, blk.principal);
          push_step("box_r_e", csel);
          if (blk.monotonised) push_step("m", {});
          Selection sel;
          sel.left = find_occ(line.components[line.components.size() - 2].seq.ante,
                              node->ante[d.selection.left]);
          auto premises = lns_apply(logic, "box_l_e", line, sel);
          Position deeper = p.extended(d.selection.child + 1);
          std::vector<LnsDeriv> subs;
          for (size_t i = 0; i < premises.size(); i++)
            subs.push_back(walk(d.premises[i], premises[i], deeper, pending));
          return fold(chain, LnsDeriv{line, "box_l_e", sel, std::move(subs)});
        }
        // lift / box_l_ij / four_ij: replayed when the target block is emitted.
        auto it = pending.find(block_key(p, d.selection.child + 1));
        if (it == pending.end())
          throw std::invalid_argument("lift into a nesting that was never created");
        it->second.lifts.push_back({d.rule, node->ante[d.selection.left]});
        return fold(chain, walk(d.premises.at(0), line, active, pending));
      }
    }
    throw std::logic_error("unreachable");
  }
};

}  // namespace

Derivation<LinearNested> linearise(const LogicSpec& logic, const Derivation<NestedSequent>& d) {
  auto pc = phase_check(logic, d);
  if (!pc.ok) throw std::invalid_argument("input fails phase_check: " + pc.message);
  if (!d.conclusion.flat()) throw std::invalid_argument("linearise expects a flat endpoint");
  Lineariser lin(logic);
  return lin.walk(d, line_of(d.conclusion.top().contracted()), {}, {});
}

// ---------------------------------------------------------------------------
// Collapsing blocks into sequent macro rules

namespace {

struct Collapser {
  const LogicSpec& logic;

  using LnsDeriv = Derivation<LinearNested>;
  using ScDeriv = Derivation<Sequent>;

  [[noreturn]] static void malformed(const std::string& why) {
    throw std::invalid_argument("malformed block: " + why);
  }

  ScDeriv collapse(const LnsDeriv& d) {
    const Sequent conclusion = d.conclusion.last().is_pair ? Sequent{} : d.conclusion.last().seq;
    if (d.conclusion.last().is_pair) malformed("derivation starts inside a pair");

    if (d.rule == "close" || d.rule == "lift" || d.rule.rfind("box_l_", 0) == 0 ||
        d.rule.rfind("four_", 0) == 0 || d.rule == "m")
      malformed("block-interior rule outside a block");

    const bool creation =
        (logic.kind == LogicKind::Intuitionistic && d.rule == "imp_r") ||
        (logic.kind == LogicKind::Multimodal &&
         (d.rule.rfind("box_r_", 0) == 0 || d.rule.rfind("d_", 0) == 0)) ||
        d.rule == "box_r_e";
    if (!creation) {
      // Propositional rules and axioms coincide with the sequent rules.
      std::vector<ScDeriv> subs;
      for (const auto& p : d.premises) subs.push_back(collapse(p));
      ScDeriv out{conclusion, d.rule, d.selection, std::move(subs)};
      auto premises = sc_apply(logic, d.rule, conclusion, d.selection);
      if (premises.size() != out.premises.size()) malformed("premise count for " + d.rule);
      for (size_t i = 0; i < premises.size(); i++)
        if (!(premises[i] == out.premises[i].conclusion))
          malformed("sequent premise mismatch under " + d.rule);
      return out;
    }

    if (d.rule == "box_r_e") return collapse_pair_block(d, conclusion);

    // Scan creation, lifts, close.
    const LnsDeriv* cur = &d.premises.at(0);
    while (cur->rule == "lift" || cur->rule.rfind("box_l_", 0) == 0 ||
           cur->rule.rfind("four_", 0) == 0)
      cur = &cur->premises.at(0);
    if (cur->rule != "close") malformed("expected close, found " + cur->rule);
    const LnsDeriv& next = cur->premises.at(0);

    std::string macro;
    Selection sel;
    if (d.rule == "imp_r") {
      macro = "imp_r";
      sel.right = d.selection.right;
    } else if (d.rule.rfind("box_r_", 0) == 0) {
      macro = "k_" + d.rule.substr(6);
      sel.right = d.selection.right;
    } else {
      auto [i, j] = rule_indices(d.rule, 2);
      (void)i;
      macro = "d_" + std::to_string(j);
      sel.index_i = j;
    }
    auto premises = sc_apply(logic, macro, conclusion, sel);
    if (premises.size() != 1) malformed("macro arity");
    if (!(premises[0] == next.conclusion.last().seq))
      malformed("the block does not emulate " + macro + " (incomplete lifting?)");
    return ScDeriv{conclusion, macro, sel, {collapse(next)}};
  }

  ScDeriv collapse_pair_block(const LnsDeriv& d, const Sequent& conclusion) {
    const LnsDeriv* cur = &d.premises.at(0);
    bool mono = false;
    while (cur->rule == "m") {
      mono = true;
      cur = &cur->premises.at(0);
    }
    if (cur->rule != "box_l_e") malformed("expected box_l_e, found " + cur->rule);
    std::string macro = logic.kind == LogicKind::NonNormalE ? "e" : "m";
    if (logic.kind == LogicKind::NonNormalM && !mono)
      mono = true;  // the monotonisation step is optional in a proof
    Selection sel;
    sel.left = cur->selection.left;
    sel.right = d.selection.right;
    auto premises = sc_apply(logic, macro, conclusion, sel);
    std::vector<ScDeriv> subs;
    subs.push_back(collapse(cur->premises.at(0)));
    if (macro == "e") {
      subs.push_back(collapse(cur->premises.at(1)));
    } else {
      // The second branch must be the trivial bottom closure.
      const LnsDeriv& discarded = cur->premises.at(1);
      if (discarded.rule != "bot_l" || !discarded.premises.empty())
        malformed("the monotone branch must close by bottom");
    }
    if (premises.size() != subs.size()) malformed("macro arity");
    for (size_t i = 0; i < premises.size(); i++)
      if (!(premises[i] == subs[i].conclusion))
        malformed("sequent premise mismatch under " + macro);
    return ScDeriv{conclusion, macro, sel, std::move(subs)};
  }
};

}  // namespace

Derivation<Sequent> collapse_blocks(const LogicSpec& logic, const Derivation<LinearNested>& d) {
  Collapser c{logic};
  return c.collapse(d);
}

}  // namespace nsq
