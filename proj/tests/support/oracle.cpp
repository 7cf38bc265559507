#include "support/oracle.hpp"

#include <algorithm>

namespace oracle {

using nsq::Conn;
using nsq::LogicKind;

namespace {

bool has(const std::vector<Formula>& v, const Formula& f) {
  return std::find(v.begin(), v.end(), f) != v.end();
}

std::vector<Formula> minus(std::vector<Formula> v, size_t i) {
  v.erase(v.begin() + static_cast<long>(i));
  return v;
}

std::vector<Formula> plus(std::vector<Formula> v, const Formula& f) {
  v.push_back(f);
  return v;
}

bool prove(const nsq::LogicSpec& logic, const Goal& g, int depth) {
  for (const auto& f : g.ante) {
    if (f.is_bottom()) return true;
    if (f.is_atom() && has(g.succ, f)) return true;
  }
  if (depth == 0) return false;
  const bool classical = logic.kind != LogicKind::Intuitionistic;
  int d = depth - 1;

  for (size_t i = 0; i < g.ante.size(); i++) {
    const Formula& f = g.ante[i];
    switch (f.tag()) {
      case Conn::And:
        if (prove(logic, {plus(plus(minus(g.ante, i), f.left()), f.right()), g.succ}, d)) return true;
        break;
      case Conn::Or:
        if (prove(logic, {plus(minus(g.ante, i), f.left()), g.succ}, d) &&
            prove(logic, {plus(minus(g.ante, i), f.right()), g.succ}, d))
          return true;
        break;
      case Conn::Imp:
        if (prove(logic, {g.ante, plus(g.succ, f.left())}, d) &&
            prove(logic, {plus(minus(g.ante, i), f.right()), g.succ}, d))
          return true;
        break;
      case Conn::Box:
        if (logic.kind == LogicKind::Multimodal && logic.desc.has_t(f.box_index()))
          if (!has(g.ante, f.body()) &&
              prove(logic, {plus(g.ante, f.body()), g.succ}, d))
            return true;
        break;
      default:
        break;
    }
  }
  for (size_t i = 0; i < g.succ.size(); i++) {
    const Formula& f = g.succ[i];
    switch (f.tag()) {
      case Conn::And:
        if (prove(logic, {g.ante, plus(minus(g.succ, i), f.left())}, d) &&
            prove(logic, {g.ante, plus(minus(g.succ, i), f.right())}, d))
          return true;
        break;
      case Conn::Or:
        if (prove(logic, {g.ante, plus(plus(minus(g.succ, i), f.left()), f.right())}, d)) return true;
        break;
      case Conn::Imp:
        if (classical) {
          if (prove(logic, {plus(g.ante, f.left()), plus(minus(g.succ, i), f.right())}, d)) return true;
        } else {
          if (prove(logic, {plus(g.ante, f.left()), {f.right()}}, d)) return true;
        }
        break;
      case Conn::Box: {
        if (logic.kind == LogicKind::Multimodal) {
          int bi = f.box_index();
          Goal next;
          next.succ = {f.body()};
          for (const auto& a : g.ante) {
            if (!a.is_box()) continue;
            if (!logic.desc.leq(bi, a.box_index())) continue;
            next.ante.push_back(a.body());
            if (logic.desc.has_4(a.box_index())) next.ante.push_back(a);
          }
          if (prove(logic, next, d)) return true;
        } else if (logic.kind == LogicKind::NonNormalE || logic.kind == LogicKind::NonNormalM) {
          for (const auto& a : g.ante) {
            if (!a.is_box()) continue;
            bool fwd = prove(logic, {{a.body()}, {f.body()}}, d);
            if (!fwd) continue;
            if (logic.kind == LogicKind::NonNormalM) return true;
            if (prove(logic, {{f.body()}, {a.body()}}, d)) return true;
          }
        }
        break;
      }
      default:
        break;
    }
  }
  // Seriality steps (multimodal only): jump to a fresh serial successor.
  if (logic.kind == LogicKind::Multimodal) {
    for (int i : logic.desc.indices) {
      if (!logic.desc.has_d(i)) continue;
      Goal next;
      for (const auto& a : g.ante) {
        if (!a.is_box()) continue;
        if (!logic.desc.leq(i, a.box_index())) continue;
        next.ante.push_back(a.body());
        if (logic.desc.has_4(a.box_index())) next.ante.push_back(a);
      }
      if (!next.ante.empty() && prove(logic, next, d)) return true;
    }
  }
  return false;
}

}  // namespace

bool provable_within(const nsq::LogicSpec& logic, const Goal& g, int depth) {
  return prove(logic, g, depth);
}

}  // namespace oracle
