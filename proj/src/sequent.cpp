#include "nsq/sequent.hpp"

namespace nsq {

void ms_insert(FormulaSet& ms, const Formula& f) {
  ms.insert(std::upper_bound(ms.begin(), ms.end(), f), f);
}

void ms_insert_new(FormulaSet& ms, const Formula& f) {
  auto it = std::lower_bound(ms.begin(), ms.end(), f);
  if (it != ms.end() && *it == f) return;
  ms.insert(it, f);
}

bool ms_erase_one(FormulaSet& ms, const Formula& f) {
  auto it = std::lower_bound(ms.begin(), ms.end(), f);
  if (it == ms.end() || !(*it == f)) return false;
  ms.erase(it);
  return true;
}

bool ms_contains(const FormulaSet& ms, const Formula& f) {
  auto it = std::lower_bound(ms.begin(), ms.end(), f);
  return it != ms.end() && *it == f;
}

FormulaSet ms_dedup(const FormulaSet& ms) {
  FormulaSet out;
  out.reserve(ms.size());
  for (const auto& f : ms)
    if (out.empty() || !(out.back() == f)) out.push_back(f);
  return out;
}

void ms_sort(FormulaSet& ms) { std::sort(ms.begin(), ms.end()); }

Sequent parse_sequent(std::string_view text) {
  size_t bar = text.find("|-");
  if (bar == std::string_view::npos) throw ParseError("expected '|-'", 0);
  auto parse_side = [](std::string_view side, size_t offset) {
    FormulaSet out;
    size_t start = 0;
    int depth = 0;
    auto flush = [&](size_t end) {
      std::string_view piece = side.substr(start, end - start);
      size_t a = piece.find_first_not_of(" \t");
      if (a == std::string_view::npos) {
        if (!out.empty()) throw ParseError("empty formula in sequent", offset + start);
        return;
      }
      out.push_back(parse_formula(piece));
    };
    for (size_t i = 0; i < side.size(); i++) {
      char c = side[i];
      if (c == '(' || c == '[') depth++;
      if (c == ')' || c == ']') depth--;
      if (c == ',' && depth == 0) {
        flush(i);
        start = i + 1;
      }
    }
    size_t a = side.find_first_not_of(" \t");
    if (a != std::string_view::npos || !out.empty()) flush(side.size());
    ms_sort(out);
    return out;
  };
  Sequent s;
  s.ante = parse_side(text.substr(0, bar), 0);
  s.succ = parse_side(text.substr(bar + 2), bar + 2);
  return s;
}

std::string render_sequent(const Sequent& s) {
  std::string out;
  for (size_t i = 0; i < s.ante.size(); i++) {
    if (i) out += ", ";
    out += render_formula(s.ante[i]);
  }
  if (!s.ante.empty()) out += " ";
  out += "|-";
  for (size_t i = 0; i < s.succ.size(); i++) {
    out += i ? ", " : " ";
    out += render_formula(s.succ[i]);
  }
  return out;
}

std::string sequent_key(const Sequent& s) {
  return render_sequent(s.contracted());
}

}  // namespace nsq
