#include "nsq/logic.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace nsq {

std::string axiom_name(Axiom a) {
  switch (a) {
    case Axiom::D: return "D";
    case Axiom::T: return "T";
    case Axiom::Four: return "4";
  }
  return "?";
}

std::optional<Axiom> axiom_from_name(std::string_view s) {
  if (s == "D" || s == "d") return Axiom::D;
  if (s == "T" || s == "t") return Axiom::T;
  if (s == "4") return Axiom::Four;
  return std::nullopt;
}

bool Description::has_index(int i) const {
  return std::binary_search(indices.begin(), indices.end(), i);
}

bool Description::leq(int j, int i) const {
  if (j == i) return has_index(i);
  return order.count({j, i}) > 0;
}

static bool below_has(const Description& d, int i, Axiom a) {
  for (int j : d.indices) {
    if (!d.leq(j, i)) continue;
    auto it = d.axioms.find(j);
    if (it != d.axioms.end() && it->second.count(a)) return true;
  }
  return false;
}

bool Description::has_d(int i) const { return below_has(*this, i, Axiom::D) || below_has(*this, i, Axiom::T); }
bool Description::has_t(int i) const { return below_has(*this, i, Axiom::T); }

bool Description::has_4(int i) const {
  auto it = axioms.find(i);
  return it != axioms.end() && it->second.count(Axiom::Four) > 0;
}

std::vector<int> upset(const Description& d, int j, UpsetFilter filter, Axiom a) {
  if (!d.has_index(j)) throw std::invalid_argument("unknown index " + std::to_string(j));
  std::vector<int> out;
  for (int i : d.indices) {
    if (!d.leq(j, i)) continue;
    bool has = false;
    auto it = d.axioms.find(i);
    if (it != d.axioms.end()) has = it->second.count(a) > 0;
    if (filter == UpsetFilter::All || (filter == UpsetFilter::Ax && has) ||
        (filter == UpsetFilter::NotAx && !has))
      out.push_back(i);
  }
  return out;
}

std::string Violation::to_string() const {
  return condition + " fails at (" + std::to_string(j) + ", " + std::to_string(i) + ")";
}

std::string ValidationReport::to_string() const {
  if (ok()) return "ok";
  std::string out;
  for (const auto& v : violations) {
    if (!out.empty()) out += "; ";
    out += v.to_string();
  }
  return out;
}

ValidationReport validate_description(const Description& d) {
  ValidationReport r;
  for (const auto& [j, i] : d.order) {
    if (!d.has_index(j)) r.violations.push_back({"unknown-index", j, j});
    if (!d.has_index(i)) r.violations.push_back({"unknown-index", i, i});
  }
  for (const auto& [k, _] : d.axioms)
    if (!d.has_index(k)) r.violations.push_back({"unknown-index", k, k});
  if (!r.ok()) return r;
  // Antisymmetry.
  for (const auto& [j, i] : d.order)
    if (j != i && d.order.count({i, j})) {
      if (j < i) r.violations.push_back({"antisymmetry", i, j});
    }
  // Transitivity of the given pairs.
  for (const auto& [j, i] : d.order)
    for (const auto& [j2, i2] : d.order)
      if (i == j2 && j != i2 && !d.leq(j, i2))
        r.violations.push_back({"transitivity", i2, j});
  // Transitive-closedness: j <= i and 4 in F(j) requires 4 in F(i).
  for (int j : d.indices) {
    if (!d.has_4(j)) continue;
    for (int i : d.indices)
      if (d.leq(j, i) && !d.has_4(i)) r.violations.push_back({"transitive-closed", i, j});
  }
  return r;
}

LogicSpec LogicSpec::multimodal(Description d) {
  std::sort(d.indices.begin(), d.indices.end());
  d.indices.erase(std::unique(d.indices.begin(), d.indices.end()), d.indices.end());
  auto report = validate_description(d);
  if (!report.ok()) throw std::invalid_argument("invalid description: " + report.to_string());
  if (d.indices.empty()) throw std::invalid_argument("invalid description: empty index set");
  return {LogicKind::Multimodal, std::move(d)};
}

std::string LogicSpec::id() const {
  switch (kind) {
    case LogicKind::Intuitionistic: return "mlj";
    case LogicKind::NonNormalE: return "e";
    case LogicKind::NonNormalM: return "m";
    case LogicKind::Multimodal: break;
  }
  if (desc.indices == std::vector<int>{1, 2}) {
    bool no_axioms = true;
    for (const auto& [i, ax] : desc.axioms) no_axioms = no_axioms && ax.empty();
    std::set<std::pair<int, int>> strict;
    for (auto [j, i] : desc.order)
      if (j != i) strict.insert({j, i});
    if (no_axioms && strict == std::set<std::pair<int, int>>{{1, 2}}) return "bimodal";
  }
  if (desc.indices == std::vector<int>{1}) {
    auto it = desc.axioms.find(1);
    std::set<Axiom> ax = it == desc.axioms.end() ? std::set<Axiom>{} : it->second;
    if (ax.empty()) return "k";
    if (ax == std::set<Axiom>{Axiom::D}) return "kd";
    if (ax == std::set<Axiom>{Axiom::T}) return "kt";
    if (ax == std::set<Axiom>{Axiom::Four}) return "k4";
    if (ax == std::set<Axiom>{Axiom::T, Axiom::Four}) return "s4";
    if (ax == std::set<Axiom>{Axiom::D, Axiom::Four}) return "kd4";
  }
  return "desc";
}

LogicSpec preset_logic(const std::string& name) {
  Description d;
  d.indices = {1};
  auto single = [&](std::set<Axiom> ax) {
    d.axioms[1] = std::move(ax);
    return LogicSpec::multimodal(d);
  };
  if (name == "k") return single({});
  if (name == "kd") return single({Axiom::D});
  if (name == "kt") return single({Axiom::T});
  if (name == "k4") return single({Axiom::Four});
  if (name == "s4") return single({Axiom::T, Axiom::Four});
  if (name == "kd4") return single({Axiom::D, Axiom::Four});
  if (name == "bimodal") {
    Description b;
    b.indices = {1, 2};
    b.order.insert({1, 2});
    return LogicSpec::multimodal(b);
  }
  throw std::invalid_argument("unknown preset '" + name + "'");
}

std::vector<std::string> preset_names() {
  return {"k", "kd", "kt", "k4", "s4", "kd4", "bimodal"};
}

Description parse_description(std::string_view text) {
  Description d;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    lineno++;
    size_t h = line.find('#');
    if (h != std::string::npos) line = line.substr(0, h);
    size_t a = line.find_first_not_of(" \t\r");
    if (a == std::string::npos) continue;
    size_t colon = line.find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("description line " + std::to_string(lineno) + ": expected 'key: values'");
    std::string key = line.substr(a, colon - a);
    while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
    std::string rest = line.substr(colon + 1);
    if (key == "indices") {
      std::istringstream vs(rest);
      int i;
      while (vs >> i) d.indices.push_back(i);
    } else if (key == "order") {
      std::istringstream vs(rest);
      std::string piece;
      while (std::getline(vs, piece, ',')) {
        std::istringstream ps(piece);
        int j, i;
        std::string op;
        if (!(ps >> j >> op >> i) || op != "<=")
          throw std::invalid_argument("description line " + std::to_string(lineno) + ": expected 'j <= i'");
        d.order.insert({j, i});
      }
    } else if (key.rfind("axioms", 0) == 0) {
      std::istringstream ks(key.substr(6));
      int i;
      if (!(ks >> i))
        throw std::invalid_argument("description line " + std::to_string(lineno) + ": expected 'axioms <index>:'");
      std::istringstream vs(rest);
      std::string ax;
      while (vs >> ax) {
        auto parsed = axiom_from_name(ax);
        if (!parsed)
          throw std::invalid_argument("description line " + std::to_string(lineno) + ": unknown axiom '" + ax + "'");
        d.axioms[i].insert(*parsed);
      }
    } else {
      throw std::invalid_argument("description line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  std::sort(d.indices.begin(), d.indices.end());
  d.indices.erase(std::unique(d.indices.begin(), d.indices.end()), d.indices.end());
  return d;
}

std::string render_description(const Description& d) {
  std::string out = "indices:";
  for (int i : d.indices) out += " " + std::to_string(i);
  out += "\n";
  bool first = true;
  for (const auto& [j, i] : d.order) {
    if (j == i) continue;
    out += first ? "order: " : ", ";
    out += std::to_string(j) + " <= " + std::to_string(i);
    first = false;
  }
  if (!first) out += "\n";
  for (const auto& [i, ax] : d.axioms) {
    if (ax.empty()) continue;
    out += "axioms " + std::to_string(i) + ":";
    for (Axiom a : ax) out += " " + axiom_name(a);
    out += "\n";
  }
  return out;
}

std::optional<int> find_unknown_index(const LogicSpec& logic, const Formula& f) {
  std::vector<int> idx;
  f.collect_box_indices(idx);
  for (int i : idx) {
    switch (logic.kind) {
      case LogicKind::Intuitionistic:
        return i;  // boxes are not part of the intuitionistic language
      case LogicKind::NonNormalE:
      case LogicKind::NonNormalM:
        if (i != 1) return i;
        break;
      case LogicKind::Multimodal:
        if (!logic.desc.has_index(i)) return i;
        break;
    }
  }
  return std::nullopt;
}

}  // namespace nsq
