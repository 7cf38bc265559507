#include "nsq/semantics.hpp"

#include <algorithm>
#include <stdexcept>

namespace nsq {

namespace {

void collect_atoms(const Formula& f, std::set<std::string>& out) {
  switch (f.tag()) {
    case Conn::Atom: out.insert(f.atom_name()); return;
    case Conn::Bottom: return;
    case Conn::Box: collect_atoms(f.body(), out); return;
    default:
      collect_atoms(f.left(), out);
      collect_atoms(f.right(), out);
  }
}

int popcount(uint32_t x) { return __builtin_popcount(x); }

}  // namespace

bool eval(const KripkeModel& m, int world, const Formula& f, EvalMode mode) {
  if (mode != EvalMode::Int && mode != EvalMode::Multi)
    throw std::invalid_argument("Kripke model used with a neighbourhood mode");
  switch (f.tag()) {
    case Conn::Atom: return m.holds_atom(f.atom_name(), world);
    case Conn::Bottom: return false;
    case Conn::And: return eval(m, world, f.left(), mode) && eval(m, world, f.right(), mode);
    case Conn::Or: return eval(m, world, f.left(), mode) || eval(m, world, f.right(), mode);
    case Conn::Imp:
      if (mode == EvalMode::Multi)
        return !eval(m, world, f.left(), mode) || eval(m, world, f.right(), mode);
      // Intuitionistic implication quantifies over <=-successors.
      for (int v = 0; v < m.world_count; v++)
        if (m.related(0, world, v) && eval(m, v, f.left(), mode) && !eval(m, v, f.right(), mode))
          return false;
      return true;
    case Conn::Box: {
      if (mode != EvalMode::Multi) throw std::invalid_argument("box in an intuitionistic model");
      for (int v = 0; v < m.world_count; v++)
        if (m.related(f.box_index(), world, v) && !eval(m, v, f.body(), mode)) return false;
      return true;
    }
  }
  return false;
}

bool eval(const NeighbourhoodModel& m, int world, const Formula& f, EvalMode mode) {
  if (mode != EvalMode::NbrE && mode != EvalMode::NbrM)
    throw std::invalid_argument("neighbourhood model used with a Kripke mode");
  switch (f.tag()) {
    case Conn::Atom: return m.holds_atom(f.atom_name(), world);
    case Conn::Bottom: return false;
    case Conn::And: return eval(m, world, f.left(), mode) && eval(m, world, f.right(), mode);
    case Conn::Or: return eval(m, world, f.left(), mode) || eval(m, world, f.right(), mode);
    case Conn::Imp: return !eval(m, world, f.left(), mode) || eval(m, world, f.right(), mode);
    case Conn::Box: {
      for (uint32_t X : m.nbr[world]) {
        bool forces_all = true;  // X ||-forall A
        for (int x = 0; x < m.world_count && forces_all; x++)
          if ((X >> x) & 1) forces_all = eval(m, x, f.body(), mode);
        if (!forces_all) continue;
        if (mode == EvalMode::NbrM) return true;
        bool covers = true;  // A <| X: every A-world lies in X
        for (int y = 0; y < m.world_count && covers; y++)
          if (eval(m, y, f.body(), mode) && !((X >> y) & 1)) covers = false;
        if (covers) return true;
      }
      return false;
    }
  }
  return false;
}

FrameCheck check_frame(const KripkeModel& m, const LogicSpec& logic) {
  auto serial = [&](int i) {
    for (int w = 0; w < m.world_count; w++) {
      bool found = false;
      for (int v = 0; v < m.world_count && !found; v++) found = m.related(i, w, v);
      if (!found) return false;
    }
    return true;
  };
  auto reflexive = [&](int i) {
    for (int w = 0; w < m.world_count; w++)
      if (!m.related(i, w, w)) return false;
    return true;
  };
  auto transitive = [&](int i) {
    for (int w = 0; w < m.world_count; w++)
      for (int v = 0; v < m.world_count; v++)
        for (int u = 0; u < m.world_count; u++)
          if (m.related(i, w, v) && m.related(i, v, u) && !m.related(i, w, u)) return false;
    return true;
  };
  switch (logic.kind) {
    case LogicKind::Intuitionistic: {
      if (!reflexive(0)) return {false, "reflexivity"};
      if (!transitive(0)) return {false, "transitivity"};
      for (const auto& [atom, worlds] : m.valuation)
        for (int w : worlds)
          for (int v = 0; v < m.world_count; v++)
            if (m.related(0, w, v) && !worlds.count(v)) return {false, "persistence"};
      return {};
    }
    case LogicKind::Multimodal: {
      const Description& d = logic.desc;
      for (int i : d.indices) {
        if (d.has_t(i) && !reflexive(i)) return {false, "reflexivity at index " + std::to_string(i)};
        if (d.has_d(i) && !serial(i)) return {false, "seriality at index " + std::to_string(i)};
        if (d.has_4(i) && !transitive(i)) return {false, "transitivity at index " + std::to_string(i)};
      }
      for (int j : d.indices)
        for (int i : d.indices) {
          if (j == i || !d.leq(j, i)) continue;
          for (int w = 0; w < m.world_count; w++)
            for (int v = 0; v < m.world_count; v++)
              if (m.related(j, w, v) && !m.related(i, w, v))
                return {false, "inclusion R" + std::to_string(j) + " in R" + std::to_string(i)};
        }
      return {};
    }
    default:
      return {false, "Kripke model for a neighbourhood logic"};
  }
}

FrameCheck check_frame(const NeighbourhoodModel& m, const LogicSpec& logic) {
  if (logic.kind != LogicKind::NonNormalE && logic.kind != LogicKind::NonNormalM)
    return {false, "neighbourhood model for a relational logic"};
  if (logic.kind == LogicKind::NonNormalM) {
    uint32_t full = (1u << m.world_count) - 1;
    for (int w = 0; w < m.world_count; w++)
      for (uint32_t X : m.nbr[w])
        for (uint32_t Y = 0; Y <= full; Y++)
          if ((X & Y) == X && std::find(m.nbr[w].begin(), m.nbr[w].end(), Y) == m.nbr[w].end())
            return {false, "supplementation"};
  }
  return {};
}

// ---------------------------------------------------------------------------
// Exhaustive bounded enumeration

namespace {

std::set<std::pair<int, int>> mask_to_rel(uint32_t mask, int n) {
  std::set<std::pair<int, int>> out;
  for (int w = 0; w < n; w++)
    for (int v = 0; v < n; v++)
      if ((mask >> (w * n + v)) & 1) out.insert({w, v});
  return out;
}

bool mask_reflexive(uint32_t mask, int n) {
  for (int w = 0; w < n; w++)
    if (!((mask >> (w * n + w)) & 1)) return false;
  return true;
}

bool mask_transitive(uint32_t mask, int n) {
  auto rel = [&](int w, int v) { return (mask >> (w * n + v)) & 1; };
  for (int w = 0; w < n; w++)
    for (int v = 0; v < n; v++)
      for (int u = 0; u < n; u++)
        if (rel(w, v) && rel(v, u) && !rel(w, u)) return false;
  return true;
}

bool mask_serial(uint32_t mask, int n) {
  for (int w = 0; w < n; w++) {
    uint32_t row = (mask >> (w * n)) & ((1u << n) - 1);
    if (row == 0) return false;
  }
  return true;
}

std::vector<uint32_t> sorted_masks(int bits) {
  std::vector<uint32_t> out;
  out.reserve(1u << bits);
  for (uint32_t m = 0; m < (1u << bits); m++) out.push_back(m);
  std::stable_sort(out.begin(), out.end(),
                   [](uint32_t a, uint32_t b) { return popcount(a) < popcount(b); });
  return out;
}

// Valuation combos for the given atoms, ordered by total bits.
struct ValuationEnum {
  std::vector<std::string> atoms;
  std::vector<std::vector<uint32_t>> choices;  // per atom, admissible world masks

  template <typename F>
  bool for_each(F&& fn) const {
    std::vector<size_t> combo(atoms.size(), 0);
    std::vector<std::pair<int, std::vector<size_t>>> all;
    size_t total = 1;
    for (const auto& c : choices) total *= c.size();
    all.reserve(total);
    for (size_t k = 0; k < total; k++) {
      size_t rest = k;
      int bits = 0;
      std::vector<size_t> pick(atoms.size());
      for (size_t a = 0; a < atoms.size(); a++) {
        pick[a] = rest % choices[a].size();
        rest /= choices[a].size();
        bits += popcount(choices[a][pick[a]]);
      }
      all.push_back({bits, std::move(pick)});
    }
    std::stable_sort(all.begin(), all.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [bits, pick] : all)
      if (fn(pick)) return true;
    return false;
  }
};

std::map<std::string, std::set<int>> make_valuation(const std::vector<std::string>& atoms,
                                                    const std::vector<std::vector<uint32_t>>& choices,
                                                    const std::vector<size_t>& pick, int n) {
  std::map<std::string, std::set<int>> val;
  for (size_t a = 0; a < atoms.size(); a++) {
    std::set<int> worlds;
    for (int w = 0; w < n; w++)
      if ((choices[a][pick[a]] >> w) & 1) worlds.insert(w);
    val[atoms[a]] = std::move(worlds);
  }
  return val;
}

std::optional<CounterModel> search_kripke(const LogicSpec& logic, const Formula& f, int max_worlds) {
  std::set<std::string> atom_set;
  collect_atoms(f, atom_set);
  std::vector<std::string> atoms(atom_set.begin(), atom_set.end());
  EvalMode mode = logic.kind == LogicKind::Intuitionistic ? EvalMode::Int : EvalMode::Multi;

  for (int n = 1; n <= max_worlds; n++) {
    auto masks = sorted_masks(n * n);
    std::vector<uint32_t> world_masks;
    for (uint32_t m = 0; m < (1u << n); m++) world_masks.push_back(m);

    if (logic.kind == LogicKind::Intuitionistic) {
      for (uint32_t rel : masks) {
        if (!mask_reflexive(rel, n) || !mask_transitive(rel, n)) continue;
        // Persistent valuations are exactly the upward-closed world sets.
        std::vector<uint32_t> upsets;
        for (uint32_t s : world_masks) {
          bool up = true;
          for (int w = 0; w < n && up; w++)
            if ((s >> w) & 1)
              for (int v = 0; v < n && up; v++)
                if ((rel >> (w * n + v)) & 1) up = ((s >> v) & 1) != 0;
          if (up) upsets.push_back(s);
        }
        std::stable_sort(upsets.begin(), upsets.end(),
                         [](uint32_t a, uint32_t b) { return popcount(a) < popcount(b); });
        ValuationEnum ve{atoms, std::vector<std::vector<uint32_t>>(atoms.size(), upsets)};
        if (atoms.empty()) ve.choices.clear();
        std::optional<CounterModel> found;
        ve.for_each([&](const std::vector<size_t>& pick) {
          KripkeModel m;
          m.world_count = n;
          m.relations[0] = mask_to_rel(rel, n);
          m.valuation = make_valuation(atoms, ve.choices, pick, n);
          for (int w = 0; w < n; w++)
            if (!eval(m, w, f, mode)) {
              found = CounterModel{m, w};
              return true;
            }
          return false;
        });
        if (atoms.empty()) {
          KripkeModel m;
          m.world_count = n;
          m.relations[0] = mask_to_rel(rel, n);
          for (int w = 0; w < n; w++)
            if (!eval(m, w, f, mode)) found = CounterModel{m, w};
        }
        if (found) return found;
      }
      continue;
    }

    // Multimodal: one relation mask per index, smallest total edge count first.
    const auto& idx = logic.desc.indices;
    size_t k = idx.size();
    std::vector<uint32_t> cur(k, 0);
    std::vector<std::pair<int, std::vector<uint32_t>>> keep;
    size_t space = 1;
    for (size_t t = 0; t < k; t++) space *= (1u << (n * n));
    for (size_t code = 0; code < space; code++) {
      size_t rest = code;
      int edges = 0;
      for (size_t t = 0; t < k; t++) {
        cur[t] = static_cast<uint32_t>(rest % (1u << (n * n)));
        rest /= (1u << (n * n));
        edges += popcount(cur[t]);
      }
      bool ok = true;
      for (size_t t = 0; t < k && ok; t++) {
        int i = idx[t];
        if (logic.desc.has_d(i)) ok = mask_serial(cur[t], n);
        if (ok && logic.desc.has_t(i)) ok = mask_reflexive(cur[t], n);
        if (ok && logic.desc.has_4(i)) ok = mask_transitive(cur[t], n);
      }
      for (size_t a = 0; a < k && ok; a++)
        for (size_t b = 0; b < k && ok; b++)
          if (a != b && logic.desc.leq(idx[a], idx[b])) ok = (cur[a] & ~cur[b]) == 0;
      if (ok) keep.push_back({edges, cur});
    }
    std::stable_sort(keep.begin(), keep.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<uint32_t> all_subsets = world_masks;
    for (const auto& [edges, rels] : keep) {
      ValuationEnum ve{atoms, std::vector<std::vector<uint32_t>>(atoms.size(), all_subsets)};
      std::optional<CounterModel> found;
      auto build = [&](const std::vector<size_t>& pick) {
        KripkeModel m;
        m.world_count = n;
        for (size_t t = 0; t < k; t++) m.relations[idx[t]] = mask_to_rel(rels[t], n);
        m.valuation = make_valuation(atoms, ve.choices, pick, n);
        for (int w = 0; w < n; w++)
          if (!eval(m, w, f, mode)) {
            found = CounterModel{m, w};
            return true;
          }
        return false;
      };
      if (atoms.empty())
        build({});
      else
        ve.for_each(build);
      if (found) return found;
    }
  }
  return std::nullopt;
}

std::optional<CounterModel> search_nbr(const LogicSpec& logic, const Formula& f, int max_worlds) {
  std::set<std::string> atom_set;
  collect_atoms(f, atom_set);
  std::vector<std::string> atoms(atom_set.begin(), atom_set.end());
  EvalMode mode = logic.kind == LogicKind::NonNormalE ? EvalMode::NbrE : EvalMode::NbrM;

  for (int n = 1; n <= max_worlds; n++) {
    int subsets = 1 << n;  // number of world subsets
    // A family per world is a mask over subsets.
    std::vector<uint32_t> families;
    for (uint32_t fam = 0; fam < (1u << subsets); fam++) {
      if (mode == EvalMode::NbrM) {
        bool closed = true;
        for (int X = 0; X < subsets && closed; X++) {
          if (!((fam >> X) & 1)) continue;
          for (int Y = 0; Y < subsets && closed; Y++)
            if ((X & Y) == X && !((fam >> Y) & 1)) closed = false;
        }
        if (!closed) continue;
      }
      families.push_back(fam);
    }
    // All world-family combos ordered by total neighbourhood count.
    std::vector<std::pair<int, std::vector<uint32_t>>> combos;
    std::vector<uint32_t> cur(n, 0);
    size_t space = 1;
    for (int w = 0; w < n; w++) space *= families.size();
    for (size_t code = 0; code < space; code++) {
      size_t rest = code;
      int count = 0;
      for (int w = 0; w < n; w++) {
        cur[w] = families[rest % families.size()];
        rest /= families.size();
        count += popcount(cur[w]);
      }
      combos.push_back({count, cur});
    }
    std::stable_sort(combos.begin(), combos.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<uint32_t> world_masks;
    for (uint32_t m = 0; m < (1u << n); m++) world_masks.push_back(m);
    for (const auto& [count, fams] : combos) {
      ValuationEnum ve{atoms, std::vector<std::vector<uint32_t>>(atoms.size(), world_masks)};
      std::optional<CounterModel> found;
      auto build = [&](const std::vector<size_t>& pick) {
        NeighbourhoodModel m;
        m.world_count = n;
        m.nbr.assign(n, {});
        for (int w = 0; w < n; w++)
          for (int X = 0; X < subsets; X++)
            if ((fams[w] >> X) & 1) m.nbr[w].push_back(static_cast<uint32_t>(X));
        m.valuation = make_valuation(atoms, ve.choices, pick, n);
        for (int w = 0; w < n; w++)
          if (!eval(m, w, f, mode)) {
            found = CounterModel{m, w};
            return true;
          }
        return false;
      };
      if (atoms.empty())
        build({});
      else
        ve.for_each(build);
      if (found) return found;
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<CounterModel> countermodel(const LogicSpec& logic, const Formula& f, Bounds bounds) {
  if (bounds.kripke_worlds <= 0 || bounds.nbr_worlds <= 0)
    throw std::invalid_argument("bounds must be positive");
  if (auto bad = find_unknown_index(logic, f))
    throw std::invalid_argument("box index " + std::to_string(*bad) + " not in the logic");
  switch (logic.kind) {
    case LogicKind::Intuitionistic:
    case LogicKind::Multimodal:
      return search_kripke(logic, f, bounds.kripke_worlds);
    default:
      return search_nbr(logic, f, bounds.nbr_worlds);
  }
}

std::string render_model(const KripkeModel& m) {
  std::string out = "worlds: " + std::to_string(m.world_count) + "\n";
  bool any = false;
  for (const auto& [i, rel] : m.relations)
    if (!rel.empty()) any = true;
  if (any) {
    out += "relations:\n";
    for (const auto& [i, rel] : m.relations)
      for (const auto& [w, v] : rel)
        out += "  " + std::to_string(i) + ": " + std::to_string(w) + " " + std::to_string(v) + "\n";
  }
  out += "valuation:\n";
  for (int w = 0; w < m.world_count; w++) {
    out += "  " + std::to_string(w) + ":";
    for (const auto& [atom, worlds] : m.valuation)
      if (worlds.count(w)) out += " " + atom;
    out += "\n";
  }
  return out;
}

std::string render_model(const NeighbourhoodModel& m) {
  std::string out = "worlds: " + std::to_string(m.world_count) + "\n";
  out += "neighbourhoods:\n";
  for (int w = 0; w < m.world_count; w++) {
    out += "  " + std::to_string(w) + ":";
    for (uint32_t X : m.nbr[w]) {
      out += " {";
      bool first = true;
      for (int v = 0; v < m.world_count; v++)
        if ((X >> v) & 1) {
          if (!first) out += " ";
          out += std::to_string(v);
          first = false;
        }
      out += "}";
    }
    out += "\n";
  }
  out += "valuation:\n";
  for (int w = 0; w < m.world_count; w++) {
    out += "  " + std::to_string(w) + ":";
    for (const auto& [atom, worlds] : m.valuation)
      if (worlds.count(w)) out += " " + atom;
    out += "\n";
  }
  return out;
}

std::string render_countermodel(const CounterModel& cm) {
  std::string out;
  if (std::holds_alternative<KripkeModel>(cm.model))
    out = render_model(std::get<KripkeModel>(cm.model));
  else
    out = render_model(std::get<NeighbourhoodModel>(cm.model));
  out += "falsified at world " + std::to_string(cm.world) + "\n";
  return out;
}

}  // namespace nsq
