#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>

#include "nsq/logic.hpp"

namespace nsq {

// Finite Kripke model. Intuitionistic models store the preorder at index 0;
// multimodal models one relation per index of the description.
struct KripkeModel {
  int world_count = 1;
  std::map<int, std::set<std::pair<int, int>>> relations;
  std::map<std::string, std::set<int>> valuation;

  bool related(int index, int w, int v) const {
    auto it = relations.find(index);
    return it != relations.end() && it->second.count({w, v}) > 0;
  }
  bool holds_atom(const std::string& a, int w) const {
    auto it = valuation.find(a);
    return it != valuation.end() && it->second.count(w) > 0;
  }
};

// Finite neighbourhood model; each neighbourhood is a bitmask over worlds.
struct NeighbourhoodModel {
  int world_count = 1;
  std::vector<std::vector<uint32_t>> nbr;  // per world, sorted masks
  std::map<std::string, std::set<int>> valuation;

  bool holds_atom(const std::string& a, int w) const {
    auto it = valuation.find(a);
    return it != valuation.end() && it->second.count(w) > 0;
  }
};

enum class EvalMode { Int, Multi, NbrE, NbrM };

bool eval(const KripkeModel& m, int world, const Formula& f, EvalMode mode);
bool eval(const NeighbourhoodModel& m, int world, const Formula& f, EvalMode mode);

struct FrameCheck {
  bool ok = true;
  std::string violated;
};

FrameCheck check_frame(const KripkeModel& m, const LogicSpec& logic);
FrameCheck check_frame(const NeighbourhoodModel& m, const LogicSpec& logic);

struct Bounds {
  int kripke_worlds = 3;
  int nbr_worlds = 2;
};

struct CounterModel {
  std::variant<KripkeModel, NeighbourhoodModel> model;
  int world = 0;
};

// Exhaustively enumerates frame-condition-respecting models up to the bounds,
// ordered by (world count, edge/neighbourhood count, valuation bits), and
// returns the first one falsifying f. None means no countermodel exists
// within the bounds.
std::optional<CounterModel> countermodel(const LogicSpec& logic, const Formula& f, Bounds bounds = {});

std::string render_model(const KripkeModel& m);
std::string render_model(const NeighbourhoodModel& m);
std::string render_countermodel(const CounterModel& cm);

}  // namespace nsq
