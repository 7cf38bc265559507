#pragma once

#include <string>
#include <vector>

namespace nsq {

// Phase classification from the depth-first normalization procedure.
// MarkedLocal is the slot for rules acting inside a binary nesting
// (the monotonisation rule): they fire between creation and consumption.
enum class Phase { Local, Nesting, MarkedLocal, Lift, AxiomRule };

int phase_rank(Phase p);
std::string phase_name(Phase p);

struct RuleInfo {
  std::string name;
  Phase phase = Phase::Local;
  int arity = 1;  // premise count; -1 when schema-dependent
  bool inter_nested = false;
  bool n_directed = true;
  bool shallow = true;
};

struct RuleTable {
  std::string calculus;  // "sc" | "ns" | "lns" | "lbns" | "labelled"
  std::vector<RuleInfo> rules;

  bool contains(const std::string& name) const { return find(name) != nullptr; }
  const RuleInfo* find(const std::string& name) const {
    for (const auto& r : rules)
      if (r.name == name) return &r;
    return nullptr;
  }
  size_t size() const { return rules.size(); }
  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& r : rules) out.push_back(r.name);
    return out;
  }
};

}  // namespace nsq
