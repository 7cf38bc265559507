#pragma once

// Test-only oracle: a deliberately naive, depth-bounded, exhaustive backward
// search written independently of the engine code (no rule tables, no
// sc_apply, no loop checking). It can certify provability up to a depth
// bound; it never certifies unprovability. Negative fixtures are certified
// by the model enumerator instead.

#include <vector>

#include "nsq/formula.hpp"
#include "nsq/logic.hpp"

namespace oracle {

using nsq::Formula;

struct Goal {
  std::vector<Formula> ante, succ;
};

bool provable_within(const nsq::LogicSpec& logic, const Goal& g, int depth);

inline bool provable_within(const nsq::LogicSpec& logic, const Formula& f, int depth) {
  return provable_within(logic, Goal{{}, {f}}, depth);
}

}  // namespace oracle
