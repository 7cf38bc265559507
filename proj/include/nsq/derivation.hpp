#pragma once

#include <string>
#include <vector>

#include "nsq/formula.hpp"

namespace nsq {

// Address of a node in a nesting tree: the path of 1-based child ordinals
// from the root. The empty path is the root.
struct Position {
  std::vector<int> path;

  bool is_root() const { return path.empty(); }
  Position extended(int k) const {
    Position p = *this;
    p.path.push_back(k);
    return p;
  }
  std::string to_string() const;

  friend bool operator==(const Position& a, const Position& b) { return a.path == b.path; }
  friend bool operator!=(const Position& a, const Position& b) { return !(a == b); }
};

enum class PositionOrder { Below, Above, Equal, Incomparable };

// Prefix comparison: Below means p <= q (q extends p).
PositionOrder position_order(const Position& p, const Position& q);

// Identifies the principal material of a rule application. Which fields are
// meaningful depends on the rule; unused fields keep their defaults.
struct Selection {
  Position at;                       // addressed nesting node (nested calculi)
  int left = -1;                     // occurrence in the antecedent (sorted index)
  int right = -1;                    // occurrence in the succedent
  int child = -1;                    // 0-based child ordinal at the addressed node
  int rel = -1;                      // occurrence in a relation set (labelled calculi)
  int index_i = 0, index_j = 0;      // modal indices
  std::string label, label2, label3, label4;  // state variables (labelled calculi)

  friend bool operator==(const Selection& a, const Selection& b) {
    return a.at == b.at && a.left == b.left && a.right == b.right && a.child == b.child &&
           a.rel == b.rel && a.index_i == b.index_i && a.index_j == b.index_j &&
           a.label == b.label && a.label2 == b.label2 && a.label3 == b.label3 &&
           a.label4 == b.label4;
  }
};

template <typename J>
struct Derivation {
  J conclusion;
  std::string rule;
  Selection selection;
  std::vector<Derivation<J>> premises;

  // An axiom has height 0.
  int height() const {
    int h = 0;
    for (const auto& p : premises) h = std::max(h, 1 + p.height());
    return h;
  }
  int node_count() const {
    int n = 1;
    for (const auto& p : premises) n += p.node_count();
    return n;
  }
};

// Outcome of a proof check; `node` is the premise-index path to the first
// failing node.
struct CheckResult {
  bool ok = true;
  std::string message;
  std::vector<int> node;
};

struct NotApplicable : std::runtime_error {
  explicit NotApplicable(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace nsq
