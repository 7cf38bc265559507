#pragma once

#include <memory>
#include <optional>

#include "nsq/derivation.hpp"
#include "nsq/sequent.hpp"

namespace nsq {

struct NestedSequent;
using NestedPtr = std::shared_ptr<const NestedSequent>;

// A nesting: [U] possibly carrying an index (multimodal), or the binary
// nesting < S1 ; S2 > used by the non-normal systems, which never has
// children of its own. Hole is the slot of a holed context.
struct Child {
  enum Kind { Plain, Marked, Hole } kind = Plain;
  std::optional<int> index;
  NestedPtr body;                   // Plain
  Sequent pair_left, pair_right;    // Marked

  static Child plain(NestedSequent u, std::optional<int> index = std::nullopt);
  static Child marked(Sequent left, Sequent right);
  static Child hole(std::optional<int> index = std::nullopt);
};

bool operator==(const Child& a, const Child& b);

struct NestedSequent {
  FormulaSet ante, succ;
  std::vector<Child> children;

  bool flat() const { return children.empty(); }
  bool empty() const { return ante.empty() && succ.empty() && children.empty(); }
  Sequent top() const { return Sequent{ante, succ}; }

  friend bool operator==(const NestedSequent& a, const NestedSequent& b) {
    return a.ante == b.ante && a.succ == b.succ && a.children == b.children;
  }
  friend bool operator!=(const NestedSequent& a, const NestedSequent& b) { return !(a == b); }
};

NestedSequent nested_of(Sequent s);

// Navigation. Positions address nodes by 1-based child ordinals; only Plain
// children have addressable sub-nodes.
const NestedSequent* node_at(const NestedSequent& u, const Position& pos);
NestedSequent replace_node(const NestedSequent& u, const Position& pos, NestedSequent sub);

// A nested sequent with exactly one hole in place of a child nesting.
struct HoledContext {
  NestedSequent skeleton;  // contains exactly one Hole child
  Position hole;           // position of the node whose child list holds the hole

  int depth() const;  // nodes on a maximal branch of the nesting tree
};

// Builds a context by carving a hole in place of the child at `parent` with
// ordinal `child` (0-based).
HoledContext carve_hole(const NestedSequent& u, const Position& parent, int child);

// Replaces the hole by [filler]; an empty filler removes the hole, and an
// empty context returns the filler itself.
NestedSequent plug(const HoledContext& ctx, const NestedSequent& filler);

// Text form: "G |- D, [ ... ]^2, < S |- P ; O |- T >".
NestedSequent parse_nested(std::string_view text);
std::string render_nested(const NestedSequent& u);

// Canonical key (contracted, children sorted and deduplicated) for loop
// checks and subproblem blocking.
std::string nested_key(const NestedSequent& u);

}  // namespace nsq
