#pragma once

#include "nsq/logic.hpp"
#include "nsq/nested.hpp"
#include "nsq/rules.hpp"
#include "nsq/search.hpp"

namespace nsq {

enum class SepKind { PlainSep, BlockedSep };

struct Separator {
  SepKind kind = SepKind::PlainSep;
  std::optional<int> index;

  friend bool operator==(const Separator& a, const Separator& b) {
    return a.kind == b.kind && a.index == b.index;
  }
};

// A component is a plain sequent or, for E and M only, the binary pair
// (left ; right), which may occur only in final position.
struct LnsComponent {
  bool is_pair = false;
  Sequent seq;    // the sequent, or the pair's left half
  Sequent right;  // the pair's right half

  friend bool operator==(const LnsComponent& a, const LnsComponent& b) {
    return a.is_pair == b.is_pair && a.seq == b.seq && a.right == b.right;
  }
};

struct LinearNested {
  std::vector<LnsComponent> components;  // nonempty
  std::vector<Separator> seps;           // components.size() - 1 entries

  const LnsComponent& last() const { return components.back(); }
  bool block_open() const { return !seps.empty() && seps.back().kind == SepKind::BlockedSep; }

  friend bool operator==(const LinearNested& a, const LinearNested& b) {
    return a.components == b.components && a.seps == b.seps;
  }
  friend bool operator!=(const LinearNested& a, const LinearNested& b) { return !(a == b); }
};

LinearNested line_of(Sequent s);

// Text form: components joined by "//" (plain) or "//*" (blocked), with an
// optional "^i" directly after the separator; pair components use "< ; >".
LinearNested parse_lns(std::string_view text);
std::string render_lns(const LinearNested& g);

RuleTable lns_rule_table(const LogicSpec& logic);

// End-active application: only the two rightmost components are ever active.
std::vector<LinearNested> lns_apply(const LogicSpec& logic, const std::string& rule,
                                    const LinearNested& goal, const Selection& sel);

// Blocked-form end-active proof search. Initial goals must have no blocked
// separator (they normally have a single component).
SearchResult<LinearNested> lns_prove(const LogicSpec& logic, const LinearNested& goal,
                                     Budget budget = {});

CheckResult lns_check(const LogicSpec& logic, const Derivation<LinearNested>& d);

// Maps a normal-form nested proof of a flat endpoint onto the line of
// sequents along its active path. Throws std::invalid_argument if the input
// fails phase_check or has a non-flat endpoint.
Derivation<LinearNested> linearise(const LogicSpec& logic, const Derivation<NestedSequent>& d);

// Replaces each block (creation, lifts, close) by the corresponding sequent
// macro rule. Throws std::invalid_argument on malformed blocks.
Derivation<Sequent> collapse_blocks(const LogicSpec& logic, const Derivation<LinearNested>& d);

}  // namespace nsq
