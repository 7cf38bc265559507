#pragma once

#include "nsq/logic.hpp"
#include "nsq/nested.hpp"
#include "nsq/rules.hpp"
#include "nsq/search.hpp"

namespace nsq {

// Rule table for the nested systems: the intuitionistic system, the indexed
// system over a description, and the binary-nesting systems for E and M.
// Every shipped rule is shallow n-directed.
RuleTable ns_rule_table(const LogicSpec& logic);

// The nested rules for these modal axioms move auxiliary formulas upward in
// the nesting tree, so no table can contain them. Returns the reason, or
// nullopt for an axiom we ship.
std::optional<std::string> ns_axiom_rejection(const std::string& axiom);

std::vector<NestedSequent> ns_apply(const LogicSpec& logic, const std::string& rule,
                                    const NestedSequent& goal, const Selection& sel);

// Backward search following the depth-first normal form: per node, local
// saturation, then nesting creation, then lifts, then recursion into one
// sub-nesting, with axioms applied eagerly.
SearchResult<NestedSequent> ns_prove(const LogicSpec& logic, const NestedSequent& goal,
                                     Budget budget = {});

// Accepts iff along every branch each node's rule applications are ordered
// local / nesting / marked-local / lift and no rule addresses a node after a
// rule has fired strictly below it.
CheckResult phase_check(const LogicSpec& logic, const Derivation<NestedSequent>& d);

CheckResult ns_check(const LogicSpec& logic, const Derivation<NestedSequent>& d);

// Well-formedness of a goal for the logic (index annotations, marked
// children only for E/M, box indices known).
void validate_nested_goal(const LogicSpec& logic, const NestedSequent& goal);

}  // namespace nsq
