#pragma once

#include "nsq/logic.hpp"
#include "nsq/rules.hpp"
#include "nsq/search.hpp"
#include "nsq/sequent.hpp"

namespace nsq {

// Rule table for the plain sequent systems: the multi-conclusion
// intuitionistic calculus, the simply dependent multimodal system over a
// description, and the non-normal systems for E and M on the classical base.
RuleTable sc_rule_table(const LogicSpec& logic);

// Applies one rule instance backwards and returns the premises (contracted
// to duplicate-free multisets). Throws NotApplicable on a mismatch.
std::vector<Sequent> sc_apply(const LogicSpec& logic, const std::string& rule,
                              const Sequent& goal, const Selection& sel);

SearchResult<Sequent> sc_prove(const LogicSpec& logic, const Sequent& goal, Budget budget = {});

CheckResult sc_check(const LogicSpec& logic, const Derivation<Sequent>& d);

}  // namespace nsq
