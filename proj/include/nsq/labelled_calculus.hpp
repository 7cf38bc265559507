#pragma once

#include "nsq/labelled.hpp"
#include "nsq/rules.hpp"
#include "nsq/search.hpp"

namespace nsq {

// A labelled proof system: either the labelled-nested image of a nested
// system (rules tl_*), or one of the semantic G3-style systems GtI, Gtmm,
// GtE, GtM.
struct LbSystem {
  enum Kind { Image, Gt } kind = Gt;
  LogicSpec logic;

  static LbSystem image(LogicSpec l) { return {Image, std::move(l)}; }
  static LbSystem gt(LogicSpec l) { return {Gt, std::move(l)}; }

  std::string name() const;
};

RuleTable lb_rule_table(const LbSystem& system);

std::vector<LabelledSequent> lb_apply(const LbSystem& system, const std::string& rule,
                                      const LabelledSequent& goal, const Selection& sel);

// Backward search. Image systems delegate to the nested engine through the
// tree reading (the translation is a 1-1 correspondence); the Gt systems run
// a native search with the relational-rule restriction strategy.
SearchResult<LabelledSequent> lb_prove(const LbSystem& system, const LabelledSequent& goal,
                                       Budget budget = {});

CheckResult lb_check(const LbSystem& system, const Derivation<LabelledSequent>& d);

// Node-for-node translation of a nested derivation into its labelled image.
// Tree shape and node count are preserved exactly.
Derivation<LabelledSequent> tl_translate(const LogicSpec& logic,
                                         const Derivation<NestedSequent>& d);

// Expands a labelled-nested-image derivation into the matching semantic
// system (GtI, Gtmm, GtE or GtM per the logic). The root's labelled-formula
// multisets are preserved; relation atoms may differ.
Derivation<LabelledSequent> lbns_to_labelled(const LogicSpec& logic,
                                             const Derivation<LabelledSequent>& d);

// Reverse restriction. Accepts proofs produced by lb_prove on the semantic
// systems (their endpoints are tree-readable) and returns an image proof of
// the same endpoint.
Derivation<LabelledSequent> labelled_to_lbns(const LogicSpec& logic,
                                             const Derivation<LabelledSequent>& d,
                                             Budget budget = {});

}  // namespace nsq
