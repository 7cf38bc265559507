#pragma once

#include <variant>

#include "nsq/labelled_calculus.hpp"
#include "nsq/linear_nested.hpp"
#include "nsq/nested_calculus.hpp"
#include "nsq/sequent_calculus.hpp"

namespace nsq {

inline constexpr const char* kEngineVersion = "0.1.0";

// The shared proof container: one JSON schema for every calculus, with a
// calculus tag deciding the judgment syntax. Judgments are stored in their
// text forms; the matching checker re-derives every premise.
struct ProofDocument {
  std::string calculus;  // "sc" | "ns" | "lns" | "lbns" | "labelled"
  LogicSpec logic;
  std::variant<Derivation<Sequent>, Derivation<NestedSequent>, Derivation<LinearNested>,
               Derivation<LabelledSequent>>
      derivation;
  long budget_used = 0;
  std::string engine_version = kEngineVersion;

  std::string endpoint_text() const;
  std::string system_name() const;  // gti/gtmm/gte/gtm or lbns_<logic> for labelled calculi
};

std::string document_to_json(const ProofDocument& doc);
ProofDocument document_from_json(const std::string& text);

// Dispatches to the checker matching the document's calculus.
CheckResult check_document(const ProofDocument& doc);

}  // namespace nsq
