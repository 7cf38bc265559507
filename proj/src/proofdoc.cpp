#include "nsq/proofdoc.hpp"

#include "json.hpp"

namespace nsq {

using nlohmann::json;

namespace {

json logic_to_json(const LogicSpec& logic) {
  switch (logic.kind) {
    case LogicKind::Intuitionistic: return {{"kind", "mlj"}};
    case LogicKind::NonNormalE: return {{"kind", "e"}};
    case LogicKind::NonNormalM: return {{"kind", "m"}};
    case LogicKind::Multimodal: break;
  }
  json j{{"kind", "multimodal"}};
  j["indices"] = logic.desc.indices;
  json order = json::array();
  for (const auto& [a, b] : logic.desc.order)
    if (a != b) order.push_back({a, b});
  j["order"] = order;
  json axioms = json::object();
  for (const auto& [i, ax] : logic.desc.axioms) {
    if (ax.empty()) continue;
    json list = json::array();
    for (Axiom a : ax) list.push_back(axiom_name(a));
    axioms[std::to_string(i)] = list;
  }
  j["axioms"] = axioms;
  return j;
}

LogicSpec logic_from_json(const json& j) {
  std::string kind = j.at("kind");
  if (kind == "mlj") return LogicSpec::mlj();
  if (kind == "e") return LogicSpec::e();
  if (kind == "m") return LogicSpec::m();
  if (kind != "multimodal") throw std::invalid_argument("unknown logic kind '" + kind + "'");
  Description d;
  for (int i : j.at("indices")) d.indices.push_back(i);
  if (j.contains("order"))
    for (const auto& pair : j.at("order")) d.order.insert({pair.at(0), pair.at(1)});
  if (j.contains("axioms"))
    for (auto it = j.at("axioms").begin(); it != j.at("axioms").end(); ++it)
      for (const auto& name : it.value()) {
        auto a = axiom_from_name(name.get<std::string>());
        if (!a) throw std::invalid_argument("unknown axiom in document");
        d.axioms[std::stoi(it.key())].insert(*a);
      }
  return LogicSpec::multimodal(std::move(d));
}

json selection_to_json(const Selection& s) {
  json j = json::object();
  if (!s.at.path.empty()) j["at"] = s.at.path;
  if (s.left >= 0) j["left"] = s.left;
  if (s.right >= 0) j["right"] = s.right;
  if (s.child >= 0) j["child"] = s.child;
  if (s.rel >= 0) j["rel"] = s.rel;
  if (s.index_i) j["i"] = s.index_i;
  if (s.index_j) j["j"] = s.index_j;
  if (!s.label.empty()) j["label"] = s.label;
  if (!s.label2.empty()) j["label2"] = s.label2;
  if (!s.label3.empty()) j["label3"] = s.label3;
  if (!s.label4.empty()) j["label4"] = s.label4;
  return j;
}

Selection selection_from_json(const json& j) {
  Selection s;
  if (j.contains("at")) for (int k : j.at("at")) s.at.path.push_back(k);
  if (j.contains("left")) s.left = j.at("left");
  if (j.contains("right")) s.right = j.at("right");
  if (j.contains("child")) s.child = j.at("child");
  if (j.contains("rel")) s.rel = j.at("rel");
  if (j.contains("i")) s.index_i = j.at("i");
  if (j.contains("j")) s.index_j = j.at("j");
  if (j.contains("label")) s.label = j.at("label");
  if (j.contains("label2")) s.label2 = j.at("label2");
  if (j.contains("label3")) s.label3 = j.at("label3");
  if (j.contains("label4")) s.label4 = j.at("label4");
  return s;
}

template <typename J>
json derivation_to_json(const Derivation<J>& d, std::string (*render)(const J&)) {
  json j;
  j["rule"] = d.rule;
  json sel = selection_to_json(d.selection);
  if (!sel.empty()) j["selection"] = sel;
  j["conclusion"] = render(d.conclusion);
  json premises = json::array();
  for (const auto& p : d.premises) premises.push_back(derivation_to_json(p, render));
  j["premises"] = premises;
  return j;
}

template <typename J>
Derivation<J> derivation_from_json(const json& j, J (*parse)(std::string_view)) {
  Derivation<J> d;
  d.rule = j.at("rule");
  if (j.contains("selection")) d.selection = selection_from_json(j.at("selection"));
  d.conclusion = parse(j.at("conclusion").get<std::string>());
  for (const auto& p : j.at("premises")) d.premises.push_back(derivation_from_json(p, parse));
  return d;
}

std::string render_seq_text(const Sequent& s) { return render_sequent(s); }
std::string render_ns_text(const NestedSequent& s) { return render_nested(s); }
std::string render_lns_text(const LinearNested& s) { return render_lns(s); }
std::string render_lb_text(const LabelledSequent& s) { return render_labelled(s); }

Sequent parse_seq_text(std::string_view t) { return parse_sequent(t); }
NestedSequent parse_ns_text(std::string_view t) { return parse_nested(t); }
LinearNested parse_lns_text(std::string_view t) { return parse_lns(t); }
LabelledSequent parse_lb_text(std::string_view t) { return parse_labelled(t); }

}  // namespace

std::string ProofDocument::endpoint_text() const {
  return std::visit(
      [](const auto& d) -> std::string {
        using J = std::decay_t<decltype(d.conclusion)>;
        if constexpr (std::is_same_v<J, Sequent>) return render_sequent(d.conclusion);
        else if constexpr (std::is_same_v<J, NestedSequent>) return render_nested(d.conclusion);
        else if constexpr (std::is_same_v<J, LinearNested>) return render_lns(d.conclusion);
        else return render_labelled(d.conclusion);
      },
      derivation);
}

std::string ProofDocument::system_name() const {
  if (calculus == "lbns") return LbSystem::image(logic).name();
  if (calculus == "labelled") return LbSystem::gt(logic).name();
  return calculus;
}

std::string document_to_json(const ProofDocument& doc) {
  json j;
  j["calculus"] = doc.calculus;
  j["logic"] = logic_to_json(doc.logic);
  if (doc.calculus == "lbns" || doc.calculus == "labelled") j["system"] = doc.system_name();
  j["endpoint"] = doc.endpoint_text();
  if (std::holds_alternative<Derivation<Sequent>>(doc.derivation))
    j["derivation"] = derivation_to_json(std::get<Derivation<Sequent>>(doc.derivation),
                                         render_seq_text);
  else if (std::holds_alternative<Derivation<NestedSequent>>(doc.derivation))
    j["derivation"] = derivation_to_json(std::get<Derivation<NestedSequent>>(doc.derivation),
                                         render_ns_text);
  else if (std::holds_alternative<Derivation<LinearNested>>(doc.derivation))
    j["derivation"] = derivation_to_json(std::get<Derivation<LinearNested>>(doc.derivation),
                                         render_lns_text);
  else
    j["derivation"] = derivation_to_json(std::get<Derivation<LabelledSequent>>(doc.derivation),
                                         render_lb_text);
  j["metadata"] = {{"engine_version", doc.engine_version}, {"budget_used", doc.budget_used}};
  return j.dump(2);
}

ProofDocument document_from_json(const std::string& text) {
  json j = json::parse(text);
  ProofDocument doc;
  doc.calculus = j.at("calculus");
  doc.logic = logic_from_json(j.at("logic"));
  if (j.contains("metadata")) {
    const auto& m = j.at("metadata");
    if (m.contains("engine_version")) doc.engine_version = m.at("engine_version");
    if (m.contains("budget_used")) doc.budget_used = m.at("budget_used");
  }
  const json& d = j.at("derivation");
  if (doc.calculus == "sc")
    doc.derivation = derivation_from_json<Sequent>(d, parse_seq_text);
  else if (doc.calculus == "ns")
    doc.derivation = derivation_from_json<NestedSequent>(d, parse_ns_text);
  else if (doc.calculus == "lns")
    doc.derivation = derivation_from_json<LinearNested>(d, parse_lns_text);
  else if (doc.calculus == "lbns" || doc.calculus == "labelled")
    doc.derivation = derivation_from_json<LabelledSequent>(d, parse_lb_text);
  else
    throw std::invalid_argument("unknown calculus '" + doc.calculus + "'");
  return doc;
}

CheckResult check_document(const ProofDocument& doc) {
  if (doc.calculus == "sc")
    return sc_check(doc.logic, std::get<Derivation<Sequent>>(doc.derivation));
  if (doc.calculus == "ns")
    return ns_check(doc.logic, std::get<Derivation<NestedSequent>>(doc.derivation));
  if (doc.calculus == "lns")
    return lns_check(doc.logic, std::get<Derivation<LinearNested>>(doc.derivation));
  if (doc.calculus == "lbns")
    return lb_check(LbSystem::image(doc.logic),
                    std::get<Derivation<LabelledSequent>>(doc.derivation));
  if (doc.calculus == "labelled")
    return lb_check(LbSystem::gt(doc.logic),
                    std::get<Derivation<LabelledSequent>>(doc.derivation));
  return {false, "unknown calculus " + doc.calculus, {}};
}

}  // namespace nsq
