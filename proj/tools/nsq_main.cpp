// nsq: proof search, proof translation and countermodel search for the
// sequent, nested, linear nested and labelled calculi.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "nsq/corpus.hpp"
#include "nsq/proofdoc.hpp"
#include "nsq/semantics.hpp"

using namespace nsq;

namespace {

constexpr int kExitProved = 0;
constexpr int kExitRefuted = 1;
constexpr int kExitExhausted = 2;
constexpr int kExitInputError = 3;

LogicSpec parse_logic_flag(const std::string& spec) {
  if (spec == "mlj") return LogicSpec::mlj();
  if (spec == "e") return LogicSpec::e();
  if (spec == "m") return LogicSpec::m();
  if (spec.rfind("preset:", 0) == 0) return preset_logic(spec.substr(7));
  if (spec.rfind("desc:", 0) == 0) {
    std::ifstream in(spec.substr(5));
    if (!in) throw std::invalid_argument("cannot open description file " + spec.substr(5));
    std::stringstream buf;
    buf << in.rdbuf();
    Description d = parse_description(buf.str());
    auto report = validate_description(d);
    if (!report.ok())
      throw std::invalid_argument("invalid description: " + report.to_string());
    return LogicSpec::multimodal(std::move(d));
  }
  throw std::invalid_argument("bad --logic value '" + spec +
                              "' (want mlj, e, m, preset:NAME or desc:FILE)");
}

struct ProveOutcome {
  SearchStatus status = SearchStatus::Refuted;
  std::optional<ProofDocument> doc;
  long nodes = 0;
};

ProveOutcome run_prove(const LogicSpec& logic, const std::string& calc, const Formula& f,
                       Budget budget) {
  ProveOutcome out;
  auto finish = [&](auto result, auto derivation_to_doc) {
    out.status = result.status;
    out.nodes = result.nodes_used;
    if (result.derivation) out.doc = derivation_to_doc(std::move(*result.derivation));
  };
  if (calc == "sc") {
    Sequent goal;
    ms_insert(goal.succ, f);
    finish(sc_prove(logic, goal, budget), [&](Derivation<Sequent> d) {
      return ProofDocument{"sc", logic, std::move(d), budget.nodes, kEngineVersion};
    });
  } else if (calc == "ns") {
    NestedSequent goal;
    ms_insert(goal.succ, f);
    finish(ns_prove(logic, goal, budget), [&](Derivation<NestedSequent> d) {
      return ProofDocument{"ns", logic, std::move(d), budget.nodes, kEngineVersion};
    });
  } else if (calc == "lns") {
    Sequent goal;
    ms_insert(goal.succ, f);
    finish(lns_prove(logic, line_of(goal), budget), [&](Derivation<LinearNested> d) {
      return ProofDocument{"lns", logic, std::move(d), budget.nodes, kEngineVersion};
    });
  } else if (calc == "lbns" || calc == "labelled") {
    LabelledSequent goal;
    goal.add_right("x", f);
    auto system = calc == "lbns" ? LbSystem::image(logic) : LbSystem::gt(logic);
    finish(lb_prove(system, goal, budget), [&](Derivation<LabelledSequent> d) {
      return ProofDocument{calc, logic, std::move(d), budget.nodes, kEngineVersion};
    });
  } else {
    throw std::invalid_argument("bad --calc value '" + calc + "'");
  }
  if (out.doc) out.doc->budget_used = out.nodes;
  return out;
}

template <typename J>
void print_tree(std::ostream& os, const Derivation<J>& d, std::string (*render)(const J&),
                int depth) {
  os << std::string(static_cast<size_t>(depth) * 2, ' ') << d.rule << ": "
     << render(d.conclusion) << "\n";
  for (const auto& p : d.premises) print_tree(os, p, render, depth + 1);
}

void print_document(std::ostream& os, const ProofDocument& doc) {
  os << "calculus: " << doc.calculus;
  if (doc.calculus == "lbns" || doc.calculus == "labelled") os << " (" << doc.system_name() << ")";
  os << ", logic: " << doc.logic.id() << "\n";
  std::visit(
      [&](const auto& d) {
        using J = std::decay_t<decltype(d.conclusion)>;
        if constexpr (std::is_same_v<J, Sequent>)
          print_tree<J>(os, d, +[](const J& s) { return render_sequent(s); }, 0);
        else if constexpr (std::is_same_v<J, NestedSequent>)
          print_tree<J>(os, d, +[](const J& s) { return render_nested(s); }, 0);
        else if constexpr (std::is_same_v<J, LinearNested>)
          print_tree<J>(os, d, +[](const J& s) { return render_lns(s); }, 0);
        else
          print_tree<J>(os, d, +[](const J& s) { return render_labelled(s); }, 0);
      },
      doc.derivation);
}

int emit_outcome(const ProveOutcome& out, const LogicSpec& logic, const Formula& f,
                 const std::string& format, Bounds bounds) {
  switch (out.status) {
    case SearchStatus::Proved: {
      if (format == "json") {
        std::cout << document_to_json(*out.doc) << "\n";
      } else {
        std::cout << "proved (" << out.nodes << " nodes)\n";
        print_document(std::cout, *out.doc);
      }
      return kExitProved;
    }
    case SearchStatus::Refuted: {
      auto cm = countermodel(logic, f, bounds);
      if (format == "json") {
        nlohmann::json j{{"status", "refuted"}};
        if (cm) j["countermodel"] = render_countermodel(*cm);
        std::cout << j.dump(2) << "\n";
      } else {
        std::cout << "refuted (" << out.nodes << " nodes)\n";
        if (cm)
          std::cout << render_countermodel(*cm);
        else
          std::cout << "no countermodel within the default bounds\n";
      }
      return kExitRefuted;
    }
    case SearchStatus::Exhausted:
    default: {
      if (format == "json")
        std::cout << nlohmann::json{{"status", "exhausted"}}.dump(2) << "\n";
      else
        std::cout << "budget exhausted (" << out.nodes << " nodes)\n";
      return kExitExhausted;
    }
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

const char* status_name(SearchStatus s) {
  switch (s) {
    case SearchStatus::Proved: return "proved";
    case SearchStatus::Refuted: return "refuted";
    default: return "exhausted";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"proof search and proof translation for sequent, nested, linear nested and "
               "labelled calculi"};
  app.require_subcommand(1);

  std::string logic_flag = "mlj";
  std::string calc = "sc";
  std::string format = "text";
  std::string formula_text;
  long budget_nodes = 100000;
  uint64_t seed = 0;
  int count = 200;
  int kripke_worlds = 3, nbr_worlds = 2;
  std::string in_path, out_path, to_calc;

  auto add_logic = [&](CLI::App* cmd) {
    cmd->add_option("--logic", logic_flag,
                    "mlj | e | m | preset:{k,kd,kt,k4,s4,kd4,bimodal} | desc:FILE");
  };

  auto* prove = app.add_subcommand("prove", "prove a formula in the selected calculus");
  prove->add_option("formula", formula_text, "formula to prove")->required();
  add_logic(prove);
  prove->add_option("--calc", calc, "sc | ns | lns | lbns | labelled");
  prove->add_option("--budget", budget_nodes, "search node budget");
  prove->add_option("--format", format, "text | json");
  prove->add_option("--kripke-worlds", kripke_worlds, "countermodel bound");
  prove->add_option("--nbr-worlds", nbr_worlds, "countermodel bound");

  auto* check = app.add_subcommand("check", "re-check a proof document");
  check->add_option("file", in_path, "proof document (JSON)")->required();
  check->add_option("--format", format, "text | json");

  auto* translate = app.add_subcommand("translate", "translate a proof document");
  translate->add_option("file", in_path, "proof document (JSON)")->required();
  translate->add_option("--to", to_calc, "lns | sc | lbns | labelled")->required();
  translate->add_option("--out", out_path, "output file (default stdout)");
  translate->add_option("--budget", budget_nodes, "budget for the reverse restriction");

  auto* cm_cmd = app.add_subcommand("countermodel", "search for a finite countermodel");
  cm_cmd->add_option("formula", formula_text, "formula to refute")->required();
  add_logic(cm_cmd);
  cm_cmd->add_option("--kripke-worlds", kripke_worlds, "world bound for Kripke models");
  cm_cmd->add_option("--nbr-worlds", nbr_worlds, "world bound for neighbourhood models");
  cm_cmd->add_option("--format", format, "text | json");

  auto* corpus = app.add_subcommand("corpus", "cross-calculus agreement on random formulas");
  add_logic(corpus);
  corpus->add_option("--count", count, "number of formulas");
  corpus->add_option("--seed", seed, "generator seed")->required();
  corpus->add_option("--budget", budget_nodes, "per-engine node budget");
  corpus->add_option("--format", format, "text | json");

  auto* compare = app.add_subcommand("compare", "prove one formula in all calculi and diff");
  compare->add_option("formula", formula_text, "formula")->required();
  add_logic(compare);
  compare->add_option("--budget", budget_nodes, "per-engine node budget");
  compare->add_option("--format", format, "text | json");

  CLI11_PARSE(app, argc, argv);

  try {
    Budget budget;
    budget.nodes = budget_nodes;
    Bounds bounds{kripke_worlds, nbr_worlds};

    if (prove->parsed()) {
      LogicSpec logic = parse_logic_flag(logic_flag);
      Formula f = parse_formula(formula_text);
      auto out = run_prove(logic, calc, f, budget);
      return emit_outcome(out, logic, f, format, bounds);
    }

    if (check->parsed()) {
      ProofDocument doc = document_from_json(read_file(in_path));
      auto result = check_document(doc);
      if (format == "json") {
        nlohmann::json j{{"ok", result.ok}};
        if (!result.ok) {
          j["message"] = result.message;
          j["node"] = result.node;
        }
        std::cout << j.dump(2) << "\n";
      } else if (result.ok) {
        std::cout << "accepted: " << doc.calculus << " proof of " << doc.endpoint_text() << "\n";
      } else {
        std::cout << "rejected: " << result.message << " (premise path:";
        for (int k : result.node) std::cout << " " << k;
        std::cout << ")\n";
      }
      return result.ok ? kExitProved : kExitRefuted;
    }

    if (translate->parsed()) {
      ProofDocument doc = document_from_json(read_file(in_path));
      ProofDocument out_doc;
      out_doc.logic = doc.logic;
      if (doc.calculus == "ns" && to_calc == "lbns") {
        out_doc.calculus = "lbns";
        out_doc.derivation =
            tl_translate(doc.logic, std::get<Derivation<NestedSequent>>(doc.derivation));
      } else if (doc.calculus == "ns" && to_calc == "lns") {
        out_doc.calculus = "lns";
        out_doc.derivation =
            linearise(doc.logic, std::get<Derivation<NestedSequent>>(doc.derivation));
      } else if (doc.calculus == "ns" && to_calc == "sc") {
        out_doc.calculus = "sc";
        out_doc.derivation = collapse_blocks(
            doc.logic, linearise(doc.logic, std::get<Derivation<NestedSequent>>(doc.derivation)));
      } else if (doc.calculus == "lns" && to_calc == "sc") {
        out_doc.calculus = "sc";
        out_doc.derivation =
            collapse_blocks(doc.logic, std::get<Derivation<LinearNested>>(doc.derivation));
      } else if (doc.calculus == "lbns" && to_calc == "labelled") {
        out_doc.calculus = "labelled";
        out_doc.derivation =
            lbns_to_labelled(doc.logic, std::get<Derivation<LabelledSequent>>(doc.derivation));
      } else if (doc.calculus == "labelled" && to_calc == "lbns") {
        out_doc.calculus = "lbns";
        out_doc.derivation = labelled_to_lbns(
            doc.logic, std::get<Derivation<LabelledSequent>>(doc.derivation), budget);
      } else {
        throw std::invalid_argument("unsupported translation " + doc.calculus + " -> " + to_calc);
      }
      auto verdict = check_document(out_doc);
      if (!verdict.ok)
        throw std::logic_error("internal error: translated proof failed its checker: " +
                               verdict.message);
      std::string text = document_to_json(out_doc);
      if (out_path.empty()) {
        std::cout << text << "\n";
      } else {
        std::ofstream out(out_path);
        out << text << "\n";
      }
      return kExitProved;
    }

    if (cm_cmd->parsed()) {
      LogicSpec logic = parse_logic_flag(logic_flag);
      Formula f = parse_formula(formula_text);
      auto cm = countermodel(logic, f, bounds);
      if (format == "json") {
        nlohmann::json j{{"found", cm.has_value()}};
        if (cm) j["countermodel"] = render_countermodel(*cm);
        std::cout << j.dump(2) << "\n";
      } else if (cm) {
        std::cout << render_countermodel(*cm);
      } else {
        std::cout << "no countermodel within bounds (" << bounds.kripke_worlds << " Kripke / "
                  << bounds.nbr_worlds << " neighbourhood worlds)\n";
      }
      return cm ? kExitRefuted : kExitExhausted;
    }

    if (corpus->parsed()) {
      LogicSpec logic = parse_logic_flag(logic_flag);
      CorpusParams params;
      params.seed = seed;
      FormulaGen gen(logic, params);
      const char* calcs[] = {"sc", "ns", "lns", "labelled"};
      int agreed = 0, skipped = 0, proved = 0;
      std::vector<std::string> disagreements;
      nlohmann::json rows = nlohmann::json::array();
      for (int n = 0; n < count; n++) {
        Formula f = gen.next();
        SearchStatus statuses[4];
        for (int c = 0; c < 4; c++) statuses[c] = run_prove(logic, calcs[c], f, budget).status;
        bool any_exhausted = false, any_diff = false;
        for (int c = 0; c < 4; c++) {
          any_exhausted = any_exhausted || statuses[c] == SearchStatus::Exhausted;
          any_diff = any_diff || statuses[c] != statuses[0];
        }
        if (any_exhausted) {
          skipped++;
        } else if (any_diff) {
          std::string line = render_formula(f) + ":";
          for (int c = 0; c < 4; c++)
            line += std::string(" ") + calcs[c] + "=" + status_name(statuses[c]);
          disagreements.push_back(line);
        } else {
          agreed++;
          if (statuses[0] == SearchStatus::Proved) proved++;
        }
        if (format == "json")
          rows.push_back({{"formula", render_formula(f)},
                          {"sc", status_name(statuses[0])},
                          {"ns", status_name(statuses[1])},
                          {"lns", status_name(statuses[2])},
                          {"labelled", status_name(statuses[3])}});
      }
      if (format == "json") {
        nlohmann::json j{{"count", count},         {"agreed", agreed},
                         {"proved", proved},       {"skipped", skipped},
                         {"disagreements", disagreements}, {"results", rows}};
        std::cout << j.dump(2) << "\n";
      } else {
        std::cout << "corpus: " << count << " formulas, " << agreed << " agreed (" << proved
                  << " proved), " << skipped << " out of budget, " << disagreements.size()
                  << " disagreements\n";
        for (const auto& d : disagreements) std::cout << "  " << d << "\n";
      }
      return disagreements.empty() ? kExitProved : kExitRefuted;
    }

    if (compare->parsed()) {
      LogicSpec logic = parse_logic_flag(logic_flag);
      Formula f = parse_formula(formula_text);
      const char* calcs[] = {"sc", "ns", "lns", "lbns", "labelled"};
      SearchStatus statuses[5];
      nlohmann::json j = nlohmann::json::object();
      for (int c = 0; c < 5; c++) {
        auto out = run_prove(logic, calcs[c], f, budget);
        statuses[c] = out.status;
        j[calcs[c]] = status_name(out.status);
        if (format != "json")
          std::cout << calcs[c] << ": " << status_name(out.status) << " (" << out.nodes
                    << " nodes)\n";
      }
      if (format == "json") std::cout << j.dump(2) << "\n";
      bool any_exhausted = false, any_diff = false;
      for (int c = 0; c < 5; c++) {
        any_exhausted = any_exhausted || statuses[c] == SearchStatus::Exhausted;
        any_diff = any_diff || statuses[c] != statuses[0];
      }
      if (any_exhausted) return kExitExhausted;
      if (any_diff) {
        std::cout << "DISAGREEMENT\n";
        return kExitRefuted;
      }
      return statuses[0] == SearchStatus::Proved ? kExitProved : kExitRefuted;
    }
  } catch (const ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}
