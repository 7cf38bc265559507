#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "nsq/formula.hpp"

namespace nsq {

enum class Axiom : uint8_t { D, T, Four };

std::string axiom_name(Axiom a);
std::optional<Axiom> axiom_from_name(std::string_view s);

// A simply dependent multimodal description (N, <=, F): a finite index set,
// a partial order on it, and per-index axiom sets drawn from {D, T, 4}.
struct Description {
  std::vector<int> indices;                    // sorted, unique
  std::set<std::pair<int, int>> order;         // (j, i) meaning j <= i; reflexive pairs implied
  std::map<int, std::set<Axiom>> axioms;

  bool has_index(int i) const;
  bool leq(int j, int i) const;  // reflexive

  // Axioms of the logic at index i. D and T propagate upward along <= (the
  // interaction axioms derive them), and T yields D; 4 does not propagate,
  // which is why descriptions must be transitive-closed.
  bool has_d(int i) const;
  bool has_t(int i) const;
  bool has_4(int i) const;
};

enum class UpsetFilter { All, Ax, NotAx };

// upset(d, j, All)      = { i : j <= i }
// upset(d, j, Ax, a)    = { i : j <= i, a in F(i) }
// upset(d, j, NotAx, a) = { i : j <= i, a not in F(i) }
std::vector<int> upset(const Description& d, int j, UpsetFilter filter, Axiom a = Axiom::D);

struct Violation {
  std::string condition;  // "reflexivity" | "transitivity" | "antisymmetry" | "transitive-closed" | "unknown-index"
  int i = 0, j = 0;
  std::string to_string() const;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

ValidationReport validate_description(const Description& d);

enum class LogicKind { Intuitionistic, Multimodal, NonNormalE, NonNormalM };

struct LogicSpec {
  LogicKind kind = LogicKind::Intuitionistic;
  Description desc;  // Multimodal only

  static LogicSpec mlj() { return {LogicKind::Intuitionistic, {}}; }
  static LogicSpec multimodal(Description d);  // throws std::invalid_argument if invalid
  static LogicSpec e() { return {LogicKind::NonNormalE, {}}; }
  static LogicSpec m() { return {LogicKind::NonNormalM, {}}; }

  bool is_modal() const { return kind != LogicKind::Intuitionistic; }
  bool classical_base() const { return kind != LogicKind::Intuitionistic; }

  // Short id used in documents / CLI: "mlj", "k", "e", ... or "desc".
  std::string id() const;
};

// Shipped presets: k, kd, kt, k4, s4, kd4 (single index 1) and bimodal
// (indices {1,2}, 1 <= 2, no axioms).
LogicSpec preset_logic(const std::string& name);
std::vector<std::string> preset_names();

// Description config text, one item per line:
//   indices: 1 2
//   order: 1 <= 2, 1 <= 3
//   axioms 1: D T
// Lines starting with '#' are comments.
Description parse_description(std::string_view text);
std::string render_description(const Description& d);

// Checks every box index of f against the logic; returns the first offender.
std::optional<int> find_unknown_index(const LogicSpec& logic, const Formula& f);

}  // namespace nsq
