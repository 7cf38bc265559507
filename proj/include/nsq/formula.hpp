#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nsq {

enum class Conn : uint8_t { Atom, Bottom, And, Or, Imp, Box };

// Immutable formula tree with shared subterms. Negation, top and
// bi-implication are parser sugar and never appear as constructors:
//   ~A   = A -> bot,   top = bot -> bot,   A <-> B = (A -> B) & (B -> A).
class Formula {
public:
  Formula() = default;

  static Formula atom(std::string name);
  static Formula bottom();
  static Formula conj(Formula l, Formula r);
  static Formula disj(Formula l, Formula r);
  static Formula imp(Formula l, Formula r);
  static Formula box(int index, Formula body);
  static Formula neg(Formula a) { return imp(std::move(a), bottom()); }
  static Formula top() { return imp(bottom(), bottom()); }
  static Formula iff(Formula l, Formula r);

  bool is_null() const { return node_ == nullptr; }
  Conn tag() const;
  const std::string& atom_name() const;
  int box_index() const;
  Formula left() const;
  Formula right() const;
  Formula body() const { return left(); }

  bool is_atom() const { return tag() == Conn::Atom; }
  bool is_bottom() const { return tag() == Conn::Bottom; }
  bool is_box() const { return tag() == Conn::Box; }

  size_t hash() const;
  int size() const;   // number of nodes
  int depth() const;  // atoms/bot have depth 1
  int box_depth() const;

  // Collects the indices of all boxes in the formula.
  void collect_box_indices(std::vector<int>& out) const;

  friend bool operator==(const Formula& a, const Formula& b);
  friend bool operator!=(const Formula& a, const Formula& b) { return !(a == b); }
  friend int compare(const Formula& a, const Formula& b);

private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static Formula binary(Conn tag, Formula l, Formula r, size_t salt);
  std::shared_ptr<const Node> node_;
};

// compare() is a structural total order (size, then tag, then components);
// it keeps multisets canonically sorted.
inline bool operator<(const Formula& a, const Formula& b) { return compare(a, b) < 0; }

struct ParseError : std::runtime_error {
  size_t position;
  ParseError(const std::string& msg, size_t pos)
      : std::runtime_error(msg + " (at position " + std::to_string(pos) + ")"), position(pos) {}
};

// Grammar (loosest to tightest): <->, ->, |, &, prefix ~ and [i].
// -> and <-> associate to the right; | and & are parsed as right folds.
Formula parse_formula(std::string_view text);

// Minimal-parentheses rendering; parse_formula(render_formula(f)) == f.
std::string render_formula(const Formula& f);

}  // namespace nsq
