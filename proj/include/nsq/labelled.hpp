#pragma once

#include <map>

#include "nsq/logic.hpp"
#include "nsq/nested.hpp"

namespace nsq {

// Relation terms. World variables and neighbourhood variables live in
// disjoint namespaces: a label may occur in world slots or neighbourhood
// slots, never both.
enum class RelKind : uint8_t {
  Rel,        // x R y          (intuitionistic image; read as the preorder)
  Leq,        // x <= y         (labelled intuitionistic system)
  RelIdx,     // x Ri y         (multimodal)
  Nbr,        // x N y          (image of a plain nesting, E/M)
  NbrPair,    // x Ne(y1, y2)   (image of a binary nesting, E/M)
  InSet,      // x in a
  NbrOf,      // a in N(x)
  ForcesAll,  // a ||- A
  Covers,     // A <| a
};

struct RelationTerm {
  RelKind kind = RelKind::Rel;
  int index = 0;        // RelIdx only
  std::string a, b, c;  // variables; for NbrPair: a Ne(b, c); for InSet: a in b;
                        // for NbrOf: a in N(b); for ForcesAll: a ||- formula;
                        // for Covers: formula <| a
  Formula formula;      // ForcesAll / Covers

  static RelationTerm rel(std::string x, std::string y);
  static RelationTerm leq(std::string x, std::string y);
  static RelationTerm rel_idx(int i, std::string x, std::string y);
  static RelationTerm nbr(std::string x, std::string y);
  static RelationTerm nbr_pair(std::string x, std::string y1, std::string y2);
  static RelationTerm in_set(std::string x, std::string a);
  static RelationTerm nbr_of(std::string a, std::string x);
  static RelationTerm forces_all(std::string a, Formula f);
  static RelationTerm covers(Formula f, std::string a);

  std::string to_string() const;
};

int compare(const RelationTerm& s, const RelationTerm& t);
inline bool operator==(const RelationTerm& s, const RelationTerm& t) { return compare(s, t) == 0; }
inline bool operator<(const RelationTerm& s, const RelationTerm& t) { return compare(s, t) < 0; }

struct LabelledFormula {
  std::string label;
  Formula formula;
};

int compare(const LabelledFormula& s, const LabelledFormula& t);
inline bool operator==(const LabelledFormula& s, const LabelledFormula& t) {
  return compare(s, t) == 0;
}
inline bool operator<(const LabelledFormula& s, const LabelledFormula& t) {
  return compare(s, t) < 0;
}

// Relation set plus labelled formulas on both sides. right_atoms holds the
// membership atoms x in a that may appear in the succedent.
struct LabelledSequent {
  std::vector<RelationTerm> relations;   // sorted set
  std::vector<LabelledFormula> left;     // sorted, duplicate-free in engine output
  std::vector<LabelledFormula> right;
  std::vector<RelationTerm> right_atoms;

  bool has_term(const RelationTerm& t) const;
  bool has_left(const std::string& label, const Formula& f) const;
  bool has_right(const std::string& label, const Formula& f) const;
  void add_term(RelationTerm t);
  void add_left(std::string label, Formula f);
  void add_right(std::string label, Formula f);
  void add_right_atom(RelationTerm t);
  bool label_used(const std::string& name) const;

  LabelledSequent contracted() const;

  friend bool operator==(const LabelledSequent& a, const LabelledSequent& b) {
    return a.relations == b.relations && a.left == b.left && a.right == b.right &&
           a.right_atoms == b.right_atoms;
  }
  friend bool operator!=(const LabelledSequent& a, const LabelledSequent& b) { return !(a == b); }
};

// Text form:
//   "x R y, x <= y, x R1 y, x N y, x Ne(y1,y2), x in a, a in N(x),
//    a ||- f, f <| a ; x: f1, y: f2 |- x: g1, y in a"
// The relation part and its ';' may be omitted when empty.
LabelledSequent parse_labelled(std::string_view text);
std::string render_labelled(const LabelledSequent& s);

std::string labelled_key(const LabelledSequent& s);

// The three labelled-nested-sequent conditions: treelike relations, a single
// shared label when the relation set is empty, and label coverage.
struct LbnsConditions {
  bool treelike = false;
  bool single_label = false;
  bool coverage = false;
  bool all() const { return treelike && single_label && coverage; }
};
LbnsConditions check_lbns_conditions(const LabelledSequent& s);

// The translation from nested to labelled nested sequents. Plain nestings
// become relational edges (R, Ri, or N depending on the logic), binary
// nestings become Ne terms, and fresh variables are the positional names
// x.<path> (pair members x.<path>.1 and x.<path>.2).
LabelledSequent tl_map(const LogicSpec& logic, const std::string& x, const NestedSequent& u);

// Inverse reading of a treelike labelled sequent; also recovers the
// position -> label assignment so translations can keep user names.
struct TreeReading {
  NestedSequent nested;
  std::map<std::string, std::string> label_of_position;  // position key -> label
};
TreeReading read_tree(const LogicSpec& logic, const LabelledSequent& s);

}  // namespace nsq
