#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "nsq/formula.hpp"

namespace nsq {

// A multiset of formulas kept as a sorted vector. All judgments produced by
// the rule engines are duplicate-free (rule application contracts its
// output), but parsing keeps whatever multiplicities the user wrote.
using FormulaSet = std::vector<Formula>;

void ms_insert(FormulaSet& ms, const Formula& f);
// Inserts f unless already present.
void ms_insert_new(FormulaSet& ms, const Formula& f);
// Removes one occurrence; returns false if absent.
bool ms_erase_one(FormulaSet& ms, const Formula& f);
bool ms_contains(const FormulaSet& ms, const Formula& f);
FormulaSet ms_dedup(const FormulaSet& ms);
void ms_sort(FormulaSet& ms);

struct Sequent {
  FormulaSet ante;  // antecedent, sorted
  FormulaSet succ;  // succedent, sorted

  bool empty() const { return ante.empty() && succ.empty(); }
  Sequent contracted() const { return Sequent{ms_dedup(ante), ms_dedup(succ)}; }

  friend bool operator==(const Sequent& a, const Sequent& b) {
    return a.ante == b.ante && a.succ == b.succ;
  }
  friend bool operator!=(const Sequent& a, const Sequent& b) { return !(a == b); }
};

// Text form: "f1, f2 |- g1, g2"; either side may be empty.
Sequent parse_sequent(std::string_view text);
std::string render_sequent(const Sequent& s);

// Canonical key for loop checks and subproblem blocking (duplicate-free
// rendering, so two interderivable-by-contraction sequents share a key).
std::string sequent_key(const Sequent& s);

}  // namespace nsq
