#include "nsq/corpus.hpp"

namespace nsq {

FormulaGen::FormulaGen(const LogicSpec& logic, CorpusParams params)
    : logic_(logic), params_(params), rng_(params.seed) {}

Formula FormulaGen::next() { return gen(params_.max_depth, params_.max_box_depth); }

Formula FormulaGen::gen(int depth, int box_budget) {
  static const char* names[] = {"a", "b", "c", "d", "e", "f"};
  int atoms = std::min(params_.atom_count, 6);
  if (depth <= 1) {
    int k = pick(atoms + 1);
    return k == atoms ? Formula::bottom() : Formula::atom(names[k]);
  }
  const bool boxes = logic_.is_modal() && box_budget > 0;
  // Weights: leaves 3, conjunction 2, disjunction 2, implication 3,
  // negation 1, box 3 (when available).
  int total = 11 + (boxes ? 3 : 0);
  int k = pick(total);
  if (k < 3) {
    int a = pick(atoms + 1);
    return a == atoms ? Formula::bottom() : Formula::atom(names[a]);
  }
  if (k < 5) return Formula::conj(gen(depth - 1, box_budget), gen(depth - 1, box_budget));
  if (k < 7) return Formula::disj(gen(depth - 1, box_budget), gen(depth - 1, box_budget));
  if (k < 10) return Formula::imp(gen(depth - 1, box_budget), gen(depth - 1, box_budget));
  if (k < 11) return Formula::neg(gen(depth - 1, box_budget));
  int index = 1;
  if (logic_.kind == LogicKind::Multimodal && logic_.desc.indices.size() > 1)
    index = logic_.desc.indices[pick(static_cast<int>(logic_.desc.indices.size()))];
  return Formula::box(index, gen(depth - 1, box_budget - 1));
}

}  // namespace nsq
