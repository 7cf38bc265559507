#pragma once

#include <cstdint>
#include <random>

#include "nsq/logic.hpp"

namespace nsq {

// Seeded random formulas for the corpus and compare commands. The generator
// uses raw engine output only, so a seed is bit-reproducible everywhere.
struct CorpusParams {
  int max_depth = 5;
  int atom_count = 3;   // atoms a, b, c
  int max_box_depth = 2;
  uint64_t seed = 0;    // callers must set one
};

class FormulaGen {
public:
  FormulaGen(const LogicSpec& logic, CorpusParams params);
  Formula next();

private:
  Formula gen(int depth, int box_budget);
  int pick(int n) { return static_cast<int>(rng_() % static_cast<uint64_t>(n)); }

  LogicSpec logic_;
  CorpusParams params_;
  std::mt19937_64 rng_;
};

}  // namespace nsq
