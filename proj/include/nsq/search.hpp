#pragma once

#include <optional>

#include "nsq/derivation.hpp"

namespace nsq {

enum class SearchStatus { Proved, Refuted, Exhausted };

struct Budget {
  long nodes = 100000;  // search-node expansions
  int max_height = -1;  // -1: unbounded; otherwise prune deeper attempts
};

template <typename J>
struct SearchResult {
  SearchStatus status = SearchStatus::Refuted;
  std::optional<Derivation<J>> derivation;
  long nodes_used = 0;

  bool proved() const { return status == SearchStatus::Proved; }
};

// Shared budget accounting for the backward-search engines. `spend` returns
// false once the allowance is gone; the engines then unwind and report
// Exhausted instead of Refuted.
struct BudgetMeter {
  long limit;
  long used = 0;
  bool out = false;

  explicit BudgetMeter(long nodes) : limit(nodes) {}
  bool spend() {
    if (used >= limit) {
      out = true;
      return false;
    }
    used++;
    return true;
  }
};

}  // namespace nsq
