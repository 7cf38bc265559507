#include "nsq/derivation.hpp"

namespace nsq {

std::string Position::to_string() const {
  if (path.empty()) return "e";
  std::string out;
  for (size_t i = 0; i < path.size(); i++) {
    if (i) out += ".";
    out += std::to_string(path[i]);
  }
  return out;
}

PositionOrder position_order(const Position& p, const Position& q) {
  size_t n = std::min(p.path.size(), q.path.size());
  for (size_t i = 0; i < n; i++)
    if (p.path[i] != q.path[i]) return PositionOrder::Incomparable;
  if (p.path.size() == q.path.size()) return PositionOrder::Equal;
  return p.path.size() < q.path.size() ? PositionOrder::Below : PositionOrder::Above;
}

}  // namespace nsq
