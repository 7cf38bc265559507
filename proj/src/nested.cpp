#include "nsq/nested.hpp"

#include <algorithm>

namespace nsq {

Child Child::plain(NestedSequent u, std::optional<int> index) {
  Child c;
  c.kind = Plain;
  c.index = index;
  c.body = std::make_shared<NestedSequent>(std::move(u));
  return c;
}

Child Child::marked(Sequent left, Sequent right) {
  Child c;
  c.kind = Marked;
  c.pair_left = std::move(left);
  c.pair_right = std::move(right);
  return c;
}

Child Child::hole(std::optional<int> index) {
  Child c;
  c.kind = Hole;
  c.index = index;
  return c;
}

bool operator==(const Child& a, const Child& b) {
  if (a.kind != b.kind || a.index != b.index) return false;
  switch (a.kind) {
    case Child::Plain: return *a.body == *b.body;
    case Child::Marked: return a.pair_left == b.pair_left && a.pair_right == b.pair_right;
    case Child::Hole: return true;
  }
  return false;
}

NestedSequent nested_of(Sequent s) {
  return NestedSequent{std::move(s.ante), std::move(s.succ), {}};
}

const NestedSequent* node_at(const NestedSequent& u, const Position& pos) {
  const NestedSequent* cur = &u;
  for (int k : pos.path) {
    if (k < 1 || k > static_cast<int>(cur->children.size())) return nullptr;
    const Child& c = cur->children[k - 1];
    if (c.kind != Child::Plain) return nullptr;
    cur = c.body.get();
  }
  return cur;
}

NestedSequent replace_node(const NestedSequent& u, const Position& pos, NestedSequent sub) {
  if (pos.path.empty()) return sub;
  NestedSequent out = u;
  int k = pos.path.front();
  if (k < 1 || k > static_cast<int>(out.children.size()) ||
      out.children[k - 1].kind != Child::Plain)
    throw std::out_of_range("no plain child at position");
  Position rest;
  rest.path.assign(pos.path.begin() + 1, pos.path.end());
  out.children[k - 1].body = std::make_shared<NestedSequent>(
      replace_node(*out.children[k - 1].body, rest, std::move(sub)));
  return out;
}

static int tree_depth(const NestedSequent& u) {
  int best = 1;
  for (const auto& c : u.children)
    if (c.kind == Child::Plain) best = std::max(best, 1 + tree_depth(*c.body));
  return best;
}

int HoledContext::depth() const { return tree_depth(skeleton); }

HoledContext carve_hole(const NestedSequent& u, const Position& parent, int child) {
  const NestedSequent* p = node_at(u, parent);
  if (!p || child < 0 || child >= static_cast<int>(p->children.size()))
    throw std::out_of_range("no child to carve");
  NestedSequent node = *p;
  std::optional<int> idx = node.children[child].index;
  node.children[child] = Child::hole(idx);
  HoledContext ctx;
  ctx.skeleton = replace_node(u, parent, std::move(node));
  ctx.hole = parent.extended(child + 1);
  return ctx;
}

NestedSequent plug(const HoledContext& ctx, const NestedSequent& filler) {
  Position parent;
  parent.path.assign(ctx.hole.path.begin(), ctx.hole.path.end() - 1);
  if (ctx.hole.path.empty()) throw std::invalid_argument("hole position is empty");
  int ordinal = ctx.hole.path.back();
  const NestedSequent* p = node_at(ctx.skeleton, parent);
  if (!p || ordinal < 1 || ordinal > static_cast<int>(p->children.size()) ||
      p->children[ordinal - 1].kind != Child::Hole)
    throw std::invalid_argument("context has no hole at its recorded position");
  // An empty context is just the hole: plugging returns the filler itself.
  if (parent.path.empty() && ctx.skeleton.ante.empty() && ctx.skeleton.succ.empty() &&
      ctx.skeleton.children.size() == 1)
    return filler;
  NestedSequent node = *p;
  if (filler.empty()) {
    node.children.erase(node.children.begin() + (ordinal - 1));
  } else {
    std::optional<int> idx = node.children[ordinal - 1].index;
    node.children[ordinal - 1] = Child::plain(filler, idx);
  }
  return replace_node(ctx.skeleton, parent, std::move(node));
}

// ---------------------------------------------------------------------------
// Text syntax

namespace {

struct Splitter {
  std::string_view text;

  // Splits on top-level commas, respecting (), [] and < > groups.
  std::vector<std::string_view> pieces() const {
    std::vector<std::string_view> out;
    int depth = 0;
    size_t start = 0;
    for (size_t i = 0; i < text.size(); i++) {
      char c = text[i];
      if (c == '(' || c == '[') depth++;
      if (c == ')' || c == ']') depth--;
      if (c == '<' && (i + 1 >= text.size() || text[i + 1] != '-')) depth++;      // '<' of a pair
      if (c == '>' && (i == 0 || text[i - 1] != '-')) depth--;                    // '>' of a pair
      if (c == ',' && depth == 0) {
        out.push_back(text.substr(start, i - start));
        start = i + 1;
      }
    }
    out.push_back(text.substr(start));
    return out;
  }
};

std::string_view trim(std::string_view s) {
  size_t a = s.find_first_not_of(" \t");
  if (a == std::string_view::npos) return {};
  size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

size_t find_turnstile(std::string_view text) {
  int depth = 0;
  for (size_t i = 0; i + 1 < text.size(); i++) {
    char c = text[i];
    if (c == '(' || c == '[') depth++;
    if (c == ')' || c == ']') depth--;
    if (c == '<' && text[i + 1] != '-') depth++;
    if (c == '>' && (i == 0 || text[i - 1] != '-')) depth--;
    if (depth == 0 && c == '|' && text[i + 1] == '-') return i;
  }
  throw ParseError("expected '|-'", 0);
}

size_t find_top_semicolon(std::string_view text) {
  int depth = 0;
  for (size_t i = 0; i < text.size(); i++) {
    char c = text[i];
    if (c == '(' || c == '[') depth++;
    if (c == ')' || c == ']') depth--;
    if (c == '<' && (i + 1 >= text.size() || text[i + 1] != '-')) depth++;
    if (c == '>' && (i == 0 || text[i - 1] != '-')) depth--;
    if (depth == 0 && c == ';') return i;
  }
  throw ParseError("expected ';' in a marked nesting", 0);
}

}  // namespace

NestedSequent parse_nested(std::string_view text) {
  size_t bar = find_turnstile(text);
  NestedSequent out;
  for (auto piece : Splitter{trim(text.substr(0, bar))}.pieces()) {
    piece = trim(piece);
    if (piece.empty()) continue;
    ms_insert(out.ante, parse_formula(piece));
  }
  for (auto piece : Splitter{trim(text.substr(bar + 2))}.pieces()) {
    piece = trim(piece);
    if (piece.empty()) continue;
    // A piece in brackets is a nesting only if the brackets hold a sequent;
    // otherwise it is a formula that merely starts with a box.
    bool is_nesting = false;
    size_t close = std::string_view::npos;
    if (piece.front() == '[') {
      int depth = 0;
      for (size_t i = 0; i < piece.size(); i++) {
        if (piece[i] == '[') depth++;
        if (piece[i] == ']' && --depth == 0) {
          close = i;
          break;
        }
      }
      if (close == std::string_view::npos) throw ParseError("unterminated '['", 0);
      auto inner = piece.substr(1, close - 1);
      int d2 = 0;
      for (size_t i = 0; i + 1 < inner.size(); i++) {
        if (inner[i] == '(' || inner[i] == '[') d2++;
        if (inner[i] == ')' || inner[i] == ']') d2--;
        if (d2 == 0 && inner[i] == '|' && inner[i + 1] == '-') {
          is_nesting = true;
          break;
        }
      }
    }
    if (is_nesting) {
      NestedSequent body = parse_nested(piece.substr(1, close - 1));
      std::optional<int> idx;
      auto tail = trim(piece.substr(close + 1));
      if (!tail.empty()) {
        if (tail.front() != '^') throw ParseError("expected '^index' after ']'", 0);
        idx = std::stoi(std::string(tail.substr(1)));
      }
      out.children.push_back(Child::plain(std::move(body), idx));
    } else if (piece.front() == '<') {
      size_t close = piece.rfind('>');
      if (close == std::string_view::npos) throw ParseError("unterminated '<'", 0);
      auto inner = piece.substr(1, close - 1);
      size_t semi = find_top_semicolon(inner);
      Sequent l = parse_sequent(std::string(trim(inner.substr(0, semi))));
      Sequent r = parse_sequent(std::string(trim(inner.substr(semi + 1))));
      out.children.push_back(Child::marked(std::move(l), std::move(r)));
    } else {
      ms_insert(out.succ, parse_formula(piece));
    }
  }
  return out;
}

std::string render_nested(const NestedSequent& u) {
  std::string out;
  for (size_t i = 0; i < u.ante.size(); i++) {
    if (i) out += ", ";
    out += render_formula(u.ante[i]);
  }
  if (!u.ante.empty()) out += " ";
  out += "|-";
  bool first = true;
  for (const auto& f : u.succ) {
    out += first ? " " : ", ";
    out += render_formula(f);
    first = false;
  }
  for (const auto& c : u.children) {
    out += first ? " " : ", ";
    first = false;
    switch (c.kind) {
      case Child::Plain:
        out += "[" + render_nested(*c.body) + "]";
        if (c.index) out += "^" + std::to_string(*c.index);
        break;
      case Child::Marked:
        out += "< " + render_sequent(c.pair_left) + " ; " + render_sequent(c.pair_right) + " >";
        break;
      case Child::Hole:
        out += "{}";
        if (c.index) out += "^" + std::to_string(*c.index);
        break;
    }
  }
  return out;
}

static NestedSequent key_form(const NestedSequent& u) {
  NestedSequent out;
  out.ante = ms_dedup(u.ante);
  out.succ = ms_dedup(u.succ);
  for (const auto& c : u.children) {
    if (c.kind == Child::Plain)
      out.children.push_back(Child::plain(key_form(*c.body), c.index));
    else
      out.children.push_back(c);
  }
  std::vector<std::pair<std::string, Child>> tagged;
  for (auto& c : out.children) {
    std::string tag;
    switch (c.kind) {
      case Child::Plain:
        tag = "[" + render_nested(*c.body) + "]";
        if (c.index) tag += "^" + std::to_string(*c.index);
        break;
      case Child::Marked:
        tag = "<" + render_sequent(c.pair_left) + ";" + render_sequent(c.pair_right) + ">";
        break;
      case Child::Hole:
        tag = "{}";
        break;
    }
    tagged.push_back({tag, c});
  }
  std::sort(tagged.begin(), tagged.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  tagged.erase(std::unique(tagged.begin(), tagged.end(),
                           [](const auto& a, const auto& b) { return a.first == b.first; }),
               tagged.end());
  out.children.clear();
  for (auto& [tag, c] : tagged) out.children.push_back(c);
  return out;
}

std::string nested_key(const NestedSequent& u) { return render_nested(key_form(u)); }

}  // namespace nsq
