#include "nsq/formula.hpp"

#include <cctype>

namespace nsq {

struct Formula::Node {
  Conn tag;
  std::string atom;
  int index = 0;
  std::shared_ptr<const Node> l, r;
  size_t hash = 0;
  int size = 1;
  int depth = 1;
  int box_depth = 0;
};

namespace {

size_t mix(size_t h, size_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

}  // namespace

Formula Formula::atom(std::string name) {
  auto n = std::make_shared<Node>();
  n->tag = Conn::Atom;
  n->atom = std::move(name);
  n->hash = mix(std::hash<std::string>{}(n->atom), 1);
  return Formula(std::move(n));
}

Formula Formula::bottom() {
  static const std::shared_ptr<const Node> bot = [] {
    auto n = std::make_shared<Node>();
    n->tag = Conn::Bottom;
    n->hash = 2;
    return n;
  }();
  return Formula(bot);
}

Formula Formula::conj(Formula l, Formula r) { return binary(Conn::And, std::move(l), std::move(r), 3); }
Formula Formula::disj(Formula l, Formula r) { return binary(Conn::Or, std::move(l), std::move(r), 4); }
Formula Formula::imp(Formula l, Formula r) { return binary(Conn::Imp, std::move(l), std::move(r), 5); }

Formula Formula::iff(Formula l, Formula r) {
  return conj(imp(l, r), imp(r, l));
}

Formula Formula::box(int index, Formula body) {
  auto n = std::make_shared<Node>();
  n->tag = Conn::Box;
  n->index = index;
  n->hash = mix(mix(6, static_cast<size_t>(index)), body.hash());
  n->size = 1 + body.size();
  n->depth = 1 + body.depth();
  n->box_depth = 1 + body.box_depth();
  n->l = body.node_;
  return Formula(std::move(n));
}

Formula Formula::binary(Conn tag, Formula l, Formula r, size_t salt) {
  auto n = std::make_shared<Node>();
  n->tag = tag;
  n->hash = mix(mix(salt, l.hash()), r.hash());
  n->size = 1 + l.size() + r.size();
  n->depth = 1 + std::max(l.depth(), r.depth());
  n->box_depth = std::max(l.box_depth(), r.box_depth());
  n->l = l.node_;
  n->r = r.node_;
  return Formula(std::move(n));
}

Conn Formula::tag() const {
  if (!node_) throw std::logic_error("null formula");
  return node_->tag;
}

const std::string& Formula::atom_name() const {
  if (tag() != Conn::Atom) throw std::logic_error("not an atom");
  return node_->atom;
}

int Formula::box_index() const {
  if (tag() != Conn::Box) throw std::logic_error("not a box");
  return node_->index;
}

Formula Formula::left() const {
  if (!node_ || !node_->l) throw std::logic_error("no left subformula");
  return Formula(node_->l);
}

Formula Formula::right() const {
  if (!node_ || !node_->r) throw std::logic_error("no right subformula");
  return Formula(node_->r);
}

size_t Formula::hash() const { return node_ ? node_->hash : 0; }
int Formula::size() const { return node_ ? node_->size : 0; }
int Formula::depth() const { return node_ ? node_->depth : 0; }
int Formula::box_depth() const { return node_ ? node_->box_depth : 0; }

void Formula::collect_box_indices(std::vector<int>& out) const {
  if (!node_) return;
  if (node_->tag == Conn::Box) out.push_back(node_->index);
  if (node_->l) Formula(node_->l).collect_box_indices(out);
  if (node_->r) Formula(node_->r).collect_box_indices(out);
}

bool operator==(const Formula& a, const Formula& b) {
  return compare(a, b) == 0;
}

int compare(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return 0;
  if (!a.node_) return -1;
  if (!b.node_) return 1;
  // Order by size first: keeps small formulas early in sorted multisets.
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  if (a.tag() != b.tag()) return static_cast<int>(a.tag()) < static_cast<int>(b.tag()) ? -1 : 1;
  switch (a.tag()) {
    case Conn::Atom:
      return a.atom_name().compare(b.atom_name()) < 0 ? -1 : (a.atom_name() == b.atom_name() ? 0 : 1);
    case Conn::Bottom:
      return 0;
    case Conn::Box: {
      if (a.box_index() != b.box_index()) return a.box_index() < b.box_index() ? -1 : 1;
      return compare(a.body(), b.body());
    }
    default: {
      int c = compare(a.left(), b.left());
      if (c != 0) return c;
      return compare(a.right(), b.right());
    }
  }
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

struct Parser {
  std::string_view text;
  size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) pos++;
  }

  bool eat(std::string_view tok) {
    skip_ws();
    if (text.substr(pos, tok.size()) == tok) {
      // Do not let "->" swallow the prefix of "->" inside "<->" etc.; tokens
      // here are unambiguous by call order.
      pos += tok.size();
      return true;
    }
    return false;
  }

  bool peek(std::string_view tok) {
    skip_ws();
    return text.substr(pos, tok.size()) == tok;
  }

  [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, pos); }

  Formula formula() { return iff(); }

  Formula iff() {
    Formula l = imp();
    if (eat("<->")) {
      Formula r = iff();
      return Formula::iff(l, r);
    }
    return l;
  }

  Formula imp() {
    Formula l = disj();
    if (peek("<->")) return l;
    if (eat("->")) {
      Formula r = imp();
      return Formula::imp(l, r);
    }
    return l;
  }

  Formula disj() {
    Formula l = conj();
    if (peek("||")) return l;  // belongs to labelled-sequent syntax, never here
    if (eat("|")) {
      Formula r = disj();
      return Formula::disj(l, r);
    }
    return l;
  }

  Formula conj() {
    Formula l = unary();
    if (eat("&")) {
      Formula r = conj();
      return Formula::conj(l, r);
    }
    return l;
  }

  Formula unary() {
    skip_ws();
    if (eat("~")) return Formula::neg(unary());
    if (eat("[")) {
      skip_ws();
      int index = 1;
      if (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
        index = 0;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
          index = index * 10 + (text[pos] - '0');
          pos++;
        }
      }
      if (!eat("]")) fail("expected ']'");
      return Formula::box(index, unary());
    }
    return atom();
  }

  Formula atom() {
    skip_ws();
    if (eat("(")) {
      Formula f = formula();
      if (!eat(")")) fail("expected ')'");
      return f;
    }
    if (pos >= text.size()) fail("unexpected end of input");
    char c = text[pos];
    if (!std::islower(static_cast<unsigned char>(c))) fail("unexpected token");
    size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
      pos++;
    std::string name(text.substr(start, pos - start));
    if (name == "bot") return Formula::bottom();
    if (name == "top") return Formula::top();
    return Formula::atom(std::move(name));
  }
};

enum Prec { PIff = 1, PImp = 2, POr = 3, PAnd = 4, PUnary = 5 };

void render(const Formula& f, int min_prec, std::string& out) {
  switch (f.tag()) {
    case Conn::Atom:
      out += f.atom_name();
      return;
    case Conn::Bottom:
      out += "bot";
      return;
    case Conn::Box: {
      if (f.box_index() == 1)
        out += "[]";
      else
        out += "[" + std::to_string(f.box_index()) + "]";
      render(f.body(), PUnary, out);
      return;
    }
    case Conn::Imp: {
      // Sugar on output: A -> bot prints as ~A, bot -> bot as top.
      if (f.right().is_bottom()) {
        if (f.left().is_bottom()) {
          out += "top";
          return;
        }
        out += "~";
        render(f.left(), PUnary, out);
        return;
      }
      bool paren = min_prec > PImp;
      if (paren) out += "(";
      render(f.left(), PImp + 1, out);
      out += " -> ";
      render(f.right(), PImp, out);
      if (paren) out += ")";
      return;
    }
    case Conn::Or: {
      bool paren = min_prec > POr;
      if (paren) out += "(";
      render(f.left(), POr + 1, out);
      out += " | ";
      render(f.right(), POr, out);
      if (paren) out += ")";
      return;
    }
    case Conn::And: {
      bool paren = min_prec > PAnd;
      if (paren) out += "(";
      render(f.left(), PAnd + 1, out);
      out += " & ";
      render(f.right(), PAnd, out);
      if (paren) out += ")";
      return;
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace

Formula parse_formula(std::string_view text) {
  Parser p{text};
  Formula f = p.formula();
  p.skip_ws();
  if (p.pos != text.size()) p.fail("trailing input");
  return f;
}

std::string render_formula(const Formula& f) {
  std::string out;
  render(f, 0, out);
  return out;
}

}  // namespace nsq
