#include "req2ltl/ltl.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>
#include <utility>

#include "req2ltl/errors.hpp"
#include "term_syntax.hpp"

namespace req2ltl::ltl {

bool is_unary(Op op) noexcept {
  return op == Op::Not || op == Op::Next || op == Op::Eventually || op == Op::Globally;
}

bool is_binary(Op op) noexcept {
  return op == Op::And || op == Op::Or || op == Op::Implies || op == Op::Until;
}

// ---------------------------------------------------------------------------
// Formula

Formula Formula::atom(std::string text) {
  auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) throw std::invalid_argument("atom text must be non-empty");
  auto last = text.find_last_not_of(" \t\r\n");
  text = text.substr(first, last - first + 1);
  return Formula(std::make_shared<const Node>(Node{Op::Atom, std::move(text), {}}));
}

Formula Formula::unary(Op op, Formula child) {
  if (!is_unary(op)) throw std::invalid_argument("not a unary operator");
  return Formula(std::make_shared<const Node>(Node{op, {}, {std::move(child)}}));
}

Formula Formula::binary(Op op, Formula left, Formula right) {
  if (!is_binary(op)) throw std::invalid_argument("not a binary operator");
  return Formula(std::make_shared<const Node>(Node{op, {}, {std::move(left), std::move(right)}}));
}

Formula Formula::negation(Formula child) { return unary(Op::Not, std::move(child)); }
Formula Formula::next(Formula child) { return unary(Op::Next, std::move(child)); }
Formula Formula::eventually(Formula child) { return unary(Op::Eventually, std::move(child)); }
Formula Formula::globally(Formula child) { return unary(Op::Globally, std::move(child)); }
Formula Formula::conjunction(Formula l, Formula r) { return binary(Op::And, std::move(l), std::move(r)); }
Formula Formula::disjunction(Formula l, Formula r) { return binary(Op::Or, std::move(l), std::move(r)); }
Formula Formula::implies(Formula l, Formula r) { return binary(Op::Implies, std::move(l), std::move(r)); }
Formula Formula::until(Formula l, Formula r) { return binary(Op::Until, std::move(l), std::move(r)); }

const Formula& Formula::child() const {
  if (!is_unary(op())) throw std::logic_error("child() on a non-unary formula");
  return node_->operands[0];
}

const Formula& Formula::left() const {
  if (!is_binary(op())) throw std::logic_error("left() on a non-binary formula");
  return node_->operands[0];
}

const Formula& Formula::right() const {
  if (!is_binary(op())) throw std::logic_error("right() on a non-binary formula");
  return node_->operands[1];
}

std::size_t Formula::size() const noexcept {
  std::size_t n = 1;
  for (const auto& c : node_->operands) n += c.size();
  return n;
}

std::size_t Formula::depth() const noexcept {
  std::size_t d = 0;
  for (const auto& c : node_->operands) d = std::max(d, c.depth());
  return d + 1;
}

bool operator==(const Formula& a, const Formula& b) noexcept {
  if (a.node_ == b.node_) return true;
  if (a.node_->op != b.node_->op || a.node_->text != b.node_->text) return false;
  const auto& x = a.node_->operands;
  const auto& y = b.node_->operands;
  if (x.size() != y.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] == y[i])) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

using detail::Lexer;
using detail::Token;
using detail::TokenKind;

constexpr int kMaxNesting = 1000;

class Parser {
 public:
  explicit Parser(std::string_view text) : lex_(text) { tok_ = lex_.next(); }

  Formula parse() {
    Formula f = parse_implies();
    if (tok_.kind != TokenKind::End) fail("end of input or binary operator", "unexpected '" + tok_.text + "'");
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& expected, const std::string& detail) const {
    throw SyntaxError(tok_.offset, expected, detail);
  }

  void advance() { tok_ = lex_.next(); }

  struct DepthGuard {
    explicit DepthGuard(Parser& p) : p_(p) {
      if (++p_.depth_ > kMaxNesting) p_.fail("shallower nesting", "formula nested too deeply");
    }
    ~DepthGuard() { --p_.depth_; }
    Parser& p_;
  };

  Formula parse_implies() {
    DepthGuard guard(*this);
    Formula lhs = parse_or();
    if (tok_.kind == TokenKind::Implies) {
      advance();
      return Formula::implies(std::move(lhs), parse_implies());
    }
    return lhs;
  }

  Formula parse_or() {
    Formula lhs = parse_and();
    while (tok_.kind == TokenKind::Or) {
      advance();
      lhs = Formula::disjunction(std::move(lhs), parse_and());
    }
    return lhs;
  }

  Formula parse_and() {
    Formula lhs = parse_until();
    while (tok_.kind == TokenKind::And) {
      advance();
      lhs = Formula::conjunction(std::move(lhs), parse_until());
    }
    return lhs;
  }

  Formula parse_until() {
    Formula lhs = parse_unary();
    while (tok_.kind == TokenKind::Until) {
      advance();
      lhs = Formula::until(std::move(lhs), parse_unary());
    }
    return lhs;
  }

  Formula parse_unary() {
    DepthGuard guard(*this);
    switch (tok_.kind) {
      case TokenKind::Not:
        advance();
        return Formula::negation(parse_unary());
      case TokenKind::Next:
        advance();
        return Formula::next(parse_unary());
      case TokenKind::Eventually:
        advance();
        return Formula::eventually(parse_unary());
      case TokenKind::Globally:
        advance();
        return Formula::globally(parse_unary());
      case TokenKind::LParen: {
        advance();
        Formula inner = parse_implies();
        if (tok_.kind != TokenKind::RParen) fail("')'", "unbalanced parenthesis");
        advance();
        return inner;
      }
      case TokenKind::Ident:
        return parse_atom();
      case TokenKind::End:
        fail("formula", "unexpected end of input");
      default:
        fail("formula", "unexpected '" + tok_.text + "'");
    }
  }

  Formula parse_atom() {
    std::string text = tok_.text;
    advance();
    if (tok_.kind != TokenKind::RelOp) return Formula::atom(std::move(text));
    text += ' ';
    text += tok_.text;
    advance();
    text += ' ';
    text += parse_operand();
    while (tok_.kind == TokenKind::ArithOp) {
      text += ' ';
      text += tok_.text;
      advance();
      text += ' ';
      text += parse_operand();
    }
    return Formula::atom(std::move(text));
  }

  std::string parse_operand() {
    if (tok_.kind == TokenKind::Ident || tok_.kind == TokenKind::Number) {
      std::string t = tok_.text;
      advance();
      return t;
    }
    if (tok_.kind == TokenKind::ArithOp && tok_.text == "-") {
      advance();
      if (tok_.kind != TokenKind::Number) fail("number", "'-' must precede a number");
      std::string t = "-" + tok_.text;
      advance();
      return t;
    }
    fail("identifier or number", tok_.kind == TokenKind::End ? "unexpected end of input"
                                                              : "unexpected '" + tok_.text + "'");
  }

  Lexer lex_;
  Token tok_;
  int depth_ = 0;
};

// ---------------------------------------------------------------------------
// Printer

int precedence(Op op) {
  switch (op) {
    case Op::Implies: return 1;
    case Op::Or: return 2;
    case Op::And: return 3;
    case Op::Until: return 4;
    case Op::Atom: return 6;
    default: return 5;
  }
}

const char* spelling(Op op) {
  switch (op) {
    case Op::Not: return "!";
    case Op::Next: return "X";
    case Op::Eventually: return "F";
    case Op::Globally: return "G";
    case Op::And: return "&";
    case Op::Or: return "|";
    case Op::Implies: return "->";
    case Op::Until: return "U";
    case Op::Atom: break;
  }
  return "";
}

bool is_relational_atom(const Formula& f) {
  return f.is_atom() && f.text().find(' ') != std::string::npos;
}

void emit(const Formula& f, bool parens, std::vector<PrintToken>& out);

void emit_node(const Formula& f, std::vector<PrintToken>& out) {
  const Op op = f.op();
  if (op == Op::Atom) {
    out.push_back({PrintToken::Kind::Atom, f.text()});
    return;
  }
  if (is_unary(op)) {
    out.push_back({PrintToken::Kind::Operator, spelling(op)});
    const Formula& c = f.child();
    emit(c, is_binary(c.op()) || is_relational_atom(c), out);
    return;
  }
  const int p = precedence(op);
  const Formula& l = f.left();
  const Formula& r = f.right();
  const bool right_assoc = op == Op::Implies;
  const bool lp = precedence(l.op()) < p || (precedence(l.op()) == p && right_assoc) ||
                  (l.op() == Op::Until && op != Op::Until);
  const bool rp = precedence(r.op()) < p || (precedence(r.op()) == p && !right_assoc) ||
                  (r.op() == Op::Until && op != Op::Until);
  emit(l, lp, out);
  out.push_back({PrintToken::Kind::Operator, spelling(op)});
  emit(r, rp, out);
}

void emit(const Formula& f, bool parens, std::vector<PrintToken>& out) {
  if (parens) out.push_back({PrintToken::Kind::Paren, "("});
  emit_node(f, out);
  if (parens) out.push_back({PrintToken::Kind::Paren, ")"});
}

bool is_binary_spelling(const std::string& t) { return t == "&" || t == "|" || t == "->" || t == "U"; }
bool is_spaced_unary(const std::string& t) { return t == "G" || t == "F" || t == "X"; }

}  // namespace

Formula parse_ltl(std::string_view text) { return Parser(text).parse(); }

std::vector<PrintToken> print_tokens(const Formula& f) {
  std::vector<PrintToken> out;
  emit(f, false, out);
  return out;
}

std::string print_ltl(const Formula& f) {
  const auto tokens = print_tokens(f);
  std::string s;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto& t = tokens[i];
    if (i > 0) {
      const auto& prev = tokens[i - 1];
      const bool prev_op = prev.kind == PrintToken::Kind::Operator;
      const bool cur_op = t.kind == PrintToken::Kind::Operator;
      if ((prev_op && (is_binary_spelling(prev.text) || is_spaced_unary(prev.text))) ||
          (cur_op && is_binary_spelling(t.text))) {
        s += ' ';
      }
    }
    s += t.text;
  }
  return s;
}

// ---------------------------------------------------------------------------
// Atom utilities

std::set<std::string> collect_aps(const Formula& f) {
  std::set<std::string> out;
  std::vector<const Formula*> stack{&f};
  while (!stack.empty()) {
    const Formula* cur = stack.back();
    stack.pop_back();
    if (cur->is_atom()) {
      out.insert(cur->text());
    } else if (is_unary(cur->op())) {
      stack.push_back(&cur->child());
    } else {
      stack.push_back(&cur->left());
      stack.push_back(&cur->right());
    }
  }
  return out;
}

bool is_placeholder(std::string_view atom) {
  if (atom.size() < 5 || atom.substr(0, 4) != "Prop") return false;
  return std::all_of(atom.begin() + 4, atom.end(), [](unsigned char c) { return std::isdigit(c) != 0; });
}

Formula substitute_placeholders(const Formula& f, const std::map<std::string, std::string>& mapping) {
  if (f.is_atom()) {
    if (!is_placeholder(f.text())) return f;
    auto it = mapping.find(f.text());
    if (it == mapping.end()) throw MissingPlaceholder(f.text());
    return Formula::atom(it->second);
  }
  if (is_unary(f.op())) return Formula::unary(f.op(), substitute_placeholders(f.child(), mapping));
  return Formula::binary(f.op(), substitute_placeholders(f.left(), mapping),
                         substitute_placeholders(f.right(), mapping));
}

}  // namespace req2ltl::ltl
