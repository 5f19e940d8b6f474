#pragma once

// LTL formulas over opaque atom strings.
//
// Grammar accepted by parse_ltl, loosest binding first:
//
//   formula  := or ('->' formula)?               right-associative
//   or       := and ('|' and)*                   left-associative
//   and      := until ('&' until)*               left-associative
//   until    := unary ('U' unary)*               left-associative
//   unary    := ('!' | 'X' | 'F' | 'G') unary | '(' formula ')' | atom
//   atom     := ident (relop term)?
//   term     := operand (('+'|'-'|'*'|'/') operand)*
//
// Alternative spellings: '¬', '&&', '∧', '||', '∨', '→'. Relational atoms
// such as "temperature > 50" are single atoms; their internals are never
// inspected by the temporal semantics.

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace req2ltl::ltl {

enum class Op : unsigned char {
  Atom,
  Not,
  And,
  Or,
  Implies,
  Next,
  Eventually,
  Globally,
  Until,
};

bool is_unary(Op op) noexcept;
bool is_binary(Op op) noexcept;

// Immutable, structurally shared formula. Copies are cheap.
class Formula {
 public:
  static Formula atom(std::string text);
  static Formula negation(Formula child);
  static Formula next(Formula child);
  static Formula eventually(Formula child);
  static Formula globally(Formula child);
  static Formula conjunction(Formula left, Formula right);
  static Formula disjunction(Formula left, Formula right);
  static Formula implies(Formula left, Formula right);
  static Formula until(Formula left, Formula right);

  static Formula unary(Op op, Formula child);
  static Formula binary(Op op, Formula left, Formula right);

  Op op() const noexcept { return node_->op; }
  bool is_atom() const noexcept { return node_->op == Op::Atom; }

  // Atom text; empty for non-atoms.
  const std::string& text() const noexcept { return node_->text; }

  // Operand of a unary node.
  const Formula& child() const;
  const Formula& left() const;
  const Formula& right() const;

  std::size_t size() const noexcept;   // node count
  std::size_t depth() const noexcept;  // 1 for an atom

  friend bool operator==(const Formula& a, const Formula& b) noexcept;

 private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;

  // Node is defined here so child()/left()/right() can hand out references.
  struct Node {
    Op op;
    std::string text;
    std::vector<Formula> operands;
  };
};

Formula parse_ltl(std::string_view text);

// Canonical text: `G F X U ! & | ->`, single spaces around binary operators,
// minimal parentheses except that an Until nested under another binary
// operator, and a relational atom under a unary operator, are always
// bracketed for readability. parse_ltl(print_ltl(f)) == f.
std::string print_ltl(const Formula& f);

// Token stream behind print_ltl. Each atom is a single token.
struct PrintToken {
  enum class Kind { Operator, Paren, Atom } kind;
  std::string text;
};
std::vector<PrintToken> print_tokens(const Formula& f);

std::set<std::string> collect_aps(const Formula& f);

bool is_placeholder(std::string_view atom);

// An atom identifier: letters, digits, '_' and inner dots ("INS.mode"), not
// one of the reserved operator letters G F X U.
bool is_identifier(std::string_view text);

// Canonical spelling of the right-hand side of a relational atom
// ("max_speed*2" -> "max_speed * 2"), or nullopt when `text` is not a term.
std::optional<std::string> canonical_term(std::string_view text);

// Replaces every `Prop<k>` atom via `mapping`; other atoms are left alone.
// Throws MissingPlaceholder for an unmapped placeholder.
Formula substitute_placeholders(const Formula& f, const std::map<std::string, std::string>& mapping);

}  // namespace req2ltl::ltl
