#pragma once

// Lexer shared by the LTL parser and by the atom/term well-formedness checks
// the validator and translator rely on.

#include <cstddef>
#include <string>
#include <string_view>

namespace req2ltl::ltl::detail {

enum class TokenKind {
  End,
  LParen,
  RParen,
  Not,
  And,
  Or,
  Implies,
  Next,
  Eventually,
  Globally,
  Until,
  Ident,
  Number,
  RelOp,
  ArithOp,
  Invalid,
};

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;  // canonical spelling
  std::size_t offset = 0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  // Throws SyntaxError on a character that starts no token.
  Token next();

 private:
  std::string_view src_;
  std::size_t pos_ = 0;
};

}  // namespace req2ltl::ltl::detail
