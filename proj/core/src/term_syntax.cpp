#include "term_syntax.hpp"

#include <cctype>
#include <optional>

#include "req2ltl/errors.hpp"
#include "req2ltl/ltl.hpp"

namespace req2ltl::ltl {
namespace detail {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0 || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_'; }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

struct Spelling {
  std::string_view text;
  TokenKind kind;
  std::string_view canonical;
};

// Longest spellings first so "->" wins over "-" and ">=" over ">".
constexpr Spelling kSpellings[] = {
    {"\xE2\x86\x92", TokenKind::Implies, "->"},  // →
    {"\xE2\x88\xA7", TokenKind::And, "&"},       // ∧
    {"\xE2\x88\xA8", TokenKind::Or, "|"},        // ∨
    {"\xE2\x89\xA5", TokenKind::RelOp, ">="},    // ≥
    {"\xE2\x89\xA4", TokenKind::RelOp, "<="},    // ≤
    {"\xE2\x89\xA0", TokenKind::RelOp, "!="},    // ≠
    {"\xC2\xAC", TokenKind::Not, "!"},           // ¬
    {"->", TokenKind::Implies, "->"},
    {"&&", TokenKind::And, "&"},
    {"||", TokenKind::Or, "|"},
    {"!=", TokenKind::RelOp, "!="},
    {">=", TokenKind::RelOp, ">="},
    {"<=", TokenKind::RelOp, "<="},
    {"(", TokenKind::LParen, "("},
    {")", TokenKind::RParen, ")"},
    {"!", TokenKind::Not, "!"},
    {"&", TokenKind::And, "&"},
    {"|", TokenKind::Or, "|"},
    {"=", TokenKind::RelOp, "="},
    {">", TokenKind::RelOp, ">"},
    {"<", TokenKind::RelOp, "<"},
    {"+", TokenKind::ArithOp, "+"},
    {"-", TokenKind::ArithOp, "-"},
    {"*", TokenKind::ArithOp, "*"},
    {"/", TokenKind::ArithOp, "/"},
};

}  // namespace

Token Lexer::next() {
  while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])) != 0) ++pos_;
  Token tok;
  tok.offset = pos_;
  if (pos_ >= src_.size()) return tok;

  const char c = src_[pos_];
  if (ident_start(c)) {
    std::size_t end = pos_ + 1;
    while (end < src_.size()) {
      if (ident_char(src_[end])) {
        ++end;
      } else if (src_[end] == '.' && end + 1 < src_.size() && ident_start(src_[end + 1])) {
        end += 2;
      } else {
        break;
      }
    }
    tok.text = std::string(src_.substr(pos_, end - pos_));
    pos_ = end;
    if (tok.text == "G") tok.kind = TokenKind::Globally;
    else if (tok.text == "F") tok.kind = TokenKind::Eventually;
    else if (tok.text == "X") tok.kind = TokenKind::Next;
    else if (tok.text == "U") tok.kind = TokenKind::Until;
    else tok.kind = TokenKind::Ident;
    return tok;
  }
  if (digit(c)) {
    std::size_t end = pos_;
    while (end < src_.size() && digit(src_[end])) ++end;
    if (end + 1 < src_.size() && src_[end] == '.' && digit(src_[end + 1])) {
      ++end;
      while (end < src_.size() && digit(src_[end])) ++end;
    }
    tok.kind = TokenKind::Number;
    tok.text = std::string(src_.substr(pos_, end - pos_));
    pos_ = end;
    return tok;
  }
  const std::string_view rest = src_.substr(pos_);
  for (const auto& s : kSpellings) {
    if (rest.substr(0, s.text.size()) == s.text) {
      tok.kind = s.kind;
      tok.text = std::string(s.canonical);
      pos_ += s.text.size();
      return tok;
    }
  }
  throw SyntaxError(pos_, "operator, parenthesis, identifier or number",
                    "unexpected character '" + std::string(1, c) + "'");
}

}  // namespace detail

bool is_identifier(std::string_view text) {
  try {
    detail::Lexer lex(text);
    const auto t = lex.next();
    return t.kind == detail::TokenKind::Ident && t.offset == 0 && t.text.size() == text.size();
  } catch (const SyntaxError&) {
    return false;
  }
}

std::optional<std::string> canonical_term(std::string_view text) {
  using detail::TokenKind;
  try {
    detail::Lexer lex(text);
    std::string out;
    auto tok = lex.next();
    bool expect_operand = true;
    for (;; tok = lex.next()) {
      if (expect_operand) {
        std::string operand;
        if (tok.kind == TokenKind::ArithOp && tok.text == "-") {
          tok = lex.next();
          if (tok.kind != TokenKind::Number) return std::nullopt;
          operand = "-" + tok.text;
        } else if (tok.kind == TokenKind::Ident || tok.kind == TokenKind::Number) {
          operand = tok.text;
        } else {
          return std::nullopt;
        }
        if (!out.empty()) out += ' ';
        out += operand;
        expect_operand = false;
      } else if (tok.kind == TokenKind::End) {
        return out;
      } else if (tok.kind == TokenKind::ArithOp) {
        out += ' ';
        out += tok.text;
        expect_operand = true;
      } else {
        return std::nullopt;
      }
    }
  } catch (const SyntaxError&) {
    return std::nullopt;
  }
}

}  // namespace req2ltl::ltl
