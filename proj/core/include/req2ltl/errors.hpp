#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace req2ltl {

// Root of every error the toolkit raises. Validation findings are data
// (see validator.hpp) and never travel through this hierarchy.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed LTL text. `offset` is a byte offset into the parsed string.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t offset, std::string expected, const std::string& detail)
      : Error("syntax error at offset " + std::to_string(offset) + ": " + detail +
              " (expected " + expected + ")"),
        offset_(offset),
        expected_(std::move(expected)) {}

  std::size_t offset() const noexcept { return offset_; }
  const std::string& expected() const noexcept { return expected_; }

 private:
  std::size_t offset_;
  std::string expected_;
};

class MissingPlaceholder : public Error {
 public:
  explicit MissingPlaceholder(std::string name)
      : Error("no substitution for placeholder '" + name + "'"), name_(std::move(name)) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

class UnknownAtom : public Error {
 public:
  explicit UnknownAtom(std::string name)
      : Error("atom '" + name + "' has no valuation in the trace"), name_(std::move(name)) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

class TooManyAPs : public Error {
 public:
  TooManyAPs(std::size_t count, std::size_t limit)
      : Error("bounded equivalence supports at most " + std::to_string(limit) +
              " atomic propositions, got " + std::to_string(count)) {}
};

// OnionL JSON that does not fit the schema. `pointer` is a JSON pointer
// ("/child/left") to the offending value.
class SchemaError : public Error {
 public:
  SchemaError(std::string pointer, std::string reason)
      : Error("schema error at '" + (pointer.empty() ? std::string("/") : pointer) + "': " + reason),
        pointer_(std::move(pointer)),
        reason_(std::move(reason)) {}

  const std::string& pointer() const noexcept { return pointer_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string pointer_;
  std::string reason_;
};

class PathError : public Error {
 public:
  using Error::Error;
};

class KindMismatch : public Error {
 public:
  using Error::Error;
};

class NotValidated : public Error {
 public:
  using Error::Error;
};

class ProtocolError : public Error {
 public:
  using Error::Error;
};

class DepthExceeded : public Error {
 public:
  using Error::Error;
};

// A corpus line whose gold formula failed to parse.
class ParseError : public Error {
 public:
  ParseError(std::string id, const std::string& detail)
      : Error("pair '" + id + "': " + detail), id_(std::move(id)) {}
  const std::string& id() const noexcept { return id_; }

 private:
  std::string id_;
};

}  // namespace req2ltl
