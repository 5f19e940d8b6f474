#pragma once

// Machine validation of OnionL trees: structural well-formedness, AP subfield
// compatibility, mode placement, scope nesting and redundant chains. All
// findings are returned as data.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "req2ltl/onion.hpp"

namespace req2ltl::validation {

enum class Severity { Error, Warning };

enum class DiagnosticKind {
  ArityViolation,
  LeafMisplacement,
  IllegalModePlacement,
  MissingSubfield,
  ContradictorySubfields,
  IllegalScopeNesting,
  RedundantChain,
  UnknownOperator,
};

std::string_view to_string(Severity s) noexcept;
std::string_view to_string(DiagnosticKind k) noexcept;

struct Diagnostic {
  Severity severity = Severity::Error;
  DiagnosticKind kind = DiagnosticKind::ArityViolation;
  ir::NodePath path;
  std::string message;
  std::optional<std::string> suggested_fix;
};

struct ValidationReport {
  std::vector<Diagnostic> diagnostics;
  ir::OnionPtr canonical_tree;  // null when any Error was reported

  bool has_errors() const noexcept;
  std::size_t error_count() const noexcept;
};

ValidationReport validate(const ir::OnionPtr& tree);

// Re-brackets every maximal And run and Or run left-associatively (operand
// order kept) and collapses Globally-Globally and Not-Not chains. Idempotent.
// Expects a tree without Error diagnostics.
ir::OnionPtr canonicalize(const ir::OnionPtr& tree);

// One JSON object per line:
// {"kind":..,"message":..,"path":[..],"severity":..,"suggestedFix":..}
nlohmann::json to_json(const Diagnostic& d);
std::string to_json_line(const Diagnostic& d);
std::string to_json_lines(const std::vector<Diagnostic>& ds);

}  // namespace req2ltl::validation
