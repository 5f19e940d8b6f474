#include "req2ltl/validator.hpp"

#include <algorithm>
#include <cctype>
#include <nlohmann/json.hpp>

#include "req2ltl/ltl.hpp"
#include "req2ltl/onion_json.hpp"

namespace req2ltl::validation {

using ir::NodeKind;
using ir::NodePath;
using ir::OnionNode;
using ir::OnionPtr;
using ir::PathStep;
using ir::RelationOp;
using ir::ScopeOp;

std::string_view to_string(Severity s) noexcept { return s == Severity::Error ? "Error" : "Warning"; }

std::string_view to_string(DiagnosticKind k) noexcept {
  switch (k) {
    case DiagnosticKind::ArityViolation: return "ArityViolation";
    case DiagnosticKind::LeafMisplacement: return "LeafMisplacement";
    case DiagnosticKind::IllegalModePlacement: return "IllegalModePlacement";
    case DiagnosticKind::MissingSubfield: return "MissingSubfield";
    case DiagnosticKind::ContradictorySubfields: return "ContradictorySubfields";
    case DiagnosticKind::IllegalScopeNesting: return "IllegalScopeNesting";
    case DiagnosticKind::RedundantChain: return "RedundantChain";
    case DiagnosticKind::UnknownOperator: return "UnknownOperator";
  }
  return "";
}

bool ValidationReport::has_errors() const noexcept { return error_count() > 0; }

std::size_t ValidationReport::error_count() const noexcept {
  return static_cast<std::size_t>(std::count_if(diagnostics.begin(), diagnostics.end(),
                                                [](const Diagnostic& d) { return d.severity == Severity::Error; }));
}

namespace {

bool is_number(std::string_view s) {
  if (!s.empty() && s.front() == '-') s.remove_prefix(1);
  if (s.empty()) return false;
  bool dot = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '.' && !dot && i > 0 && i + 1 < s.size()) {
      dot = true;
    } else if (std::isdigit(static_cast<unsigned char>(s[i])) == 0) {
      return false;
    }
  }
  return true;
}

bool same_chain_op(const OnionNode* n, RelationOp op) {
  return n && n->kind() == NodeKind::Relation && n->relation_op() == op;
}

std::string op_name(const ir::NodeOp& op) {
  if (const auto* s = std::get_if<ScopeOp>(&op)) return std::string(ir::to_string(*s));
  if (const auto* r = std::get_if<RelationOp>(&op)) return std::string(ir::to_string(*r));
  if (const auto* u = std::get_if<ir::UnknownOp>(&op)) return u->name;
  return "";
}

class Checker {
 public:
  std::vector<Diagnostic> run(const OnionPtr& root) {
    if (!root) {
      report(Severity::Error, DiagnosticKind::ArityViolation, {}, "tree is empty", "provide a root node");
      return std::move(out_);
    }
    root_ = root.get();
    visit(*root, {}, nullptr);
    return std::move(out_);
  }

 private:
  void report(Severity sev, DiagnosticKind kind, const NodePath& path, std::string message,
              std::optional<std::string> fix = std::nullopt) {
    out_.push_back({sev, kind, path, std::move(message), std::move(fix)});
  }

  void check_arity(const OnionNode& n, const NodePath& path, std::size_t want, const std::string& what) {
    const auto kids = n.children();
    const auto present = static_cast<std::size_t>(
        std::count_if(kids.begin(), kids.end(), [](const OnionPtr& c) { return c != nullptr; }));
    if (kids.size() != want || present != want) {
      report(Severity::Error, DiagnosticKind::ArityViolation, path,
             what + " requires exactly " + std::to_string(want) + (want == 1 ? " child" : " children") + ", found " +
                 std::to_string(present),
             want == 1 ? "give the node a single operand" : "split the clause into a left and a right operand");
    }
  }

  void check_ap(const ir::AtomicProposition& ap, const NodePath& path) {
    if (ap.var.empty()) {
      report(Severity::Error, DiagnosticKind::MissingSubfield, path, "atomic proposition has no var",
             "set var to the variable or symbolic constant the clause talks about");
    } else if (!ltl::is_identifier(ap.var)) {
      report(Severity::Error, DiagnosticKind::MissingSubfield, path,
             "var '" + ap.var + "' is not a well-formed identifier",
             "use letters, digits and underscores, e.g. '" + sanitize(ap.var) + "'");
    }
    if (ap.com && !ltl::is_identifier(*ap.com)) {
      report(Severity::Error, DiagnosticKind::MissingSubfield, path,
             "com '" + *ap.com + "' is not a well-formed identifier", "drop com or use an identifier");
    }
    const bool has_formula = ap.formula && !ap.formula->empty();
    if (ap.rel != ir::RelOp::None && !has_formula) {
      report(Severity::Error, DiagnosticKind::MissingSubfield, path,
             "rel '" + std::string(ir::rel_symbol(ap.rel)) + "' requires a formula",
             "add the compared value, or set rel to none for a boolean proposition");
    } else if (ap.rel == ir::RelOp::None && ap.formula) {
      report(Severity::Error, DiagnosticKind::ContradictorySubfields, path,
             "formula '" + *ap.formula + "' given without a relational operator",
             "set rel (e.g. '=') or remove formula");
    } else if (has_formula) {
      if (!ltl::canonical_term(*ap.formula)) {
        report(Severity::Error, DiagnosticKind::MissingSubfield, path,
               "formula '" + *ap.formula + "' is not a value or arithmetic expression",
               "use a number, an identifier, or an expression over them");
      } else if (ir::is_ordering(ap.rel) && !is_number(*ap.formula)) {
        report(Severity::Warning, DiagnosticKind::ContradictorySubfields, path,
               "ordering comparison '" + std::string(ir::rel_symbol(ap.rel)) + "' against non-numeric formula '" +
                   *ap.formula + "'",
               "check that the threshold is numeric");
      }
    }
  }

  static std::string sanitize(const std::string& s) {
    std::string out;
    for (char c : s) {
      if (std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_') out += c;
      else if (!out.empty() && out.back() != '_') out += '_';
    }
    if (out.empty() || std::isdigit(static_cast<unsigned char>(out.front())) != 0) out.insert(0, "v_");
    return out;
  }

  void visit(const OnionNode& n, const NodePath& path, const OnionNode* parent) {
    switch (n.kind()) {
      case NodeKind::Scope: visit_scope(n, path, parent); break;
      case NodeKind::Mode: visit_mode(n, path, parent); break;
      case NodeKind::Relation: visit_relation(n, path, parent); break;
      case NodeKind::Atomic: visit_atomic(n, path); break;
    }
    const auto kids = n.children();
    for (std::size_t i = 0; i < kids.size(); ++i) {
      auto step = ir::child_step(n.kind(), i);
      if (step && kids[i]) visit(*kids[i], path / *step, &n);
    }
  }

  void visit_scope(const OnionNode& n, const NodePath& path, const OnionNode* parent) {
    const auto op = n.scope_op();
    if (!op) {
      report(Severity::Error, DiagnosticKind::UnknownOperator, path,
             "'" + op_name(n.op()) + "' is not a scope operator",
             "use one of Globally, Eventually, Next, Not");
    }
    check_arity(n, path, 1, "scope " + op_name(n.op()));
    if (op && (*op == ScopeOp::Globally || *op == ScopeOp::Not)) {
      const OnionNode* c = n.child();
      const bool chain_below = c && c->kind() == NodeKind::Scope && c->scope_op() == op;
      const bool chain_above = parent && parent->kind() == NodeKind::Scope && parent->scope_op() == op;
      if (chain_below && !chain_above) {
        report(Severity::Warning, DiagnosticKind::RedundantChain, path,
               "repeated " + op_name(n.op()) + " scope",
               *op == ScopeOp::Globally ? "collapse to a single Globally" : "remove the double negation");
      }
    }
  }

  void visit_mode(const OnionNode& n, const NodePath& path, const OnionNode* parent) {
    const bool under_root_globally = parent == root_ && path.steps.size() == 1 &&
                                     parent->kind() == NodeKind::Scope && parent->scope_op() == ScopeOp::Globally;
    if (!under_root_globally) {
      report(Severity::Error, DiagnosticKind::IllegalModePlacement, path,
             "mode scope must be the direct child of the root Globally",
             path.empty() ? "wrap the mode scope in Globally" : "move the mode condition to the top-level Globally");
    }
    if (!n.payload()) {
      report(Severity::Error, DiagnosticKind::MissingSubfield, path, "mode scope has no condition",
             "add the operating-mode condition");
    } else {
      check_ap(*n.payload(), path / PathStep::Condition);
    }
    check_arity(n, path, 1, "mode scope");
  }

  void visit_relation(const OnionNode& n, const NodePath& path, const OnionNode* parent) {
    const auto op = n.relation_op();
    if (!op) {
      report(Severity::Error, DiagnosticKind::UnknownOperator, path,
             "'" + op_name(n.op()) + "' is not a relation operator",
             "use one of And, Or, Implies, SustainedUntil, BasicPrecedence");
    }
    check_arity(n, path, 2, "relation " + op_name(n.op()));
    if (op && (*op == RelationOp::And || *op == RelationOp::Or) && !same_chain_op(parent, *op) &&
        right_leaning(n, *op)) {
      report(Severity::Warning, DiagnosticKind::RedundantChain, path,
             "nested " + op_name(n.op()) + " chain is not left-associative",
             "flatten the chain; it is rewritten to left-associative form");
    }
  }

  static bool right_leaning(const OnionNode& n, RelationOp op) {
    if (same_chain_op(n.right(), op)) return true;
    return (same_chain_op(n.left(), op) && right_leaning(*n.left(), op)) ||
           (same_chain_op(n.right(), op) && right_leaning(*n.right(), op));
  }

  void visit_atomic(const OnionNode& n, const NodePath& path) {
    if (!n.children().empty()) {
      report(Severity::Error, DiagnosticKind::LeafMisplacement, path,
             "atomic proposition has " + std::to_string(n.children().size()) + " child node(s)",
             "atomic propositions must be leaves; turn the node into a scope or relation");
    }
    if (!n.payload()) {
      report(Severity::Error, DiagnosticKind::MissingSubfield, path, "atomic node carries no proposition",
             "add var (and rel/formula for comparisons)");
    } else {
      check_ap(*n.payload(), path);
    }
  }

  const OnionNode* root_ = nullptr;
  std::vector<Diagnostic> out_;
};

void chain_operands(const OnionPtr& n, RelationOp op, std::vector<OnionPtr>& out);

OnionPtr canon(const OnionPtr& n) {
  if (!n) return n;
  switch (n->kind()) {
    case NodeKind::Atomic:
      return n;
    case NodeKind::Mode:
      return OnionNode::mode(*n->payload(), canon(n->children()[0]));
    case NodeKind::Scope: {
      const ScopeOp op = *n->scope_op();
      OnionPtr c = canon(n->children()[0]);
      if (c->kind() == NodeKind::Scope && c->scope_op() == op) {
        if (op == ScopeOp::Globally) return c;
        if (op == ScopeOp::Not) return c->children()[0];
      }
      return OnionNode::scope(op, std::move(c));
    }
    case NodeKind::Relation: {
      const RelationOp op = *n->relation_op();
      if (op != RelationOp::And && op != RelationOp::Or) {
        return OnionNode::relation(op, canon(n->children()[0]), canon(n->children()[1]));
      }
      std::vector<OnionPtr> operands;
      chain_operands(n, op, operands);
      OnionPtr acc = operands[0];
      for (std::size_t i = 1; i < operands.size(); ++i) acc = OnionNode::relation(op, acc, operands[i]);
      return acc;
    }
  }
  return n;
}

void chain_operands(const OnionPtr& n, RelationOp op, std::vector<OnionPtr>& out) {
  if (same_chain_op(n.get(), op)) {
    chain_operands(n->children()[0], op, out);
    chain_operands(n->children()[1], op, out);
    return;
  }
  OnionPtr c = canon(n);
  // Collapsing a double negation can expose another run of the same operator.
  if (same_chain_op(c.get(), op)) {
    chain_operands(c, op, out);
  } else {
    out.push_back(std::move(c));
  }
}

}  // namespace

ValidationReport validate(const OnionPtr& tree) {
  ValidationReport report;
  report.diagnostics = Checker().run(tree);
  if (!report.has_errors()) report.canonical_tree = canonicalize(tree);
  return report;
}

OnionPtr canonicalize(const OnionPtr& tree) { return canon(tree); }

nlohmann::json to_json(const Diagnostic& d) {
  return {
      {"severity", std::string(to_string(d.severity))},
      {"kind", std::string(to_string(d.kind))},
      {"path", ir::to_json(d.path)},
      {"message", d.message},
      {"suggestedFix", d.suggested_fix ? nlohmann::json(*d.suggested_fix) : nlohmann::json(nullptr)},
  };
}

std::string to_json_line(const Diagnostic& d) { return to_json(d).dump(); }

std::string to_json_lines(const std::vector<Diagnostic>& ds) {
  std::string out;
  for (const auto& d : ds) {
    out += to_json_line(d);
    out += '\n';
  }
  return out;
}

}  // namespace req2ltl::validation
