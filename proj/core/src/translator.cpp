#include "req2ltl/translator.hpp"

#include <algorithm>

#include "req2ltl/errors.hpp"
#include "req2ltl/validator.hpp"

namespace req2ltl::synth {

using ir::NodeKind;
using ir::RelationOp;
using ir::ScopeOp;
using ltl::Formula;

Formula translate_atomic(const ir::AtomicProposition& ap) {
  ir::AtomicProposition shown = ap;
  if (shown.formula) {
    if (auto term = ltl::canonical_term(*shown.formula)) shown.formula = *term;
  }
  return Formula::atom(ir::render_ap(shown));
}

Formula translate_unchecked(const ir::OnionNode& n) {
  switch (n.kind()) {
    case NodeKind::Atomic:
      return translate_atomic(*n.payload());
    case NodeKind::Mode:
      return Formula::implies(translate_atomic(*n.payload()), translate_unchecked(*n.consequent()));
    case NodeKind::Scope: {
      Formula c = translate_unchecked(*n.child());
      switch (*n.scope_op()) {
        case ScopeOp::Globally: return Formula::globally(std::move(c));
        case ScopeOp::Eventually: return Formula::eventually(std::move(c));
        case ScopeOp::Next: return Formula::next(std::move(c));
        case ScopeOp::Not: return Formula::negation(std::move(c));
      }
      break;
    }
    case NodeKind::Relation: {
      Formula l = translate_unchecked(*n.left());
      Formula r = translate_unchecked(*n.right());
      switch (*n.relation_op()) {
        case RelationOp::And: return Formula::conjunction(std::move(l), std::move(r));
        case RelationOp::Or: return Formula::disjunction(std::move(l), std::move(r));
        case RelationOp::Implies: return Formula::implies(std::move(l), std::move(r));
        case RelationOp::SustainedUntil: return Formula::until(std::move(l), std::move(r));
        case RelationOp::BasicPrecedence:
          return Formula::eventually(Formula::conjunction(std::move(l), Formula::eventually(std::move(r))));
      }
      break;
    }
  }
  throw NotValidated("tree contains a node that cannot be translated");
}

Formula translate(const ir::OnionPtr& tree) {
  auto report = validation::validate(tree);
  if (report.has_errors()) {
    const auto& first = *std::find_if(report.diagnostics.begin(), report.diagnostics.end(),
                                      [](const auto& d) { return d.severity == validation::Severity::Error; });
    throw NotValidated(std::to_string(report.error_count()) + " error(s), first at " + ir::to_string(first.path) +
                       ": " + first.message);
  }
  return translate_unchecked(*tree);
}

}  // namespace req2ltl::synth
