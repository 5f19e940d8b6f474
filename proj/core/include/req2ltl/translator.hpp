#pragma once

// Rule-based synthesis of LTL from validated OnionL trees.

#include "req2ltl/ltl.hpp"
#include "req2ltl/onion.hpp"

namespace req2ltl::synth {

// Post-order mapping of a tree without Error diagnostics. Mode scopes become
// an implication; the enclosing G comes from the tree. SustainedUntil maps to
// U and BasicPrecedence(l, r) to F (l & F r). Throws NotValidated when the
// validator reports an Error.
ltl::Formula translate(const ir::OnionPtr& tree);

// Same mapping without the validation pass. The caller guarantees the tree is
// well formed.
ltl::Formula translate_unchecked(const ir::OnionNode& tree);

// Atom text of an AP: "var", "com.var" or "var REL formula".
ltl::Formula translate_atomic(const ir::AtomicProposition& ap);

}  // namespace req2ltl::synth
