#pragma once

// Ultimately periodic traces and the bounded equivalence oracle.

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "req2ltl/ltl.hpp"

namespace req2ltl::ltl {

using Valuation = std::map<std::string, bool>;

// The infinite word prefix . period^omega.
struct LassoTrace {
  std::vector<Valuation> prefix;
  std::vector<Valuation> period;

  std::size_t length() const noexcept { return prefix.size() + period.size(); }
  // Position following `pos` on the lasso.
  std::size_t successor(std::size_t pos) const noexcept {
    return pos + 1 < length() ? pos + 1 : prefix.size();
  }
};

// Truth of `f` at `pos` (< prefix + period). Throws UnknownAtom when an atom
// of `f` is missing from a valuation, std::invalid_argument on an empty
// period or an out-of-range position.
bool eval_lasso(const Formula& f, const LassoTrace& trace, std::size_t pos = 0);

struct BoundedEquivOptions {
  std::size_t max_prefix = 4;
  std::size_t max_period = 3;
  std::size_t max_aps = 4;
};

// True iff `f` and `g` agree at position 0 on every lasso over their joint
// atoms with prefix <= max_prefix and period <= max_period. A `false` answer
// is a proof of inequivalence; `true` is an approximation. Throws TooManyAPs
// when the joint atom set exceeds max_aps.
bool bounded_equiv(const Formula& f, const Formula& g, const BoundedEquivOptions& opts = {});

// Same search, returning a distinguishing lasso when one exists.
struct EquivResult {
  bool equivalent = true;
  LassoTrace witness;  // meaningful only when !equivalent
};
EquivResult find_distinguishing_lasso(const Formula& f, const Formula& g,
                                      const BoundedEquivOptions& opts = {});

}  // namespace req2ltl::ltl
