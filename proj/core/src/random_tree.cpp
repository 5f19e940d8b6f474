#include <random>
#include <stdexcept>

#include "req2ltl/onion.hpp"

namespace req2ltl::ir {

const std::vector<AtomicProposition>& default_vocabulary() {
  static const std::vector<AtomicProposition> vocab = {
      {std::nullopt, "p", RelOp::None, std::nullopt, std::nullopt},
      {std::nullopt, "speed", RelOp::Gt, "50", std::nullopt},
      {"INS", "mode", RelOp::Eq, "valid", std::nullopt},
  };
  return vocab;
}

namespace {

class TreeGen {
 public:
  TreeGen(std::uint64_t seed, const RandomTreeOptions& opts)
      : rng_(seed), vocab_(opts.vocabulary.empty() ? default_vocabulary() : opts.vocabulary),
        allow_mode_(opts.allow_mode) {}

  OnionPtr root(int depth) {
    if (allow_mode_ && depth >= 3 && chance(0.25)) {
      return OnionNode::scope(ScopeOp::Globally, OnionNode::mode(ap(), node(depth - 2)));
    }
    return node(depth);
  }

 private:
  bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }
  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

  AtomicProposition ap() { return vocab_[static_cast<std::size_t>(pick(static_cast<int>(vocab_.size())))]; }

  OnionPtr node(int depth) {
    if (depth <= 1) return OnionNode::atomic(ap());
    const int roll = pick(100);
    if (roll < 20) return OnionNode::atomic(ap());
    if (roll < 55) return OnionNode::scope(static_cast<ScopeOp>(pick(4)), node(depth - 1));
    return OnionNode::relation(static_cast<RelationOp>(pick(5)), node(depth - 1), node(depth - 1));
  }

  std::mt19937_64 rng_;
  const std::vector<AtomicProposition>& vocab_;
  bool allow_mode_;
};

}  // namespace

OnionPtr random_tree(std::uint64_t seed, int max_depth, const RandomTreeOptions& opts) {
  if (max_depth < 1) throw std::invalid_argument("max_depth must be at least 1");
  return TreeGen(seed, opts).root(max_depth);
}

}  // namespace req2ltl::ir
