#include "req2ltl/onion.hpp"

#include <algorithm>
#include <cctype>

#include "req2ltl/errors.hpp"
#include "req2ltl/ltl.hpp"

namespace req2ltl::ir {

namespace {

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
         });
}

constexpr ScopeOp kScopeOps[] = {ScopeOp::Globally, ScopeOp::Eventually, ScopeOp::Next, ScopeOp::Not};
constexpr RelationOp kRelationOps[] = {RelationOp::And, RelationOp::Or, RelationOp::Implies,
                                       RelationOp::SustainedUntil, RelationOp::BasicPrecedence};

}  // namespace

// ---------------------------------------------------------------------------
// Atomic propositions

std::string_view rel_symbol(RelOp op) noexcept {
  switch (op) {
    case RelOp::None: return "";
    case RelOp::Eq: return "=";
    case RelOp::Neq: return "!=";
    case RelOp::Gt: return ">";
    case RelOp::Lt: return "<";
    case RelOp::Ge: return ">=";
    case RelOp::Le: return "<=";
  }
  return "";
}

std::optional<RelOp> parse_rel(std::string_view text) {
  struct Alias {
    std::string_view name;
    RelOp op;
  };
  static constexpr Alias kAliases[] = {
      {"=", RelOp::Eq},     {"==", RelOp::Eq},   {"eq", RelOp::Eq},   {"!=", RelOp::Neq},
      {"neq", RelOp::Neq},  {"ne", RelOp::Neq},  {">", RelOp::Gt},    {"gt", RelOp::Gt},
      {"<", RelOp::Lt},     {"lt", RelOp::Lt},   {">=", RelOp::Ge},   {"ge", RelOp::Ge},
      {"<=", RelOp::Le},    {"le", RelOp::Le},   {"none", RelOp::None}, {"", RelOp::None},
  };
  for (const auto& a : kAliases) {
    if (iequals(text, a.name)) return a.op;
  }
  return std::nullopt;
}

bool is_ordering(RelOp op) noexcept {
  return op == RelOp::Gt || op == RelOp::Lt || op == RelOp::Ge || op == RelOp::Le;
}

std::string render_ap(const AtomicProposition& ap) {
  std::string out = ap.com ? *ap.com + "." + ap.var : ap.var;
  if (ap.rel == RelOp::None) return out;
  out += ' ';
  out += rel_symbol(ap.rel);
  out += ' ';
  const std::string formula = ap.formula.value_or("");
  out += ltl::canonical_term(formula).value_or(formula);
  return out;
}

// ---------------------------------------------------------------------------
// Operator names

std::string_view to_string(NodeKind k) noexcept {
  switch (k) {
    case NodeKind::Scope: return "scope";
    case NodeKind::Mode: return "mode";
    case NodeKind::Relation: return "relation";
    case NodeKind::Atomic: return "atomic";
  }
  return "";
}

std::string_view to_string(ScopeOp op) noexcept {
  switch (op) {
    case ScopeOp::Globally: return "Globally";
    case ScopeOp::Eventually: return "Eventually";
    case ScopeOp::Next: return "Next";
    case ScopeOp::Not: return "Not";
  }
  return "";
}

std::string_view to_string(RelationOp op) noexcept {
  switch (op) {
    case RelationOp::And: return "And";
    case RelationOp::Or: return "Or";
    case RelationOp::Implies: return "Implies";
    case RelationOp::SustainedUntil: return "SustainedUntil";
    case RelationOp::BasicPrecedence: return "BasicPrecedence";
  }
  return "";
}

std::optional<ScopeOp> parse_scope_op(std::string_view text) {
  for (auto op : kScopeOps) {
    if (iequals(text, to_string(op))) return op;
  }
  return std::nullopt;
}

std::optional<RelationOp> parse_relation_op(std::string_view text) {
  for (auto op : kRelationOps) {
    if (iequals(text, to_string(op))) return op;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Nodes

OnionPtr OnionNode::raw(NodeKind kind, NodeOp op, std::optional<AtomicProposition> payload,
                        std::vector<OnionPtr> children) {
  return OnionPtr(new OnionNode(kind, std::move(op), std::move(payload), std::move(children)));
}

OnionPtr OnionNode::atomic(AtomicProposition ap) {
  return raw(NodeKind::Atomic, std::monostate{}, std::move(ap), {});
}

OnionPtr OnionNode::scope(ScopeOp op, OnionPtr child) {
  return raw(NodeKind::Scope, op, std::nullopt, {std::move(child)});
}

OnionPtr OnionNode::mode(AtomicProposition condition, OnionPtr consequent) {
  return raw(NodeKind::Mode, std::monostate{}, std::move(condition), {std::move(consequent)});
}

OnionPtr OnionNode::relation(RelationOp op, OnionPtr left, OnionPtr right) {
  return raw(NodeKind::Relation, op, std::nullopt, {std::move(left), std::move(right)});
}

std::optional<ScopeOp> OnionNode::scope_op() const noexcept {
  if (const auto* op = std::get_if<ScopeOp>(&op_)) return *op;
  return std::nullopt;
}

std::optional<RelationOp> OnionNode::relation_op() const noexcept {
  if (const auto* op = std::get_if<RelationOp>(&op_)) return *op;
  return std::nullopt;
}

std::size_t OnionNode::size() const noexcept {
  std::size_t n = 1;
  for (const auto& c : children_) {
    if (c) n += c->size();
  }
  return n;
}

std::size_t OnionNode::depth() const noexcept {
  std::size_t d = 0;
  for (const auto& c : children_) {
    if (c) d = std::max(d, c->depth());
  }
  return d + 1;
}

bool operator==(const OnionNode& a, const OnionNode& b) noexcept {
  if (&a == &b) return true;
  if (a.kind_ != b.kind_ || !(a.op_ == b.op_) || !(a.payload_ == b.payload_)) return false;
  if (a.children_.size() != b.children_.size()) return false;
  for (std::size_t i = 0; i < a.children_.size(); ++i) {
    if (!equal(a.children_[i], b.children_[i])) return false;
  }
  return true;
}

bool equal(const OnionPtr& a, const OnionPtr& b) noexcept {
  if (!a || !b) return !a && !b;
  return *a == *b;
}

// ---------------------------------------------------------------------------
// Paths

std::string_view to_string(PathStep s) noexcept {
  switch (s) {
    case PathStep::Child: return "Child";
    case PathStep::Left: return "Left";
    case PathStep::Right: return "Right";
    case PathStep::Condition: return "Condition";
    case PathStep::Consequent: return "Consequent";
  }
  return "";
}

std::optional<PathStep> parse_path_step(std::string_view text) {
  for (auto s : {PathStep::Child, PathStep::Left, PathStep::Right, PathStep::Condition, PathStep::Consequent}) {
    if (iequals(text, to_string(s))) return s;
  }
  return std::nullopt;
}

std::string to_string(const NodePath& p) {
  if (p.empty()) return "/";
  std::string out;
  for (auto s : p.steps) {
    out += '/';
    out += to_string(s);
  }
  return out;
}

std::optional<PathStep> child_step(NodeKind kind, std::size_t index) noexcept {
  switch (kind) {
    case NodeKind::Scope:
      if (index == 0) return PathStep::Child;
      break;
    case NodeKind::Mode:
      if (index == 0) return PathStep::Consequent;
      break;
    case NodeKind::Relation:
      if (index == 0) return PathStep::Left;
      if (index == 1) return PathStep::Right;
      break;
    case NodeKind::Atomic:
      break;
  }
  return std::nullopt;
}

namespace {

// Child slot index a step addresses on `node`, or -1.
int slot_for(const OnionNode& node, PathStep step) {
  switch (step) {
    case PathStep::Child: return node.kind() == NodeKind::Scope ? 0 : -1;
    case PathStep::Consequent: return node.kind() == NodeKind::Mode ? 0 : -1;
    case PathStep::Left: return node.kind() == NodeKind::Relation ? 0 : -1;
    case PathStep::Right: return node.kind() == NodeKind::Relation ? 1 : -1;
    case PathStep::Condition: return -1;
  }
  return -1;
}

[[noreturn]] void path_fail(const NodePath& path, std::size_t at, const std::string& why) {
  NodePath prefix;
  prefix.steps.assign(path.steps.begin(), path.steps.begin() + static_cast<std::ptrdiff_t>(at));
  throw PathError("path " + to_string(path) + " does not resolve: at " + to_string(prefix) + ", " + why);
}

}  // namespace

PathTarget resolve(const OnionNode& root, const NodePath& path) {
  const OnionNode* cur = &root;
  for (std::size_t i = 0; i < path.steps.size(); ++i) {
    const PathStep step = path.steps[i];
    if (step == PathStep::Condition) {
      if (cur->kind() != NodeKind::Mode || !cur->payload()) path_fail(path, i, "no mode condition here");
      if (i + 1 != path.steps.size()) path_fail(path, i + 1, "a condition has no children");
      return {nullptr, &*cur->payload()};
    }
    const int slot = slot_for(*cur, step);
    if (slot < 0) {
      path_fail(path, i, std::string("step ") + std::string(to_string(step)) + " does not apply to a " +
                             std::string(to_string(cur->kind())) + " node");
    }
    const auto kids = cur->children();
    if (static_cast<std::size_t>(slot) >= kids.size() || !kids[slot]) path_fail(path, i, "child slot is empty");
    cur = kids[slot].get();
  }
  return {cur, nullptr};
}

bool resolves(const OnionNode& root, const NodePath& path) noexcept {
  try {
    resolve(root, path);
    return true;
  } catch (const PathError&) {
    return false;
  }
}

OnionPtr subtree_at(const OnionPtr& root, const NodePath& path) {
  if (!root) throw PathError("empty tree");
  if (!path.empty() && path.steps.back() == PathStep::Condition) {
    throw PathError("path " + to_string(path) + " addresses a mode condition, not a node");
  }
  resolve(*root, path);
  OnionPtr cur = root;
  for (auto step : path.steps) cur = cur->children()[static_cast<std::size_t>(slot_for(*cur, step))];
  return cur;
}

// ---------------------------------------------------------------------------
// Editing

namespace {

OnionPtr apply_at_target(const OnionPtr& node, const Replacement& replacement) {
  if (const auto* subtree = std::get_if<OnionPtr>(&replacement)) {
    if (!*subtree) throw KindMismatch("replacement subtree is empty");
    return *subtree;
  }
  if (const auto* op = std::get_if<ScopeOp>(&replacement)) {
    if (node->kind() != NodeKind::Scope) {
      throw KindMismatch("scope operator " + std::string(to_string(*op)) + " cannot replace the operator of a " +
                         std::string(to_string(node->kind())) + " node");
    }
    return OnionNode::raw(NodeKind::Scope, *op, node->payload(),
                          std::vector<OnionPtr>(node->children().begin(), node->children().end()));
  }
  const auto op = std::get<RelationOp>(replacement);
  if (node->kind() != NodeKind::Relation) {
    throw KindMismatch("relation operator " + std::string(to_string(op)) + " cannot replace the operator of a " +
                       std::string(to_string(node->kind())) + " node");
  }
  return OnionNode::raw(NodeKind::Relation, op, node->payload(),
                        std::vector<OnionPtr>(node->children().begin(), node->children().end()));
}

OnionPtr edit_rec(const OnionPtr& node, const NodePath& path, std::size_t at, const Replacement& replacement) {
  if (at == path.steps.size()) return apply_at_target(node, replacement);
  const PathStep step = path.steps[at];
  if (step == PathStep::Condition) {
    const auto* subtree = std::get_if<OnionPtr>(&replacement);
    if (!subtree || !*subtree || (*subtree)->kind() != NodeKind::Atomic || !(*subtree)->payload() ||
        !(*subtree)->children().empty()) {
      throw KindMismatch("a mode condition can only be replaced by an atomic proposition");
    }
    return OnionNode::raw(NodeKind::Mode, node->op(), (*subtree)->payload(),
                          std::vector<OnionPtr>(node->children().begin(), node->children().end()));
  }
  const int slot = slot_for(*node, step);
  std::vector<OnionPtr> kids(node->children().begin(), node->children().end());
  kids[static_cast<std::size_t>(slot)] = edit_rec(kids[static_cast<std::size_t>(slot)], path, at + 1, replacement);
  return OnionNode::raw(node->kind(), node->op(), node->payload(), std::move(kids));
}

}  // namespace

OnionPtr edit_node(const OnionPtr& root, const NodePath& path, const Replacement& replacement) {
  if (!root) throw PathError("cannot edit an empty tree");
  resolve(*root, path);
  return edit_rec(root, path, 0, replacement);
}

}  // namespace req2ltl::ir
