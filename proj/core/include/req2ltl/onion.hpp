#pragma once

// OnionL: the layered intermediate representation between requirement text
// and LTL. A tree of scopes (unary), mode scopes (antecedent + consequent),
// relations (binary) and atomic propositions (leaves).
//
// Nodes are immutable and shared. The node type is deliberately permissive:
// it can hold wrong child counts, atomic nodes with children or operators
// that do not fit the node kind, so that everything a lenient decoder lets
// through can reach the validator and be reported as data.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace req2ltl::ir {

enum class RelOp : std::uint8_t { None, Eq, Neq, Gt, Lt, Ge, Le };

// "=", "!=", ">", "<", ">=", "<="; empty for None.
std::string_view rel_symbol(RelOp op) noexcept;
// Accepts symbols and names (EQ, ne, GT, ...) case-insensitively.
std::optional<RelOp> parse_rel(std::string_view text);
bool is_ordering(RelOp op) noexcept;  // >, <, >=, <=

struct AtomicProposition {
  std::optional<std::string> com;  // component / subsystem
  std::string var;
  RelOp rel = RelOp::None;
  std::optional<std::string> formula;
  std::optional<std::string> source_text;

  friend bool operator==(const AtomicProposition&, const AtomicProposition&) = default;
};

// Flattened predicate: "var", "com.var", or "var REL formula".
std::string render_ap(const AtomicProposition& ap);

enum class NodeKind : std::uint8_t { Scope, Mode, Relation, Atomic };
enum class ScopeOp : std::uint8_t { Globally, Eventually, Next, Not };
enum class RelationOp : std::uint8_t { And, Or, Implies, SustainedUntil, BasicPrecedence };

std::string_view to_string(NodeKind k) noexcept;
std::string_view to_string(ScopeOp op) noexcept;
std::string_view to_string(RelationOp op) noexcept;
std::optional<ScopeOp> parse_scope_op(std::string_view text);
std::optional<RelationOp> parse_relation_op(std::string_view text);

// Operator name the decoder could not map to either operator family.
struct UnknownOp {
  std::string name;
  friend bool operator==(const UnknownOp&, const UnknownOp&) = default;
};

using NodeOp = std::variant<std::monostate, ScopeOp, RelationOp, UnknownOp>;

class OnionNode;
using OnionPtr = std::shared_ptr<const OnionNode>;

class OnionNode {
 public:
  static OnionPtr atomic(AtomicProposition ap);
  static OnionPtr scope(ScopeOp op, OnionPtr child);
  static OnionPtr mode(AtomicProposition condition, OnionPtr consequent);
  static OnionPtr relation(RelationOp op, OnionPtr left, OnionPtr right);

  // Unchecked construction for decoders, mutation tests and repairs. Child
  // slots may be null.
  static OnionPtr raw(NodeKind kind, NodeOp op, std::optional<AtomicProposition> payload,
                      std::vector<OnionPtr> children);

  NodeKind kind() const noexcept { return kind_; }
  const NodeOp& op() const noexcept { return op_; }
  std::optional<ScopeOp> scope_op() const noexcept;
  std::optional<RelationOp> relation_op() const noexcept;

  // AP of an atomic node or condition of a mode node.
  const std::optional<AtomicProposition>& payload() const noexcept { return payload_; }
  std::span<const OnionPtr> children() const noexcept { return children_; }

  // Typed accessors; return nullptr when the slot is absent.
  const OnionNode* child() const noexcept { return slot(0); }       // scope
  const OnionNode* consequent() const noexcept { return slot(0); }  // mode
  const OnionNode* left() const noexcept { return slot(0); }        // relation
  const OnionNode* right() const noexcept { return slot(1); }       // relation

  std::size_t size() const noexcept;   // node count (mode = 1 node)
  std::size_t depth() const noexcept;  // 1 for a leaf

  friend bool operator==(const OnionNode& a, const OnionNode& b) noexcept;

 private:
  OnionNode(NodeKind kind, NodeOp op, std::optional<AtomicProposition> payload,
            std::vector<OnionPtr> children)
      : kind_(kind), op_(std::move(op)), payload_(std::move(payload)), children_(std::move(children)) {}

  const OnionNode* slot(std::size_t i) const noexcept {
    return i < children_.size() ? children_[i].get() : nullptr;
  }

  NodeKind kind_;
  NodeOp op_;
  std::optional<AtomicProposition> payload_;
  std::vector<OnionPtr> children_;
};

bool equal(const OnionPtr& a, const OnionPtr& b) noexcept;

// ---------------------------------------------------------------------------
// Paths

enum class PathStep : std::uint8_t { Child, Left, Right, Condition, Consequent };

std::string_view to_string(PathStep s) noexcept;
std::optional<PathStep> parse_path_step(std::string_view text);

struct NodePath {
  std::vector<PathStep> steps;

  bool empty() const noexcept { return steps.empty(); }
  NodePath operator/(PathStep s) const {
    NodePath p = *this;
    p.steps.push_back(s);
    return p;
  }
  friend bool operator==(const NodePath&, const NodePath&) = default;
};

std::string to_string(const NodePath& p);  // "/Child/Left", "/" for the root

// What a path addresses: a node, or the condition of a mode node.
struct PathTarget {
  const OnionNode* node = nullptr;              // set when addressing a node
  const AtomicProposition* condition = nullptr;  // set for a trailing Condition step
};

// Throws PathError when a step does not match the node kind at its depth.
PathTarget resolve(const OnionNode& root, const NodePath& path);
bool resolves(const OnionNode& root, const NodePath& path) noexcept;

// Shared handle to the addressed node. Throws PathError, including for paths
// that end at a mode condition.
OnionPtr subtree_at(const OnionPtr& root, const NodePath& path);

// Step that addresses child slot `index` of a node of `kind`; nullopt for
// slots no path can reach (extra children, children of atomic nodes).
std::optional<PathStep> child_step(NodeKind kind, std::size_t index) noexcept;

// Visits every addressable node with its path, parents before children.
template <typename Fn>
void for_each_node(const OnionPtr& root, Fn&& fn, const NodePath& path = {}) {
  if (!root) return;
  fn(*root, path);
  const auto kids = root->children();
  for (std::size_t i = 0; i < kids.size(); ++i) {
    if (auto step = child_step(root->kind(), i)) for_each_node(kids[i], fn, path / *step);
  }
}

// ---------------------------------------------------------------------------
// Editing

using Replacement = std::variant<OnionPtr, ScopeOp, RelationOp>;

// New tree with the addressed node's operator or subtree replaced. Throws
// PathError for an unresolvable path and KindMismatch when the replacement
// does not fit (an operator of the other family, or a non-atomic node for a
// mode condition).
OnionPtr edit_node(const OnionPtr& root, const NodePath& path, const Replacement& replacement);

// ---------------------------------------------------------------------------
// Serialization and rendering

enum class DecodeMode { Strict, Lenient };

// Strict decoding enforces the schema: known fields only, required children
// present, known operators. Lenient decoding keeps going past missing
// children, extra children and unknown operators so the validator can
// diagnose them. Malformed JSON and wrong value types throw SchemaError in
// both modes.
OnionPtr parse_onion_json(std::string_view text, DecodeMode mode = DecodeMode::Strict);

// Canonical JSON: sorted keys, 2-space indent, trailing newline omitted.
std::string serialize_onion(const OnionPtr& root);

// Mermaid `graph TD` document; one node statement per tree node, one edge
// per parent-child link, ids derived from paths ("n0" is the root).
std::string render_mermaid(const OnionPtr& root);
std::string mermaid_id(const NodePath& path);

// ---------------------------------------------------------------------------
// Random trees for property tests

struct RandomTreeOptions {
  std::vector<AtomicProposition> vocabulary;  // empty = built-in three atoms
  bool allow_mode = true;
};

// Deterministic in `seed`; depth <= max_depth; passes validation without
// errors. max_depth must be >= 1.
OnionPtr random_tree(std::uint64_t seed, int max_depth, const RandomTreeOptions& opts = {});
const std::vector<AtomicProposition>& default_vocabulary();

}  // namespace req2ltl::ir
