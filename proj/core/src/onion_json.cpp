#include "req2ltl/onion_json.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "req2ltl/errors.hpp"

namespace req2ltl::ir {

using nlohmann::json;

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string child_pointer(const std::string& base, const std::string& key) { return base + "/" + key; }

std::optional<std::string> optional_string(const json& obj, const char* key, const std::string& ptr,
                                           bool allow_number) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (it->is_string()) return it->get<std::string>();
  if (allow_number && it->is_number()) return it->dump();
  throw SchemaError(child_pointer(ptr, key), "expected a string");
}

void check_fields(const json& obj, std::initializer_list<const char*> allowed, const std::string& ptr) {
  for (const auto& [key, value] : obj.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; });
    if (!known) throw SchemaError(child_pointer(ptr, key), "unknown field");
  }
}

const std::string& require_string(const json& obj, const char* key, const std::string& ptr) {
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(child_pointer(ptr, key), "required field missing");
  if (!it->is_string()) throw SchemaError(child_pointer(ptr, key), "expected a string");
  return it->get_ref<const std::string&>();
}

// Decodes an optional child slot. Strict mode requires it.
OnionPtr child_slot(const json& obj, const char* key, DecodeMode mode, const std::string& ptr) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) {
    if (mode == DecodeMode::Strict) throw SchemaError(child_pointer(ptr, key), "required child missing");
    return nullptr;
  }
  return from_json(*it, mode, child_pointer(ptr, key));
}

NodeOp decode_op(const json& obj, NodeKind kind, DecodeMode mode, const std::string& ptr) {
  auto it = obj.find("op");
  if (it == obj.end()) {
    if (mode == DecodeMode::Strict) throw SchemaError(child_pointer(ptr, "op"), "required field missing");
    return UnknownOp{""};
  }
  if (!it->is_string()) throw SchemaError(child_pointer(ptr, "op"), "expected a string");
  const auto& name = it->get_ref<const std::string&>();
  if (kind == NodeKind::Scope) {
    if (auto op = parse_scope_op(name)) return *op;
  } else if (auto op = parse_relation_op(name)) {
    return *op;
  }
  if (mode == DecodeMode::Strict) {
    throw SchemaError(child_pointer(ptr, "op"), "unknown " + std::string(to_string(kind)) + " operator '" + name + "'");
  }
  if (auto op = parse_scope_op(name)) return *op;
  if (auto op = parse_relation_op(name)) return *op;
  return UnknownOp{name};
}

}  // namespace

AtomicProposition ap_from_json(const json& j, DecodeMode mode, const std::string& ptr) {
  if (!j.is_object()) throw SchemaError(ptr, "expected an object");
  if (mode == DecodeMode::Strict) check_fields(j, {"type", "var", "rel", "formula", "com", "text"}, ptr);
  if (auto it = j.find("type"); it != j.end() && !(it->is_string() && lower(it->get<std::string>()) == "atomic")) {
    throw SchemaError(child_pointer(ptr, "type"), "expected \"atomic\"");
  }
  AtomicProposition ap;
  if (mode == DecodeMode::Strict) {
    ap.var = require_string(j, "var", ptr);
  } else {
    ap.var = optional_string(j, "var", ptr, false).value_or("");
  }
  if (auto rel = optional_string(j, "rel", ptr, false)) {
    auto parsed = parse_rel(*rel);
    if (!parsed) throw SchemaError(child_pointer(ptr, "rel"), "unknown relational operator '" + *rel + "'");
    ap.rel = *parsed;
  }
  ap.formula = optional_string(j, "formula", ptr, true);
  ap.com = optional_string(j, "com", ptr, false);
  ap.source_text = optional_string(j, "text", ptr, false);
  return ap;
}

OnionPtr from_json(const json& j, DecodeMode mode, const std::string& ptr) {
  if (!j.is_object()) throw SchemaError(ptr, "expected an object");
  const std::string type = lower(require_string(j, "type", ptr));

  if (type == "atomic") {
    std::vector<OnionPtr> stray;
    if (mode == DecodeMode::Lenient) {
      for (const char* key : {"child", "left", "right", "consequent"}) {
        if (auto it = j.find(key); it != j.end() && !it->is_null()) {
          stray.push_back(from_json(*it, mode, child_pointer(ptr, key)));
        }
      }
    }
    return OnionNode::raw(NodeKind::Atomic, std::monostate{}, ap_from_json(j, mode, ptr), std::move(stray));
  }
  if (type == "scope") {
    if (mode == DecodeMode::Strict) check_fields(j, {"type", "op", "child"}, ptr);
    NodeOp op = decode_op(j, NodeKind::Scope, mode, ptr);
    std::vector<OnionPtr> kids;
    if (auto c = child_slot(j, "child", mode, ptr)) kids.push_back(std::move(c));
    return OnionNode::raw(NodeKind::Scope, std::move(op), std::nullopt, std::move(kids));
  }
  if (type == "mode") {
    if (mode == DecodeMode::Strict) check_fields(j, {"type", "condition", "consequent"}, ptr);
    std::optional<AtomicProposition> condition;
    if (auto it = j.find("condition"); it != j.end() && !it->is_null()) {
      condition = ap_from_json(*it, mode, child_pointer(ptr, "condition"));
    } else if (mode == DecodeMode::Strict) {
      throw SchemaError(child_pointer(ptr, "condition"), "required field missing");
    }
    std::vector<OnionPtr> kids;
    if (auto c = child_slot(j, "consequent", mode, ptr)) kids.push_back(std::move(c));
    return OnionNode::raw(NodeKind::Mode, std::monostate{}, std::move(condition), std::move(kids));
  }
  if (type == "relation") {
    if (mode == DecodeMode::Strict) check_fields(j, {"type", "op", "left", "right"}, ptr);
    NodeOp op = decode_op(j, NodeKind::Relation, mode, ptr);
    auto l = child_slot(j, "left", mode, ptr);
    auto r = child_slot(j, "right", mode, ptr);
    std::vector<OnionPtr> kids;
    // A lone right operand still lands in the Left slot: a relation with one
    // child is an arity problem, not a position problem.
    if (l) kids.push_back(std::move(l));
    if (r) kids.push_back(std::move(r));
    return OnionNode::raw(NodeKind::Relation, std::move(op), std::nullopt, std::move(kids));
  }
  throw SchemaError(child_pointer(ptr, "type"), "unknown node type '" + type + "'");
}

json to_json(const AtomicProposition& ap) {
  json j = {{"type", "atomic"}, {"var", ap.var}};
  if (ap.rel != RelOp::None) j["rel"] = std::string(rel_symbol(ap.rel));
  if (ap.formula) j["formula"] = *ap.formula;
  if (ap.com) j["com"] = *ap.com;
  if (ap.source_text) j["text"] = *ap.source_text;
  return j;
}

json to_json(const OnionPtr& node) {
  if (!node) return nullptr;
  auto op_name = [&]() -> std::string {
    return std::visit(
        [](const auto& op) -> std::string {
          using T = std::decay_t<decltype(op)>;
          if constexpr (std::is_same_v<T, std::monostate>) return "";
          else if constexpr (std::is_same_v<T, UnknownOp>) return op.name;
          else return std::string(to_string(op));
        },
        node->op());
  };
  switch (node->kind()) {
    case NodeKind::Atomic:
      return node->payload() ? to_json(*node->payload()) : json{{"type", "atomic"}};
    case NodeKind::Scope: {
      json j = {{"type", "scope"}, {"op", op_name()}};
      if (node->child()) j["child"] = to_json(node->children()[0]);
      return j;
    }
    case NodeKind::Mode: {
      json j = {{"type", "mode"}};
      if (node->payload()) j["condition"] = to_json(*node->payload());
      if (node->consequent()) j["consequent"] = to_json(node->children()[0]);
      return j;
    }
    case NodeKind::Relation: {
      json j = {{"type", "relation"}, {"op", op_name()}};
      if (node->left()) j["left"] = to_json(node->children()[0]);
      if (node->right()) j["right"] = to_json(node->children()[1]);
      return j;
    }
  }
  return nullptr;
}

json to_json(const NodePath& path) {
  json j = json::array();
  for (auto s : path.steps) j.push_back(std::string(to_string(s)));
  return j;
}

NodePath path_from_json(const json& j, const std::string& ptr) {
  if (!j.is_array()) throw SchemaError(ptr, "expected an array of path steps");
  NodePath p;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string at = ptr + "/" + std::to_string(i);
    if (!j[i].is_string()) throw SchemaError(at, "expected a string");
    auto step = parse_path_step(j[i].get<std::string>());
    if (!step) throw SchemaError(at, "unknown path step '" + j[i].get<std::string>() + "'");
    p.steps.push_back(*step);
  }
  return p;
}

OnionPtr parse_onion_json(std::string_view text, DecodeMode mode) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError("", std::string("invalid JSON: ") + e.what());
  }
  return from_json(j, mode);
}

std::string serialize_onion(const OnionPtr& root) { return to_json(root).dump(2); }

}  // namespace req2ltl::ir
