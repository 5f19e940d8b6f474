#include <sstream>

#include "req2ltl/onion.hpp"

namespace req2ltl::ir {

namespace {

char step_digit(PathStep s) {
  switch (s) {
    case PathStep::Child: return '1';
    case PathStep::Left: return '2';
    case PathStep::Right: return '3';
    case PathStep::Condition: return '4';
    case PathStep::Consequent: return '5';
  }
  return '0';
}

std::string escape_label(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"') out += "#quot;";
    else if (c == '\n') out += ' ';
    else out += c;
  }
  return out;
}

std::string label(const OnionNode& n) {
  const auto& op = n.op();
  switch (n.kind()) {
    case NodeKind::Atomic:
      return n.payload() ? render_ap(*n.payload()) : "?";
    case NodeKind::Mode:
      return "Mode: " + (n.payload() ? render_ap(*n.payload()) : std::string("?"));
    case NodeKind::Scope:
    case NodeKind::Relation:
      break;
  }
  if (const auto* s = std::get_if<ScopeOp>(&op)) return std::string(to_string(*s));
  if (const auto* r = std::get_if<RelationOp>(&op)) return std::string(to_string(*r));
  if (const auto* u = std::get_if<UnknownOp>(&op)) return "?" + u->name;
  return "?";
}

const char* edge_label(PathStep s) {
  switch (s) {
    case PathStep::Left: return "|left|";
    case PathStep::Right: return "|right|";
    case PathStep::Consequent: return "|then|";
    default: return "";
  }
}

}  // namespace

std::string mermaid_id(const NodePath& path) {
  std::string id = "n0";
  for (auto s : path.steps) id += step_digit(s);
  return id;
}

std::string render_mermaid(const OnionPtr& root) {
  std::ostringstream nodes;
  std::ostringstream edges;
  nodes << "graph TD\n";
  for_each_node(root, [&](const OnionNode& n, const NodePath& path) {
    nodes << "    " << mermaid_id(path) << "[\"" << escape_label(label(n)) << "\"]\n";
    if (!path.empty()) {
      NodePath parent;
      parent.steps.assign(path.steps.begin(), path.steps.end() - 1);
      edges << "    " << mermaid_id(parent) << " -->" << edge_label(path.steps.back()) << " " << mermaid_id(path)
            << "\n";
    }
  });
  return nodes.str() + edges.str();
}

}  // namespace req2ltl::ir
