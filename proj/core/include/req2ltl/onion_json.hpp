#pragma once

// nlohmann::json bindings for OnionL trees, for callers that embed trees in
// larger documents (step responses, review session snapshots).

#include <nlohmann/json.hpp>
#include <string>

#include "req2ltl/onion.hpp"

namespace req2ltl::ir {

nlohmann::json to_json(const OnionPtr& node);
nlohmann::json to_json(const AtomicProposition& ap);  // with "type":"atomic"
nlohmann::json to_json(const NodePath& path);         // ["Child","Left",...]

// `pointer` prefixes JSON pointers in SchemaError messages.
OnionPtr from_json(const nlohmann::json& j, DecodeMode mode, const std::string& pointer = "");
AtomicProposition ap_from_json(const nlohmann::json& j, DecodeMode mode, const std::string& pointer = "");
NodePath path_from_json(const nlohmann::json& j, const std::string& pointer = "");

}  // namespace req2ltl::ir
