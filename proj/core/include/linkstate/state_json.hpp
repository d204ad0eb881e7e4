#pragma once

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "linkstate/state_node.hpp"

namespace linkstate {

using Json = nlohmann::ordered_json;

inline constexpr const char* kObjectNameKey = "objectName";
inline constexpr const char* kClassNameKey = "className";
inline constexpr const char* kSessionStateKey = "sessionState";

// Canonical compact JSON. Mapping keys keep insertion order, integral numbers
// print without a fractional part, dynamic-list entries always carry the three
// reserved keys in objectName, className, sessionState order.
std::string encode(const StateNode& node);

// Like encode() but with mapping keys sorted, so state-equivalent trees
// always produce the same bytes. Used for hashing and comparisons.
std::string encode_sorted(const StateNode& node);

// Indented variant of encode() for human consumption.
std::string encode_pretty(const StateNode& node, int indent = 2);

// Throws Error{kParse} on malformed JSON and Error{kValue} on NaN/Infinity.
StateNode decode(std::string_view text);

Json to_json(const StateNode& node);
StateNode from_json(const Json& json);

// Whether a JSON array should decode as a DynamicStateList: non-empty, and
// every element is an object whose keys are reserved keys including
// objectName or className.
bool looks_like_dynamic_list(const Json& array);

// Serializes a number the way encode() does.
Json number_to_json(double value);

}  // namespace linkstate
