#include "linkstate/state_json.hpp"

#include <cmath>
#include <cstdint>

#include "linkstate/error.hpp"

namespace linkstate {

namespace {

constexpr double kMaxExactInteger = 9007199254740992.0;  // 2^53

bool is_reserved_key(std::string_view key) {
  return key == kObjectNameKey || key == kClassNameKey || key == kSessionStateKey;
}

// nlohmann rejects NaN/Infinity as malformed input; report those literals as
// value errors instead so callers can tell the two apart.
bool contains_non_finite_literal(std::string_view text) {
  bool in_string = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
      continue;
    }
    const std::string_view rest = text.substr(i);
    if (rest.starts_with("NaN") || rest.starts_with("Infinity") || rest.starts_with("inf") ||
        rest.starts_with("nan")) {
      return true;
    }
  }
  return false;
}

}  // namespace

Json number_to_json(double value) {
  if (std::floor(value) == value && std::fabs(value) <= kMaxExactInteger) {
    return Json(static_cast<std::int64_t>(value));
  }
  return Json(value);
}

Json to_json(const StateNode& node) {
  switch (node.kind()) {
    case StateNode::Kind::kNull: return Json(nullptr);
    case StateNode::Kind::kBool: return Json(node.as_bool());
    case StateNode::Kind::kNumber: return number_to_json(node.as_number());
    case StateNode::Kind::kText: return Json(node.as_text());
    case StateNode::Kind::kSequence: {
      Json out = Json::array();
      for (const auto& item : node.as_sequence()) out.push_back(to_json(item));
      return out;
    }
    case StateNode::Kind::kMapping: {
      Json out = Json::object();
      for (const auto& [key, value] : node.as_mapping()) out[key] = to_json(value);
      return out;
    }
    case StateNode::Kind::kDynamicList: {
      Json out = Json::array();
      for (const auto& entry : node.as_dynamic_list()) {
        Json item = Json::object();
        item[std::string(kObjectNameKey)] = entry.object_name;
        item[std::string(kClassNameKey)] = entry.class_name;
        item[std::string(kSessionStateKey)] = to_json(entry.session_state);
        out.push_back(std::move(item));
      }
      return out;
    }
  }
  return Json(nullptr);
}

bool looks_like_dynamic_list(const Json& array) {
  if (!array.is_array() || array.empty()) return false;
  for (const auto& item : array) {
    if (!item.is_object()) return false;
    bool has_identity = false;
    for (const auto& [key, value] : item.items()) {
      if (!is_reserved_key(key)) return false;
      if (key == kObjectNameKey || key == kClassNameKey) {
        if (!value.is_string()) return false;
        has_identity = true;
      }
    }
    if (!has_identity) return false;
  }
  return true;
}

StateNode from_json(const Json& json) {
  switch (json.type()) {
    case Json::value_t::null: return StateNode();
    case Json::value_t::boolean: return StateNode(json.get<bool>());
    case Json::value_t::number_integer: return StateNode(static_cast<double>(json.get<std::int64_t>()));
    case Json::value_t::number_unsigned: return StateNode(static_cast<double>(json.get<std::uint64_t>()));
    case Json::value_t::number_float: {
      const double d = json.get<double>();
      if (!std::isfinite(d)) throw Error(Errc::kValue, "non-finite number literal");
      return StateNode(d);
    }
    case Json::value_t::string: return StateNode(json.get<std::string>());
    case Json::value_t::array: {
      if (looks_like_dynamic_list(json)) {
        DynamicStateList list;
        list.reserve(json.size());
        for (const auto& item : json) {
          DynamicState entry;
          if (auto it = item.find(kObjectNameKey); it != item.end()) entry.object_name = it->get<std::string>();
          if (auto it = item.find(kClassNameKey); it != item.end()) entry.class_name = it->get<std::string>();
          if (auto it = item.find(kSessionStateKey); it != item.end()) entry.session_state = from_json(*it);
          list.push_back(std::move(entry));
        }
        return StateNode(std::move(list));
      }
      StateList seq;
      seq.reserve(json.size());
      for (const auto& item : json) seq.push_back(from_json(item));
      return StateNode(std::move(seq));
    }
    case Json::value_t::object: {
      StateMap map;
      for (const auto& [key, value] : json.items()) map.set(key, from_json(value));
      return StateNode(std::move(map));
    }
    case Json::value_t::binary:
    case Json::value_t::discarded:
      break;
  }
  throw Error(Errc::kParse, "unsupported JSON value");
}

std::string encode(const StateNode& node) { return to_json(node).dump(); }

std::string encode_sorted(const StateNode& node) {
  return nlohmann::json::parse(encode(node)).dump();
}

std::string encode_pretty(const StateNode& node, int indent) { return to_json(node).dump(indent); }

StateNode decode(std::string_view text) {
  Json json;
  try {
    json = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    if (contains_non_finite_literal(text)) throw Error(Errc::kValue, "NaN/Infinity literal in state");
    throw Error(Errc::kParse, e.what());
  }
  return from_json(json);
}

}  // namespace linkstate
