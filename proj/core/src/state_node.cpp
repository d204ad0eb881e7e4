#include "linkstate/state_node.hpp"

#include <algorithm>
#include <cmath>

#include "linkstate/error.hpp"

namespace linkstate {

StateMap::StateMap(std::initializer_list<value_type> items) {
  for (const auto& [k, v] : items) set(k, v);
}

StateNode& StateMap::set(std::string key, StateNode value) {
  if (StateNode* existing = find(key)) {
    *existing = std::move(value);
    return *existing;
  }
  items_.emplace_back(std::move(key), std::move(value));
  return items_.back().second;
}

bool StateMap::erase(std::string_view key) {
  auto it = std::find_if(items_.begin(), items_.end(),
                         [&](const value_type& kv) { return kv.first == key; });
  if (it == items_.end()) return false;
  items_.erase(it);
  return true;
}

const StateNode* StateMap::find(std::string_view key) const {
  for (const auto& kv : items_) {
    if (kv.first == key) return &kv.second;
  }
  return nullptr;
}

StateNode* StateMap::find(std::string_view key) {
  for (auto& kv : items_) {
    if (kv.first == key) return &kv.second;
  }
  return nullptr;
}

StateNode::StateNode(double d) {
  if (!std::isfinite(d)) throw Error(Errc::kValue, "non-finite number in session state");
  value_ = d;
}

StateNode::StateNode(StateList seq) : value_(std::move(seq)) {}
StateNode::StateNode(StateMap map) : value_(std::move(map)) {}
StateNode::StateNode(DynamicStateList list) : value_(std::move(list)) {}

StateNode StateNode::sequence(std::initializer_list<StateNode> items) {
  return StateNode(StateList(items));
}

StateNode StateNode::mapping(std::initializer_list<StateMap::value_type> items) {
  return StateNode(StateMap(items));
}

bool StateNode::is_dynamic_list_like() const noexcept {
  if (is_dynamic_list()) return true;
  return is_sequence() && std::get<StateList>(value_).empty();
}

namespace {

[[noreturn]] void wrong_kind(StateNode::Kind want, StateNode::Kind have) {
  throw Error(Errc::kTypeMismatch, "expected " + std::string(kind_name(want)) + ", got " +
                                       std::string(kind_name(have)));
}

}  // namespace

bool StateNode::as_bool() const {
  if (!is_bool()) wrong_kind(Kind::kBool, kind());
  return std::get<bool>(value_);
}

double StateNode::as_number() const {
  if (!is_number()) wrong_kind(Kind::kNumber, kind());
  return std::get<double>(value_);
}

const std::string& StateNode::as_text() const {
  if (!is_text()) wrong_kind(Kind::kText, kind());
  return std::get<std::string>(value_);
}

const StateList& StateNode::as_sequence() const {
  if (!is_sequence()) wrong_kind(Kind::kSequence, kind());
  return std::get<StateList>(value_);
}

StateList& StateNode::as_sequence() {
  if (!is_sequence()) wrong_kind(Kind::kSequence, kind());
  return std::get<StateList>(value_);
}

const StateMap& StateNode::as_mapping() const {
  if (!is_mapping()) wrong_kind(Kind::kMapping, kind());
  return std::get<StateMap>(value_);
}

StateMap& StateNode::as_mapping() {
  if (!is_mapping()) wrong_kind(Kind::kMapping, kind());
  return std::get<StateMap>(value_);
}

const DynamicStateList& StateNode::as_dynamic_list() const {
  if (!is_dynamic_list()) wrong_kind(Kind::kDynamicList, kind());
  return std::get<DynamicStateList>(value_);
}

DynamicStateList& StateNode::as_dynamic_list() {
  if (!is_dynamic_list()) wrong_kind(Kind::kDynamicList, kind());
  return std::get<DynamicStateList>(value_);
}

const StateNode* StateNode::get(std::string_view key) const {
  if (!is_mapping()) return nullptr;
  return std::get<StateMap>(value_).find(key);
}

std::string_view kind_name(StateNode::Kind kind) noexcept {
  switch (kind) {
    case StateNode::Kind::kNull: return "null";
    case StateNode::Kind::kBool: return "bool";
    case StateNode::Kind::kNumber: return "number";
    case StateNode::Kind::kText: return "text";
    case StateNode::Kind::kSequence: return "sequence";
    case StateNode::Kind::kMapping: return "mapping";
    case StateNode::Kind::kDynamicList: return "dynamic-list";
  }
  return "?";
}

bool state_equivalent(const StateNode& a, const StateNode& b) {
  if (a.is_dynamic_list_like() && b.is_dynamic_list_like()) {
    if (a.is_sequence() || b.is_sequence()) {
      // at least one side is an empty sequence
      const bool a_empty = a.is_sequence() || a.as_dynamic_list().empty();
      const bool b_empty = b.is_sequence() || b.as_dynamic_list().empty();
      return a_empty && b_empty;
    }
  }
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case StateNode::Kind::kNull: return true;
    case StateNode::Kind::kBool: return a.as_bool() == b.as_bool();
    case StateNode::Kind::kNumber: return a.as_number() == b.as_number();
    case StateNode::Kind::kText: return a.as_text() == b.as_text();
    case StateNode::Kind::kSequence: {
      const auto& x = a.as_sequence();
      const auto& y = b.as_sequence();
      if (x.size() != y.size()) return false;
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (!state_equivalent(x[i], y[i])) return false;
      }
      return true;
    }
    case StateNode::Kind::kMapping: {
      const auto& x = a.as_mapping();
      const auto& y = b.as_mapping();
      if (x.size() != y.size()) return false;
      for (const auto& [key, value] : x) {
        const StateNode* other = y.find(key);
        if (other == nullptr || !state_equivalent(value, *other)) return false;
      }
      return true;
    }
    case StateNode::Kind::kDynamicList: {
      const auto& x = a.as_dynamic_list();
      const auto& y = b.as_dynamic_list();
      if (x.size() != y.size()) return false;
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i].object_name != y[i].object_name || x[i].class_name != y[i].class_name ||
            !state_equivalent(x[i].session_state, y[i].session_state)) {
          return false;
        }
      }
      return true;
    }
  }
  return false;
}

}  // namespace linkstate
