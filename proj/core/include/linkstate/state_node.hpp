#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace linkstate {

class StateNode;
struct DynamicState;

// Insertion-ordered string-keyed map. Keys are unique; assigning an existing
// key replaces the value in place and keeps its position.
class StateMap {
 public:
  using value_type = std::pair<std::string, StateNode>;
  using const_iterator = std::vector<value_type>::const_iterator;
  using iterator = std::vector<value_type>::iterator;

  StateMap() = default;
  StateMap(std::initializer_list<value_type> items);

  StateNode& set(std::string key, StateNode value);
  bool erase(std::string_view key);

  const StateNode* find(std::string_view key) const;
  StateNode* find(std::string_view key);
  bool contains(std::string_view key) const { return find(key) != nullptr; }

  std::size_t size() const noexcept { return items_.size(); }
  bool empty() const noexcept { return items_.empty(); }

  const_iterator begin() const noexcept { return items_.begin(); }
  const_iterator end() const noexcept { return items_.end(); }
  iterator begin() noexcept { return items_.begin(); }
  iterator end() noexcept { return items_.end(); }

 private:
  std::vector<value_type> items_;
};

using StateList = std::vector<StateNode>;
using DynamicStateList = std::vector<DynamicState>;

// The serializable session-state value tree. Numbers must be finite.
class StateNode {
 public:
  enum class Kind { kNull, kBool, kNumber, kText, kSequence, kMapping, kDynamicList };

  StateNode() = default;
  StateNode(std::nullptr_t) {}
  StateNode(bool b) : value_(b) {}
  StateNode(double d);
  StateNode(int i) : StateNode(static_cast<double>(i)) {}
  StateNode(long i) : StateNode(static_cast<double>(i)) {}
  StateNode(long long i) : StateNode(static_cast<double>(i)) {}
  StateNode(unsigned u) : StateNode(static_cast<double>(u)) {}
  StateNode(std::string s) : value_(std::move(s)) {}
  StateNode(std::string_view s) : value_(std::string(s)) {}
  StateNode(const char* s) : value_(std::string(s)) {}
  StateNode(StateList seq);
  StateNode(StateMap map);
  StateNode(DynamicStateList list);

  static StateNode sequence(std::initializer_list<StateNode> items);
  static StateNode mapping(std::initializer_list<StateMap::value_type> items);

  Kind kind() const noexcept { return static_cast<Kind>(value_.index()); }
  bool is_null() const noexcept { return kind() == Kind::kNull; }
  bool is_bool() const noexcept { return kind() == Kind::kBool; }
  bool is_number() const noexcept { return kind() == Kind::kNumber; }
  bool is_text() const noexcept { return kind() == Kind::kText; }
  bool is_sequence() const noexcept { return kind() == Kind::kSequence; }
  bool is_mapping() const noexcept { return kind() == Kind::kMapping; }
  bool is_dynamic_list() const noexcept { return kind() == Kind::kDynamicList; }
  // An empty Sequence is interchangeable with an empty DynamicStateList.
  bool is_dynamic_list_like() const noexcept;

  bool as_bool() const;
  double as_number() const;
  const std::string& as_text() const;
  const StateList& as_sequence() const;
  StateList& as_sequence();
  const StateMap& as_mapping() const;
  StateMap& as_mapping();
  const DynamicStateList& as_dynamic_list() const;
  DynamicStateList& as_dynamic_list();

  // Convenience for mapping nodes; nullptr when not a mapping or key absent.
  const StateNode* get(std::string_view key) const;

 private:
  std::variant<std::monostate, bool, double, std::string, StateList, StateMap,
               DynamicStateList>
      value_;
};

struct DynamicState {
  std::string object_name;
  std::string class_name;
  StateNode session_state;
};

std::string_view kind_name(StateNode::Kind kind) noexcept;

// Deep equality where mapping key order is ignored and dynamic-list order is
// significant. Numbers compare exactly.
bool state_equivalent(const StateNode& a, const StateNode& b);

}  // namespace linkstate
