#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "linkstate/state_json.hpp"
#include "linkstate/state_node.hpp"

namespace linkstate {

struct EntryPatch;

// A partial state tree describing how to turn one StateNode into another.
//
// Mapping sites list only the keys whose subtree changed. Dynamic-list sites
// list every entry of the new list (Unchanged, Changed or Created) plus a
// Removed marker for every entry that disappeared, and flag whether the
// surviving entries were reordered.
class StateDiff {
 public:
  enum class Kind { kNone, kReplace, kRemove, kMapPatch, kListPatch };

  StateDiff() = default;

  static StateDiff replace(StateNode value);
  static StateDiff remove();
  static StateDiff map_patch(std::vector<std::pair<std::string, StateDiff>> fields);
  static StateDiff list_patch(std::vector<EntryPatch> entries, bool order_changed,
                              std::vector<std::string> order);

  Kind kind() const noexcept { return kind_; }
  bool empty() const noexcept;

  const StateNode& value() const noexcept { return value_; }
  const std::vector<std::pair<std::string, StateDiff>>& fields() const noexcept { return fields_; }
  const std::vector<EntryPatch>& entries() const noexcept { return entries_; }
  bool order_changed() const noexcept { return order_changed_; }
  const std::vector<std::string>& order() const noexcept { return order_; }

 private:
  Kind kind_ = Kind::kNone;
  StateNode value_;
  std::vector<std::pair<std::string, StateDiff>> fields_;
  std::vector<EntryPatch> entries_;
  bool order_changed_ = false;
  std::vector<std::string> order_;
};

struct EntryPatch {
  enum class Op { kUnchanged, kChanged, kCreated, kRemoved };

  Op op = Op::kUnchanged;
  std::string object_name;
  std::string class_name;  // kCreated, and kChanged as a guard
  StateDiff change;        // kChanged only
  StateNode state;         // kCreated only: the full state of the new object
};

// Minimal diff: diff(a, b).empty() iff state_equivalent(a, b).
StateDiff diff(const StateNode& old_state, const StateNode& new_state);

// Patches `base`. At dynamic-list sites, entries the diff does not mention are
// dropped when remove_missing is true and kept (in their relative order)
// otherwise. Sites whose shape does not match the diff are replaced.
StateNode apply(const StateNode& base, const StateDiff& d, bool remove_missing = true);

Json diff_to_json(const StateDiff& d);
StateDiff diff_from_json(const Json& json);

std::string encode_diff(const StateDiff& d);
StateDiff decode_diff(std::string_view text);

}  // namespace linkstate
