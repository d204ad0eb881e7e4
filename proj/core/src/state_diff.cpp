#include "linkstate/state_diff.hpp"

#include <algorithm>
#include <optional>
#include <unordered_map>

#include "linkstate/error.hpp"

namespace linkstate {

namespace {

constexpr const char* kReplaceMarker = "__replace__";
constexpr const char* kRemovedMarker = "__removed__";
constexpr const char* kOrderMarker = "__order__";
constexpr const char* kSessionDiffKey = "sessionDiff";

const DynamicStateList& empty_list() {
  static const DynamicStateList kEmpty;
  return kEmpty;
}

const DynamicStateList& entries_of(const StateNode& node) {
  return node.is_dynamic_list() ? node.as_dynamic_list() : empty_list();
}

// Pairs entries of two dynamic lists: named entries by name, anonymous
// entries positionally. match[i] is the index in `old_list` matched with
// new_list[i], or nullopt.
std::vector<std::optional<std::size_t>> match_entries(const DynamicStateList& old_list,
                                                      const DynamicStateList& new_list) {
  std::unordered_map<std::string_view, std::size_t> by_name;
  std::vector<std::size_t> anonymous;
  for (std::size_t i = 0; i < old_list.size(); ++i) {
    if (old_list[i].object_name.empty()) {
      anonymous.push_back(i);
    } else {
      by_name.emplace(old_list[i].object_name, i);
    }
  }
  std::vector<std::optional<std::size_t>> match(new_list.size());
  std::size_t next_anonymous = 0;
  for (std::size_t i = 0; i < new_list.size(); ++i) {
    if (new_list[i].object_name.empty()) {
      if (next_anonymous < anonymous.size()) match[i] = anonymous[next_anonymous++];
    } else if (auto it = by_name.find(new_list[i].object_name); it != by_name.end()) {
      match[i] = it->second;
    }
  }
  return match;
}

StateDiff diff_lists(const DynamicStateList& old_list, const DynamicStateList& new_list) {
  const auto match = match_entries(old_list, new_list);
  std::vector<bool> survives(old_list.size(), false);
  for (const auto& m : match) {
    if (m) survives[*m] = true;
  }

  std::vector<EntryPatch> entries;
  for (std::size_t i = 0; i < old_list.size(); ++i) {
    if (!survives[i]) {
      entries.push_back({EntryPatch::Op::kRemoved, old_list[i].object_name, {}, {}, {}});
    }
  }

  std::vector<std::string> order;
  for (std::size_t i = 0; i < new_list.size(); ++i) {
    const DynamicState& entry = new_list[i];
    order.push_back(entry.object_name);
    if (!match[i] || old_list[*match[i]].class_name != entry.class_name) {
      entries.push_back({EntryPatch::Op::kCreated, entry.object_name, entry.class_name, {},
                         entry.session_state});
      continue;
    }
    StateDiff change = diff(old_list[*match[i]].session_state, entry.session_state);
    if (change.empty()) {
      entries.push_back({EntryPatch::Op::kUnchanged, entry.object_name, {}, {}, {}});
    } else {
      entries.push_back(
          {EntryPatch::Op::kChanged, entry.object_name, entry.class_name, std::move(change), {}});
    }
  }

  // Without an order marker, apply keeps surviving entries in their old order
  // and appends new ones; flag a reorder whenever that would be wrong.
  std::vector<std::size_t> matched_new;
  std::vector<std::size_t> unmatched_new;
  for (std::size_t i = 0; i < new_list.size(); ++i) {
    (match[i] ? matched_new : unmatched_new).push_back(i);
  }
  std::vector<std::size_t> expected = matched_new;
  std::stable_sort(expected.begin(), expected.end(),
                   [&](std::size_t a, std::size_t b) { return *match[a] < *match[b]; });
  expected.insert(expected.end(), unmatched_new.begin(), unmatched_new.end());
  bool order_changed = false;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (expected[i] != i) {
      order_changed = true;
      break;
    }
  }
  if (!order_changed) order.clear();
  return StateDiff::list_patch(std::move(entries), order_changed, std::move(order));
}

struct Slot {
  DynamicState entry;
  bool alive = true;
  bool mentioned = false;
};

StateNode apply_list(const StateNode& base, const StateDiff& d, bool remove_missing) {
  std::vector<Slot> slots;
  for (const auto& entry : entries_of(base)) slots.push_back({entry});

  std::unordered_map<std::string, std::size_t> by_name;
  std::vector<std::size_t> anonymous;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i].entry.object_name.empty()) {
      anonymous.push_back(i);
    } else {
      by_name.emplace(slots[i].entry.object_name, i);
    }
  }

  // A reference to either an existing slot or a newly created entry.
  struct Ref {
    bool created;
    std::size_t index;
  };
  std::vector<DynamicState> created;
  std::vector<Ref> listed;
  std::size_t next_anonymous = 0;

  auto locate = [&](const std::string& name, std::size_t& anon_cursor) -> std::optional<std::size_t> {
    if (name.empty()) {
      if (anon_cursor < anonymous.size()) return anonymous[anon_cursor++];
      ++anon_cursor;
      return std::nullopt;
    }
    if (auto it = by_name.find(name); it != by_name.end()) return it->second;
    return std::nullopt;
  };

  for (const auto& patch : d.entries()) {
    if (patch.op == EntryPatch::Op::kRemoved) continue;
    const auto slot = locate(patch.object_name, next_anonymous);
    if (slot && !slots[*slot].alive) continue;
    switch (patch.op) {
      case EntryPatch::Op::kUnchanged:
        if (slot) {
          slots[*slot].mentioned = true;
          listed.push_back({false, *slot});
        }
        break;
      case EntryPatch::Op::kChanged:
        // Changes to an entry that no longer exists, or that was recreated
        // with another class, are dropped.
        if (slot && (patch.class_name.empty() || slots[*slot].entry.class_name == patch.class_name)) {
          Slot& s = slots[*slot];
          s.entry.session_state = apply(s.entry.session_state, patch.change, remove_missing);
          s.mentioned = true;
          listed.push_back({false, *slot});
        }
        break;
      case EntryPatch::Op::kCreated:
        if (slot) {
          Slot& s = slots[*slot];
          s.entry.class_name = patch.class_name;
          s.entry.session_state = patch.state;
          s.mentioned = true;
          listed.push_back({false, *slot});
        } else {
          created.push_back({patch.object_name, patch.class_name, patch.state});
          listed.push_back({true, created.size() - 1});
        }
        break;
      case EntryPatch::Op::kRemoved:
        break;
    }
  }
  // Removed anonymous entries are the positional tail after the kept ones.
  std::size_t removed_anonymous = next_anonymous;
  for (const auto& patch : d.entries()) {
    if (patch.op != EntryPatch::Op::kRemoved) continue;
    if (const auto slot = locate(patch.object_name, removed_anonymous)) {
      slots[*slot].alive = false;
    }
  }

  if (remove_missing) {
    for (auto& s : slots) {
      if (!s.mentioned) s.alive = false;
    }
  }

  std::vector<Ref> default_order;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i].alive) default_order.push_back({false, i});
  }
  for (std::size_t i = 0; i < created.size(); ++i) default_order.push_back({true, i});

  auto entry_of = [&](const Ref& r) -> const DynamicState& {
    return r.created ? created[r.index] : slots[r.index].entry;
  };
  auto is_alive = [&](const Ref& r) { return r.created || slots[r.index].alive; };

  std::vector<Ref> final_order;
  if (d.order_changed()) {
    std::vector<bool> placed_slot(slots.size(), false);
    std::vector<bool> placed_created(created.size(), false);
    auto placed = [&](const Ref& r) -> std::vector<bool>::reference {
      return r.created ? placed_created[r.index] : placed_slot[r.index];
    };
    auto place_first = [&](const std::vector<Ref>& candidates, const std::string& name) {
      for (const Ref& r : candidates) {
        if (is_alive(r) && !placed(r) && entry_of(r).object_name == name) {
          placed(r) = true;
          final_order.push_back(r);
          return true;
        }
      }
      return false;
    };
    for (const auto& name : d.order()) {
      if (!place_first(listed, name)) place_first(default_order, name);
    }
    for (const Ref& r : default_order) {
      if (!placed(r)) final_order.push_back(r);
    }
  } else {
    final_order = std::move(default_order);
  }

  DynamicStateList out;
  out.reserve(final_order.size());
  for (const Ref& r : final_order) out.push_back(entry_of(r));
  return StateNode(std::move(out));
}

bool is_marker_key(std::string_view key) { return key == kReplaceMarker || key == kRemovedMarker; }

}  // namespace

StateDiff StateDiff::replace(StateNode value) {
  StateDiff d;
  d.kind_ = Kind::kReplace;
  d.value_ = std::move(value);
  return d;
}

StateDiff StateDiff::remove() {
  StateDiff d;
  d.kind_ = Kind::kRemove;
  return d;
}

StateDiff StateDiff::map_patch(std::vector<std::pair<std::string, StateDiff>> fields) {
  StateDiff d;
  if (fields.empty()) return d;
  d.kind_ = Kind::kMapPatch;
  d.fields_ = std::move(fields);
  return d;
}

StateDiff StateDiff::list_patch(std::vector<EntryPatch> entries, bool order_changed,
                                std::vector<std::string> order) {
  StateDiff d;
  d.kind_ = Kind::kListPatch;
  d.entries_ = std::move(entries);
  d.order_changed_ = order_changed;
  d.order_ = std::move(order);
  return d;
}

bool StateDiff::empty() const noexcept {
  return kind_ == Kind::kNone || (kind_ == Kind::kMapPatch && fields_.empty());
}

StateDiff diff(const StateNode& old_state, const StateNode& new_state) {
  if (state_equivalent(old_state, new_state)) return {};

  if (old_state.is_mapping() && new_state.is_mapping()) {
    const StateMap& old_map = old_state.as_mapping();
    const StateMap& new_map = new_state.as_mapping();
    std::vector<std::pair<std::string, StateDiff>> fields;
    for (const auto& [key, value] : new_map) {
      const StateNode* before = old_map.find(key);
      if (before == nullptr) {
        fields.emplace_back(key, StateDiff::replace(value));
      } else if (StateDiff change = diff(*before, value); !change.empty()) {
        fields.emplace_back(key, std::move(change));
      }
    }
    for (const auto& [key, value] : old_map) {
      if (!new_map.contains(key)) fields.emplace_back(key, StateDiff::remove());
    }
    // A lone field named like a marker would decode as the marker itself.
    if (fields.size() == 1 && is_marker_key(fields.front().first)) {
      return StateDiff::replace(new_state);
    }
    return StateDiff::map_patch(std::move(fields));
  }

  if (old_state.is_dynamic_list_like() && new_state.is_dynamic_list_like()) {
    return diff_lists(entries_of(old_state), entries_of(new_state));
  }
  return StateDiff::replace(new_state);
}

StateNode apply(const StateNode& base, const StateDiff& d, bool remove_missing) {
  switch (d.kind()) {
    case StateDiff::Kind::kNone: return base;
    case StateDiff::Kind::kReplace: return d.value();
    case StateDiff::Kind::kRemove: return StateNode();
    case StateDiff::Kind::kMapPatch: {
      StateNode out = base.is_mapping() ? base : StateNode(StateMap{});
      StateMap& map = out.as_mapping();
      for (const auto& [key, change] : d.fields()) {
        if (change.kind() == StateDiff::Kind::kRemove) {
          map.erase(key);
          continue;
        }
        const StateNode* before = map.find(key);
        StateNode patched = apply(before ? *before : StateNode(), change, remove_missing);
        map.set(key, std::move(patched));
      }
      return out;
    }
    case StateDiff::Kind::kListPatch: return apply_list(base, d, remove_missing);
  }
  return base;
}

Json diff_to_json(const StateDiff& d) {
  switch (d.kind()) {
    case StateDiff::Kind::kNone: return Json::object();
    case StateDiff::Kind::kReplace: {
      const StateNode& v = d.value();
      if (v.is_null() || v.is_bool() || v.is_number() || v.is_text()) return to_json(v);
      Json out = Json::object();
      out[std::string(kReplaceMarker)] = to_json(v);
      return out;
    }
    case StateDiff::Kind::kRemove: {
      Json out = Json::object();
      out[std::string(kRemovedMarker)] = true;
      return out;
    }
    case StateDiff::Kind::kMapPatch: {
      Json out = Json::object();
      for (const auto& [key, change] : d.fields()) out[key] = diff_to_json(change);
      return out;
    }
    case StateDiff::Kind::kListPatch: {
      Json out = Json::array();
      for (const auto& e : d.entries()) {
        Json item = Json::object();
        item[std::string(kObjectNameKey)] = e.object_name;
        switch (e.op) {
          case EntryPatch::Op::kUnchanged: break;
          case EntryPatch::Op::kChanged:
            item[std::string(kClassNameKey)] = e.class_name;
            item[std::string(kSessionDiffKey)] = diff_to_json(e.change);
            break;
          case EntryPatch::Op::kCreated:
            item[std::string(kClassNameKey)] = e.class_name;
            item[std::string(kSessionStateKey)] = to_json(e.state);
            break;
          case EntryPatch::Op::kRemoved:
            item[std::string(kRemovedMarker)] = true;
            break;
        }
        out.push_back(std::move(item));
      }
      if (d.order_changed()) {
        Json marker = Json::object();
        marker[std::string(kOrderMarker)] = d.order();
        out.push_back(std::move(marker));
      }
      return out;
    }
  }
  return Json::object();
}

namespace {

[[noreturn]] void malformed(const std::string& what) {
  throw Error(Errc::kParse, "malformed diff: " + what);
}

EntryPatch entry_from_json(const Json& item) {
  if (!item.is_object()) malformed("dynamic-list entry is not an object");
  EntryPatch e;
  if (auto it = item.find(kObjectNameKey); it != item.end()) {
    if (!it->is_string()) malformed("objectName must be a string");
    e.object_name = it->get<std::string>();
  }
  if (auto it = item.find(kRemovedMarker); it != item.end()) {
    e.op = EntryPatch::Op::kRemoved;
    return e;
  }
  const auto cls = item.find(kClassNameKey);
  if (cls != item.end()) {
    if (!cls->is_string()) malformed("className must be a string");
    e.class_name = cls->get<std::string>();
  }
  if (auto change = item.find(kSessionDiffKey); change != item.end()) {
    e.op = EntryPatch::Op::kChanged;
    e.change = diff_from_json(*change);
    return e;
  }
  if (cls != item.end()) {
    e.op = EntryPatch::Op::kCreated;
    if (auto state = item.find(kSessionStateKey); state != item.end()) e.state = from_json(*state);
    return e;
  }
  e.op = EntryPatch::Op::kUnchanged;
  return e;
}

}  // namespace

StateDiff diff_from_json(const Json& json) {
  if (json.is_object()) {
    if (json.size() == 1) {
      if (auto it = json.find(kReplaceMarker); it != json.end()) return StateDiff::replace(from_json(*it));
      if (auto it = json.find(kRemovedMarker); it != json.end() && it->is_boolean() && it->get<bool>()) {
        return StateDiff::remove();
      }
    }
    std::vector<std::pair<std::string, StateDiff>> fields;
    for (const auto& [key, value] : json.items()) fields.emplace_back(key, diff_from_json(value));
    return StateDiff::map_patch(std::move(fields));
  }
  if (json.is_array()) {
    std::vector<EntryPatch> entries;
    bool order_changed = false;
    std::vector<std::string> order;
    for (const auto& item : json) {
      if (item.is_object()) {
        if (auto it = item.find(kOrderMarker); it != item.end()) {
          if (!it->is_array()) malformed("__order__ must be an array");
          order_changed = true;
          for (const auto& name : *it) {
            if (!name.is_string()) malformed("__order__ names must be strings");
            order.push_back(name.get<std::string>());
          }
          continue;
        }
      }
      entries.push_back(entry_from_json(item));
    }
    return StateDiff::list_patch(std::move(entries), order_changed, std::move(order));
  }
  return StateDiff::replace(from_json(json));
}

std::string encode_diff(const StateDiff& d) { return diff_to_json(d).dump(); }

StateDiff decode_diff(std::string_view text) {
  Json json;
  try {
    json = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw Error(Errc::kParse, e.what());
  }
  return diff_from_json(json);
}

}  // namespace linkstate
