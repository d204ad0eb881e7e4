#include "linkstate/linkable_hash_map.hpp"

#include <algorithm>
#include <set>

#include "linkstate/class_registry.hpp"

namespace linkstate {

LinkableHashMap::LinkableHashMap(Runtime& runtime)
    : LinkableObject(runtime), child_list_callbacks_(runtime.scheduler()) {}

LinkableHashMap::~LinkableHashMap() {
  auto entries = std::move(entries_);
  entries_.clear();
  for (auto& e : entries) release(*e.object);
}

auto LinkableHashMap::find_entry(std::string_view name) -> std::vector<Entry>::iterator {
  return std::find_if(entries_.begin(), entries_.end(), [&](const Entry& e) { return e.name == name; });
}

auto LinkableHashMap::find_entry(std::string_view name) const -> std::vector<Entry>::const_iterator {
  return std::find_if(entries_.begin(), entries_.end(), [&](const Entry& e) { return e.name == name; });
}

void LinkableHashMap::notify_list_changed() {
  child_list_callbacks_.trigger_callbacks();
  callbacks().trigger_callbacks();
}

std::shared_ptr<LinkableObject> LinkableHashMap::request_object(const std::string& name,
                                                                std::string_view class_name) {
  check_alive();
  if (name.empty()) throw Error(Errc::kNameRequired, "hash map entries need a name");
  auto it = find_entry(name);
  if (it != entries_.end() && it->class_name == class_name) return it->object;

  auto object = runtime().registry().create(class_name, runtime());
  DelayGuard delay(callbacks());
  DelayGuard list_delay(child_list_callbacks_);
  it = find_entry(name);
  if (it != entries_.end()) {
    // Replace in place: same name, same position, fresh object.
    auto old = it->object;
    it->object = object;
    it->class_name = std::string(class_name);
    adopt(*object);
    last_removed_ = name;
    if (owns(*old)) {
      release(*old);
      old->dispose();
    } else {
      release(*old);
    }
  } else {
    entries_.push_back({name, std::string(class_name), object});
    adopt(*object);
  }
  last_added_ = name;
  notify_list_changed();
  return object;
}

void LinkableHashMap::erase_entry(std::vector<Entry>::iterator it) {
  auto object = it->object;
  last_removed_ = it->name;
  entries_.erase(it);
  const bool owned = owns(*object);
  release(*object);
  if (owned) object->dispose();
}

void LinkableHashMap::remove_object(std::string_view name) {
  check_alive();
  auto it = find_entry(name);
  if (it == entries_.end()) throw Error(Errc::kUnknownName, "no entry named '" + std::string(name) + "'");
  DelayGuard delay(callbacks());
  DelayGuard list_delay(child_list_callbacks_);
  erase_entry(it);
  notify_list_changed();
}

void LinkableHashMap::remove_all_objects() {
  check_alive();
  if (entries_.empty()) return;
  DelayGuard delay(callbacks());
  DelayGuard list_delay(child_list_callbacks_);
  while (!entries_.empty()) erase_entry(entries_.end() - 1);
  notify_list_changed();
}

void LinkableHashMap::set_name_order(const std::vector<std::string>& names) {
  check_alive();
  std::set<std::string_view> seen;
  for (const auto& n : names) {
    if (!seen.insert(n).second) throw Error(Errc::kInvalidPermutation, "duplicate name '" + n + "' in order");
    if (find_entry(n) == entries_.end()) throw Error(Errc::kInvalidPermutation, "unknown name '" + n + "' in order");
  }
  std::vector<Entry> reordered;
  reordered.reserve(entries_.size());
  for (const auto& n : names) reordered.push_back(*find_entry(n));
  for (const auto& e : entries_) {
    if (!seen.contains(e.name)) reordered.push_back(e);
  }
  bool changed = false;
  for (std::size_t i = 0; i < reordered.size(); ++i) {
    if (reordered[i].name != entries_[i].name) {
      changed = true;
      break;
    }
  }
  if (!changed) return;
  entries_ = std::move(reordered);
  DelayGuard delay(callbacks());
  notify_list_changed();
}

std::vector<std::string> LinkableHashMap::names() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.name);
  return out;
}

std::shared_ptr<LinkableObject> LinkableHashMap::get_object(std::string_view name) const {
  auto object = find_object(name);
  if (!object) throw Error(Errc::kUnknownName, "no entry named '" + std::string(name) + "'");
  return object;
}

std::shared_ptr<LinkableObject> LinkableHashMap::find_object(std::string_view name) const {
  auto it = find_entry(name);
  return it == entries_.end() ? nullptr : it->object;
}

std::string LinkableHashMap::class_name_of(std::string_view name) const {
  auto it = find_entry(name);
  if (it == entries_.end()) throw Error(Errc::kUnknownName, "no entry named '" + std::string(name) + "'");
  return it->class_name;
}

StateNode LinkableHashMap::get_state() const {
  DynamicStateList list;
  list.reserve(entries_.size());
  for (const auto& e : entries_) list.push_back({e.name, e.class_name, e.object->session_state()});
  return StateNode(std::move(list));
}

void LinkableHashMap::apply_state(const StateNode& state, bool remove_missing, Diagnostics& diagnostics,
                                  const std::string& path) {
  if (!state.is_dynamic_list_like()) {
    diagnostics.push_back({Errc::kTypeMismatch, path.empty() ? "/" : path,
                           "expected dynamic state list, got " + std::string(kind_name(state.kind()))});
    return;
  }
  DelayGuard list_delay(child_list_callbacks_);
  std::vector<std::string> mentioned;
  if (state.is_dynamic_list()) {
    for (const auto& entry : state.as_dynamic_list()) {
      const std::string entry_path = path + "/" + entry.object_name;
      if (entry.object_name.empty()) {
        diagnostics.push_back({Errc::kNameRequired, path + "/", "hash map entry without objectName skipped"});
        continue;
      }
      if (!runtime().registry().contains(entry.class_name)) {
        diagnostics.push_back(
            {Errc::kUnknownClass, entry_path, "class '" + entry.class_name + "' is not registered; entry skipped"});
        continue;
      }
      auto object = request_object(entry.object_name, entry.class_name);
      apply_nested(*object, entry.session_state, remove_missing, diagnostics, entry_path);
      if (std::find(mentioned.begin(), mentioned.end(), entry.object_name) == mentioned.end()) {
        mentioned.push_back(entry.object_name);
      }
    }
  }
  if (remove_missing) {
    for (auto it = entries_.begin(); it != entries_.end();) {
      if (std::find(mentioned.begin(), mentioned.end(), it->name) == mentioned.end()) {
        erase_entry(it);
        it = entries_.begin();
        notify_list_changed();
      } else {
        ++it;
      }
    }
  }
  // Entries may have been disposed by callbacks while applying.
  std::erase_if(mentioned, [&](const std::string& n) { return find_entry(n) == entries_.end(); });
  set_name_order(mentioned);
}

void LinkableHashMap::on_dispose() {
  auto entries = std::move(entries_);
  entries_.clear();
  for (auto& e : entries) {
    const bool owned = owns(*e.object);
    release(*e.object);
    if (owned) e.object->dispose();
  }
  child_list_callbacks_.clear();
}

void LinkableHashMap::on_child_disposed(LinkableObject& child) {
  auto it = std::find_if(entries_.begin(), entries_.end(), [&](const Entry& e) { return e.object.get() == &child; });
  if (it == entries_.end()) {
    LinkableObject::on_child_disposed(child);
    return;
  }
  auto keep = it->object;
  last_removed_ = it->name;
  entries_.erase(it);
  release(child);
  if (!disposed()) {
    DelayGuard delay(callbacks());
    notify_list_changed();
  }
}

}  // namespace linkstate
