#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "linkstate/linkable_object.hpp"

namespace linkstate {

// Ordered list of named dynamic children. An entry keeps its name for its
// whole lifetime; the order is mutable and meaningful (z-order, layer order).
// The session state is a DynamicStateList mirroring the entries in order.
class LinkableHashMap : public LinkableObject {
 public:
  explicit LinkableHashMap(Runtime& runtime);
  ~LinkableHashMap() override;

  StateMode state_mode() const noexcept override { return StateMode::kExplicitComposite; }

  // Returns the entry `name`, creating it (appended) when absent. An entry of
  // another class is disposed and replaced at the same position with a fresh
  // object; no state carries over. Throws NameRequired, UnknownClass.
  std::shared_ptr<LinkableObject> request_object(const std::string& name, std::string_view class_name);

  template <class T>
  std::shared_ptr<T> request_object_as(const std::string& name, std::string_view class_name) {
    return std::dynamic_pointer_cast<T>(request_object(name, class_name));
  }

  // Throws UnknownName.
  void remove_object(std::string_view name);
  void remove_all_objects();

  // Moves the listed names to the front in the given order; the others keep
  // their relative order after them. Throws InvalidPermutation.
  void set_name_order(const std::vector<std::string>& names);

  std::vector<std::string> names() const;
  std::size_t size() const noexcept { return entries_.size(); }

  // Throws UnknownName.
  std::shared_ptr<LinkableObject> get_object(std::string_view name) const;
  std::shared_ptr<LinkableObject> find_object(std::string_view name) const;
  std::string class_name_of(std::string_view name) const;

  // Fires whenever an entry is added, removed or reordered.
  CallbackCollection& child_list_callbacks() noexcept { return child_list_callbacks_; }
  const std::string& last_object_added() const noexcept { return last_added_; }
  const std::string& last_object_removed() const noexcept { return last_removed_; }

 protected:
  StateNode get_state() const override;
  void apply_state(const StateNode& state, bool remove_missing, Diagnostics& diagnostics,
                   const std::string& path) override;
  void on_dispose() override;
  void on_child_disposed(LinkableObject& child) override;

 private:
  struct Entry {
    std::string name;
    std::string class_name;
    std::shared_ptr<LinkableObject> object;
  };

  std::vector<Entry>::iterator find_entry(std::string_view name);
  std::vector<Entry>::const_iterator find_entry(std::string_view name) const;
  void erase_entry(std::vector<Entry>::iterator it);
  void notify_list_changed();

  // Declared before entries_ so it outlives the entries during destruction.
  CallbackCollection child_list_callbacks_;
  std::string last_added_;
  std::string last_removed_;
  std::vector<Entry> entries_;
};

}  // namespace linkstate
