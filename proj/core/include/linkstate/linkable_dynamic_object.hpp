#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "linkstate/linkable_object.hpp"

namespace linkstate {

class LinkableHashMap;

// Wrapper around a single swappable linkable object. It is empty, owns a
// local object, or refers by name to a global object living in the root
// LinkableHashMap of its session tree.
//
// In global mode the wrapper triggers whenever the referenced object triggers
// and whenever the name is rebound to a different object. A name that is not
// (yet) present in the root is a valid dangling reference.
class LinkableDynamicObject : public LinkableObject {
 public:
  enum class Mode { kEmpty, kLocal, kGlobal };

  explicit LinkableDynamicObject(Runtime& runtime);
  ~LinkableDynamicObject() override;

  StateMode state_mode() const noexcept override { return StateMode::kExplicitComposite; }

  // Keeps the current local object when its class already matches.
  std::shared_ptr<LinkableObject> request_local_object(std::string_view class_name);

  template <class T>
  std::shared_ptr<T> request_local_object_as(std::string_view class_name) {
    return std::dynamic_pointer_cast<T>(request_local_object(class_name));
  }

  // Throws NoRoot when this wrapper is not inside a tree rooted at a
  // shared-owned LinkableHashMap.
  void request_global_object(const std::string& global_name);
  void remove_object();

  Mode mode() const noexcept { return mode_; }
  const std::string& global_name() const noexcept { return global_name_; }
  const std::string& local_class_name() const noexcept { return local_class_; }

  // The local object, the resolved global object, or nullptr.
  std::shared_ptr<LinkableObject> target() const;

  template <class T>
  std::shared_ptr<T> target_as() const {
    return std::dynamic_pointer_cast<T>(target());
  }

 protected:
  StateNode get_state() const override;
  void apply_state(const StateNode& state, bool remove_missing, Diagnostics& diagnostics,
                   const std::string& path) override;
  void on_dispose() override;
  void on_child_disposed(LinkableObject& child) override;

 private:
  std::shared_ptr<LinkableHashMap> find_root() const;
  void clear_local();
  void unsubscribe_global();
  void refresh_global(bool force_trigger);

  Mode mode_ = Mode::kEmpty;
  std::shared_ptr<LinkableObject> local_;
  std::string local_class_;

  std::string global_name_;
  std::weak_ptr<LinkableHashMap> root_;
  CallbackHandle root_list_handle_;
  std::weak_ptr<LinkableObject> global_target_;
  CallbackHandle target_handle_;
};

}  // namespace linkstate
