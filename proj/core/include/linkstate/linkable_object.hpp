#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "linkstate/callbacks.hpp"
#include "linkstate/error.hpp"
#include "linkstate/runtime.hpp"
#include "linkstate/state_node.hpp"

namespace linkstate {

enum class StateMode { kImplicit, kExplicitVariable, kExplicitComposite };

// A framework participant: owns a callback collection and, by default,
// derives its session state from the linkable children registered on it.
//
// Objects are shared-owned. A child registered on a parent bubbles its
// triggers to the parent and appears in the parent's implicit session state
// under its registration name. The first parent to adopt a child owns it and
// disposes it along with itself.
class LinkableObject : public std::enable_shared_from_this<LinkableObject> {
 public:
  explicit LinkableObject(Runtime& runtime);
  virtual ~LinkableObject();
  LinkableObject(const LinkableObject&) = delete;
  LinkableObject& operator=(const LinkableObject&) = delete;

  Runtime& runtime() const noexcept { return *runtime_; }
  CallbackCollection& callbacks() noexcept { return callbacks_; }
  const CallbackCollection& callbacks() const noexcept { return callbacks_; }
  virtual StateMode state_mode() const noexcept { return StateMode::kImplicit; }

  template <class T>
  std::shared_ptr<T> register_child(std::string name, std::shared_ptr<T> child) {
    register_child_object(std::move(name), child);
    return child;
  }

  // Constructs a T(runtime, args...) and registers it.
  template <class T, class... Args>
  std::shared_ptr<T> make_child(std::string name, Args&&... args) {
    return register_child(std::move(name), std::make_shared<T>(runtime(), std::forward<Args>(args)...));
  }

  std::shared_ptr<LinkableObject> child(std::string_view name) const;
  std::vector<std::string> child_names() const;

  // A fresh value tree; mutating it never affects this object.
  StateNode session_state() const;

  // Mutates the existing object graph toward `state`, delaying callbacks so
  // the whole call produces at most one trigger of this object. Problems
  // that do not stop the rest of the state from applying (verifier
  // rejections, unknown classes, shape mismatches) come back as diagnostics.
  Diagnostics set_session_state(const StateNode& state, bool remove_missing_dynamic_objects = true);

  // Idempotent. Disposes owned children, clears callbacks and detaches from
  // every parent; afterwards session-state operations throw Disposed.
  void dispose();
  bool disposed() const noexcept { return disposed_; }

  LinkableObject* owner() const noexcept { return owner_; }
  const std::vector<LinkableObject*>& parents() const noexcept { return parents_; }

 protected:
  virtual StateNode get_state() const;
  virtual void apply_state(const StateNode& state, bool remove_missing, Diagnostics& diagnostics,
                           const std::string& path);
  virtual void on_dispose() {}
  // Called when `child`, held by this object, was disposed.
  virtual void on_child_disposed(LinkableObject& child);

  void check_alive() const;

  // Container plumbing shared by implicit children, hash-map entries and
  // dynamic-object slots: bubbling, ownership and cycle checks.
  void adopt(LinkableObject& child);
  void release(LinkableObject& child);
  bool owns(const LinkableObject& child) const noexcept { return child.owner_ == this; }

  // Applies state to a contained object with the object's own callbacks
  // delayed for the duration.
  static void apply_nested(LinkableObject& target, const StateNode& state, bool remove_missing,
                           Diagnostics& diagnostics, const std::string& path);

 private:
  void register_child_object(std::string name, std::shared_ptr<LinkableObject> child);
  bool is_ancestor_or_self(const LinkableObject& candidate) const;

  Runtime* runtime_;
  CallbackCollection callbacks_;
  std::vector<std::pair<std::string, std::shared_ptr<LinkableObject>>> children_;
  std::vector<LinkableObject*> parents_;
  LinkableObject* owner_ = nullptr;
  bool disposed_ = false;
};

// Primitive linkable holding an explicit StateNode value.
class LinkableVariable : public LinkableObject {
 public:
  using Verifier = std::function<bool(const StateNode&)>;

  LinkableVariable(Runtime& runtime, StateNode default_value = {}, Verifier verifier = {});

  StateMode state_mode() const noexcept override { return StateMode::kExplicitVariable; }

  const StateNode& state() const;
  // Returns true when the value changed (and callbacks were triggered). A
  // rejected value leaves the variable untouched and sets last_verify_failed.
  bool set_state(StateNode value);

  bool verify(const StateNode& value) const { return !verifier_ || verifier_(value); }
  bool last_verify_failed() const noexcept { return last_verify_failed_; }
  const StateNode& default_value() const noexcept { return default_value_; }

 protected:
  StateNode get_state() const override;
  void apply_state(const StateNode& state, bool remove_missing, Diagnostics& diagnostics,
                   const std::string& path) override;

 private:
  StateNode value_;
  StateNode default_value_;
  Verifier verifier_;
  bool last_verify_failed_ = false;
};

// Null is a legal value for every typed variable.
class LinkableString : public LinkableVariable {
 public:
  explicit LinkableString(Runtime& runtime, std::string default_value = "", Verifier extra = {});
  std::optional<std::string> value() const;
  bool set(std::string value) { return set_state(StateNode(std::move(value))); }
};

class LinkableNumber : public LinkableVariable {
 public:
  explicit LinkableNumber(Runtime& runtime, double default_value = 0, Verifier extra = {});
  std::optional<double> value() const;
  bool set(double value) { return set_state(StateNode(value)); }
};

class LinkableBoolean : public LinkableVariable {
 public:
  explicit LinkableBoolean(Runtime& runtime, bool default_value = false, Verifier extra = {});
  std::optional<bool> value() const;
  bool set(bool value) { return set_state(StateNode(value)); }
};

}  // namespace linkstate
