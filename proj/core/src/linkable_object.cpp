#include "linkstate/linkable_object.hpp"

#include <algorithm>

namespace linkstate {

LinkableObject::LinkableObject(Runtime& runtime) : runtime_(&runtime), callbacks_(runtime.scheduler()) {}

LinkableObject::~LinkableObject() {
  for (auto& [name, child] : children_) {
    auto& ps = child->parents_;
    ps.erase(std::remove(ps.begin(), ps.end(), this), ps.end());
    if (child->owner_ == this) child->owner_ = ps.empty() ? nullptr : ps.front();
    child->callbacks_.remove_parent(callbacks_);
  }
  for (LinkableObject* parent : parents_) {
    auto& kids = parent->children_;
    kids.erase(std::remove_if(kids.begin(), kids.end(), [this](const auto& kv) { return kv.second.get() == this; }),
               kids.end());
  }
}

void LinkableObject::check_alive() const {
  if (disposed_) throw Error(Errc::kDisposed, "object has been disposed");
}

bool LinkableObject::is_ancestor_or_self(const LinkableObject& candidate) const {
  if (this == &candidate) return true;
  for (const LinkableObject* parent : parents_) {
    if (parent->is_ancestor_or_self(candidate)) return true;
  }
  return false;
}

void LinkableObject::adopt(LinkableObject& child) {
  if (child.disposed_) throw Error(Errc::kDisposed, "cannot adopt a disposed object");
  if (is_ancestor_or_self(child)) throw Error(Errc::kCycleDetected, "registration would create a cycle");
  child.parents_.push_back(this);
  if (child.owner_ == nullptr) child.owner_ = this;
  child.callbacks_.add_parent(callbacks_);
}

void LinkableObject::release(LinkableObject& child) {
  auto& ps = child.parents_;
  if (auto it = std::find(ps.begin(), ps.end(), this); it != ps.end()) ps.erase(it);
  if (child.owner_ == this) child.owner_ = ps.empty() ? nullptr : ps.front();
  child.callbacks_.remove_parent(callbacks_);
}

void LinkableObject::register_child_object(std::string name, std::shared_ptr<LinkableObject> child) {
  check_alive();
  if (!child) throw Error(Errc::kValue, "null child");
  if (name.empty()) throw Error(Errc::kNameRequired, "child name required");
  for (const auto& [existing, _] : children_) {
    if (existing == name) throw Error(Errc::kDuplicateName, "child '" + name + "' already registered");
  }
  adopt(*child);
  children_.emplace_back(std::move(name), std::move(child));
}

std::shared_ptr<LinkableObject> LinkableObject::child(std::string_view name) const {
  for (const auto& [key, value] : children_) {
    if (key == name) return value;
  }
  return nullptr;
}

std::vector<std::string> LinkableObject::child_names() const {
  std::vector<std::string> names;
  names.reserve(children_.size());
  for (const auto& [key, _] : children_) names.push_back(key);
  return names;
}

StateNode LinkableObject::session_state() const {
  check_alive();
  return get_state();
}

Diagnostics LinkableObject::set_session_state(const StateNode& state, bool remove_missing_dynamic_objects) {
  check_alive();
  Diagnostics diagnostics;
  apply_nested(*this, state, remove_missing_dynamic_objects, diagnostics, "");
  return diagnostics;
}

void LinkableObject::apply_nested(LinkableObject& target, const StateNode& state, bool remove_missing,
                                  Diagnostics& diagnostics, const std::string& path) {
  if (target.disposed_) return;
  DelayGuard delay(target.callbacks_);
  target.apply_state(state, remove_missing, diagnostics, path);
}

StateNode LinkableObject::get_state() const {
  StateMap map;
  for (const auto& [name, child] : children_) map.set(name, child->session_state());
  return StateNode(std::move(map));
}

void LinkableObject::apply_state(const StateNode& state, bool remove_missing, Diagnostics& diagnostics,
                                 const std::string& path) {
  if (!state.is_mapping()) {
    diagnostics.push_back({Errc::kTypeMismatch, path.empty() ? "/" : path,
                           "expected mapping for composite object, got " + std::string(kind_name(state.kind()))});
    return;
  }
  // Snapshot: applying a child's state may run callbacks that change children_.
  const auto children = children_;
  for (const auto& [key, value] : state.as_mapping()) {
    for (const auto& [name, child] : children) {
      if (name == key) {
        apply_nested(*child, value, remove_missing, diagnostics, path + "/" + key);
        break;
      }
    }
  }
}

void LinkableObject::dispose() {
  if (disposed_) return;
  disposed_ = true;
  on_dispose();

  const auto children = children_;
  for (const auto& [name, child] : children) {
    if (child->owner_ == this) {
      child->dispose();
    } else {
      release(*child);
    }
  }
  children_.clear();

  const auto parents = parents_;
  for (LinkableObject* parent : parents) parent->on_child_disposed(*this);
  for (LinkableObject* parent : parents_) callbacks_.remove_parent(parent->callbacks_);
  parents_.clear();
  owner_ = nullptr;
  callbacks_.clear();
}

void LinkableObject::on_child_disposed(LinkableObject& child) {
  const auto before = children_.size();
  children_.erase(std::remove_if(children_.begin(), children_.end(),
                                 [&](const auto& kv) { return kv.second.get() == &child; }),
                  children_.end());
  release(child);
  if (!disposed_ && children_.size() != before) callbacks_.trigger_callbacks();
}

// --- variables -------------------------------------------------------------

LinkableVariable::LinkableVariable(Runtime& runtime, StateNode default_value, Verifier verifier)
    : LinkableObject(runtime),
      value_(default_value),
      default_value_(std::move(default_value)),
      verifier_(std::move(verifier)) {}

const StateNode& LinkableVariable::state() const {
  check_alive();
  return value_;
}

bool LinkableVariable::set_state(StateNode value) {
  check_alive();
  if (!verify(value)) {
    last_verify_failed_ = true;
    return false;
  }
  last_verify_failed_ = false;
  if (state_equivalent(value, value_)) return false;
  value_ = std::move(value);
  callbacks().trigger_callbacks();
  return true;
}

StateNode LinkableVariable::get_state() const { return value_; }

void LinkableVariable::apply_state(const StateNode& state, bool, Diagnostics& diagnostics,
                                   const std::string& path) {
  set_state(state);
  if (last_verify_failed_) {
    diagnostics.push_back({Errc::kTypeMismatch, path.empty() ? "/" : path,
                           "value rejected by verifier: " + std::string(kind_name(state.kind()))});
  }
}

namespace {

LinkableVariable::Verifier typed(StateNode::Kind kind, LinkableVariable::Verifier extra) {
  return [kind, extra = std::move(extra)](const StateNode& v) {
    if (!v.is_null() && v.kind() != kind) return false;
    return !extra || extra(v);
  };
}

}  // namespace

LinkableString::LinkableString(Runtime& runtime, std::string default_value, Verifier extra)
    : LinkableVariable(runtime, StateNode(std::move(default_value)), typed(StateNode::Kind::kText, std::move(extra))) {}

std::optional<std::string> LinkableString::value() const {
  const StateNode& v = state();
  if (v.is_null()) return std::nullopt;
  return v.as_text();
}

LinkableNumber::LinkableNumber(Runtime& runtime, double default_value, Verifier extra)
    : LinkableVariable(runtime, StateNode(default_value), typed(StateNode::Kind::kNumber, std::move(extra))) {}

std::optional<double> LinkableNumber::value() const {
  const StateNode& v = state();
  if (v.is_null()) return std::nullopt;
  return v.as_number();
}

LinkableBoolean::LinkableBoolean(Runtime& runtime, bool default_value, Verifier extra)
    : LinkableVariable(runtime, StateNode(default_value), typed(StateNode::Kind::kBool, std::move(extra))) {}

std::optional<bool> LinkableBoolean::value() const {
  const StateNode& v = state();
  if (v.is_null()) return std::nullopt;
  return v.as_bool();
}

}  // namespace linkstate
