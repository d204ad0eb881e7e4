#include "linkstate/linkable_dynamic_object.hpp"

#include "linkstate/class_registry.hpp"
#include "linkstate/linkable_hash_map.hpp"

namespace linkstate {

LinkableDynamicObject::LinkableDynamicObject(Runtime& runtime) : LinkableObject(runtime) {}

LinkableDynamicObject::~LinkableDynamicObject() {
  unsubscribe_global();
  if (local_) release(*local_);
}

std::shared_ptr<LinkableHashMap> LinkableDynamicObject::find_root() const {
  const LinkableObject* node = this;
  while (node->owner() != nullptr) node = node->owner();
  auto* root = dynamic_cast<const LinkableHashMap*>(node);
  if (root == nullptr) return nullptr;
  return std::const_pointer_cast<LinkableHashMap>(
      std::static_pointer_cast<const LinkableHashMap>(root->weak_from_this().lock()));
}

std::shared_ptr<LinkableObject> LinkableDynamicObject::target() const {
  switch (mode_) {
    case Mode::kLocal: return local_;
    case Mode::kGlobal: return global_target_.lock();
    case Mode::kEmpty: break;
  }
  return nullptr;
}

void LinkableDynamicObject::clear_local() {
  if (!local_) return;
  auto old = std::move(local_);
  local_.reset();
  local_class_.clear();
  const bool owned = owns(*old);
  release(*old);
  if (owned) old->dispose();
}

void LinkableDynamicObject::unsubscribe_global() {
  if (auto root = root_.lock(); root && root_list_handle_ &&
                                root->child_list_callbacks().has_callback(root_list_handle_)) {
    root->child_list_callbacks().remove_callback(root_list_handle_);
  }
  if (auto target = global_target_.lock();
      target && target_handle_ && target->callbacks().has_callback(target_handle_)) {
    target->callbacks().remove_callback(target_handle_);
  }
  root_.reset();
  root_list_handle_ = {};
  global_target_.reset();
  target_handle_ = {};
}

void LinkableDynamicObject::refresh_global(bool force_trigger) {
  auto root = root_.lock();
  auto resolved = root ? root->find_object(global_name_) : nullptr;
  auto current = global_target_.lock();
  if (resolved == current && !force_trigger) return;
  if (resolved != current) {
    if (current && target_handle_ && current->callbacks().has_callback(target_handle_)) {
      current->callbacks().remove_callback(target_handle_);
    }
    target_handle_ = {};
    global_target_ = resolved;
    if (resolved) {
      target_handle_ = resolved->callbacks().add_immediate_callback([this] { callbacks().trigger_callbacks(); });
    }
  }
  callbacks().trigger_callbacks();
}

std::shared_ptr<LinkableObject> LinkableDynamicObject::request_local_object(std::string_view class_name) {
  check_alive();
  if (mode_ == Mode::kLocal && local_class_ == class_name) return local_;
  auto object = runtime().registry().create(class_name, runtime());
  DelayGuard delay(callbacks());
  unsubscribe_global();
  global_name_.clear();
  clear_local();
  local_ = object;
  local_class_ = std::string(class_name);
  adopt(*object);
  mode_ = Mode::kLocal;
  callbacks().trigger_callbacks();
  return object;
}

void LinkableDynamicObject::request_global_object(const std::string& global_name) {
  check_alive();
  if (global_name.empty()) throw Error(Errc::kNameRequired, "global object name required");
  if (mode_ == Mode::kGlobal && global_name_ == global_name) return;
  auto root = find_root();
  if (!root) throw Error(Errc::kNoRoot, "no shared-owned root hash map above this object");
  DelayGuard delay(callbacks());
  clear_local();
  unsubscribe_global();
  mode_ = Mode::kGlobal;
  global_name_ = global_name;
  root_ = root;
  root_list_handle_ = root->child_list_callbacks().add_immediate_callback([this] { refresh_global(false); });
  refresh_global(true);
}

void LinkableDynamicObject::remove_object() {
  check_alive();
  if (mode_ == Mode::kEmpty) return;
  DelayGuard delay(callbacks());
  unsubscribe_global();
  global_name_.clear();
  clear_local();
  mode_ = Mode::kEmpty;
  callbacks().trigger_callbacks();
}

StateNode LinkableDynamicObject::get_state() const {
  DynamicStateList list;
  switch (mode_) {
    case Mode::kLocal: list.push_back({"", local_class_, local_->session_state()}); break;
    // References serialize by name only; the object's state lives in the root.
    case Mode::kGlobal: list.push_back({global_name_, "", StateNode()}); break;
    case Mode::kEmpty: break;
  }
  return StateNode(std::move(list));
}

void LinkableDynamicObject::apply_state(const StateNode& state, bool remove_missing, Diagnostics& diagnostics,
                                        const std::string& path) {
  const std::string where = path.empty() ? "/" : path;
  if (!state.is_dynamic_list_like()) {
    diagnostics.push_back({Errc::kTypeMismatch, where,
                           "expected dynamic state list, got " + std::string(kind_name(state.kind()))});
    return;
  }
  if (!state.is_dynamic_list() || state.as_dynamic_list().empty()) {
    remove_object();
    return;
  }
  const auto& list = state.as_dynamic_list();
  if (list.size() > 1) {
    diagnostics.push_back({Errc::kTypeMismatch, where, "dynamic object takes one entry; extras ignored"});
  }
  const DynamicState& entry = list.front();
  if (!entry.object_name.empty()) {
    try {
      request_global_object(entry.object_name);
    } catch (const Error& e) {
      diagnostics.push_back({e.code(), where, e.detail()});
    }
    return;
  }
  if (!runtime().registry().contains(entry.class_name)) {
    diagnostics.push_back(
        {Errc::kUnknownClass, where, "class '" + entry.class_name + "' is not registered; entry skipped"});
    return;
  }
  auto object = request_local_object(entry.class_name);
  apply_nested(*object, entry.session_state, remove_missing, diagnostics, where + "/" + entry.class_name);
}

void LinkableDynamicObject::on_dispose() {
  unsubscribe_global();
  global_name_.clear();
  clear_local();
  mode_ = Mode::kEmpty;
}

void LinkableDynamicObject::on_child_disposed(LinkableObject& child) {
  if (local_.get() != &child) {
    LinkableObject::on_child_disposed(child);
    return;
  }
  auto keep = std::move(local_);
  local_.reset();
  local_class_.clear();
  release(child);
  mode_ = Mode::kEmpty;
  if (!disposed()) callbacks().trigger_callbacks();
}

}  // namespace linkstate
