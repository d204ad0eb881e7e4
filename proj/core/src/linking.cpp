#include "linkstate/linking.hpp"

#include <algorithm>

#include "linkstate/trace.hpp"

namespace linkstate {

void Link::unlink() {
  if (!active_) throw Error(Errc::kAlreadyUnlinked, "link already unlinked");
  active_ = false;
  detach();
}

namespace {

// Remove a callback if the collection still has it; endpoints may have been
// disposed (which clears their callbacks) before the link goes away.
void drop(CallbackCollection& cc, CallbackHandle& handle) {
  if (handle && cc.has_callback(handle)) cc.remove_callback(handle);
  handle = {};
}

// Order-independent identity of an endpoint pair. std::minmax would hand
// back references to its by-value arguments.
std::pair<const void*, const void*> pair_key(const void* a, const void* b) {
  return a < b ? std::pair(a, b) : std::pair(b, a);
}

class SessionLink final : public Link {
 public:
  SessionLink(const std::shared_ptr<LinkableObject>& a, const std::shared_ptr<LinkableObject>& b)
      : a_(a), b_(b), runtime_(&a->runtime()), key_(pair_key(a.get(), b.get())) {}

  ~SessionLink() override {
    if (active_) {
      active_ = false;
      detach();
    }
  }

  void start() {
    auto a = a_.lock();
    auto b = b_.lock();
    runtime_->links().active_pairs.insert(key_);
    copy(*a, *b, 0);
    handle_a_ = a->callbacks().add_immediate_callback([this] { forward(a_, b_, 0); });
    handle_b_ = b->callbacks().add_immediate_callback([this] { forward(b_, a_, 1); });
  }

 protected:
  void detach() override {
    runtime_->links().active_pairs.erase(key_);
    if (auto a = a_.lock()) drop(a->callbacks(), handle_a_);
    if (auto b = b_.lock()) drop(b->callbacks(), handle_b_);
  }

 private:
  void forward(const std::weak_ptr<LinkableObject>& from_weak, const std::weak_ptr<LinkableObject>& to_weak,
               int direction) {
    if (!active_ || suppressed_) return;
    auto from = from_weak.lock();
    auto to = to_weak.lock();
    if (!from || !to || from->disposed() || to->disposed()) return;

    auto& links = runtime_->links();
    const bool outermost = links.depth == 0;
    if (outermost) ++links.generation;
    // Within one edit a link forwards in one direction only; the reverse
    // direction would be the edit coming back around a cycle.
    if (last_generation_ == links.generation && last_direction_ != direction) return;
    last_generation_ = links.generation;
    last_direction_ = direction;

    ++links.depth;
    try {
      copy(*from, *to, direction);
    } catch (...) {
      --links.depth;
      throw;
    }
    --links.depth;
  }

  void copy(LinkableObject& from, LinkableObject& to, int direction) {
    StateNode state = from.session_state();
    if (state_equivalent(state, to.session_state())) return;
    if (trace::enabled()) trace::emit("link " + std::string(direction == 0 ? "a->b" : "b->a"));
    ++propagations_;
    suppressed_ = true;
    try {
      to.set_session_state(state, true);
    } catch (...) {
      suppressed_ = false;
      throw;
    }
    suppressed_ = false;
  }

  std::weak_ptr<LinkableObject> a_;
  std::weak_ptr<LinkableObject> b_;
  Runtime* runtime_;
  std::pair<const void*, const void*> key_;
  CallbackHandle handle_a_;
  CallbackHandle handle_b_;
  std::uint64_t last_generation_ = 0;
  int last_direction_ = -1;
};

class ExternalLink final : public Link {
 public:
  ExternalLink(const std::shared_ptr<LinkableVariable>& variable, ExternalGetter getter, ExternalSetter setter,
               CallbackCollection& notify)
      : variable_(variable), getter_(std::move(getter)), setter_(std::move(setter)), notify_(&notify) {}

  ~ExternalLink() override {
    if (active_) {
      active_ = false;
      detach();
    }
  }

  void start() {
    auto variable = variable_.lock();
    push();
    variable_handle_ = variable->callbacks().add_immediate_callback([this] { push(); });
    notify_handle_ = notify_->add_immediate_callback([this] { pull(); });
  }

 protected:
  void detach() override {
    if (auto v = variable_.lock()) drop(v->callbacks(), variable_handle_);
    drop(*notify_, notify_handle_);
  }

 private:
  void push() {
    if (!active_ || suppressed_) return;
    auto variable = variable_.lock();
    if (!variable || variable->disposed()) return;
    const StateNode value = variable->state();
    if (state_equivalent(value, getter_())) return;
    ++propagations_;
    suppressed_ = true;
    try {
      setter_(value);
    } catch (...) {
      suppressed_ = false;
      throw;
    }
    suppressed_ = false;
  }

  void pull() {
    if (!active_ || suppressed_) return;
    auto variable = variable_.lock();
    if (!variable || variable->disposed()) return;
    StateNode value = getter_();
    if (state_equivalent(value, variable->state())) return;
    ++propagations_;
    suppressed_ = true;
    try {
      variable->set_state(std::move(value));
    } catch (...) {
      suppressed_ = false;
      throw;
    }
    suppressed_ = false;
  }

  std::weak_ptr<LinkableVariable> variable_;
  ExternalGetter getter_;
  ExternalSetter setter_;
  CallbackCollection* notify_;
  CallbackHandle variable_handle_;
  CallbackHandle notify_handle_;
};

}  // namespace

std::shared_ptr<Link> link_session_state(const std::shared_ptr<LinkableObject>& primary,
                                         const std::shared_ptr<LinkableObject>& secondary) {
  if (!primary || !secondary) throw Error(Errc::kValue, "null link endpoint");
  if (primary == secondary) throw Error(Errc::kSelfLink, "cannot link an object to itself");
  if (primary->disposed() || secondary->disposed()) throw Error(Errc::kDisposed, "cannot link a disposed object");
  const auto key = pair_key(primary.get(), secondary.get());
  if (primary->runtime().links().active_pairs.contains(key)) {
    throw Error(Errc::kDuplicateLink, "objects are already linked");
  }
  auto link = std::make_shared<SessionLink>(primary, secondary);
  link->start();
  return link;
}

std::shared_ptr<Link> link_external_property(const std::shared_ptr<LinkableVariable>& variable,
                                             ExternalGetter getter, ExternalSetter setter,
                                             CallbackCollection& notify) {
  if (!variable) throw Error(Errc::kValue, "null variable");
  if (variable->disposed()) throw Error(Errc::kDisposed, "cannot link a disposed variable");
  if (!getter || !setter) throw Error(Errc::kValue, "external property needs a getter and a setter");
  auto link = std::make_shared<ExternalLink>(variable, std::move(getter), std::move(setter), notify);
  link->start();
  return link;
}

}  // namespace linkstate
