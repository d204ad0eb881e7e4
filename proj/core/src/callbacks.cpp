#include "linkstate/callbacks.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <string>

#include "linkstate/error.hpp"
#include "linkstate/trace.hpp"

namespace linkstate {

namespace {

std::atomic<std::uint64_t> next_collection_id{1};

}  // namespace

std::uint64_t GroupedCallback::id() const noexcept { return state_ ? state_->id : 0; }

GroupedCallback FrameScheduler::make_grouped(std::function<void()> fn) {
  auto state = std::make_shared<GroupedCallback::State>();
  state->id = next_grouped_id_++;
  state->fn = std::move(fn);
  return GroupedCallback(std::move(state));
}

void FrameScheduler::schedule(const std::shared_ptr<Registration>& registration) {
  const std::uint64_t id = registration->callback->id;
  if (auto it = pending_index_.find(id); it != pending_index_.end()) {
    pending_[it->second].sources.push_back(registration);
    return;
  }
  pending_index_.emplace(id, pending_.size());
  pending_.push_back({registration->callback, {registration}});
}

void FrameScheduler::flush_frame() {
  if (flushing_) throw Error(Errc::kReentrantFlush, "flush_frame called from a grouped callback");
  flushing_ = true;
  struct Reset {
    bool& flag;
    ~Reset() { flag = false; }
  } reset{flushing_};

  std::vector<Pending> batch;
  batch.swap(pending_);
  pending_index_.clear();
  ++frame_count_;

  for (const Pending& p : batch) {
    const bool still_registered = std::any_of(p.sources.begin(), p.sources.end(), [](const auto& weak) {
      auto reg = weak.lock();
      return reg && reg->active;
    });
    if (!still_registered) continue;
    if (trace::enabled()) {
      trace::emit("grouped cb=" + std::to_string(p.callback->id) + " frame=" + std::to_string(frame_count_));
    }
    p.callback->fn();
  }
}

CallbackCollection::CallbackCollection(FrameScheduler& scheduler)
    : scheduler_(&scheduler), id_(next_collection_id.fetch_add(1)) {}

CallbackCollection::~CallbackCollection() {
  *alive_ = false;
  clear();
  for (CallbackCollection* parent : parents_) {
    auto& siblings = parent->children_;
    siblings.erase(std::remove(siblings.begin(), siblings.end(), this), siblings.end());
  }
  for (CallbackCollection* child : children_) {
    auto& ps = child->parents_;
    ps.erase(std::remove(ps.begin(), ps.end(), this), ps.end());
  }
}

void CallbackCollection::check_thread() const {
  assert(std::this_thread::get_id() == owner_thread_ &&
         "CallbackCollection used from a thread other than its owner");
}

CallbackHandle CallbackCollection::add_immediate_callback(std::function<void()> cb, bool run_now,
                                                          const void* key) {
  check_thread();
  if (key != nullptr) {
    for (const auto& entry : immediate_) {
      if (entry->key == key) throw Error(Errc::kDuplicateCallback, "callback key already registered");
    }
  }
  auto entry = std::make_shared<Immediate>(Immediate{next_handle_++, std::move(cb), key});
  immediate_.push_back(entry);
  if (run_now) {
    entry->running = true;
    struct Done {
      Immediate& e;
      ~Done() { e.running = false; }
    } done{*entry};
    entry->fn();
  }
  return CallbackHandle{entry->id};
}

CallbackHandle CallbackCollection::add_grouped_callback(std::function<void()> cb) {
  return add_grouped_callback(scheduler_->make_grouped(std::move(cb)));
}

CallbackHandle CallbackCollection::add_grouped_callback(const GroupedCallback& cb) {
  check_thread();
  if (!cb.valid()) throw Error(Errc::kUnknownHandle, "invalid grouped callback");
  for (const auto& g : grouped_) {
    if (g.registration->callback == cb.state_) {
      throw Error(Errc::kDuplicateCallback, "grouped callback already registered");
    }
  }
  auto reg = std::make_shared<FrameScheduler::Registration>();
  reg->callback = cb.state_;
  grouped_.push_back({next_handle_++, std::move(reg)});
  return CallbackHandle{grouped_.back().id};
}

void CallbackCollection::remove_callback(CallbackHandle handle) {
  check_thread();
  for (auto it = immediate_.begin(); it != immediate_.end(); ++it) {
    if ((*it)->id == handle.id) {
      (*it)->removed = true;
      immediate_.erase(it);
      return;
    }
  }
  for (auto it = grouped_.begin(); it != grouped_.end(); ++it) {
    if (it->id == handle.id) {
      it->registration->active = false;
      grouped_.erase(it);
      return;
    }
  }
  throw Error(Errc::kUnknownHandle, "callback handle " + std::to_string(handle.id) + " not registered");
}

bool CallbackCollection::has_callback(CallbackHandle handle) const {
  return std::any_of(immediate_.begin(), immediate_.end(), [&](const auto& e) { return e->id == handle.id; }) ||
         std::any_of(grouped_.begin(), grouped_.end(), [&](const auto& g) { return g.id == handle.id; });
}

void CallbackCollection::trigger_callbacks() {
  check_thread();
  if (delay_count_ > 0) {
    pending_trigger_ = true;
    return;
  }
  run_triggers();
}

void CallbackCollection::run_triggers() {
  const auto alive = alive_;
  ++trigger_counter_;

  // Callbacks added while this trigger runs wait for the next trigger.
  const auto snapshot = immediate_;
  for (const auto& entry : snapshot) {
    if (entry->removed || entry->running) continue;
    entry->running = true;
    struct Done {
      Immediate& e;
      ~Done() { e.running = false; }
    } done{*entry};
    if (trace::enabled()) {
      trace::emit("immediate cc=" + std::to_string(id_) + " cb=" + std::to_string(entry->id));
    }
    entry->fn();
    if (!*alive) return;
  }

  for (const auto& g : grouped_) {
    if (g.registration->active) scheduler_->schedule(g.registration);
  }

  const auto parents = parents_;
  for (CallbackCollection* parent : parents) {
    if (!*alive) return;
    // A parent may have detached during an earlier callback.
    if (std::find(parents_.begin(), parents_.end(), parent) == parents_.end()) continue;
    parent->trigger_callbacks();
  }
}

void CallbackCollection::delay_callbacks() {
  check_thread();
  ++delay_count_;
}

void CallbackCollection::resume_callbacks() {
  check_thread();
  if (delay_count_ == 0) throw Error(Errc::kResumeWithoutDelay, "resume_callbacks without matching delay");
  if (--delay_count_ == 0 && pending_trigger_) {
    pending_trigger_ = false;
    run_triggers();
  }
}

void CallbackCollection::add_parent(CallbackCollection& parent) {
  check_thread();
  if (has_parent(parent)) return;
  parents_.push_back(&parent);
  parent.children_.push_back(this);
}

void CallbackCollection::remove_parent(CallbackCollection& parent) {
  check_thread();
  parents_.erase(std::remove(parents_.begin(), parents_.end(), &parent), parents_.end());
  auto& siblings = parent.children_;
  siblings.erase(std::remove(siblings.begin(), siblings.end(), this), siblings.end());
}

bool CallbackCollection::has_parent(const CallbackCollection& parent) const {
  return std::find(parents_.begin(), parents_.end(), &parent) != parents_.end();
}

void CallbackCollection::clear() {
  for (auto& entry : immediate_) entry->removed = true;
  immediate_.clear();
  for (auto& g : grouped_) g.registration->active = false;
  grouped_.clear();
  pending_trigger_ = false;
}

}  // namespace linkstate
