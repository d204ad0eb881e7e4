#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <thread>
#include <unordered_map>
#include <vector>

namespace linkstate {

class CallbackCollection;
class FrameScheduler;

struct CallbackHandle {
  std::uint64_t id = 0;

  explicit operator bool() const noexcept { return id != 0; }
  friend bool operator==(CallbackHandle, CallbackHandle) = default;
};

// Identity of a grouped callback. The same GroupedCallback registered on
// several collections occupies a single slot in the frame scheduler, so it
// runs at most once per flush however many of them triggered.
class GroupedCallback {
 public:
  GroupedCallback() = default;

  bool valid() const noexcept { return state_ != nullptr; }
  std::uint64_t id() const noexcept;

 private:
  friend class FrameScheduler;
  friend class CallbackCollection;

  struct State {
    std::uint64_t id;
    std::function<void()> fn;
  };

  explicit GroupedCallback(std::shared_ptr<State> state) : state_(std::move(state)) {}

  std::shared_ptr<State> state_;
};

// Runs grouped callbacks at explicit frame boundaries.
class FrameScheduler {
 public:
  FrameScheduler() = default;
  FrameScheduler(const FrameScheduler&) = delete;
  FrameScheduler& operator=(const FrameScheduler&) = delete;

  GroupedCallback make_grouped(std::function<void()> fn);

  // Runs every pending grouped callback once, in first-scheduled order.
  // Callbacks scheduled while flushing wait for the next flush.
  void flush_frame();

  std::uint64_t frame_count() const noexcept { return frame_count_; }
  std::size_t pending_count() const noexcept { return pending_.size(); }
  bool flushing() const noexcept { return flushing_; }

 private:
  friend class CallbackCollection;

  struct Registration {
    std::shared_ptr<GroupedCallback::State> callback;
    bool active = true;
  };
  struct Pending {
    std::shared_ptr<GroupedCallback::State> callback;
    std::vector<std::weak_ptr<Registration>> sources;
  };

  void schedule(const std::shared_ptr<Registration>& registration);

  std::vector<Pending> pending_;
  std::unordered_map<std::uint64_t, std::size_t> pending_index_;
  std::uint64_t frame_count_ = 0;
  std::uint64_t next_grouped_id_ = 1;
  bool flushing_ = false;
};

// Per-object observer registry.
//
// Triggering runs immediate callbacks in registration order, schedules
// grouped callbacks on the frame scheduler, then triggers every parent
// collection. While the delay counter is non-zero, triggers are only recorded
// and collapse into a single trigger when the counter returns to zero. A
// callback never re-enters itself: triggering the collection from inside one
// of its callbacks skips that callback.
//
// Collections are confined to the thread that created them; debug builds
// assert on cross-thread use.
class CallbackCollection {
 public:
  explicit CallbackCollection(FrameScheduler& scheduler);
  ~CallbackCollection();
  CallbackCollection(const CallbackCollection&) = delete;
  CallbackCollection& operator=(const CallbackCollection&) = delete;

  // `key` optionally identifies the callback; registering a second callback
  // with the same non-null key throws DuplicateCallback.
  CallbackHandle add_immediate_callback(std::function<void()> cb, bool run_now = false,
                                        const void* key = nullptr);
  CallbackHandle add_grouped_callback(std::function<void()> cb);
  CallbackHandle add_grouped_callback(const GroupedCallback& cb);

  void remove_callback(CallbackHandle handle);
  bool has_callback(CallbackHandle handle) const;
  std::size_t callback_count() const noexcept { return immediate_.size() + grouped_.size(); }

  void trigger_callbacks();
  void delay_callbacks();
  void resume_callbacks();

  std::uint32_t delay_count() const noexcept { return delay_count_; }
  std::uint64_t trigger_counter() const noexcept { return trigger_counter_; }
  bool has_pending_trigger() const noexcept { return pending_trigger_; }

  // Parent links make triggers bubble upward.
  void add_parent(CallbackCollection& parent);
  void remove_parent(CallbackCollection& parent);
  bool has_parent(const CallbackCollection& parent) const;

  // Drops every callback registration (used on disposal).
  void clear();

  FrameScheduler& scheduler() const noexcept { return *scheduler_; }
  std::uint64_t id() const noexcept { return id_; }

 private:
  struct Immediate {
    std::uint64_t id;
    std::function<void()> fn;
    const void* key;
    bool running = false;
    bool removed = false;
  };
  struct Grouped {
    std::uint64_t id;
    std::shared_ptr<FrameScheduler::Registration> registration;
  };

  void check_thread() const;
  void run_triggers();

  FrameScheduler* scheduler_;
  std::uint64_t id_;
  std::vector<std::shared_ptr<Immediate>> immediate_;
  std::vector<Grouped> grouped_;
  std::vector<CallbackCollection*> parents_;
  std::vector<CallbackCollection*> children_;
  std::uint32_t delay_count_ = 0;
  std::uint64_t trigger_counter_ = 0;
  std::uint64_t next_handle_ = 1;
  bool pending_trigger_ = false;
  std::shared_ptr<bool> alive_ = std::make_shared<bool>(true);
  std::thread::id owner_thread_ = std::this_thread::get_id();
};

// Delays a collection for the lifetime of the guard.
class DelayGuard {
 public:
  explicit DelayGuard(CallbackCollection& cc) : cc_(&cc) { cc_->delay_callbacks(); }
  ~DelayGuard() noexcept(false) { cc_->resume_callbacks(); }
  DelayGuard(const DelayGuard&) = delete;
  DelayGuard& operator=(const DelayGuard&) = delete;

 private:
  CallbackCollection* cc_;
};

}  // namespace linkstate
