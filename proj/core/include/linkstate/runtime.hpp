#pragma once

#include <cstdint>
#include <memory>
#include <set>
#include <utility>

#include "linkstate/callbacks.hpp"

namespace linkstate {

class ClassRegistry;

// Everything one session tree shares: the frame scheduler that flushes its
// grouped callbacks, the class registry used to instantiate dynamic
// children, and bookkeeping for active session-state links.
//
// A Runtime and every object created against it belong to one thread.
class Runtime {
 public:
  explicit Runtime(std::shared_ptr<const ClassRegistry> registry = nullptr);
  Runtime(const Runtime&) = delete;
  Runtime& operator=(const Runtime&) = delete;

  FrameScheduler& scheduler() noexcept { return scheduler_; }
  const ClassRegistry& registry() const noexcept { return *registry_; }
  std::shared_ptr<const ClassRegistry> shared_registry() const noexcept { return registry_; }

  // Link bookkeeping used by link_session_state().
  struct LinkState {
    std::set<std::pair<const void*, const void*>> active_pairs;
    std::uint64_t generation = 0;
    int depth = 0;
  };
  LinkState& links() noexcept { return links_; }

 private:
  FrameScheduler scheduler_;
  std::shared_ptr<const ClassRegistry> registry_;
  LinkState links_;
};

}  // namespace linkstate
