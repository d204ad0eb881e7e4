#pragma once

#include <functional>
#include <memory>

#include "linkstate/linkable_object.hpp"

namespace linkstate {

// A two-way connection between two state holders. Destroying the Link (or
// calling unlink) stops propagation; the endpoints keep their current state.
//
// Links must not outlive the Runtime of their endpoints.
class Link {
 public:
  virtual ~Link() = default;
  Link(const Link&) = delete;
  Link& operator=(const Link&) = delete;

  // Throws AlreadyUnlinked on the second call. A propagation already in
  // flight finishes; nothing propagates afterwards.
  void unlink();
  bool active() const noexcept { return active_; }

  // Number of times this link copied state across (either direction).
  std::uint64_t propagation_count() const noexcept { return propagations_; }

 protected:
  Link() = default;
  virtual void detach() = 0;

  bool active_ = true;
  bool suppressed_ = false;
  std::uint64_t propagations_ = 0;
};

// Links the session states of two objects. `secondary` adopts the state of
// `primary` right away; afterwards every effective change on either side is
// copied to the other with remove_missing=true. Copies that would not change
// the target are skipped, so cycles of links settle.
//
// Throws SelfLink, DuplicateLink, Disposed.
[[nodiscard]] std::shared_ptr<Link> link_session_state(const std::shared_ptr<LinkableObject>& primary,
                                                       const std::shared_ptr<LinkableObject>& secondary);

using ExternalGetter = std::function<StateNode()>;
using ExternalSetter = std::function<void(const StateNode&)>;

// Binds a variable to a property living outside the framework. The setter is
// called with the variable's value at link time and whenever the variable
// changes; triggering `notify` pulls the getter's value into the variable.
//
// Throws Disposed.
[[nodiscard]] std::shared_ptr<Link> link_external_property(const std::shared_ptr<LinkableVariable>& variable,
                                                           ExternalGetter getter, ExternalSetter setter,
                                                           CallbackCollection& notify);

}  // namespace linkstate
