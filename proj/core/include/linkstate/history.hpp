#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "linkstate/linkable_object.hpp"
#include "linkstate/state_diff.hpp"

namespace linkstate {

// Undo/redo log over the session state of one root object: a baseline
// snapshot followed by invertible steps. While attached, a grouped callback
// on the root records at most one step per frame flush.
class SessionHistory {
 public:
  using Clock = std::function<std::int64_t()>;

  struct Step {
    StateDiff forward;
    StateDiff backward;
    std::int64_t timestamp_ms = 0;
    std::string label;
  };

  static constexpr int kFormatVersion = 1;

  // The clock stamps recorded steps; defaults to wall-clock milliseconds.
  explicit SessionHistory(Clock clock = {});
  ~SessionHistory();
  SessionHistory(SessionHistory&& other) noexcept;
  SessionHistory& operator=(SessionHistory&&) = delete;
  SessionHistory(const SessionHistory&) = delete;
  SessionHistory& operator=(const SessionHistory&) = delete;

  // An empty log takes the root's state as its baseline. A non-empty log
  // (e.g. imported) requires the root to be in the state at the cursor.
  // Throws AlreadyAttached, StateMismatch, Disposed.
  void attach(const std::shared_ptr<LinkableObject>& root);
  // Throws NotAttached.
  void detach();
  bool attached() const noexcept { return handle_.id != 0; }

  // Records changes made since the last step right away instead of at the
  // next flush. `label` names the step; nothing is recorded when the state
  // did not change. Returns whether a step was added.
  bool record_now(std::string label = {});

  // Throw NothingToUndo / NothingToRedo / IndexOutOfRange; all need an
  // attached root. Each applies one composite set_session_state.
  void undo();
  void redo();
  void jump_to(std::size_t index);

  std::size_t cursor() const noexcept { return cursor_; }
  std::size_t size() const noexcept { return steps_.size(); }
  const std::vector<Step>& steps() const noexcept { return steps_; }
  const StateNode& baseline() const noexcept { return baseline_; }

  // Replays the first `index` forward diffs over the baseline.
  // Throws IndexOutOfRange.
  StateNode state_at(std::size_t index) const;

  // Indices of steps violating the inverse property.
  std::vector<std::size_t> verify() const;

  std::string export_log() const;
  // Throws ParseError, VersionMismatch.
  static SessionHistory import_log(std::string_view text, Clock clock = {});

 private:
  void on_frame();
  bool record(std::string label);
  void move_to(std::size_t index);
  std::shared_ptr<LinkableObject> require_root() const;

  Clock clock_;
  StateNode baseline_;
  std::vector<Step> steps_;
  std::size_t cursor_ = 0;

  std::weak_ptr<LinkableObject> root_;
  StateNode tracked_;
  GroupedCallback grouped_;
  CallbackHandle handle_;
};

}  // namespace linkstate
