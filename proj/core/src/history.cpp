#include "linkstate/history.hpp"

#include <chrono>

#include "linkstate/state_json.hpp"
#include "linkstate/trace.hpp"

namespace linkstate {

namespace {

std::int64_t wall_clock_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

}  // namespace

SessionHistory::SessionHistory(Clock clock) : clock_(clock ? std::move(clock) : Clock(wall_clock_ms)) {}

SessionHistory::~SessionHistory() {
  if (attached()) detach();
}

SessionHistory::SessionHistory(SessionHistory&& other) noexcept
    : clock_(std::move(other.clock_)),
      baseline_(std::move(other.baseline_)),
      steps_(std::move(other.steps_)),
      cursor_(other.cursor_) {
  // The grouped callback captures `this`; a moved-from attached log stays
  // attached where it was and the new one starts detached.
  other.steps_.clear();
  other.cursor_ = 0;
}

std::shared_ptr<LinkableObject> SessionHistory::require_root() const {
  auto root = root_.lock();
  if (!attached() || !root) throw Error(Errc::kNotAttached, "history is not attached to a root");
  return root;
}

void SessionHistory::attach(const std::shared_ptr<LinkableObject>& root) {
  if (attached()) throw Error(Errc::kAlreadyAttached, "history is already attached");
  if (!root) throw Error(Errc::kValue, "null root");
  StateNode current = root->session_state();
  if (steps_.empty() && cursor_ == 0) {
    baseline_ = current;
  } else if (!state_equivalent(current, state_at(cursor_))) {
    throw Error(Errc::kStateMismatch, "root state does not match the log at its cursor");
  }
  tracked_ = std::move(current);
  root_ = root;
  grouped_ = root->runtime().scheduler().make_grouped([this] { on_frame(); });
  handle_ = root->callbacks().add_grouped_callback(grouped_);
}

void SessionHistory::detach() {
  if (!attached()) throw Error(Errc::kNotAttached, "history is not attached");
  if (auto root = root_.lock(); root && root->callbacks().has_callback(handle_)) {
    root->callbacks().remove_callback(handle_);
  }
  handle_ = {};
  grouped_ = {};
  root_.reset();
}

void SessionHistory::on_frame() { record({}); }

bool SessionHistory::record_now(std::string label) {
  require_root();
  return record(std::move(label));
}

bool SessionHistory::record(std::string label) {
  auto root = root_.lock();
  if (!root || root->disposed()) return false;
  StateNode current = root->session_state();
  if (state_equivalent(current, tracked_)) return false;
  Step step{diff(tracked_, current), diff(current, tracked_), clock_(), std::move(label)};
  steps_.resize(cursor_);
  steps_.push_back(std::move(step));
  cursor_ = steps_.size();
  tracked_ = std::move(current);
  if (trace::enabled()) trace::emit("history step " + std::to_string(cursor_));
  return true;
}

StateNode SessionHistory::state_at(std::size_t index) const {
  if (index > steps_.size()) {
    throw Error(Errc::kIndexOutOfRange, "step " + std::to_string(index) + " beyond " + std::to_string(steps_.size()));
  }
  StateNode state = baseline_;
  for (std::size_t i = 0; i < index; ++i) state = apply(state, steps_[i].forward, true);
  return state;
}

void SessionHistory::move_to(std::size_t index) {
  auto root = require_root();
  StateNode target = tracked_;
  for (std::size_t i = cursor_; i > index; --i) target = apply(target, steps_[i - 1].backward, true);
  for (std::size_t i = cursor_; i < index; ++i) target = apply(target, steps_[i].forward, true);
  cursor_ = index;
  tracked_ = target;
  root->set_session_state(target, true);
  // Whatever the root could not take (unknown classes, rejected values) is
  // what history tracks from now on.
  tracked_ = root->session_state();
}

void SessionHistory::undo() {
  require_root();
  record({});
  if (cursor_ == 0) throw Error(Errc::kNothingToUndo, "nothing to undo");
  move_to(cursor_ - 1);
}

void SessionHistory::redo() {
  require_root();
  record({});
  if (cursor_ >= steps_.size()) throw Error(Errc::kNothingToRedo, "nothing to redo");
  move_to(cursor_ + 1);
}

void SessionHistory::jump_to(std::size_t index) {
  require_root();
  record({});
  if (index > steps_.size()) {
    throw Error(Errc::kIndexOutOfRange, "step " + std::to_string(index) + " beyond " + std::to_string(steps_.size()));
  }
  if (index == cursor_) return;
  move_to(index);
}

std::vector<std::size_t> SessionHistory::verify() const {
  std::vector<std::size_t> failures;
  StateNode state = baseline_;
  for (std::size_t i = 0; i < steps_.size(); ++i) {
    StateNode next = apply(state, steps_[i].forward, true);
    if (!state_equivalent(apply(next, steps_[i].backward, true), state)) failures.push_back(i);
    state = std::move(next);
  }
  return failures;
}

std::string SessionHistory::export_log() const {
  Json steps = Json::array();
  for (const auto& s : steps_) {
    Json step = Json::object();
    step["label"] = s.label;
    step["timestampMs"] = s.timestamp_ms;
    step["forward"] = diff_to_json(s.forward);
    step["backward"] = diff_to_json(s.backward);
    steps.push_back(std::move(step));
  }
  Json out = Json::object();
  out["version"] = kFormatVersion;
  out["baseline"] = to_json(baseline_);
  out["cursor"] = cursor_;
  out["steps"] = std::move(steps);
  return out.dump(2) + "\n";
}

SessionHistory SessionHistory::import_log(std::string_view text, Clock clock) {
  Json json;
  try {
    json = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw Error(Errc::kParse, std::string("history file: ") + e.what());
  }
  auto fail = [](const std::string& what) { return Error(Errc::kParse, "history file: " + what); };
  if (!json.is_object()) throw fail("top level must be an object");
  auto version = json.find("version");
  if (version == json.end() || !version->is_number_integer()) throw fail("missing integer 'version'");
  if (version->get<std::int64_t>() != kFormatVersion) {
    throw Error(Errc::kVersionMismatch,
                "history format version " + version->dump() + " (expected " + std::to_string(kFormatVersion) + ")");
  }
  auto baseline = json.find("baseline");
  auto cursor = json.find("cursor");
  auto steps = json.find("steps");
  if (baseline == json.end()) throw fail("missing 'baseline'");
  if (cursor == json.end() || !cursor->is_number_unsigned()) throw fail("missing non-negative 'cursor'");
  if (steps == json.end() || !steps->is_array()) throw fail("missing 'steps' array");

  SessionHistory log(std::move(clock));
  log.baseline_ = from_json(*baseline);
  for (const auto& s : *steps) {
    if (!s.is_object() || !s.contains("forward") || !s.contains("backward")) {
      throw fail("each step needs 'forward' and 'backward'");
    }
    Step step;
    step.forward = diff_from_json(s.at("forward"));
    step.backward = diff_from_json(s.at("backward"));
    if (auto ts = s.find("timestampMs"); ts != s.end()) {
      if (!ts->is_number_integer()) throw fail("'timestampMs' must be an integer");
      step.timestamp_ms = ts->get<std::int64_t>();
    }
    if (auto label = s.find("label"); label != s.end()) {
      if (!label->is_string()) throw fail("'label' must be a string");
      step.label = label->get<std::string>();
    }
    log.steps_.push_back(std::move(step));
  }
  const auto c = cursor->get<std::uint64_t>();
  if (c > log.steps_.size()) throw fail("cursor beyond the last step");
  log.cursor_ = static_cast<std::size_t>(c);
  return log;
}

}  // namespace linkstate
