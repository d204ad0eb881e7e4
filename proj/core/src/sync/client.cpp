#include "linkstate/sync/client.hpp"

#include "linkstate/trace.hpp"

namespace linkstate::sync {

namespace {

// Sets a flag for the lifetime of the guard.
class FlagGuard {
 public:
  explicit FlagGuard(bool& flag) : flag_(flag) { flag_ = true; }
  ~FlagGuard() { flag_ = false; }
  FlagGuard(const FlagGuard&) = delete;
  FlagGuard& operator=(const FlagGuard&) = delete;

 private:
  bool& flag_;
};

}  // namespace

ClientEngine::ClientEngine(std::shared_ptr<LinkableObject> root, std::string session_id, std::string client_id,
                           ClientOptions options)
    : root_(std::move(root)),
      session_id_(std::move(session_id)),
      client_id_(std::move(client_id)),
      options_(options) {
  if (!root_) throw Error(Errc::kValue, "client engine needs a root object");
  confirmed_ = root_->session_state();
  published_ = confirmed_;
  handle_ = root_->callbacks().add_immediate_callback([this] {
    if (!applying_remote_) dirty_ = true;
  });
}

ClientEngine::~ClientEngine() {
  if (root_->callbacks().has_callback(handle_)) root_->callbacks().remove_callback(handle_);
}

SyncMessage ClientEngine::make(MessageKind kind) const {
  SyncMessage msg;
  msg.kind = kind;
  msg.session_id = session_id_;
  msg.sender_id = client_id_;
  return msg;
}

void ClientEngine::count_sent(const SyncMessage& msg) { ++stats_.sent[std::string(kind_name(msg.kind))]; }

std::vector<SyncMessage> ClientEngine::start(std::int64_t now_ms) {
  std::vector<SyncMessage> out{make(MessageKind::kHello)};
  count_sent(out.back());
  hello_sent_at_ = now_ms;
  last_heard_at_ = now_ms;
  return out;
}

std::vector<SyncMessage> ClientEngine::on_flush(std::int64_t now_ms) {
  std::vector<SyncMessage> out;
  if (!dirty_ || !welcomed_) return out;
  StateNode current = root_->session_state();
  StateDiff d = diff(published_, current);
  dirty_ = false;
  if (d.empty()) return out;

  const bool was_idle = pending_.empty();
  SyncMessage msg = make(MessageKind::kDiff);
  msg.client_seq = next_client_seq_++;
  msg.diff = d;
  pending_.push_back({msg.client_seq, std::move(d)});
  published_ = std::move(current);
  ++stats_.local_flushes;
  if (was_idle) last_send_at_ = now_ms;
  count_sent(msg);
  if (trace::enabled()) trace::emit(client_id_ + " publish c=" + std::to_string(msg.client_seq));
  out.push_back(std::move(msg));
  return out;
}

StateNode ClientEngine::published_view() const {
  StateNode view = confirmed_;
  for (const auto& p : pending_) view = apply(view, p.diff, false);
  return view;
}

void ClientEngine::refresh_view() {
  StateNode live = root_->session_state();
  StateDiff unpublished = dirty_ ? diff(published_, live) : StateDiff{};
  published_ = published_view();
  StateNode view = unpublished.empty() ? published_ : apply(published_, unpublished, false);
  if (state_equivalent(view, live)) return;
  FlagGuard guard(applying_remote_);
  root_->set_session_state(view, true);
}

void ClientEngine::apply_remote_diff(const SyncMessage& msg) {
  confirmed_ = apply(confirmed_, msg.diff, false);
  last_server_seq_ = msg.server_seq;
  applied_.push_back(msg.server_seq);
  if (msg.sender_id == client_id_) {
    while (!pending_.empty() && pending_.front().client_seq <= msg.client_seq) pending_.pop_front();
  }
  refresh_view();
}

void ClientEngine::adopt_snapshot(const SyncMessage& msg) {
  // A snapshot at the current seq only re-confirms what is already applied.
  if (applied_.empty() || msg.server_seq > last_server_seq_) applied_.push_back(msg.server_seq);
  confirmed_ = msg.state;
  last_server_seq_ = msg.server_seq;
  while (!pending_.empty() && pending_.front().client_seq <= msg.client_seq) pending_.pop_front();
  resync_at_ = -1;
  refresh_view();
}

void ClientEngine::drain_buffer() {
  while (!buffer_.empty()) {
    auto it = buffer_.begin();
    if (it->first <= last_server_seq_) {
      buffer_.erase(it);
      continue;
    }
    if (it->first != last_server_seq_ + 1) break;
    SyncMessage msg = std::move(it->second);
    buffer_.erase(it);
    apply_remote_diff(msg);
  }
  if (buffer_.empty()) gap_since_ = -1;
}

void ClientEngine::request_resync(std::vector<SyncMessage>& out, std::int64_t now_ms) {
  if (resync_at_ >= 0 && now_ms - resync_at_ < options_.gap_timeout_ms) return;
  resync_at_ = now_ms;
  ++stats_.resync_requests;
  out.push_back(make(MessageKind::kFullState));
  count_sent(out.back());
  if (trace::enabled()) trace::emit(client_id_ + " resync from " + std::to_string(last_server_seq_));
}

void ClientEngine::retransmit(std::vector<SyncMessage>& out, std::int64_t now_ms) {
  for (const auto& p : pending_) {
    SyncMessage msg = make(MessageKind::kDiff);
    msg.client_seq = p.client_seq;
    msg.diff = p.diff;
    out.push_back(std::move(msg));
    ++stats_.retransmits;
  }
  last_send_at_ = now_ms;
}

std::vector<SyncMessage> ClientEngine::on_message(const SyncMessage& msg, std::int64_t now_ms) {
  std::vector<SyncMessage> out;
  if (msg.session_id != session_id_) return out;
  last_heard_at_ = now_ms;
  ++stats_.received[std::string(kind_name(msg.kind))];

  switch (msg.kind) {
    case MessageKind::kWelcome:
    case MessageKind::kFullState: {
      const bool first = !welcomed_ && msg.kind == MessageKind::kWelcome;
      if (!first && (!welcomed_ || msg.server_seq < last_server_seq_)) break;
      welcomed_ = true;
      adopt_snapshot(msg);
      drain_buffer();
      if (!pending_.empty()) retransmit(out, now_ms);
      break;
    }

    case MessageKind::kDiff:
      if (msg.server_seq <= last_server_seq_ && welcomed_) break;
      if (welcomed_ && msg.server_seq == last_server_seq_ + 1) {
        apply_remote_diff(msg);
        drain_buffer();
        break;
      }
      buffer_.emplace(msg.server_seq, msg);
      if (gap_since_ < 0) gap_since_ = now_ms;
      if (welcomed_ && buffer_.size() > options_.reorder_window) request_resync(out, now_ms);
      break;

    case MessageKind::kAck:
      // The relay has seen more than we applied: a broadcast went missing.
      if (welcomed_ && msg.server_seq > last_server_seq_ && buffer_.empty()) request_resync(out, now_ms);
      break;

    case MessageKind::kHello: break;
  }
  return out;
}

std::vector<SyncMessage> ClientEngine::on_tick(std::int64_t now_ms) {
  std::vector<SyncMessage> out;
  if (!welcomed_) {
    if (now_ms - hello_sent_at_ >= options_.hello_retry_ms) {
      out.push_back(make(MessageKind::kHello));
      ++stats_.retransmits;
      hello_sent_at_ = now_ms;
    }
    return out;
  }
  if (!pending_.empty() && now_ms - last_send_at_ >= options_.retransmit_ms) retransmit(out, now_ms);
  if (!buffer_.empty() && gap_since_ >= 0 && now_ms - gap_since_ >= options_.gap_timeout_ms) {
    request_resync(out, now_ms);
  }
  if (pending_.empty() && buffer_.empty() &&
      now_ms - std::max(last_heard_at_, heartbeat_at_) >= options_.heartbeat_ms) {
    SyncMessage beat = make(MessageKind::kAck);
    beat.server_seq = last_server_seq_;
    beat.client_seq = next_client_seq_ - 1;
    heartbeat_at_ = now_ms;
    count_sent(beat);
    out.push_back(std::move(beat));
  }
  return out;
}

}  // namespace linkstate::sync
