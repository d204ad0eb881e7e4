#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "linkstate/linkable_object.hpp"
#include "linkstate/sync/message.hpp"

namespace linkstate::sync {

struct ClientOptions {
  std::int64_t retransmit_ms = 250;  // resend unacknowledged Diffs
  std::int64_t gap_timeout_ms = 150;  // wait for a missing serverSeq before resyncing
  std::int64_t hello_retry_ms = 250;
  std::int64_t heartbeat_ms = 300;    // report lastServerSeq when otherwise silent
  std::size_t reorder_window = 64;    // buffered out-of-order Diffs before resyncing
};

struct ClientStats {
  std::map<std::string, std::uint64_t> sent;      // by message kind, first transmissions
  std::map<std::string, std::uint64_t> received;  // by message kind
  std::uint64_t retransmits = 0;
  std::uint64_t resync_requests = 0;
  std::uint64_t local_flushes = 0;  // flushes that carried local effective edits
};

// One participant's side of the protocol, bound to a live session tree.
//
// Local edits are noticed through an immediate callback on the root and
// published as one Diff per frame flush. Remote Diffs are applied in
// serverSeq order to the last relay-confirmed state; the tree is then set to
// that state with this client's in-flight and unpublished edits replayed on
// top. Nothing is published until the relay's Welcome arrives.
//
// The engine does no I/O. Every entry point returns the messages to send to
// the relay; `now_ms` drives its timers.
class ClientEngine {
 public:
  ClientEngine(std::shared_ptr<LinkableObject> root, std::string session_id, std::string client_id,
               ClientOptions options = {});
  ~ClientEngine();
  ClientEngine(const ClientEngine&) = delete;
  ClientEngine& operator=(const ClientEngine&) = delete;

  std::vector<SyncMessage> start(std::int64_t now_ms);
  // Call after each frame flush of the root's scheduler.
  std::vector<SyncMessage> on_flush(std::int64_t now_ms);
  std::vector<SyncMessage> on_message(const SyncMessage& msg, std::int64_t now_ms);
  std::vector<SyncMessage> on_tick(std::int64_t now_ms);

  const std::string& client_id() const noexcept { return client_id_; }
  const std::string& session_id() const noexcept { return session_id_; }
  bool welcomed() const noexcept { return welcomed_; }
  std::uint64_t last_server_seq() const noexcept { return last_server_seq_; }
  std::size_t pending_count() const noexcept { return pending_.size(); }
  std::size_t buffered_count() const noexcept { return buffer_.size(); }
  bool has_unpublished_edits() const noexcept { return dirty_; }
  // Nothing in flight, buffered or waiting to be published.
  bool settled() const noexcept { return welcomed_ && pending_.empty() && buffer_.empty() && !dirty_; }

  const StateNode& confirmed_state() const noexcept { return confirmed_; }
  const ClientStats& stats() const noexcept { return stats_; }
  // serverSeqs in the order they were applied (Diffs and snapshots).
  const std::vector<std::uint64_t>& applied_seqs() const noexcept { return applied_; }

 private:
  struct Pending {
    std::uint64_t client_seq;
    StateDiff diff;
  };

  SyncMessage make(MessageKind kind) const;
  void count_sent(const SyncMessage& msg);
  void apply_remote_diff(const SyncMessage& msg);
  void adopt_snapshot(const SyncMessage& msg);
  void refresh_view();
  StateNode published_view() const;
  void drain_buffer();
  void request_resync(std::vector<SyncMessage>& out, std::int64_t now_ms);
  void retransmit(std::vector<SyncMessage>& out, std::int64_t now_ms);

  std::shared_ptr<LinkableObject> root_;
  std::string session_id_;
  std::string client_id_;
  ClientOptions options_;
  CallbackHandle handle_;

  bool welcomed_ = false;
  bool applying_remote_ = false;
  bool dirty_ = false;
  StateNode confirmed_;
  StateNode published_;
  std::uint64_t last_server_seq_ = 0;
  std::uint64_t next_client_seq_ = 1;
  std::deque<Pending> pending_;
  std::map<std::uint64_t, SyncMessage> buffer_;

  std::int64_t hello_sent_at_ = 0;
  std::int64_t last_send_at_ = 0;
  std::int64_t gap_since_ = -1;
  std::int64_t resync_at_ = -1;
  std::int64_t last_heard_at_ = 0;
  std::int64_t heartbeat_at_ = 0;

  ClientStats stats_;
  std::vector<std::uint64_t> applied_;
};

}  // namespace linkstate::sync
