#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "linkstate/sync/message.hpp"

namespace linkstate::sync {

struct Outbound {
  std::string recipient;
  SyncMessage message;
};

// Authoritative state holder. Assigns every accepted Diff the next serverSeq
// of its session, applies it (remove_missing=false) and broadcasts it to all
// clients of the session, the sender included.
//
// A client's Diffs are accepted strictly in clientSeq order: a repeat gets
// an Ack, one that skips ahead is dropped and will be retransmitted.
class Relay {
 public:
  explicit Relay(StateNode initial_state = StateNode(DynamicStateList{}));

  std::vector<Outbound> handle(const SyncMessage& msg);
  // Malformed text is dropped: nothing is sent and malformed_count grows.
  std::vector<Outbound> handle_text(std::string_view text);

  // nullptr / 0 for unknown sessions.
  const StateNode* session_state(std::string_view session_id) const;
  std::uint64_t server_seq(std::string_view session_id) const;
  std::vector<std::string> session_ids() const;
  std::vector<std::string> clients(std::string_view session_id) const;

  std::uint64_t malformed_count() const noexcept { return malformed_; }
  const std::vector<std::string>& drop_log() const noexcept { return drop_log_; }

 private:
  struct Session {
    StateNode state;
    std::uint64_t seq = 0;
    std::vector<std::string> clients;
    std::map<std::string, std::uint64_t, std::less<>> accepted;
  };

  Session& session(const std::string& id);
  void join(Session& s, const std::string& client);
  SyncMessage snapshot(const Session& s, const std::string& session_id, const std::string& client,
                       MessageKind kind) const;
  void drop(std::string why);

  StateNode initial_;
  std::map<std::string, Session, std::less<>> sessions_;
  std::uint64_t malformed_ = 0;
  std::vector<std::string> drop_log_;
};

}  // namespace linkstate::sync
