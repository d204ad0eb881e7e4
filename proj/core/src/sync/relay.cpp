#include "linkstate/sync/relay.hpp"

#include <algorithm>

#include "linkstate/error.hpp"
#include "linkstate/trace.hpp"

namespace linkstate::sync {

namespace {
constexpr const char* kRelayId = "relay";
constexpr std::size_t kDropLogLimit = 256;
}  // namespace

Relay::Relay(StateNode initial_state) : initial_(std::move(initial_state)) {}

Relay::Session& Relay::session(const std::string& id) {
  auto it = sessions_.find(id);
  if (it == sessions_.end()) {
    it = sessions_.emplace(id, Session{}).first;
    it->second.state = initial_;
  }
  return it->second;
}

void Relay::join(Session& s, const std::string& client) {
  if (std::find(s.clients.begin(), s.clients.end(), client) == s.clients.end()) s.clients.push_back(client);
  s.accepted.try_emplace(client, 0);
}

SyncMessage Relay::snapshot(const Session& s, const std::string& session_id, const std::string& client,
                            MessageKind kind) const {
  SyncMessage out;
  out.kind = kind;
  out.session_id = session_id;
  out.sender_id = kRelayId;
  out.server_seq = s.seq;
  out.state = s.state;
  auto it = s.accepted.find(client);
  out.client_seq = it == s.accepted.end() ? 0 : it->second;
  return out;
}

void Relay::drop(std::string why) {
  if (trace::enabled()) trace::emit("relay drop: " + why);
  if (drop_log_.size() < kDropLogLimit) drop_log_.push_back(std::move(why));
}

std::vector<Outbound> Relay::handle(const SyncMessage& msg) {
  std::vector<Outbound> out;
  if (msg.session_id.empty() || msg.sender_id.empty()) {
    ++malformed_;
    drop("message without sessionId or senderId");
    return out;
  }
  Session& s = session(msg.session_id);
  switch (msg.kind) {
    case MessageKind::kHello:
      join(s, msg.sender_id);
      out.push_back({msg.sender_id, snapshot(s, msg.session_id, msg.sender_id, MessageKind::kWelcome)});
      break;

    case MessageKind::kFullState:
      join(s, msg.sender_id);
      out.push_back({msg.sender_id, snapshot(s, msg.session_id, msg.sender_id, MessageKind::kFullState)});
      break;

    case MessageKind::kAck: {
      // Heartbeat: the client reports the last serverSeq it applied.
      join(s, msg.sender_id);
      if (msg.server_seq < s.seq) {
        out.push_back({msg.sender_id, snapshot(s, msg.session_id, msg.sender_id, MessageKind::kFullState)});
      }
      break;
    }

    case MessageKind::kDiff: {
      join(s, msg.sender_id);
      std::uint64_t& last = s.accepted[msg.sender_id];
      if (msg.client_seq == 0) {
        ++malformed_;
        drop("Diff from " + msg.sender_id + " without clientSeq");
        break;
      }
      if (msg.client_seq <= last) {
        SyncMessage ack;
        ack.kind = MessageKind::kAck;
        ack.session_id = msg.session_id;
        ack.sender_id = kRelayId;
        ack.server_seq = s.seq;
        ack.client_seq = last;
        out.push_back({msg.sender_id, std::move(ack)});
        break;
      }
      if (msg.client_seq != last + 1) {
        drop("Diff " + std::to_string(msg.client_seq) + " from " + msg.sender_id + " ahead of " +
             std::to_string(last + 1));
        break;
      }
      s.state = apply(s.state, msg.diff, false);
      last = msg.client_seq;
      ++s.seq;
      for (const auto& client : s.clients) {
        SyncMessage echo;
        echo.kind = MessageKind::kDiff;
        echo.session_id = msg.session_id;
        echo.sender_id = msg.sender_id;
        echo.server_seq = s.seq;
        echo.client_seq = msg.client_seq;
        echo.diff = msg.diff;
        out.push_back({client, std::move(echo)});
      }
      break;
    }

    case MessageKind::kWelcome:
      ++malformed_;
      drop("Welcome sent to the relay by " + msg.sender_id);
      break;
  }
  return out;
}

std::vector<Outbound> Relay::handle_text(std::string_view text) {
  try {
    return handle(decode_message(text, true));
  } catch (const Error& e) {
    ++malformed_;
    drop(e.what());
    return {};
  }
}

const StateNode* Relay::session_state(std::string_view session_id) const {
  auto it = sessions_.find(session_id);
  return it == sessions_.end() ? nullptr : &it->second.state;
}

std::uint64_t Relay::server_seq(std::string_view session_id) const {
  auto it = sessions_.find(session_id);
  return it == sessions_.end() ? 0 : it->second.seq;
}

std::vector<std::string> Relay::session_ids() const {
  std::vector<std::string> ids;
  for (const auto& [id, _] : sessions_) ids.push_back(id);
  return ids;
}

std::vector<std::string> Relay::clients(std::string_view session_id) const {
  auto it = sessions_.find(session_id);
  return it == sessions_.end() ? std::vector<std::string>{} : it->second.clients;
}

}  // namespace linkstate::sync
