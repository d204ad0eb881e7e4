#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "linkstate/state_diff.hpp"
#include "linkstate/state_node.hpp"

namespace linkstate::sync {

enum class MessageKind { kHello, kWelcome, kDiff, kFullState, kAck };

std::string_view kind_name(MessageKind kind) noexcept;

// One protocol message. Which payload field is meaningful depends on the
// kind: `diff` for Diff, `state` for Welcome and relay-sent FullState.
// Hello, Ack and client-sent FullState (a resync request) carry none.
//
// `client_seq` numbers a client's own Diffs from 1. On relay-sent messages it
// echoes the last Diff accepted from the addressed (or originating) client.
struct SyncMessage {
  MessageKind kind = MessageKind::kHello;
  std::string session_id;
  std::string sender_id;
  std::uint64_t server_seq = 0;
  std::uint64_t client_seq = 0;
  StateDiff diff;
  StateNode state;
};

// Compact JSON text. `from_client` tells the decoder how to read a FullState
// payload (request vs. snapshot). Decoding throws MalformedMessage.
std::string encode_message(const SyncMessage& msg);
SyncMessage decode_message(std::string_view text, bool from_client);

// Length-prefixed framing: 4-byte big-endian length, then UTF-8 JSON.
inline constexpr std::size_t kMaxFrameBytes = 64u << 20;

std::string frame(std::string_view payload);

// Accumulates stream bytes and yields complete frames.
class FrameReader {
 public:
  void feed(std::string_view bytes);
  // Throws MalformedMessage on an oversized length prefix.
  std::optional<std::string> next();
  std::size_t buffered() const noexcept { return buffer_.size() - offset_; }

 private:
  std::string buffer_;
  std::size_t offset_ = 0;
};

// FNV-1a 64-bit over the key-sorted encoding of a state, as 16 hex digits.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;
std::string state_hash(const StateNode& state);

}  // namespace linkstate::sync
