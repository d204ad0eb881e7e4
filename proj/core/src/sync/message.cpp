#include "linkstate/sync/message.hpp"

#include <cstdio>

#include "linkstate/error.hpp"
#include "linkstate/state_json.hpp"

namespace linkstate::sync {

std::string_view kind_name(MessageKind kind) noexcept {
  switch (kind) {
    case MessageKind::kHello: return "Hello";
    case MessageKind::kWelcome: return "Welcome";
    case MessageKind::kDiff: return "Diff";
    case MessageKind::kFullState: return "FullState";
    case MessageKind::kAck: return "Ack";
  }
  return "?";
}

namespace {

std::optional<MessageKind> parse_kind(std::string_view name) {
  for (auto k : {MessageKind::kHello, MessageKind::kWelcome, MessageKind::kDiff, MessageKind::kFullState,
                 MessageKind::kAck}) {
    if (kind_name(k) == name) return k;
  }
  return std::nullopt;
}

Error malformed(const std::string& what) { return Error(Errc::kMalformedMessage, what); }

std::uint64_t read_seq(const Json& json, const char* key) {
  auto it = json.find(key);
  if (it == json.end()) return 0;
  if (!it->is_number_unsigned()) throw malformed(std::string("'") + key + "' must be a non-negative integer");
  return it->get<std::uint64_t>();
}

std::string read_id(const Json& json, const char* key) {
  auto it = json.find(key);
  if (it == json.end() || !it->is_string()) throw malformed(std::string("'") + key + "' must be a string");
  return it->get<std::string>();
}

}  // namespace

std::string encode_message(const SyncMessage& msg) {
  Json out = Json::object();
  out["kind"] = std::string(kind_name(msg.kind));
  out["sessionId"] = msg.session_id;
  out["senderId"] = msg.sender_id;
  out["serverSeq"] = msg.server_seq;
  switch (msg.kind) {
    case MessageKind::kDiff: out["payload"] = diff_to_json(msg.diff); break;
    // A client's FullState request leaves `state` null.
    case MessageKind::kWelcome:
    case MessageKind::kFullState: out["payload"] = to_json(msg.state); break;
    default: out["payload"] = nullptr; break;
  }
  out["clientSeq"] = msg.client_seq;
  return out.dump();
}

SyncMessage decode_message(std::string_view text, bool from_client) {
  Json json;
  try {
    json = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw malformed(std::string("not JSON: ") + e.what());
  }
  if (!json.is_object()) throw malformed("message must be a JSON object");
  SyncMessage msg;
  auto kind = json.find("kind");
  if (kind == json.end() || !kind->is_string()) throw malformed("missing 'kind'");
  auto parsed = parse_kind(kind->get<std::string>());
  if (!parsed) throw malformed("unknown kind '" + kind->get<std::string>() + "'");
  msg.kind = *parsed;
  msg.session_id = read_id(json, "sessionId");
  msg.sender_id = read_id(json, "senderId");
  if (msg.session_id.empty() || msg.sender_id.empty()) throw malformed("empty sessionId or senderId");
  msg.server_seq = read_seq(json, "serverSeq");
  msg.client_seq = read_seq(json, "clientSeq");

  const Json payload = json.contains("payload") ? json.at("payload") : Json(nullptr);
  try {
    switch (msg.kind) {
      case MessageKind::kDiff: msg.diff = diff_from_json(payload); break;
      case MessageKind::kWelcome: msg.state = from_json(payload); break;
      case MessageKind::kFullState:
        if (!from_client) msg.state = from_json(payload);
        break;
      default: break;
    }
  } catch (const Error& e) {
    throw malformed(std::string("bad payload: ") + e.what());
  }
  return msg;
}

std::string frame(std::string_view payload) {
  if (payload.size() > kMaxFrameBytes) throw malformed("frame too large");
  const auto n = static_cast<std::uint32_t>(payload.size());
  std::string out;
  out.reserve(4 + payload.size());
  out.push_back(static_cast<char>((n >> 24) & 0xff));
  out.push_back(static_cast<char>((n >> 16) & 0xff));
  out.push_back(static_cast<char>((n >> 8) & 0xff));
  out.push_back(static_cast<char>(n & 0xff));
  out.append(payload);
  return out;
}

void FrameReader::feed(std::string_view bytes) {
  if (offset_ > 0 && offset_ == buffer_.size()) {
    buffer_.clear();
    offset_ = 0;
  }
  buffer_.append(bytes);
}

std::optional<std::string> FrameReader::next() {
  if (buffered() < 4) return std::nullopt;
  const auto* p = reinterpret_cast<const unsigned char*>(buffer_.data() + offset_);
  const std::uint32_t n = (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) | p[3];
  if (n > kMaxFrameBytes) throw malformed("frame length " + std::to_string(n) + " exceeds limit");
  if (buffered() < 4 + std::size_t{n}) return std::nullopt;
  std::string out = buffer_.substr(offset_ + 4, n);
  offset_ += 4 + n;
  if (offset_ > 4096 && offset_ * 2 > buffer_.size()) {
    buffer_.erase(0, offset_);
    offset_ = 0;
  }
  return out;
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string state_hash(const StateNode& state) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(encode_sorted(state))));
  return buf;
}

}  // namespace linkstate::sync
