#include "linkstate/sync/tcp.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstring>
#include <utility>

#include "linkstate/demo_classes.hpp"
#include "linkstate/trace.hpp"

namespace linkstate::sync {

namespace {

Error io_error(const std::string& what) { return Error(Errc::kIo, what + ": " + std::strerror(errno)); }

void write_all(int fd, std::string_view bytes) {
  while (!bytes.empty()) {
    const ssize_t n = ::send(fd, bytes.data(), bytes.size(), MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw io_error("send");
    }
    bytes.remove_prefix(static_cast<std::size_t>(n));
  }
}

// Returns false on orderly shutdown by the peer.
bool read_some(int fd, FrameReader& reader) {
  char buf[16384];
  for (;;) {
    const ssize_t n = ::recv(fd, buf, sizeof buf, 0);
    if (n < 0 && errno == EINTR) continue;
    if (n < 0) throw io_error("recv");
    if (n == 0) return false;
    reader.feed(std::string_view(buf, static_cast<std::size_t>(n)));
    return true;
  }
}

}  // namespace

TcpConnection TcpConnection::connect(const std::string& host, std::uint16_t port) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* result = nullptr;
  const std::string service = std::to_string(port);
  if (int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &result); rc != 0) {
    throw Error(Errc::kIo, "resolve " + host + ": " + ::gai_strerror(rc));
  }
  int fd = -1;
  for (addrinfo* ai = result; ai != nullptr; ai = ai->ai_next) {
    fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(result);
  if (fd < 0) throw io_error("connect " + host + ":" + service);
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  return TcpConnection(fd);
}

TcpConnection::TcpConnection(TcpConnection&& other) noexcept
    : fd_(std::exchange(other.fd_, -1)), reader_(std::move(other.reader_)) {}

TcpConnection& TcpConnection::operator=(TcpConnection&& other) noexcept {
  if (this != &other) {
    close();
    fd_ = std::exchange(other.fd_, -1);
    reader_ = std::move(other.reader_);
  }
  return *this;
}

TcpConnection::~TcpConnection() { close(); }

void TcpConnection::close() {
  if (fd_ >= 0) ::close(fd_);
  fd_ = -1;
}

void TcpConnection::send(const SyncMessage& msg) {
  if (fd_ < 0) throw Error(Errc::kIo, "connection closed");
  write_all(fd_, frame(encode_message(msg)));
}

std::optional<SyncMessage> TcpConnection::receive(std::chrono::milliseconds timeout) {
  if (fd_ < 0) throw Error(Errc::kIo, "connection closed");
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  for (;;) {
    if (auto text = reader_.next()) return decode_message(*text, false);
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    pollfd p{fd_, POLLIN, 0};
    const int rc = ::poll(&p, 1, static_cast<int>(std::max<std::int64_t>(0, left.count())));
    if (rc < 0 && errno == EINTR) continue;
    if (rc < 0) throw io_error("poll");
    if (rc == 0) return std::nullopt;
    if (!read_some(fd_, reader_)) throw Error(Errc::kIo, "relay closed the connection");
  }
}

struct RelayServer::Conn {
  int fd = -1;
  std::mutex write_mutex;
  std::atomic<bool> closed{false};

  void send(std::string_view bytes) {
    std::lock_guard lock(write_mutex);
    if (closed) return;
    try {
      write_all(fd, bytes);
    } catch (const Error&) {
      closed = true;
    }
  }
};

RelayServer::RelayServer(std::uint16_t port, const std::string& bind_address) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw io_error("socket");
  int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, bind_address.c_str(), &addr.sin_addr) != 1) {
    ::close(listen_fd_);
    throw Error(Errc::kIo, "bad bind address '" + bind_address + "'");
  }
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(listen_fd_, 16) != 0) {
    Error e = io_error("bind " + bind_address + ":" + std::to_string(port));
    ::close(listen_fd_);
    throw e;
  }
  socklen_t len = sizeof addr;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

RelayServer::~RelayServer() {
  stop();
  std::vector<std::thread> threads;
  {
    std::lock_guard lock(threads_mutex_);
    threads.swap(threads_);
  }
  for (auto& t : threads) t.join();
  if (listen_fd_ >= 0) ::close(listen_fd_);
}

void RelayServer::stop() {
  stopping_ = true;
  std::lock_guard lock(threads_mutex_);
  for (auto& c : conns_) ::shutdown(c->fd, SHUT_RDWR);
}

void RelayServer::run() {
  while (!stopping_) {
    pollfd p{listen_fd_, POLLIN, 0};
    const int rc = ::poll(&p, 1, 100);
    if (rc <= 0) continue;
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) continue;
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    auto conn = std::make_shared<Conn>();
    conn->fd = fd;
    std::lock_guard lock(threads_mutex_);
    if (stopping_) {
      ::close(fd);
      break;
    }
    conns_.push_back(conn);
    threads_.emplace_back([this, conn] { serve_connection(conn); });
  }
}

void RelayServer::dispatch(const std::vector<Outbound>& out, const std::string& session_id) {
  // Called with relay_mutex_ held, which also orders broadcasts on the wire.
  for (const auto& o : out) {
    auto it = routes_.find({session_id, o.recipient});
    if (it == routes_.end()) continue;
    if (auto conn = it->second.lock()) conn->send(frame(encode_message(o.message)));
  }
}

void RelayServer::serve_connection(const std::shared_ptr<Conn>& conn) {
  FrameReader reader;
  try {
    while (!stopping_ && read_some(conn->fd, reader)) {
      while (auto text = reader.next()) {
        std::lock_guard lock(relay_mutex_);
        SyncMessage msg;
        try {
          msg = decode_message(*text, true);
        } catch (const Error&) {
          relay_.handle_text(*text);  // counted and logged as malformed
          continue;
        }
        routes_[{msg.session_id, msg.sender_id}] = conn;
        dispatch(relay_.handle(msg), msg.session_id);
      }
    }
  } catch (const Error& e) {
    if (trace::enabled()) trace::emit(std::string("relay connection: ") + e.what());
  }
  {
    std::lock_guard lock(threads_mutex_);
    std::erase(conns_, conn);
  }
  std::lock_guard lock(conn->write_mutex);
  conn->closed = true;
  ::close(conn->fd);
}

std::uint64_t RelayServer::server_seq(const std::string& session_id) const {
  std::lock_guard lock(relay_mutex_);
  return relay_.server_seq(session_id);
}

std::optional<StateNode> RelayServer::session_state(const std::string& session_id) const {
  std::lock_guard lock(relay_mutex_);
  if (const StateNode* s = relay_.session_state(session_id)) return *s;
  return std::nullopt;
}

std::uint64_t RelayServer::malformed_count() const {
  std::lock_guard lock(relay_mutex_);
  return relay_.malformed_count();
}

SimReport run_realtime_simulation(const SimScript& script, std::optional<std::uint64_t> seed_override) {
  using Clock = std::chrono::steady_clock;
  const std::uint64_t seed = seed_override.value_or(script.seed);
  SimReport report;
  report.seed = seed;

  RelayServer server(0);
  std::thread server_thread([&] { server.run(); });
  struct ServerStopper {
    RelayServer& server;
    std::thread& thread;
    ~ServerStopper() {
      server.stop();
      thread.join();
    }
  } stopper{server, server_thread};

  struct Peer {
    const ClientScript* script;
    std::unique_ptr<Runtime> runtime;
    std::shared_ptr<LinkableHashMap> root;
    std::unique_ptr<ClientEngine> engine;
    std::optional<TcpConnection> conn;
    std::unique_ptr<SimRng> rng;
    std::vector<std::int64_t> random_times;
    std::size_t next_edit = 0;
    std::size_t next_random = 0;
  };
  auto registry = demo::demo_registry();
  std::vector<Peer> peers;
  for (std::size_t i = 0; i < script.clients.size(); ++i) {
    Peer p;
    p.script = &script.clients[i];
    p.runtime = std::make_unique<Runtime>(registry);
    p.root = std::make_shared<LinkableHashMap>(*p.runtime);
    p.engine = std::make_unique<ClientEngine>(p.root, script.session, p.script->id, script.options);
    p.rng = std::make_unique<SimRng>(seed * 0x9e3779b97f4a7c15ull + i + 1);
    for (std::size_t k = 0; k < p.script->random.count; ++k) {
      p.random_times.push_back(p.rng->uniform(p.script->random.start_ms, p.script->random.end_ms));
    }
    std::sort(p.random_times.begin(), p.random_times.end());
    peers.push_back(std::move(p));
  }

  auto send_all = [&](Peer& p, const std::vector<SyncMessage>& msgs) {
    for (const auto& m : msgs) {
      p.conn->send(m);
      ++report.messages_sent;
    }
  };

  const auto t0 = Clock::now();
  auto elapsed = [&] { return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - t0).count(); };
  const std::int64_t horizon = script.duration_ms + script.drain_cap_ms;
  std::int64_t t = 0;
  for (;;) {
    t = elapsed();
    for (auto& p : peers) {
      if (!p.conn) {
        if (t < p.script->join_at_ms) continue;
        p.conn.emplace(TcpConnection::connect("127.0.0.1", server.port()));
        send_all(p, p.engine->start(t));
      }
      while (auto msg = p.conn->receive(std::chrono::milliseconds(0))) {
        report.trace.push_back("t=" + std::to_string(t) + " relay->" + p.script->id + " " +
                               std::string(kind_name(msg->kind)) + " s=" + std::to_string(msg->server_seq));
        send_all(p, p.engine->on_message(*msg, t));
      }
      while (p.next_edit < p.script->edits.size() && p.script->edits[p.next_edit].at_ms <= t) {
        std::string what;
        try {
          what = apply_edit(*p.root, p.script->edits[p.next_edit]);
        } catch (const Error&) {
        }
        ++p.next_edit;
        ++(what.empty() ? report.edits_skipped : report.edits_applied);
      }
      while (p.next_random < p.random_times.size() && p.random_times[p.next_random] <= t) {
        ++p.next_random;
        ++(random_edit(*p.root, *p.rng).empty() ? report.edits_skipped : report.edits_applied);
      }
      p.runtime->scheduler().flush_frame();
      send_all(p, p.engine->on_flush(t));
      send_all(p, p.engine->on_tick(t));
    }

    const std::uint64_t seq = server.server_seq(script.session);
    bool quiet = true;
    for (const auto& p : peers) {
      quiet = quiet && p.conn && p.next_edit >= p.script->edits.size() && p.next_random >= p.random_times.size() &&
              p.engine->settled() && p.engine->last_server_seq() == seq;
    }
    if (quiet) {
      report.quiesced = true;
      break;
    }
    if (t >= horizon) break;
    std::this_thread::sleep_for(std::chrono::milliseconds(script.frame_ms));
  }

  report.end_time_ms = t;
  report.server_seq = server.server_seq(script.session);
  report.relay_state = server.session_state(script.session).value_or(StateNode(DynamicStateList{}));
  report.state_hash = state_hash(report.relay_state);
  report.converged = report.quiesced;
  for (auto& p : peers) {
    ClientReport c;
    c.id = p.script->id;
    c.state = p.root->session_state();
    c.state_hash = state_hash(c.state);
    c.converged = state_equivalent(c.state, report.relay_state);
    c.last_server_seq = p.engine->last_server_seq();
    c.stats = p.engine->stats();
    const auto& seqs = p.engine->applied_seqs();
    c.causal = std::adjacent_find(seqs.begin(), seqs.end(), std::greater_equal<>()) == seqs.end();
    report.converged = report.converged && c.converged;
    report.clients.push_back(std::move(c));
  }
  std::string joined;
  for (const auto& line : report.trace) joined += line + "\n";
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(joined)));
  report.trace_hash = buf;
  return report;
}

}  // namespace linkstate::sync
