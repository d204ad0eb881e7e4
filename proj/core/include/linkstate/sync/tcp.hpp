#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "linkstate/sync/message.hpp"
#include "linkstate/sync/relay.hpp"
#include "linkstate/sync/simulation.hpp"

namespace linkstate::sync {

// Blocking client side of the framed byte stream.
class TcpConnection {
 public:
  // Throws Io when the connection cannot be established.
  static TcpConnection connect(const std::string& host, std::uint16_t port);

  TcpConnection(TcpConnection&& other) noexcept;
  TcpConnection& operator=(TcpConnection&& other) noexcept;
  ~TcpConnection();

  // Throws Io when the peer is gone.
  void send(const SyncMessage& msg);
  // Waits up to `timeout` for one relay message; nullopt on timeout.
  // Throws Io on a closed stream, MalformedMessage on garbage.
  std::optional<SyncMessage> receive(std::chrono::milliseconds timeout);
  void close();
  bool open() const noexcept { return fd_ >= 0; }

 private:
  explicit TcpConnection(int fd) : fd_(fd) {}
  int fd_ = -1;
  FrameReader reader_;
};

// Serves one Relay over TCP. Each accepted connection gets a reader thread;
// the relay itself sits behind a mutex so it still sees one message at a
// time, and replies go to whichever connection last spoke for a client id.
class RelayServer {
 public:
  // Binds and listens right away; port 0 picks a free port. Throws Io.
  explicit RelayServer(std::uint16_t port, const std::string& bind_address = "127.0.0.1");
  ~RelayServer();
  RelayServer(const RelayServer&) = delete;
  RelayServer& operator=(const RelayServer&) = delete;

  std::uint16_t port() const noexcept { return port_; }

  // Accepts connections until stop() is called.
  void run();
  // Safe from any thread or a signal-driven watcher.
  void stop();

  std::uint64_t server_seq(const std::string& session_id) const;
  std::optional<StateNode> session_state(const std::string& session_id) const;
  std::uint64_t malformed_count() const;

 private:
  struct Conn;

  void serve_connection(const std::shared_ptr<Conn>& conn);
  void dispatch(const std::vector<Outbound>& out, const std::string& session_id);

  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};

  mutable std::mutex relay_mutex_;
  Relay relay_;
  std::map<std::pair<std::string, std::string>, std::weak_ptr<Conn>> routes_;

  std::mutex threads_mutex_;
  std::vector<std::thread> threads_;
  std::vector<std::shared_ptr<Conn>> conns_;
};

// Runs a simulation script in wall-clock time over real local sockets
// against an in-process RelayServer. Latency and loss settings are ignored;
// the network is whatever the loopback interface does.
SimReport run_realtime_simulation(const SimScript& script, std::optional<std::uint64_t> seed = std::nullopt);

}  // namespace linkstate::sync
