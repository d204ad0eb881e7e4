#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "linkstate/sync/message.hpp"

namespace linkstate::sync {

// mt19937_64 with hand-written range mapping, so a seed gives the same
// numbers on every standard library.
class SimRng {
 public:
  explicit SimRng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next() { return engine_(); }
  // Inclusive range.
  std::int64_t uniform(std::int64_t lo, std::int64_t hi);
  // [0, 1)
  double unit();
  bool chance(double p) { return p > 0 && unit() < p; }

 private:
  std::mt19937_64 engine_;
};

struct LinkSpec {
  std::int64_t latency_min_ms = 0;
  std::int64_t latency_max_ms = 0;
  bool reorderable = false;
  double drop_probability = 0;
};

struct Delivery {
  std::int64_t time_ms = 0;
  std::uint64_t seq = 0;
  std::string from;
  std::string to;
  SyncMessage message;
};

// In-process network with a virtual clock. Each directed link has its own
// latency range, ordering policy and loss rate. FIFO links never deliver a
// message before one sent earlier on the same link.
class SimNet {
 public:
  explicit SimNet(std::uint64_t seed) : rng_(seed) {}

  // Returns false when the message was lost.
  bool send(const std::string& from, const std::string& to, const LinkSpec& link, SyncMessage message);

  std::optional<std::int64_t> next_time() const;
  // Removes and returns the earliest delivery due at or before `time_ms`,
  // ties broken by send order. Advances the clock to its time.
  std::optional<Delivery> pop_due(std::int64_t time_ms);

  std::int64_t now() const noexcept { return now_; }
  void advance_to(std::int64_t time_ms) { now_ = std::max(now_, time_ms); }
  bool idle() const noexcept { return queue_.empty(); }
  std::uint64_t sent_count() const noexcept { return sent_; }
  std::uint64_t dropped_count() const noexcept { return dropped_; }
  std::uint64_t delivered_count() const noexcept { return delivered_; }

 private:
  struct Later {
    bool operator()(const Delivery& a, const Delivery& b) const {
      return std::pair(a.time_ms, a.seq) > std::pair(b.time_ms, b.seq);
    }
  };

  SimRng rng_;
  std::int64_t now_ = 0;
  std::uint64_t next_seq_ = 0;
  std::uint64_t sent_ = 0;
  std::uint64_t dropped_ = 0;
  std::uint64_t delivered_ = 0;
  std::priority_queue<Delivery, std::vector<Delivery>, Later> queue_;
  std::map<std::pair<std::string, std::string>, std::int64_t> fifo_tail_;
};

}  // namespace linkstate::sync
