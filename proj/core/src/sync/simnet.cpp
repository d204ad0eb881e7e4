#include "linkstate/sync/simnet.hpp"

namespace linkstate::sync {

std::int64_t SimRng::uniform(std::int64_t lo, std::int64_t hi) {
  if (hi <= lo) return lo;
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<std::int64_t>(next() % span);
}

double SimRng::unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

bool SimNet::send(const std::string& from, const std::string& to, const LinkSpec& link, SyncMessage message) {
  ++sent_;
  // Draw latency before the loss decision so both consume the same numbers
  // whatever the outcome.
  std::int64_t at = now_ + rng_.uniform(link.latency_min_ms, link.latency_max_ms);
  if (rng_.chance(link.drop_probability)) {
    ++dropped_;
    return false;
  }
  if (!link.reorderable) {
    auto& tail = fifo_tail_[{from, to}];
    at = std::max(at, tail);
    tail = at;
  }
  queue_.push(Delivery{at, next_seq_++, from, to, std::move(message)});
  return true;
}

std::optional<std::int64_t> SimNet::next_time() const {
  if (queue_.empty()) return std::nullopt;
  return queue_.top().time_ms;
}

std::optional<Delivery> SimNet::pop_due(std::int64_t time_ms) {
  if (queue_.empty() || queue_.top().time_ms > time_ms) return std::nullopt;
  Delivery d = queue_.top();
  queue_.pop();
  now_ = std::max(now_, d.time_ms);
  ++delivered_;
  return d;
}

}  // namespace linkstate::sync
