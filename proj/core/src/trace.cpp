#include "linkstate/trace.hpp"

#include <cstdlib>
#include <cstring>
#include <iostream>
#include <mutex>

namespace linkstate::trace {

namespace {

struct TraceState {
  std::mutex mutex;
  std::function<void(std::string_view)> sink;
  bool from_env = [] {
    const char* value = std::getenv("LINKSTATE_TRACE");
    return value != nullptr && std::strcmp(value, "1") == 0;
  }();
};

TraceState& state() {
  static TraceState s;
  return s;
}

}  // namespace

bool enabled() {
  auto& s = state();
  std::lock_guard lock(s.mutex);
  return s.from_env || static_cast<bool>(s.sink);
}

void emit(std::string_view line) {
  auto& s = state();
  std::lock_guard lock(s.mutex);
  if (s.sink) {
    s.sink(line);
  } else if (s.from_env) {
    std::cerr << "trace: " << line << '\n';
  }
}

void set_sink(std::function<void(std::string_view)> sink) {
  auto& s = state();
  std::lock_guard lock(s.mutex);
  s.sink = std::move(sink);
}

}  // namespace linkstate::trace
