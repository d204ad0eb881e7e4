#pragma once

#include <functional>
#include <string_view>

namespace linkstate::trace {

// True when LINKSTATE_TRACE=1 is set in the environment or a sink is installed.
bool enabled();

// Writes one line to the installed sink, or to stderr when tracing came from
// the environment.
void emit(std::string_view line);

// Installs a sink (tests use this to capture invocation order). An empty
// function restores the environment-driven default.
void set_sink(std::function<void(std::string_view)> sink);

}  // namespace linkstate::trace
