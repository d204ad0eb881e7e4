#include <benchmark/benchmark.h>

#include "linkstate/sync/simulation.hpp"

using namespace linkstate;

namespace {

void run_script(benchmark::State& state, const char* name) {
  const sync::SimScript script = sync::load_script(std::string(LINKSTATE_SCRIPTS_DIR) + "/" + name);
  std::uint64_t seed = 1;
  std::uint64_t messages = 0;
  for (auto _ : state) {
    const sync::SimReport r = sync::run_simulation(script, seed++);
    messages += r.messages_sent;
    if (!r.converged) state.SkipWithError("simulation diverged");
  }
  state.counters["messages/run"] = benchmark::Counter(static_cast<double>(messages), benchmark::Counter::kAvgIterations);
}

void BM_SimDisjoint(benchmark::State& state) { run_script(state, "two-client-disjoint.json"); }
void BM_SimConflict(benchmark::State& state) { run_script(state, "three-client-conflict.json"); }
void BM_SimDropResync(benchmark::State& state) { run_script(state, "drop-and-resync.json"); }

BENCHMARK(BM_SimDisjoint)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SimConflict)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SimDropResync)->Unit(benchmark::kMillisecond);

}  // namespace
