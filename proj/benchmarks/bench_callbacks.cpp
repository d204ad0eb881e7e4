#include <benchmark/benchmark.h>

#include "linkstate/callbacks.hpp"

using namespace linkstate;

namespace {

void BM_TriggerImmediate(benchmark::State& state) {
  FrameScheduler s;
  CallbackCollection cc(s);
  std::int64_t sink = 0;
  for (int i = 0; i < state.range(0); ++i) cc.add_immediate_callback([&] { ++sink; });
  for (auto _ : state) cc.trigger_callbacks();
  benchmark::DoNotOptimize(sink);
}
BENCHMARK(BM_TriggerImmediate)->Arg(1)->Arg(8)->Arg(64);

void BM_DelayedBurst(benchmark::State& state) {
  FrameScheduler s;
  CallbackCollection cc(s);
  std::int64_t sink = 0;
  cc.add_immediate_callback([&] { ++sink; });
  for (auto _ : state) {
    DelayGuard guard(cc);
    for (int i = 0; i < state.range(0); ++i) cc.trigger_callbacks();
  }
  benchmark::DoNotOptimize(sink);
}
BENCHMARK(BM_DelayedBurst)->Arg(10)->Arg(1000);

void BM_BubbleChain(benchmark::State& state) {
  FrameScheduler s;
  std::vector<std::unique_ptr<CallbackCollection>> chain;
  for (int i = 0; i < state.range(0); ++i) {
    chain.push_back(std::make_unique<CallbackCollection>(s));
    if (i > 0) chain[i]->add_parent(*chain[i - 1]);
  }
  for (auto _ : state) chain.back()->trigger_callbacks();
}
BENCHMARK(BM_BubbleChain)->Arg(3)->Arg(16)->Arg(128);

void BM_GroupedFlush(benchmark::State& state) {
  FrameScheduler s;
  std::vector<std::unique_ptr<CallbackCollection>> sources;
  std::int64_t sink = 0;
  GroupedCallback g = s.make_grouped([&] { ++sink; });
  for (int i = 0; i < state.range(0); ++i) {
    sources.push_back(std::make_unique<CallbackCollection>(s));
    sources.back()->add_grouped_callback(g);
  }
  for (auto _ : state) {
    for (auto& c : sources) c->trigger_callbacks();
    s.flush_frame();
  }
  benchmark::DoNotOptimize(sink);
}
BENCHMARK(BM_GroupedFlush)->Arg(2)->Arg(64);

}  // namespace
