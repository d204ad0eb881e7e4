#include <benchmark/benchmark.h>

#include "generators.hpp"
#include "linkstate/state_diff.hpp"
#include "linkstate/state_json.hpp"

using namespace linkstate;

namespace {

// A hash map of `n` counters, each with a distinct value.
StateNode counters(int n, int offset) {
  DynamicStateList list;
  for (int i = 0; i < n; ++i) {
    list.push_back({"c" + std::to_string(i), "ex.Counter", StateNode::mapping({{"count", i + offset * (i % 7 == 0)}})});
  }
  return StateNode(std::move(list));
}

void BM_Encode(benchmark::State& state) {
  const StateNode n = counters(static_cast<int>(state.range(0)), 0);
  for (auto _ : state) benchmark::DoNotOptimize(encode(n));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Encode)->Range(8, 4096);

void BM_Decode(benchmark::State& state) {
  const std::string text = encode(counters(static_cast<int>(state.range(0)), 0));
  for (auto _ : state) benchmark::DoNotOptimize(decode(text));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_Decode)->Range(8, 4096);

void BM_DiffSparseChange(benchmark::State& state) {
  const StateNode a = counters(static_cast<int>(state.range(0)), 0);
  const StateNode b = counters(static_cast<int>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(diff(a, b));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DiffSparseChange)->Range(8, 4096);

void BM_Apply(benchmark::State& state) {
  const StateNode a = counters(static_cast<int>(state.range(0)), 0);
  const StateDiff d = diff(a, counters(static_cast<int>(state.range(0)), 1));
  for (auto _ : state) benchmark::DoNotOptimize(apply(a, d));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Apply)->Range(8, 4096);

void BM_DiffRandomTrees(benchmark::State& state) {
  linkstate::testing::Rng rng(1);
  std::vector<std::pair<StateNode, StateNode>> pairs;
  for (int i = 0; i < 64; ++i) {
    StateNode a = linkstate::testing::random_state(rng, 5);
    pairs.emplace_back(a, linkstate::testing::mutate_state(a, rng));
  }
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& [a, b] = pairs[i++ % pairs.size()];
    benchmark::DoNotOptimize(diff(a, b));
  }
}
BENCHMARK(BM_DiffRandomTrees);

void BM_SetSessionState(benchmark::State& state) {
  Runtime rt(demo::demo_registry());
  auto root = std::make_shared<LinkableHashMap>(rt);
  const StateNode a = counters(static_cast<int>(state.range(0)), 0);
  const StateNode b = counters(static_cast<int>(state.range(0)), 1);
  bool flip = false;
  for (auto _ : state) {
    root->set_session_state((flip = !flip) ? a : b);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SetSessionState)->Range(8, 1024);

}  // namespace
