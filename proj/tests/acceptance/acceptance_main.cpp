// Runs every acceptance criterion and prints one PASS/FAIL line per
// criterion. Exit status is non-zero when any criterion fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "generators.hpp"
#include "linkstate/demo_classes.hpp"
#include "linkstate/history.hpp"
#include "linkstate/linking.hpp"
#include "linkstate/qkeys.hpp"
#include "linkstate/state_diff.hpp"
#include "linkstate/state_json.hpp"
#include "linkstate/sync/simulation.hpp"
#include "trace_capture.hpp"

using namespace linkstate;
using linkstate::testing::Rng;

namespace {

using Clock = std::chrono::steady_clock;

// A criterion body returns an empty string on success, else what went wrong.
struct Outcome {
  std::string failure;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::array<const char*, 3> kScripts = {"two-client-disjoint.json", "three-client-conflict.json",
                                             "drop-and-resync.json"};

// 1 ---------------------------------------------------------------------

Outcome callbacks_suite() {
  const auto start = Clock::now();
  std::vector<std::string> failed;
  auto check = [&](bool ok, const char* what) {
    if (!ok) failed.emplace_back(what);
  };

  for (int n = 1; n <= 50; ++n) {
    FrameScheduler s;
    CallbackCollection cc(s);
    int runs = 0;
    cc.add_immediate_callback([&] { ++runs; });
    cc.delay_callbacks();
    for (int i = 0; i < n; ++i) cc.trigger_callbacks();
    cc.resume_callbacks();
    check(runs == 1, "coalescing");
  }
  {
    FrameScheduler s;
    CallbackCollection cc(s);
    int runs = 0;
    cc.add_immediate_callback([&] { ++runs; });
    cc.delay_callbacks();
    cc.delay_callbacks();
    cc.trigger_callbacks();
    cc.resume_callbacks();
    const int mid = runs;
    cc.resume_callbacks();
    check(mid == 0 && runs == 1, "nested delay");
  }
  {
    FrameScheduler s;
    CallbackCollection a(s), b(s), c(s);
    int runs = 0;
    GroupedCallback g = s.make_grouped([&] { ++runs; });
    a.add_grouped_callback(g);
    b.add_grouped_callback(g);
    c.add_grouped_callback(g);
    a.trigger_callbacks();
    b.trigger_callbacks();
    c.trigger_callbacks();
    a.trigger_callbacks();
    s.flush_frame();
    const int first = runs;
    s.flush_frame();
    check(first == 1 && runs == 1, "central grouped coalescing");
  }
  {
    FrameScheduler s;
    CallbackCollection cc(s);
    int depth = 0, max_depth = 0;
    cc.add_immediate_callback([&] {
      ++depth;
      max_depth = std::max(max_depth, depth);
      cc.trigger_callbacks();
      cc.trigger_callbacks();
      --depth;
    });
    cc.trigger_callbacks();
    check(max_depth == 1, "recursion guard");
  }
  {
    FrameScheduler s;
    CallbackCollection top(s), mid(s), leaf(s);
    mid.add_parent(top);
    leaf.add_parent(mid);
    int top_runs = 0;
    top.add_immediate_callback([&] { ++top_runs; });
    leaf.trigger_callbacks();
    check(top_runs == 1 && top.trigger_counter() == 1 && mid.trigger_counter() == 1, "bubbling");
  }

  const double elapsed = seconds_since(start);
  Outcome o;
  o.detail = std::to_string(elapsed) + " s";
  if (!failed.empty()) o.failure = "failed: " + failed.front();
  if (elapsed >= 1.0) o.failure = "took " + o.detail;
  return o;
}

// 2 ---------------------------------------------------------------------

void count_modes(const StateNode& n, int& local, int& global, int& maps) {
  if (n.is_mapping()) {
    for (const auto& [k, v] : n.as_mapping()) {
      if (k == "plotter" && v.is_dynamic_list() && !v.as_dynamic_list().empty()) {
        (v.as_dynamic_list()[0].object_name.empty() ? local : global) += 1;
      }
      count_modes(v, local, global, maps);
    }
  } else if (n.is_dynamic_list()) {
    ++maps;
    for (const auto& e : n.as_dynamic_list()) count_modes(e.session_state, local, global, maps);
  }
}

Outcome graph_roundtrip() {
  Rng rng(2);
  int local = 0, global = 0, maps = 0;
  for (int i = 0; i < 1000; ++i) {
    Runtime rt(demo::demo_registry());
    auto src = std::make_shared<LinkableHashMap>(rt);
    linkstate::testing::populate_random_graph(*src, rng);
    const StateNode s = src->session_state();
    count_modes(s, local, global, maps);
    auto dst = std::make_shared<LinkableHashMap>(rt);
    dst->set_session_state(s);
    if (!state_equivalent(dst->session_state(), s)) return {"graph " + std::to_string(i) + ": " + encode(s), ""};
  }
  return {"", "1000 graphs, " + std::to_string(local) + " local / " + std::to_string(global) +
                  " global dynamic objects, " + std::to_string(maps) + " hash maps"};
}

// 3 ---------------------------------------------------------------------

Outcome diff_oracle() {
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    StateNode a = linkstate::testing::random_state(rng, 4);
    StateNode b = rng.uniform(0, 3) == 0 ? linkstate::testing::random_state(rng, 4)
                                         : linkstate::testing::mutate_state(a, rng, 3);
    const StateDiff d = diff(a, b);
    if (!state_equivalent(apply(a, d), b)) return {"pair " + std::to_string(i) + ": " + encode(a) + " -> " + encode(b), ""};
    if (!state_equivalent(apply(a, decode_diff(encode_diff(d))), b)) return {"pair " + std::to_string(i) + " after JSON", ""};
    if (!diff(a, a).empty() || !diff(b, b).empty()) return {"non-empty self diff at " + std::to_string(i), ""};
  }
  return {"", "1000 pairs"};
}

// 4 ---------------------------------------------------------------------

Outcome remove_missing_fixtures() {
  const Json cases = Json::parse(slurp(std::string(LINKSTATE_FIXTURES_DIR) + "/remove-missing.cases.json"));
  for (const auto& c : cases) {
    Runtime rt(demo::demo_registry());
    auto root = std::make_shared<LinkableHashMap>(rt);
    root->set_session_state(from_json(c["base"]));
    const Diagnostics diags = root->set_session_state(from_json(c["state"]), c["removeMissing"].get<bool>());
    const std::string got = encode(root->session_state());
    const std::string want = encode(from_json(c["expected"]));
    if (got != want) return {c["name"].get<std::string>() + ": got " + got, ""};
    if (diags.size() != c.value("diagnostics", 0u)) return {c["name"].get<std::string>() + ": diagnostics", ""};
  }
  return {"", std::to_string(cases.size()) + " fixtures"};
}

// 5 ---------------------------------------------------------------------

Outcome linking_convergence() {
  Rng rng(5);
  for (int script = 0; script < 200; ++script) {
    Runtime rt(demo::demo_registry());
    const int n = script % 2 == 0 ? 2 : 3;
    std::vector<std::shared_ptr<LinkableHashMap>> nodes;
    for (int i = 0; i < n; ++i) nodes.push_back(std::make_shared<LinkableHashMap>(rt));
    linkstate::testing::populate_random_graph(*nodes[0], rng, 1);
    std::vector<std::shared_ptr<Link>> links;
    links.push_back(link_session_state(nodes[0], nodes[1]));
    if (n == 3) {
      // Chain or star, both trees.
      links.push_back(link_session_state(rng.uniform(0, 1) ? nodes[0] : nodes[1], nodes[2]));
    }
    for (int e = 0; e < 12; ++e) {
      auto& target = *nodes[static_cast<std::size_t>(rng.uniform(0, n - 1))];
      std::vector<std::uint64_t> before;
      for (auto& node : nodes) before.push_back(node->callbacks().trigger_counter());
      std::uint64_t props_before = 0;
      for (auto& l : links) props_before += l->propagation_count();
      {
        DelayGuard one_edit(target.callbacks());
        linkstate::testing::random_graph_edit(target, rng);
      }
      std::uint64_t props = 0;
      for (auto& l : links) props += l->propagation_count();
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i]->callbacks().trigger_counter() - before[i] > 1) {
          return {"script " + std::to_string(script) + ": echo trigger on endpoint " + std::to_string(i), ""};
        }
      }
      if (props - props_before > links.size()) {
        return {"script " + std::to_string(script) + ": " + std::to_string(props - props_before) + " propagations", ""};
      }
      for (std::size_t i = 1; i < nodes.size(); ++i) {
        if (!state_equivalent(nodes[0]->session_state(), nodes[i]->session_state())) {
          return {"script " + std::to_string(script) + ": endpoints diverged", ""};
        }
      }
    }
  }
  return {"", "200 scripts (100 pairs, 100 three-node trees)"};
}

// 6 ---------------------------------------------------------------------

Outcome history_inverse() {
  Rng rng(6);
  for (int script = 0; script < 200; ++script) {
    Runtime rt(demo::demo_registry());
    auto root = std::make_shared<LinkableHashMap>(rt);
    std::int64_t now = 0;
    SessionHistory log([&] { return now += 7; });
    log.attach(root);
    const int edits = static_cast<int>(rng.uniform(3, 12));
    for (int e = 0; e < edits; ++e) {
      for (auto k = rng.uniform(1, 3); k > 0; --k) linkstate::testing::random_graph_edit(*root, rng);
      rt.scheduler().flush_frame();
    }
    const std::string id = "script " + std::to_string(script);
    const std::size_t n = log.size();
    for (std::size_t i = 0; i < n; ++i) {
      const StateNode s = log.state_at(i);
      const auto& step = log.steps()[i];
      if (!state_equivalent(apply(apply(s, step.forward), step.backward), s)) return {id + ": inverse at step " + std::to_string(i), ""};
    }
    if (!state_equivalent(log.state_at(n), root->session_state())) return {id + ": replay", ""};

    std::vector<StateNode> undo_states{root->session_state()};
    while (log.cursor() > 0) {
      log.undo();
      undo_states.push_back(root->session_state());
    }
    std::vector<StateNode> redo_states{root->session_state()};
    while (log.cursor() < n) {
      log.redo();
      redo_states.push_back(root->session_state());
    }
    for (std::size_t k = 0; k <= n; ++k) {
      log.jump_to(n);
      log.jump_to(k);
      if (!state_equivalent(root->session_state(), undo_states[n - k])) return {id + ": jump vs undo at " + std::to_string(k), ""};
      log.jump_to(0);
      log.jump_to(k);
      if (!state_equivalent(root->session_state(), redo_states[k])) return {id + ": jump vs redo at " + std::to_string(k), ""};
    }
    log.jump_to(static_cast<std::size_t>(rng.uniform(0, static_cast<std::int64_t>(n))));
    const std::string text = log.export_log();
    SessionHistory back = SessionHistory::import_log(text);
    if (back.export_log() != text) return {id + ": export not byte-stable", ""};
    if (!state_equivalent(back.state_at(back.cursor()), root->session_state())) return {id + ": import cursor state", ""};
  }
  return {"", "200 scripts"};
}

// 7 ---------------------------------------------------------------------

Outcome sync_convergence() {
  const auto start = Clock::now();
  int runs = 0, divergent = 0;
  std::string first_bad;
  for (const char* name : kScripts) {
    const sync::SimScript script = sync::load_script(std::string(LINKSTATE_SCRIPTS_DIR) + "/" + name);
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const sync::SimReport r = sync::run_simulation(script, seed);
      ++runs;
      bool ok = r.converged;
      for (const auto& c : r.clients) ok = ok && c.converged && c.causal;
      if (!ok) {
        ++divergent;
        if (first_bad.empty()) first_bad = std::string(name) + " seed " + std::to_string(seed);
      }
    }
  }
  const double elapsed = seconds_since(start);
  Outcome o{"", std::to_string(runs) + " runs, divergence " + std::to_string(divergent) + ", " +
                    std::to_string(elapsed) + " s"};
  if (divergent > 0) o.failure = "diverged: " + first_bad;
  else if (elapsed >= 10.0) o.failure = "took " + std::to_string(elapsed) + " s";
  return o;
}

// 8 ---------------------------------------------------------------------

Outcome qualified_keys() {
  Rng rng(8);
  qkeys::KeyManager keys;
  for (int trial = 0; trial < 100; ++trial) {
    qkeys::KeyedColumn towns("Town", "t"), schools("School", "s");
    for (int i = 0; i < 5; ++i) {
      const std::string name = "n" + std::to_string(rng.uniform(0, 9));
      towns.set(keys.get("Town", name), i);
      schools.set(keys.get("School", name), i);
    }
    try {
      (void)qkeys::join_columns({&towns, &schools});
      return {"cross-type join accepted", ""};
    } catch (const Error& e) {
      if (e.code() != Errc::kKeyTypeMismatch) return {"wrong error for cross-type join", ""};
    }
  }

  std::vector<std::vector<std::string>> rows_a, rows_b;
  for (int i = 0; i < 40; ++i) rows_a.push_back({"k" + std::to_string(rng.uniform(0, 59)), std::to_string(i)});
  for (int i = 0; i < 30; ++i) rows_b.push_back({"k" + std::to_string(rng.uniform(0, 59)), "v" + std::to_string(i)});
  // Duplicate keys would make "last row wins" order-dependent; keep one row per key.
  auto dedupe = [](std::vector<std::vector<std::string>>& rows) {
    std::vector<std::vector<std::string>> out;
    for (const auto& r : rows) {
      if (std::none_of(out.begin(), out.end(), [&](const auto& o) { return o[0] == r[0]; })) out.push_back(r);
    }
    rows = out;
  };
  dedupe(rows_a);
  dedupe(rows_b);
  auto to_csv = [](const char* header, const std::vector<std::vector<std::string>>& rows) {
    std::string text = std::string(header) + "\n";
    for (const auto& r : rows) text += r[0] + "," + r[1] + "\n";
    return text;
  };
  auto joined = [&](const std::vector<std::vector<std::string>>& a, const std::vector<std::vector<std::string>>& b) {
    qkeys::KeyManager m;
    auto ca = qkeys::parse_csv_column(m, to_csv("key,a", a), "key", "a", "Region");
    auto cb = qkeys::parse_csv_column(m, to_csv("key,b", b), "key", "b", "Region");
    return qkeys::join_columns({&ca.column, &cb.column}).to_csv();
  };
  const std::string reference = joined(rows_a, rows_b);
  for (int shuffle = 0; shuffle < 100; ++shuffle) {
    auto a = rows_a;
    auto b = rows_b;
    for (std::size_t i = a.size(); i > 1; --i) std::swap(a[i - 1], a[static_cast<std::size_t>(rng.uniform(0, static_cast<std::int64_t>(i) - 1))]);
    for (std::size_t i = b.size(); i > 1; --i) std::swap(b[i - 1], b[static_cast<std::size_t>(rng.uniform(0, static_cast<std::int64_t>(i) - 1))]);
    if (joined(a, b) != reference) return {"join changed under shuffle " + std::to_string(shuffle), ""};
  }
  return {"", "100 cross-type trials, 100 shuffles"};
}

// 9 ---------------------------------------------------------------------

// Deterministic workload whose complete output is compared across two
// separate processes.
void determinism_probe(std::ostream& out) {
  {
    linkstate::testing::TraceCapture capture;
    Runtime rt(demo::demo_registry());
    auto root = std::make_shared<LinkableHashMap>(rt);
    auto mirror = std::make_shared<LinkableHashMap>(rt);
    SessionHistory log([] { return 0; });
    log.attach(root);
    auto link = link_session_state(root, mirror);
    root->callbacks().add_grouped_callback([] {});
    Rng rng(9);
    for (int i = 0; i < 40; ++i) {
      linkstate::testing::random_graph_edit(*root, rng);
      rt.scheduler().flush_frame();
    }
    log.jump_to(log.size() / 2);
    for (const auto& line : capture.lines()) out << line << "\n";
    out << log.export_log() << encode(mirror->session_state()) << "\n";
  }
  Rng rng(99);
  for (int i = 0; i < 50; ++i) {
    StateNode a = linkstate::testing::random_state(rng, 4);
    out << encode_diff(diff(a, linkstate::testing::mutate_state(a, rng))) << "\n";
  }
  for (const char* name : kScripts) {
    const sync::SimScript script = sync::load_script(std::string(LINKSTATE_SCRIPTS_DIR) + "/" + name);
    out << sync::run_simulation(script).to_text(true);
  }
}

// Empty on any failure to run the probe.
std::string run_probe_process() {
  std::error_code ec;
  const auto self = std::filesystem::read_symlink("/proc/self/exe", ec);
  if (ec) return {};
  std::string output;
  FILE* pipe = ::popen(("'" + self.string() + "' --determinism-probe").c_str(), "r");
  if (pipe == nullptr) return {};
  std::array<char, 65536> buf{};
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) output.append(buf.data(), n);
  if (::pclose(pipe) != 0) return {};
  return output;
}

Outcome determinism() {
  // Same process, each bundled simulation twice.
  for (const char* name : kScripts) {
    const sync::SimScript script = sync::load_script(std::string(LINKSTATE_SCRIPTS_DIR) + "/" + name);
    for (std::uint64_t seed : {1ull, 42ull, 7ull}) {
      if (sync::run_simulation(script, seed).to_text(true) != sync::run_simulation(script, seed).to_text(true)) {
        return {std::string(name) + " seed " + std::to_string(seed) + " differs between runs", ""};
      }
    }
  }
  // Two fresh processes, whole workload including callback traces.
  const std::string first = run_probe_process();
  const std::string second = run_probe_process();
  if (first.empty() || second.empty()) return {"probe process failed", ""};
  if (first != second) return {"probe output differs between processes", ""};
  return {"", std::to_string(first.size()) + " probe bytes identical"};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1 && std::string(argv[1]) == "--determinism-probe") {
    determinism_probe(std::cout);
    return 0;
  }

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"callback semantics", callbacks_suite},
      {"session-state roundtrip", graph_roundtrip},
      {"diff/patch oracle", diff_oracle},
      {"removeMissingDynamicObjects fixtures", remove_missing_fixtures},
      {"linking convergence", linking_convergence},
      {"history inverse/replay", history_inverse},
      {"sync convergence", sync_convergence},
      {"qualified keys", qualified_keys},
      {"determinism", determinism},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.failure = std::string("exception: ") + e.what();
    }
    const bool ok = o.failure.empty();
    failures += ok ? 0 : 1;
    std::cout << (ok ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first << ": "
              << (ok ? o.detail : o.failure) << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
