#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "linkstate/linkable_hash_map.hpp"
#include "linkstate/state_json.hpp"
#include "linkstate/sync/client.hpp"
#include "linkstate/sync/simnet.hpp"

namespace linkstate::sync {

struct EditSpec {
  enum class Op { kRequest, kRemove, kSet, kOrder, kState };

  std::int64_t at_ms = 0;
  Op op = Op::kSet;
  std::string name;                 // request, remove
  std::string class_name;           // request
  std::vector<std::string> path;    // set: entry name, then child names
  StateNode value;                  // set: new value; state: full root state
  std::vector<std::string> names;   // order
  bool keep_missing = false;        // state
};

struct RandomEdits {
  std::size_t count = 0;
  std::int64_t start_ms = 0;
  std::int64_t end_ms = 0;
};

struct ClientScript {
  std::string id;
  std::int64_t join_at_ms = 0;
  std::optional<LinkSpec> net;  // overrides the script-wide link settings
  std::vector<EditSpec> edits;
  RandomEdits random;
};

struct SimScript {
  std::string session = "sim";
  std::uint64_t seed = 1;
  std::int64_t duration_ms = 1000;
  std::int64_t frame_ms = 16;
  std::int64_t drain_cap_ms = 60000;
  LinkSpec net;
  ClientOptions options;
  std::vector<ClientScript> clients;
};

// Throws ScriptError.
SimScript parse_script(std::string_view text);
SimScript load_script(const std::string& path);

struct AcceptedDiff {
  std::uint64_t server_seq = 0;
  std::string sender;
  std::uint64_t client_seq = 0;
  StateDiff diff;
};

struct ClientReport {
  std::string id;
  bool converged = false;
  bool causal = true;  // serverSeqs applied in strictly increasing order
  std::string state_hash;
  StateNode state;
  std::uint64_t last_server_seq = 0;
  ClientStats stats;
};

struct SimReport {
  bool converged = false;
  bool quiesced = false;
  std::uint64_t seed = 0;
  std::int64_t end_time_ms = 0;
  std::uint64_t server_seq = 0;
  std::string state_hash;
  StateNode relay_state;
  std::uint64_t messages_sent = 0;
  std::uint64_t messages_dropped = 0;
  std::uint64_t edits_applied = 0;
  std::uint64_t edits_skipped = 0;
  std::vector<ClientReport> clients;
  std::vector<AcceptedDiff> accepted;  // relay order
  std::vector<std::string> trace;
  std::string trace_hash;

  // Deterministic field order. The trace and the accepted-diff log are only
  // included on request.
  Json to_json(bool include_trace = false) const;
  std::string to_text(bool include_trace = false) const { return to_json(include_trace).dump(2) + "\n"; }
};

// Applies one edit to a client tree. Returns a short description for the
// trace, or an empty string when the edit's target does not exist.
std::string apply_edit(LinkableHashMap& root, const EditSpec& edit);
// Picks and applies a random edit using the demo classes.
std::string random_edit(LinkableHashMap& root, SimRng& rng);

// Runs the script on virtual time with the demo class registry. Every client
// roots its tree at a LinkableHashMap. `seed` overrides the script's seed.
SimReport run_simulation(const SimScript& script, std::optional<std::uint64_t> seed = std::nullopt);

}  // namespace linkstate::sync
