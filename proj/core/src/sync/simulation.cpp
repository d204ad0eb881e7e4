#include "linkstate/sync/simulation.hpp"

#include <algorithm>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>

#include "linkstate/demo_classes.hpp"
#include "linkstate/linkable_hash_map.hpp"
#include "linkstate/sync/relay.hpp"
#include "linkstate/trace.hpp"

namespace linkstate::sync {

namespace {

constexpr const char* kRelayName = "relay";

Error script_error(const std::string& what) { return Error(Errc::kScriptError, what); }

std::int64_t get_ms(const Json& obj, const char* key, std::int64_t fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number_integer() || it->get<std::int64_t>() < 0) {
    throw script_error(std::string("'") + key + "' must be a non-negative integer");
  }
  return it->get<std::int64_t>();
}

std::string get_string(const Json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string() || it->get<std::string>().empty()) {
    throw script_error(std::string("'") + key + "' must be a non-empty string");
  }
  return it->get<std::string>();
}

std::vector<std::string> get_names(const Json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_array()) throw script_error(std::string("'") + key + "' must be an array of strings");
  std::vector<std::string> out;
  for (const auto& n : *it) {
    if (!n.is_string()) throw script_error(std::string("'") + key + "' must be an array of strings");
    out.push_back(n.get<std::string>());
  }
  return out;
}

LinkSpec parse_link(const Json& json, LinkSpec base) {
  if (!json.is_object()) throw script_error("'net' must be an object");
  if (auto it = json.find("latencyMs"); it != json.end()) {
    if (it->is_number_integer() && it->get<std::int64_t>() >= 0) {
      base.latency_min_ms = base.latency_max_ms = it->get<std::int64_t>();
    } else if (it->is_array() && it->size() == 2 && (*it)[0].is_number_integer() && (*it)[1].is_number_integer()) {
      base.latency_min_ms = (*it)[0].get<std::int64_t>();
      base.latency_max_ms = (*it)[1].get<std::int64_t>();
      if (base.latency_min_ms < 0 || base.latency_max_ms < base.latency_min_ms) {
        throw script_error("'latencyMs' range must satisfy 0 <= min <= max");
      }
    } else {
      throw script_error("'latencyMs' must be an integer or a [min, max] pair");
    }
  }
  if (auto it = json.find("order"); it != json.end()) {
    if (*it == "fifo") {
      base.reorderable = false;
    } else if (*it == "reorderable") {
      base.reorderable = true;
    } else {
      throw script_error("'order' must be \"fifo\" or \"reorderable\"");
    }
  }
  if (auto it = json.find("dropProbability"); it != json.end()) {
    if (!it->is_number() || it->get<double>() < 0 || it->get<double>() >= 1) {
      throw script_error("'dropProbability' must be in [0, 1)");
    }
    base.drop_probability = it->get<double>();
  }
  return base;
}

EditSpec parse_edit(const Json& json) {
  if (!json.is_object()) throw script_error("each edit must be an object");
  EditSpec e;
  e.at_ms = get_ms(json, "atMs", 0);
  const std::string op = get_string(json, "op");
  if (op == "request") {
    e.op = EditSpec::Op::kRequest;
    e.name = get_string(json, "name");
    e.class_name = get_string(json, "className");
  } else if (op == "remove") {
    e.op = EditSpec::Op::kRemove;
    e.name = get_string(json, "name");
  } else if (op == "set") {
    e.op = EditSpec::Op::kSet;
    e.path = get_names(json, "path");
    if (e.path.empty()) throw script_error("'path' must not be empty");
    if (!json.contains("value")) throw script_error("set edit needs 'value'");
    e.value = from_json(json.at("value"));
  } else if (op == "order") {
    e.op = EditSpec::Op::kOrder;
    e.names = get_names(json, "names");
  } else if (op == "state") {
    e.op = EditSpec::Op::kState;
    if (!json.contains("state")) throw script_error("state edit needs 'state'");
    e.value = from_json(json.at("state"));
    if (auto it = json.find("keepMissing"); it != json.end()) {
      if (!it->is_boolean()) throw script_error("'keepMissing' must be a boolean");
      e.keep_missing = it->get<bool>();
    }
  } else {
    throw script_error("unknown edit op '" + op + "'");
  }
  return e;
}

}  // namespace

SimScript parse_script(std::string_view text) {
  Json json;
  try {
    json = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw script_error(std::string("script is not JSON: ") + e.what());
  }
  if (!json.is_object()) throw script_error("script must be a JSON object");
  SimScript s;
  try {
    if (json.contains("session")) s.session = get_string(json, "session");
    if (auto it = json.find("seed"); it != json.end()) {
      if (!it->is_number_unsigned()) throw script_error("'seed' must be a non-negative integer");
      s.seed = it->get<std::uint64_t>();
    }
    s.duration_ms = get_ms(json, "durationMs", s.duration_ms);
    s.frame_ms = get_ms(json, "frameMs", s.frame_ms);
    if (s.frame_ms <= 0) throw script_error("'frameMs' must be positive");
    s.drain_cap_ms = get_ms(json, "drainCapMs", s.drain_cap_ms);
    if (auto it = json.find("net"); it != json.end()) s.net = parse_link(*it, s.net);
    if (auto it = json.find("timers"); it != json.end()) {
      if (!it->is_object()) throw script_error("'timers' must be an object");
      s.options.retransmit_ms = get_ms(*it, "retransmitMs", s.options.retransmit_ms);
      s.options.gap_timeout_ms = get_ms(*it, "gapTimeoutMs", s.options.gap_timeout_ms);
      s.options.hello_retry_ms = get_ms(*it, "helloRetryMs", s.options.hello_retry_ms);
      s.options.heartbeat_ms = get_ms(*it, "heartbeatMs", s.options.heartbeat_ms);
    }
    auto clients = json.find("clients");
    if (clients == json.end() || !clients->is_array() || clients->empty()) {
      throw script_error("'clients' must be a non-empty array");
    }
    std::set<std::string> ids;
    for (const auto& c : *clients) {
      if (!c.is_object()) throw script_error("each client must be an object");
      ClientScript cs;
      cs.id = get_string(c, "id");
      if (cs.id == kRelayName) throw script_error("client id 'relay' is reserved");
      if (!ids.insert(cs.id).second) throw script_error("duplicate client id '" + cs.id + "'");
      cs.join_at_ms = get_ms(c, "joinAtMs", 0);
      if (auto it = c.find("net"); it != c.end()) cs.net = parse_link(*it, s.net);
      if (auto it = c.find("edits"); it != c.end()) {
        if (!it->is_array()) throw script_error("'edits' must be an array");
        for (const auto& e : *it) cs.edits.push_back(parse_edit(e));
        std::stable_sort(cs.edits.begin(), cs.edits.end(),
                         [](const EditSpec& a, const EditSpec& b) { return a.at_ms < b.at_ms; });
      }
      if (auto it = c.find("randomEdits"); it != c.end()) {
        if (!it->is_object()) throw script_error("'randomEdits' must be an object");
        cs.random.count = static_cast<std::size_t>(get_ms(*it, "count", 0));
        cs.random.start_ms = get_ms(*it, "startMs", 0);
        cs.random.end_ms = get_ms(*it, "endMs", s.duration_ms);
        if (cs.random.end_ms < cs.random.start_ms) throw script_error("'endMs' before 'startMs'");
      }
      s.clients.push_back(std::move(cs));
    }
  } catch (const Json::exception& e) {
    throw script_error(e.what());
  } catch (const Error& e) {
    if (e.code() == Errc::kScriptError) throw;
    throw script_error(e.what());
  }
  return s;
}

SimScript load_script(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kFileNotFound, "cannot open script '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_script(buf.str());
}

namespace {

struct Actor {
  const ClientScript* script = nullptr;
  LinkSpec link;
  std::unique_ptr<Runtime> runtime;
  std::shared_ptr<LinkableHashMap> root;
  std::unique_ptr<ClientEngine> engine;
  std::size_t next_edit = 0;
  std::vector<std::int64_t> random_times;
  std::size_t next_random = 0;
  std::unique_ptr<SimRng> rng;
  bool started = false;

  bool edits_done() const { return next_edit >= script->edits.size() && next_random >= random_times.size(); }
};

std::string join_path(const std::vector<std::string>& path) {
  std::string out;
  for (const auto& p : path) out += (out.empty() ? "" : "/") + p;
  return out;
}

}  // namespace

std::string apply_edit(LinkableHashMap& root, const EditSpec& e) {
  switch (e.op) {
    case EditSpec::Op::kRequest:
      root.request_object(e.name, e.class_name);
      return "request " + e.name + ":" + e.class_name;
    case EditSpec::Op::kRemove:
      if (!root.find_object(e.name)) return {};
      root.remove_object(e.name);
      return "remove " + e.name;
    case EditSpec::Op::kSet: {
      std::shared_ptr<LinkableObject> node = root.find_object(e.path.front());
      for (std::size_t i = 1; node && i < e.path.size(); ++i) node = node->child(e.path[i]);
      auto var = std::dynamic_pointer_cast<LinkableVariable>(node);
      if (!var) return {};
      var->set_state(e.value);
      return "set " + join_path(e.path) + "=" + encode(e.value);
    }
    case EditSpec::Op::kOrder: {
      std::vector<std::string> present;
      for (const auto& n : e.names) {
        if (root.find_object(n) && std::find(present.begin(), present.end(), n) == present.end()) {
          present.push_back(n);
        }
      }
      root.set_name_order(present);
      return "order " + join_path(present);
    }
    case EditSpec::Op::kState:
      root.set_session_state(e.value, !e.keep_missing);
      return "state";
  }
  return {};
}

std::string random_edit(LinkableHashMap& root, SimRng& rng) {
  static const char* const kWords[] = {"alpha", "beta", "gamma", "delta", "rho", "tau"};
  const auto names = root.names();
  const auto r = rng.uniform(0, 99);
  if (names.empty() || r < 30) {
    EditSpec e;
    e.op = EditSpec::Op::kRequest;
    e.name = "n" + std::to_string(rng.uniform(0, 5));
    e.class_name = rng.uniform(0, 1) == 0 ? "ex.Counter" : "ex.Label";
    return apply_edit(root, e);
  }
  const std::string& target = names[static_cast<std::size_t>(rng.uniform(0, static_cast<std::int64_t>(names.size()) - 1))];
  if (r < 40) {
    root.remove_object(target);
    return "remove " + target;
  }
  if (r < 85) {
    auto object = root.find_object(target);
    if (auto counter = std::dynamic_pointer_cast<demo::Counter>(object)) {
      const auto v = rng.uniform(0, 99);
      counter->count->set(static_cast<double>(v));
      return "set " + target + "/count=" + std::to_string(v);
    }
    if (auto label = std::dynamic_pointer_cast<demo::Label>(object)) {
      if (rng.uniform(0, 1) == 0) {
        const char* word = kWords[rng.uniform(0, 5)];
        label->text->set(word);
        return "set " + target + "/text=" + word;
      }
      const auto v = rng.uniform(8, 24);
      label->size->set(static_cast<double>(v));
      return "set " + target + "/size=" + std::to_string(v);
    }
    return {};
  }
  auto order = names;
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[static_cast<std::size_t>(rng.uniform(0, static_cast<std::int64_t>(i) - 1))]);
  }
  order.resize(static_cast<std::size_t>(rng.uniform(1, static_cast<std::int64_t>(order.size()))));
  root.set_name_order(order);
  return "order " + join_path(order);
}

namespace {

std::string describe(const Delivery& d) {
  const auto& m = d.message;
  return "t=" + std::to_string(d.time_ms) + " " + d.from + "->" + d.to + " " + std::string(kind_name(m.kind)) +
         " s=" + std::to_string(m.server_seq) + " c=" + std::to_string(m.client_seq);
}

}  // namespace

SimReport run_simulation(const SimScript& script, std::optional<std::uint64_t> seed_override) {
  const std::uint64_t seed = seed_override.value_or(script.seed);
  SimReport report;
  report.seed = seed;

  SimNet net(seed);
  Relay relay;
  auto registry = demo::demo_registry();

  std::vector<Actor> actors(script.clients.size());
  for (std::size_t i = 0; i < actors.size(); ++i) {
    Actor& a = actors[i];
    a.script = &script.clients[i];
    a.link = a.script->net.value_or(script.net);
    a.runtime = std::make_unique<Runtime>(registry);
    a.root = std::make_shared<LinkableHashMap>(*a.runtime);
    a.engine = std::make_unique<ClientEngine>(a.root, script.session, a.script->id, script.options);
    // Each client's edit stream has its own generator so adding a client
    // does not perturb the others.
    a.rng = std::make_unique<SimRng>(seed * 0x9e3779b97f4a7c15ull + i + 1);
    for (std::size_t k = 0; k < a.script->random.count; ++k) {
      a.random_times.push_back(a.rng->uniform(a.script->random.start_ms, a.script->random.end_ms));
    }
    std::sort(a.random_times.begin(), a.random_times.end());
  }

  auto actor_for = [&](const std::string& id) -> Actor* {
    for (auto& a : actors) {
      if (a.script->id == id) return &a;
    }
    return nullptr;
  };
  auto note = [&](std::string line) {
    if (trace::enabled()) trace::emit("sim " + line);
    report.trace.push_back(std::move(line));
  };
  auto send_to_relay = [&](Actor& a, std::vector<SyncMessage> msgs) {
    for (auto& m : msgs) {
      if (!net.send(a.script->id, kRelayName, a.link, std::move(m))) {
        note("t=" + std::to_string(net.now()) + " drop " + a.script->id + "->relay");
      }
    }
  };

  const std::int64_t horizon = script.duration_ms + script.drain_cap_ms;
  std::int64_t t = 0;
  for (;; t += script.frame_ms) {
    while (auto d = net.pop_due(t)) {
      note(describe(*d));
      if (d->to == kRelayName) {
        for (auto& out : relay.handle(d->message)) {
          const auto& m = out.message;
          if (m.kind == MessageKind::kDiff && (report.accepted.empty() || report.accepted.back().server_seq < m.server_seq)) {
            report.accepted.push_back({m.server_seq, m.sender_id, m.client_seq, m.diff});
          }
          if (Actor* a = actor_for(out.recipient)) {
            if (!net.send(kRelayName, out.recipient, a->link, std::move(out.message))) {
              note("t=" + std::to_string(net.now()) + " drop relay->" + out.recipient);
            }
          }
        }
      } else if (Actor* a = actor_for(d->to)) {
        send_to_relay(*a, a->engine->on_message(d->message, d->time_ms));
      }
    }
    net.advance_to(t);

    for (auto& a : actors) {
      if (!a.started) {
        if (t < a.script->join_at_ms) continue;
        a.started = true;
        send_to_relay(a, a.engine->start(t));
      }
      while (a.next_edit < a.script->edits.size() && a.script->edits[a.next_edit].at_ms <= t) {
        std::string what;
        try {
          what = apply_edit(*a.root, a.script->edits[a.next_edit]);
        } catch (const Error&) {
          what.clear();
        }
        ++a.next_edit;
        if (what.empty()) {
          ++report.edits_skipped;
          note("t=" + std::to_string(t) + " " + a.script->id + " skip edit " + std::to_string(a.next_edit));
        } else {
          ++report.edits_applied;
          note("t=" + std::to_string(t) + " " + a.script->id + " " + what);
        }
      }
      while (a.next_random < a.random_times.size() && a.random_times[a.next_random] <= t) {
        ++a.next_random;
        std::string what = random_edit(*a.root, *a.rng);
        if (what.empty()) {
          ++report.edits_skipped;
        } else {
          ++report.edits_applied;
          note("t=" + std::to_string(t) + " " + a.script->id + " " + what);
        }
      }
      a.runtime->scheduler().flush_frame();
      send_to_relay(a, a.engine->on_flush(t));
      send_to_relay(a, a.engine->on_tick(t));
    }

    bool quiet = net.idle();
    for (const auto& a : actors) {
      quiet = quiet && a.started && a.edits_done() && a.engine->settled() &&
              a.engine->last_server_seq() == relay.server_seq(script.session);
    }
    if (quiet) {
      report.quiesced = true;
      break;
    }
    if (t >= horizon) break;
  }

  report.end_time_ms = t;
  report.server_seq = relay.server_seq(script.session);
  if (const StateNode* state = relay.session_state(script.session)) report.relay_state = *state;
  report.state_hash = state_hash(report.relay_state);
  report.messages_sent = net.sent_count();
  report.messages_dropped = net.dropped_count();

  report.converged = report.quiesced;
  for (auto& a : actors) {
    ClientReport c;
    c.id = a.script->id;
    c.state = a.root->session_state();
    c.state_hash = state_hash(c.state);
    c.converged = state_equivalent(c.state, report.relay_state);
    c.last_server_seq = a.engine->last_server_seq();
    c.stats = a.engine->stats();
    const auto& seqs = a.engine->applied_seqs();
    c.causal = std::adjacent_find(seqs.begin(), seqs.end(), std::greater_equal<>()) == seqs.end();
    report.converged = report.converged && c.converged;
    report.clients.push_back(std::move(c));
  }

  std::string joined;
  for (const auto& line : report.trace) joined += line + "\n";
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(joined)));
  report.trace_hash = buf;
  return report;
}

Json SimReport::to_json(bool include_trace) const {
  Json out = Json::object();
  out["converged"] = converged;
  out["quiesced"] = quiesced;
  out["seed"] = seed;
  out["virtualTimeMs"] = end_time_ms;
  out["serverSeq"] = server_seq;
  out["stateHash"] = state_hash;
  out["messages"] = {{"sent", messages_sent}, {"dropped", messages_dropped}};
  out["edits"] = {{"applied", edits_applied}, {"skipped", edits_skipped}};
  Json clients_json = Json::array();
  Json divergence = Json::array();
  for (const auto& c : clients) {
    Json cj = Json::object();
    cj["id"] = c.id;
    cj["converged"] = c.converged;
    cj["causal"] = c.causal;
    cj["stateHash"] = c.state_hash;
    cj["lastServerSeq"] = c.last_server_seq;
    Json sent = Json::object();
    for (const auto& [k, v] : c.stats.sent) sent[k] = v;
    Json received = Json::object();
    for (const auto& [k, v] : c.stats.received) received[k] = v;
    cj["sent"] = std::move(sent);
    cj["received"] = std::move(received);
    cj["retransmits"] = c.stats.retransmits;
    cj["resyncRequests"] = c.stats.resync_requests;
    cj["localFlushes"] = c.stats.local_flushes;
    clients_json.push_back(std::move(cj));
    if (!c.converged) divergence.push_back({{"client", c.id}, {"diff", diff_to_json(diff(relay_state, c.state))}});
  }
  out["clients"] = std::move(clients_json);
  out["divergence"] = std::move(divergence);
  out["state"] = linkstate::to_json(relay_state);
  out["traceHash"] = trace_hash;
  if (include_trace) {
    Json accepted_json = Json::array();
    for (const auto& a : accepted) {
      accepted_json.push_back(
          {{"serverSeq", a.server_seq}, {"sender", a.sender}, {"clientSeq", a.client_seq}, {"diff", diff_to_json(a.diff)}});
    }
    out["accepted"] = std::move(accepted_json);
    out["trace"] = trace;
  }
  return out;
}

}  // namespace linkstate::sync
