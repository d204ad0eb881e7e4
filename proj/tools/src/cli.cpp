#include "cli.hpp"

#include <atomic>
#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "linkstate/error.hpp"
#include "linkstate/history.hpp"
#include "linkstate/qkeys.hpp"
#include "linkstate/state_diff.hpp"
#include "linkstate/state_json.hpp"
#include "linkstate/sync/simulation.hpp"
#include "linkstate/sync/tcp.hpp"
#include "render.hpp"

namespace linkstate::cli {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kFileNotFound, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

StateNode read_state(const std::string& path) {
  try {
    return decode(read_file(path));
  } catch (const Error& e) {
    if (e.code() == Errc::kFileNotFound) throw;
    throw Error(e.code(), path + ": " + e.detail());
  }
}

void print_diagnostics(const Diagnostics& diags, const std::string& source, std::ostream& err) {
  for (const auto& d : diags) {
    err << "warning: " << source << " " << d.path << ": " << errc_name(d.code) << ": " << d.message << "\n";
  }
}

std::atomic<bool> g_interrupted{false};

extern "C" void on_signal(int) { g_interrupted = true; }

struct CsvSpec {
  std::string path;
  std::string key_column;
  std::string value_column;
  std::string key_type;  // empty: take --key-type
};

CsvSpec parse_csv_spec(const std::string& text) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(text);
  while (std::getline(in, part, ':')) parts.push_back(part);
  if (parts.size() < 3 || parts.size() > 4) {
    throw CLI::ValidationError("--csv", "expected path:keyColumn:valueColumn[:keyType], got '" + text + "'");
  }
  for (const auto& p : parts) {
    if (p.empty()) throw CLI::ValidationError("--csv", "empty component in '" + text + "'");
  }
  return {parts[0], parts[1], parts[2], parts.size() == 4 ? parts[3] : std::string()};
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Inspect, diff, replay and synchronize session state.", "linkstate"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "linkstate 0.1.0");

  std::string file_a;
  std::string file_b;
  bool canonical = false;
  auto* inspect = app.add_subcommand("inspect", "Print a state file as a tree");
  inspect->add_option("file", file_a, "State JSON file")->required();
  inspect->add_flag("--canonical", canonical, "Re-emit canonical JSON instead of a tree");

  auto* diff_cmd = app.add_subcommand("diff", "Print the diff turning <a> into <b>");
  diff_cmd->add_option("a", file_a, "Old state")->required();
  diff_cmd->add_option("b", file_b, "New state")->required();

  bool keep_missing = false;
  auto* apply_cmd = app.add_subcommand("apply", "Apply a diff to a state and print the result");
  apply_cmd->add_option("base", file_a, "Base state")->required();
  apply_cmd->add_option("diff", file_b, "Diff JSON")->required();
  apply_cmd->add_flag("--keep-missing", keep_missing, "Keep dynamic entries the diff does not mention");

  std::optional<std::size_t> replay_to;
  bool verify = false;
  auto* replay = app.add_subcommand("replay", "Print the state a history log reaches");
  replay->add_option("log", file_a, "History JSON file")->required();
  replay->add_option("--to", replay_to, "Step index (default: the log's cursor)");
  replay->add_flag("--verify", verify, "Check every step's inverse property");

  std::uint16_t port = 0;
  std::string bind = "127.0.0.1";
  auto* serve = app.add_subcommand("serve", "Run a relay over TCP until interrupted");
  serve->add_option("--port", port, "TCP port (0 picks a free one)")->required();
  serve->add_option("--bind", bind, "IPv4 address to listen on");

  std::optional<std::uint64_t> seed;
  bool realtime = false;
  bool with_trace = false;
  auto* simulate = app.add_subcommand("simulate", "Run a sync simulation script and print its report");
  simulate->add_option("script", file_a, "Simulation script JSON")->required();
  simulate->add_option("--seed", seed, "Override the script's seed");
  simulate->add_flag("--realtime", realtime, "Use local sockets and wall-clock time");
  simulate->add_flag("--trace", with_trace, "Include the delivery trace and relay order in the report");

  std::string key_type;
  std::vector<std::string> csv_specs;
  auto* join = app.add_subcommand("join", "Join CSV columns on qualified keys");
  join->add_option("--key-type", key_type, "Key type of the joined table")->required();
  join->add_option("--csv", csv_specs, "path:keyColumn:valueColumn[:keyType]")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*inspect) {
      const StateNode state = read_state(file_a);
      out << (canonical ? encode(state) + "\n" : render_tree(state));
    } else if (*diff_cmd) {
      out << encode_diff(diff(read_state(file_a), read_state(file_b))) << "\n";
    } else if (*apply_cmd) {
      const StateNode base = read_state(file_a);
      const StateDiff d = decode_diff(read_file(file_b));
      out << encode(apply(base, d, !keep_missing)) << "\n";
    } else if (*replay) {
      const SessionHistory log = SessionHistory::import_log(read_file(file_a));
      const std::size_t index = replay_to.value_or(log.cursor());
      const StateNode state = log.state_at(index);
      if (verify) {
        const auto failures = log.verify();
        if (!failures.empty()) {
          for (auto i : failures) err << "error: step " << i << " violates the inverse property\n";
          return kExitDomain;
        }
        err << "verify: " << log.size() << " steps ok\n";
      }
      out << encode(state) << "\n";
    } else if (*serve) {
      sync::RelayServer server(port, bind);
      g_interrupted = false;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      out << "listening on " << bind << ":" << server.port() << std::endl;
      std::thread watcher([&] {
        while (!g_interrupted) std::this_thread::sleep_for(std::chrono::milliseconds(50));
        server.stop();
      });
      server.run();
      g_interrupted = true;
      watcher.join();
    } else if (*simulate) {
      const sync::SimScript script = sync::load_script(file_a);
      const sync::SimReport report =
          realtime ? sync::run_realtime_simulation(script, seed) : sync::run_simulation(script, seed);
      out << report.to_text(with_trace);
      if (!report.converged) {
        err << "error: simulation did not converge\n";
        return kExitDomain;
      }
    } else if (*join) {
      qkeys::KeyManager keys;
      std::vector<qkeys::CsvColumn> loaded;
      for (const auto& text : csv_specs) {
        const CsvSpec spec = parse_csv_spec(text);
        loaded.push_back(qkeys::load_csv_column(keys, spec.path, spec.key_column, spec.value_column,
                                                spec.key_type.empty() ? key_type : spec.key_type));
        print_diagnostics(loaded.back().diagnostics, spec.path, err);
      }
      std::vector<const qkeys::KeyedColumn*> columns;
      for (const auto& c : loaded) {
        if (c.column.key_type() != key_type) {
          throw Error(Errc::kKeyTypeMismatch, "column '" + c.column.title() + "' has key type '" +
                                                  c.column.key_type() + "', expected '" + key_type + "'");
        }
        columns.push_back(&c.column);
      }
      out << qkeys::join_columns(columns).to_csv();
    }
  } catch (const CLI::ValidationError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomain;
  }
  return kExitOk;
}

}  // namespace linkstate::cli
