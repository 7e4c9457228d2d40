// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <httplib.h>

#include <chrono>
#include <csignal>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "idp/engine/inference.hpp"
#include "idp/lang/parser.hpp"
#include "idp/lang/printer.hpp"
#include "idp/lang/resolver.hpp"
#include "idp/lang/token.hpp"
#include "idp/run/session.hpp"
#include "idp/server/api.hpp"
#include "idp/share/share.hpp"
#include "support/engine_check.hpp"
#include "support/event_log.hpp"
#include "support/fixtures.hpp"
#include "support/live_server.hpp"
#include "support/random_program.hpp"
#include "support/random_text.hpp"
#include "support/temp_dir.hpp"
#include "support/ws_client.hpp"

namespace {

using namespace idp;
using namespace std::chrono_literals;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  std::ostringstream failures;

  void require(bool ok, const std::string& what) {
    if (ok) return;
    failures << what;
    pass = false;
  }
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// ---------------------------------------------------------------------------

void penguin_core(Outcome& o) {
  const auto start = Clock::now();
  const auto analysis = lang::analyze({{"main.idp", test::kPenguinProgram}});
  o.require(analysis.program.has_value(), "fixture does not resolve");
  if (!analysis.program) return;
  const auto& program = *analysis.program;
  const auto structure = engine::structure_from(program, *program.structure("S"));
  const auto core = engine::unsatcore(*program.theory("T"), structure);
  const double elapsed = seconds_since(start);
  o.require(core.has_value(), "no core returned");
  if (!core) return;
  o.require(core->items.size() == 1, "core has " + std::to_string(core->items.size()) + " instantiations");
  if (core->items.size() == 1) {
    const auto& item = core->items[0];
    o.require(item.sentence == 1, "core sentence is " + std::to_string(item.sentence));
    o.require(item.substitution.size() == 1 && item.substitution[0].first == "x" &&
                  item.substitution[0].second == "penguin",
              "substitution is " + item.substitution_text);
    o.require(item.substitution_text == "x = penguin", "rendered as " + item.substitution_text);
  }
  o.require(elapsed < 1.0, "took " + std::to_string(elapsed) + " s");
  o.detail << "1 instantiation (sentence 1, x = penguin) in " << elapsed * 1000 << " ms";
}

// ---------------------------------------------------------------------------

void engine_vs_oracle(Outcome& o) {
  const auto start = Clock::now();
  std::mt19937 rng(20240501);
  test::RandomInstanceOptions options;  // domains <= 3, <= 3 predicates of arity <= 2, <= 4 sentences
  test::CheckStats stats;
  int mismatches = 0;
  for (int i = 0; i < 500; ++i) {
    const auto instance = test::random_instance(rng, options);
    const auto error = test::check_against_oracle(instance.text, &stats);
    if (!error.empty()) {
      if (mismatches++ == 0) o.require(false, "instance " + std::to_string(i) + ": " + error + "; ");
    }
  }
  const double elapsed = seconds_since(start);
  o.require(mismatches == 0, "");
  o.require(elapsed < 60.0, "took " + std::to_string(elapsed) + " s");
  o.detail << "500 instances (" << stats.consistent << " consistent, " << stats.inconsistent << " inconsistent, "
           << stats.models << " models), " << mismatches << " mismatches, " << elapsed << " s";
}

// ---------------------------------------------------------------------------

void lexer_parser_fuzz(Outcome& o) {
  std::mt19937 rng(99);
  int lossless = 0, round_trips = 0, parsed = 0;
  for (int i = 0; i < 1000; ++i) {
    std::string text;
    switch (i % 4) {
      case 0: text = test::random_bytes(rng, 80); break;
      case 1: text = test::random_source(rng, 60); break;
      case 2: text = test::random_instance(rng).text; break;
      default: text = test::random_procedure(rng, 4); break;
    }
    const auto tokens = lang::tokenize(text);
    std::string joined;
    lang::Position at;
    bool positions_ok = true;
    for (const auto& t : tokens) {
      joined += t.lexeme;
      positions_ok = positions_ok && !t.lexeme.empty() && t.line == at.line && t.col == at.col;
      at = lang::position_after(at, t.lexeme);
      positions_ok = positions_ok && t.end_line == at.line && t.end_col == at.col;
    }
    if (joined == text && positions_ok) {
      ++lossless;
    } else {
      o.require(false, "lexing is lossy on input " + std::to_string(i));
    }

    const auto result = lang::parse(text);  // a crash ends the whole binary
    ++parsed;
    if (i % 4 >= 2) o.require(result.ok(), "generated program " + std::to_string(i) + " does not parse");
    if (result.ok()) {
      const auto printed = lang::print(result.program);
      const auto again = lang::parse(printed);
      if (again.ok() && lang::without_locations(again.program) == lang::without_locations(result.program) &&
          lang::print(again.program) == printed) {
        ++round_trips;
      } else {
        o.require(false, "print/parse round trip differs on input " + std::to_string(i));
      }
    }
  }
  o.detail << "1000 inputs: " << lossless << " lossless, " << parsed << " parsed without crashing, " << round_trips
           << " round trips";
}

// ---------------------------------------------------------------------------

struct CheckFixture {
  std::string name;
  std::string content;
  json expected;  // [[severity, line, col, end_line, end_col], ...] sorted
};

// Ranges below were counted by hand, 1-based, in code points, end exclusive.
std::vector<CheckFixture> check_fixtures() {
  return {
      {"clean.idp", test::kPenguinProgram, json::array()},
      {"missing_period.idp", "vocabulary V { type A p }\ntheory T : V {\n    p\n}\n",
       {{"error", 4, 1, 4, 2}}},
      {"unknown_predicate.idp", "vocabulary V { type Animal fly(Animal) }\ntheory T : V { !x: flies(x). }\n",
       {{"error", 2, 20, 2, 25}, {"warning", 1, 28, 1, 31}}},
      {"missing_colon.idp", "vocabulary V { type A fly(A) }\ntheory T : V { !x fly(x). }\n",
       {{"error", 2, 19, 2, 22}}},
      {"unicode.idp", "vocabulary V { type A p(A) }\n// \xe2\x88\x80 \xce\xbb comment\ntheory T : V { \xe2\x88\x80x: q(x). }\n",
       {{"error", 3, 20, 3, 21}, {"warning", 1, 23, 1, 24}}},
      {"shadowing.idp", "vocabulary V { type A p(A) }\ntheory T : V { !x: p(x) & (?x: p(x)). }\n",
       {{"warning", 2, 29, 2, 30}}},
      {"unknown_type.idp", "vocabulary V { type A p(B) }\n",
       {{"error", 1, 25, 1, 26}, {"warning", 1, 21, 1, 22}, {"warning", 1, 23, 1, 24}}},
      {"end_of_input.idp", "vocabulary V {\n  type A", {{"error", 2, 9, 2, 9}}},
      {"unknown_element.idp",
       "vocabulary V {\n    type A\n    p(A)\n}\ntheory T : V { !x: p(x). }\nstructure S : V {\n"
       "    A = { a; b }\n    p = { c }\n}\n",
       {{"error", 8, 11, 8, 12}}},
      {"stray_character.idp", "vocabulary V { type A }\n\ttheory T : V { @ }\n", {{"error", 2, 17, 2, 18}}},
  };
}

json observed_diagnostics(const json& diagnostics) {
  json out = json::array();
  for (const auto& d : diagnostics) {
    out.push_back({d["severity"], d["range"]["line"], d["range"]["col"], d["range"]["end_line"], d["range"]["end_col"]});
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Every regular file below `root` with its content.
std::map<std::string, std::string> snapshot(const std::filesystem::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root)) {
    std::string content = "<dir>";
    if (e.is_regular_file()) {
      std::ifstream in(e.path(), std::ios::binary);
      content.assign(std::istreambuf_iterator<char>(in), {});
    }
    out[std::filesystem::relative(e.path(), root).generic_string()] = content;
  }
  return out;
}

class CountingFs : public server::RealFileSystem {
 public:
  void write_atomic(const std::filesystem::path& file, const std::string& content) override {
    ++writes;
    RealFileSystem::write_atomic(file, content);
  }
  std::atomic<int> writes{0};
};

void rest_contract(Outcome& o) {
  test::TempDir dir;
  int matched = 0;
  {
    test::LiveServer local(dir.path());
    httplib::Client http("127.0.0.1", local.port());
    for (const auto& f : check_fixtures()) {
      const json body = {{"files", {{{"name", f.name}, {"content", f.content}}}}};
      const auto r = http.Post("/api/check", body.dump(), "application/json");
      if (!r || r->status != 200) {
        o.require(false, f.name + ": no 200 response; ");
        continue;
      }
      const auto got = observed_diagnostics(json::parse(r->body)["diagnostics"]);
      bool files_ok = true;
      for (const auto& d : json::parse(r->body)["diagnostics"]) files_ok = files_ok && d["file"] == f.name;
      if (got == f.expected && files_ok) {
        ++matched;
      } else {
        o.require(false, f.name + ": expected " + f.expected.dump() + " got " + got.dump() + "; ");
      }
    }
    // Traversal attempts.
    int traversal = 0;
    const std::vector<std::string> attempts = {"../etc/passwd", "..%2F..%2Fetc%2Fpasswd", "%2Fetc%2Fpasswd",
                                               "a/../../x", "..\\x"};
    for (const auto& p : attempts) {
      const auto get = http.Get("/api/file?path=" + p);
      traversal += get && get->status == 400;
      const auto put = http.Put("/api/file", json({{"path", httplib::detail::decode_url(p, true)}, {"content", "x"}}).dump(),
                                "application/json");
      traversal += put && put->status == 400;
    }
    o.require(traversal == static_cast<int>(2 * attempts.size()),
              std::to_string(traversal) + "/" + std::to_string(2 * attempts.size()) + " traversal requests got 400; ");
    o.detail << matched << "/10 fixtures match hand-computed ranges, " << traversal << "/" << 2 * attempts.size()
             << " traversal requests rejected with 400";
  }

  // Online mode: PUT is refused and nothing on disk changes, checked both
  // through an instrumented file system and by comparing directory contents.
  test::write_file(dir.path() / "workspace/main.idp", test::kPenguinProgram);
  const auto before = snapshot(dir.path());
  {
    server::ServerConfig c;
    c.workspace = dir.path() / "workspace";
    c.web_root = dir.path() / "web";
    c.tutorials = dir.path() / "tutorials";
    c.mode = server::Mode::online;
    c.limits = run::ResourceLimits::online();
    c.port = 0;
    CountingFs fs;
    server::Server online(c, fs, server::make_share_backend(c));
    online.start();
    httplib::Client http("127.0.0.1", online.port());
    int forbidden = 0;
    for (const std::string path : {"main.idp", "new.idp", "sub/dir/new.idp", "shares/x.json"}) {
      const auto r = http.Put("/api/file", json({{"path", path}, {"content", "changed"}}).dump(), "application/json");
      forbidden += r && r->status == 403;
    }
    const auto share = http.Post("/api/share", json({{"files", {{{"name", "a"}, {"content", "b"}}}}}).dump(),
                                 "application/json");
    online.stop();
    o.require(forbidden == 4, std::to_string(forbidden) + "/4 online PUTs got 403; ");
    o.require(fs.writes == 0, std::to_string(fs.writes.load()) + " writes through the file system; ");
    o.require(share && share->status == 403, "online share through the local store was not refused; ");
    o.detail << ", online PUT 403 x" << forbidden << " with " << fs.writes << " writes";
  }
  o.require(snapshot(dir.path()) == before, "the directory changed in online mode; ");
}

// ---------------------------------------------------------------------------

std::string program_file(const std::string& body) { return "procedure main() {\n" + body + "\n}\n"; }

json start_message(const std::string& mode, const std::string& program) {
  return {{"type", "start"}, {"mode", mode}, {"files", {{{"name", "main.idp"}, {"content", program}}}}};
}

void session_properties(Outcome& o) {
  // Event grammar over a spread of endings, in process.
  struct Case {
    run::Mode mode;
    std::string program;
    std::vector<std::string> input;
    bool kill;
    run::ResourceLimits limits;
  };
  auto small = run::ResourceLimits::local();
  small.output_bytes_max = 100;
  small.ground_atoms_max = 1;
  auto wall = run::ResourceLimits::online();
  wall.wall_ms = 50;
  const std::string infinite = program_file("    while true { }");
  const std::vector<Case> cases = {
      {run::Mode::main, program_file("    print(\"hi\")"), {}, false, run::ResourceLimits::local()},
      {run::Mode::main, program_file("    x := ask(\"?\")\n    print(x)"), {"a"}, false, run::ResourceLimits::local()},
      {run::Mode::main, "procedure main() { nonsense(", {}, false, run::ResourceLimits::local()},
      {run::Mode::main, program_file("    print(1 / 0)"), {}, false, run::ResourceLimits::local()},
      {run::Mode::main, infinite, {}, true, run::ResourceLimits::local()},
      {run::Mode::main, infinite, {}, false, wall},
      {run::Mode::main, program_file("    while true { print(\"spam\") }"), {}, false, small},
      {run::Mode::main, test::kPenguinProgram + program_file("    modelexpand(T, S)"), {}, false, small},
      {run::Mode::main, program_file("    x := ask(\"?\")"), {}, true, run::ResourceLimits::local()},
      {run::Mode::shell, test::kPenguinProgram, {"unsatcore(T, S)", "bad(", "exit(3)"}, false, run::ResourceLimits::local()},
      {run::Mode::shell, "", {"while true { }"}, false, wall},
      {run::Mode::shell, "", {}, true, run::ResourceLimits::local()},
  };
  int well_formed = 0, limited = 0, killed = 0;
  for (const auto& c : cases) {
    test::EventLog log;
    run::Run r({c.mode, {{"main.idp", c.program}}, "main", c.limits}, log.sink());
    for (const auto& line : c.input) r.send_input(line);
    if (c.kill) {
      std::this_thread::sleep_for(20ms);
      r.kill();
    }
    if (!r.wait_for(10s)) {
      o.require(false, "a run did not finish; ");
      r.kill();
      r.wait();
    }
    const auto events = log.events();
    well_formed += test::well_formed(events);
    for (const auto& e : events) {
      if (e.kind == run::EventKind::limit) (e.text == "killed" ? killed : limited) += 1;
    }
  }
  o.require(well_formed == static_cast<int>(cases.size()), "event grammar violated; ");

  // Wall limit on an infinite shell loop, over the WebSocket.
  test::TempDir dir;
  auto limits = run::ResourceLimits::online();
  limits.wall_ms = 100;
  test::LiveServer server(dir.path(), server::Mode::online, limits);
  double wall_seconds = 99;
  {
    test::WsClient ws(server.port());
    ws.send(start_message("shell", ""));
    const auto prompt = ws.next();
    const auto start = Clock::now();
    ws.send({{"type", "stdin"}, {"data", "while true { }"}});
    const auto messages = ws.read_until_close();
    wall_seconds = seconds_since(start);
    const bool shape = messages.size() >= 2 && messages[messages.size() - 2] == json({{"type", "limit"}, {"kind", "wall"}}) &&
                       messages.back() == json({{"type", "exit"}, {"code", 2}});
    o.require(prompt.has_value() && shape && test::wire_well_formed(messages), "shell loop did not end in limit(wall)+exit(2); ");
    o.require(wall_seconds < 1.0, "shell loop took " + std::to_string(wall_seconds) + " s; ");
  }

  // 20 concurrent sessions, each with its own tag in every line.
  constexpr int kSessions = 20, kLines = 50;
  std::vector<std::string> outputs(kSessions);
  std::vector<bool> shapes(kSessions, false);
  std::vector<std::thread> threads;
  const std::string tagged = program_file(
      "    tag := ask(\"tag?\")\n    n := 0\n    while n < " + std::to_string(kLines) +
      " {\n        print(tag + \":\" + n)\n        n := n + 1\n    }");
  for (int i = 0; i < kSessions; ++i) {
    threads.emplace_back([&, i] {
      try {
        test::WsClient ws(server.port());
        ws.send(start_message("main", tagged));
        const auto ask = ws.next();
        ws.send({{"type", "stdin"}, {"data", "s" + std::to_string(i)}});
        const auto messages = ws.read_until_close();
        outputs[i] = test::joined(messages, "stdout");
        shapes[i] = ask && (*ask)["type"] == "ask" && test::wire_well_formed(messages) && messages.back()["code"] == 0;
      } catch (const std::exception& e) {
        outputs[i] = std::string("client error: ") + e.what();
      }
    });
  }
  for (auto& t : threads) t.join();
  int clean = 0;
  for (int i = 0; i < kSessions; ++i) {
    std::string expected;
    for (int n = 0; n < kLines; ++n) expected += "s" + std::to_string(i) + ":" + std::to_string(n) + "\n";
    clean += outputs[i] == expected && shapes[i];
  }
  o.require(clean == kSessions, std::to_string(kSessions - clean) + " sessions saw foreign or missing output; ");
  o.detail << well_formed << "/" << cases.size() << " runs well formed (" << limited << " limit, " << killed
           << " killed), shell loop stopped after " << wall_seconds * 1000 << " ms, " << clean << "/" << kSessions
           << " concurrent sessions isolated";
}

// ---------------------------------------------------------------------------

void share_round_trip(Outcome& o) {
  test::TempDir dir;
  const json files = {
      {{"name", "main.idp"}, {"content", test::kPenguinProgram}},
      {{"name", "notes.txt"}, {"content", "crlf\r\nline\ttab \xe2\x88\x80 \xf0\x9f\x90\xa7 trailing space \n\n"}},
      {{"name", "empty.idp"}, {"content", ""}},
  };
  std::string id;
  {
    test::LiveServer first(dir.path());
    httplib::Client http("127.0.0.1", first.port());
    const auto r = http.Post("/api/share", json({{"files", files}}).dump(), "application/json");
    o.require(r && r->status == 200, "create failed; ");
    if (r && r->status == 200) id = json::parse(r->body)["id"];
  }
  {
    test::LiveServer second(dir.path());
    httplib::Client http("127.0.0.1", second.port());
    const auto r = http.Get("/api/share/" + id);
    o.require(r && r->status == 200, "fetch after restart failed; ");
    if (r && r->status == 200) {
      o.require(json::parse(r->body)["files"] == files, "fetched files differ; ");
    }
  }

  const auto start = Clock::now();
  share::LocalStore store(dir.path() / "bulk");
  std::set<std::string> ids;
  int invalid = 0;
  for (int i = 0; i < 100000; ++i) {
    const auto created = store.create({{"f", std::to_string(i)}});
    invalid += !share::is_valid_id(created);
    ids.insert(created);
  }
  o.require(ids.size() == 100000, std::to_string(100000 - ids.size()) + " colliding ids; ");
  o.require(invalid == 0, std::to_string(invalid) + " malformed ids; ");
  int spot_checked = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto& any = *std::next(ids.begin(), i * 97);
    spot_checked += store.fetch(any).files.size() == 1;
  }
  o.require(spot_checked == 1000, "stored records do not read back; ");
  o.detail << "share " << id << " byte-identical after restart, " << ids.size() << " distinct ids from 100000 creations in "
           << seconds_since(start) << " s";
}

}  // namespace

int main() {
  std::signal(SIGPIPE, SIG_IGN);
  spdlog::set_level(spdlog::level::warn);
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
      {"penguin-core", penguin_core},
      {"engine-vs-oracle", engine_vs_oracle},
      {"lexer-parser-fuzz", lexer_parser_fuzz},
      {"rest-contract", rest_contract},
      {"session-properties", session_properties},
      {"share-round-trip", share_round_trip},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      check(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail.str();
    if (!o.pass) std::cout << " | " << o.failures.str();
    std::cout << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
