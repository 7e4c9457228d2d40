#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "idp/engine/limits.hpp"
#include "idp/lang/resolver.hpp"

namespace idp::run {

struct ResourceLimits {
  std::int64_t wall_ms = 0;  // compute time; 0 means unlimited
  std::size_t output_bytes_max = 1'048'576;
  std::size_t max_models = 100;
  std::size_t ground_atoms_max = 100'000;
  std::uint64_t max_decisions = 1'000'000;

  static ResourceLimits online() { return {10'000}; }
  static ResourceLimits local() { return {0}; }
};

struct VizCommand {
  enum class Kind { grid, cell, label } kind = Kind::grid;
  int x = 0;  // width for grid
  int y = 0;  // height for grid
  std::string text;  // color for cell, text for label
  friend bool operator==(const VizCommand&, const VizCommand&) = default;
};

enum class EventKind { out, err, ask, viz, limit, exit };

/// "stdout", "stderr", "ask", "viz", "limit" or "exit".
const char* to_string(EventKind kind);

struct Event {
  EventKind kind = EventKind::out;
  std::string text;  // data, prompt or limit kind
  std::vector<VizCommand> viz;
  int code = 0;
  friend bool operator==(const Event&, const Event&) = default;
};

using EventSink = std::function<void(const Event&)>;

enum class Mode { main, shell };

struct RunRequest {
  Mode mode = Mode::main;
  std::vector<lang::SourceFile> files;
  std::string entry = "main";
  ResourceLimits limits;
};

/// One execution of a procedure or of the shell on its own worker thread.
/// Events reach the sink in order, from the worker thread, and the last one
/// is always exactly one `exit`.
class Run {
 public:
  Run(RunRequest request, EventSink sink);
  ~Run();
  Run(const Run&) = delete;
  Run& operator=(const Run&) = delete;

  /// Answers the oldest pending or future `ask`.
  void send_input(std::string line);
  /// Delivers a click to the oldest pending or future `onclick`. Without a
  /// grid, or outside it, the click is dropped with a warning on stderr.
  void send_click(int x, int y);
  /// Stops the run: limit(killed) and exit(2) unless it already ended.
  void kill();

  bool finished() const;
  /// Blocks until the exit event has been delivered.
  void wait();
  /// As wait(), giving up after `timeout`; true when the run finished.
  bool wait_for(std::chrono::milliseconds timeout);

  struct State;

 private:
  std::shared_ptr<State> state_;
  std::thread worker_;
  std::thread watchdog_;
};

/// Live runs by unguessable id; safe for concurrent use.
class SessionRegistry {
 public:
  /// Starts a run and returns its id (32 hex characters from a secure source).
  std::string start(RunRequest request, EventSink sink);
  std::shared_ptr<Run> find(const std::string& id) const;
  /// Kills and forgets the run.
  void remove(const std::string& id);
  std::size_t size() const;
  /// Runs that have not delivered their exit event yet.
  std::size_t active() const;
  /// Kills every run and waits for their exit events; later starts throw.
  void shutdown();

 private:
  mutable std::mutex mutex_;
  bool closed_ = false;
  std::map<std::string, std::shared_ptr<Run>> runs_;
};

}  // namespace idp::run
