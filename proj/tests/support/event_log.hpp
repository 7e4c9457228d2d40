#pragma once

#include <chrono>
#include <condition_variable>
#include <mutex>
#include <string>
#include <vector>

#include "idp/run/session.hpp"

namespace idp::test {

/// Thread-safe event recorder with blocking waits for tests.
class EventLog {
 public:
  run::EventSink sink() {
    return [this](const run::Event& e) {
      std::lock_guard lock(mutex_);
      events_.push_back(e);
      cv_.notify_all();
    };
  }

  std::vector<run::Event> events() const {
    std::lock_guard lock(mutex_);
    return events_;
  }

  /// Waits until at least `n` events of `kind` have arrived.
  bool wait_for(run::EventKind kind, std::size_t n = 1,
                std::chrono::milliseconds timeout = std::chrono::milliseconds(5000)) {
    std::unique_lock lock(mutex_);
    return cv_.wait_for(lock, timeout, [&] {
      std::size_t count = 0;
      for (const auto& e : events_) count += e.kind == kind;
      return count >= n;
    });
  }

  std::string stdout_text() const { return joined(run::EventKind::out); }
  std::string stderr_text() const { return joined(run::EventKind::err); }

 private:
  std::string joined(run::EventKind kind) const {
    std::lock_guard lock(mutex_);
    std::string out;
    for (const auto& e : events_) {
      if (e.kind == kind) out += e.text;
    }
    return out;
  }

  mutable std::mutex mutex_;
  std::condition_variable cv_;
  std::vector<run::Event> events_;
};

/// (stdout|stderr|ask|viz|limit)* exit
inline bool well_formed(const std::vector<run::Event>& events) {
  if (events.empty() || events.back().kind != run::EventKind::exit) return false;
  for (std::size_t i = 0; i + 1 < events.size(); ++i) {
    if (events[i].kind == run::EventKind::exit) return false;
  }
  return true;
}

}  // namespace idp::test
