#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

namespace idp::engine {

enum class LimitKind { wall, output, killed, ground_atoms, decisions };

const char* to_string(LimitKind kind);

class LimitError : public std::runtime_error {
 public:
  explicit LimitError(LimitKind kind);
  LimitKind kind() const { return kind_; }

 private:
  LimitKind kind_;
};

struct EngineLimits {
  std::size_t ground_atoms_max = 100'000;
  std::uint64_t max_decisions = 1'000'000;
};

enum class StopReason : int { none = 0, wall = 1, killed = 2 };

/// Read side of a cooperative cancellation flag, optionally with a deadline.
/// Long-running engine loops call poll(), which throws LimitError once a stop
/// was requested or the deadline has passed.
class StopToken {
 public:
  StopToken() = default;
  StopToken(std::shared_ptr<const std::atomic<int>> flag,
            std::optional<std::chrono::steady_clock::time_point> deadline)
      : flag_(std::move(flag)), deadline_(deadline) {}

  static StopToken with_deadline(std::chrono::milliseconds budget);

  StopReason reason() const;
  void poll() const;

 private:
  std::shared_ptr<const std::atomic<int>> flag_;
  std::optional<std::chrono::steady_clock::time_point> deadline_;
};

class StopSource {
 public:
  StopSource() : flag_(std::make_shared<std::atomic<int>>(0)) {}

  /// The first request wins; later ones keep the original reason.
  void request_stop(StopReason reason);
  StopReason reason() const { return static_cast<StopReason>(flag_->load()); }
  StopToken token(std::optional<std::chrono::steady_clock::time_point> deadline = std::nullopt) const {
    return StopToken(flag_, deadline);
  }

 private:
  std::shared_ptr<std::atomic<int>> flag_;
};

/// Everything an inference needs besides its inputs.
struct Budget {
  EngineLimits limits;
  StopToken stop;
};

}  // namespace idp::engine
