#include "idp/engine/limits.hpp"

namespace idp::engine {

const char* to_string(LimitKind kind) {
  switch (kind) {
    case LimitKind::wall: return "wall";
    case LimitKind::output: return "output";
    case LimitKind::killed: return "killed";
    case LimitKind::ground_atoms: return "ground_atoms";
    case LimitKind::decisions: return "decisions";
  }
  return "wall";
}

LimitError::LimitError(LimitKind kind)
    : std::runtime_error(std::string("limit exceeded: ") + to_string(kind)), kind_(kind) {}

StopToken StopToken::with_deadline(std::chrono::milliseconds budget) {
  return StopToken(nullptr, std::chrono::steady_clock::now() + budget);
}

StopReason StopToken::reason() const {
  if (flag_) {
    if (auto r = flag_->load(std::memory_order_relaxed); r != 0) return static_cast<StopReason>(r);
  }
  if (deadline_ && std::chrono::steady_clock::now() >= *deadline_) return StopReason::wall;
  return StopReason::none;
}

void StopToken::poll() const {
  switch (reason()) {
    case StopReason::none: return;
    case StopReason::wall: throw LimitError(LimitKind::wall);
    case StopReason::killed: throw LimitError(LimitKind::killed);
  }
}

void StopSource::request_stop(StopReason reason) {
  int expected = 0;
  flag_->compare_exchange_strong(expected, static_cast<int>(reason));
}

}  // namespace idp::engine
