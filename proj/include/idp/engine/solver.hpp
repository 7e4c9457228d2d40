#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "idp/engine/ground.hpp"
#include "idp/engine/limits.hpp"

namespace idp::engine {

struct SolveResult {
  bool satisfiable = false;
  std::vector<bool> model;  // indexed by variable; index 0 unused
  std::uint64_t decisions = 0;
};

/// Complete DPLL search: two-watched-literal unit propagation and
/// chronological backtracking. Decisions pick the lowest unassigned
/// variable and try `false` first, so results are deterministic.
class Solver {
 public:
  Solver(int variable_count, const std::vector<Clause>& clauses);

  void add_clause(Clause clause);

  /// Assumptions are fixed before search; an assumption that conflicts with
  /// the clauses makes the call UNSAT. Throws LimitError when the decision
  /// count exceeds `budget.limits.max_decisions` or the stop token fires.
  SolveResult solve(std::span<const Literal> assumptions = {}, const Budget& budget = {});

 private:
  enum : std::int8_t { kUnassigned = -1, kFalse = 0, kTrue = 1 };

  struct Level {
    std::size_t trail_start;
    Literal decision;
    bool flippable;
  };

  static std::size_t slot(Literal l) { return 2 * static_cast<std::size_t>(var_of(l)) + (l < 0 ? 1 : 0); }
  std::int8_t value(Literal l) const {
    const auto v = values_[static_cast<std::size_t>(var_of(l))];
    if (v == kUnassigned) return kUnassigned;
    return (l > 0) == (v == kTrue) ? kTrue : kFalse;
  }

  void reset();
  void assign(Literal l);
  bool propagate(const Budget& budget);
  void undo_to(std::size_t trail_size);

  int variable_count_;
  std::vector<Clause> clauses_;  // length >= 2, watched at positions 0 and 1
  std::vector<Literal> units_;
  bool has_empty_clause_ = false;
  std::vector<std::vector<std::size_t>> watches_;

  std::vector<std::int8_t> values_;
  std::vector<Literal> trail_;
  std::size_t queue_head_ = 0;
  std::vector<Level> levels_;
  std::uint64_t work_ = 0;
};

}  // namespace idp::engine
