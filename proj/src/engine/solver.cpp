#include "idp/engine/solver.hpp"

#include <algorithm>

namespace idp::engine {

Solver::Solver(int variable_count, const std::vector<Clause>& clauses)
    : variable_count_(variable_count),
      watches_(2 * static_cast<std::size_t>(variable_count) + 2),
      values_(static_cast<std::size_t>(variable_count) + 1, kUnassigned) {
  for (const auto& c : clauses) add_clause(c);
}

void Solver::add_clause(Clause clause) {
  std::sort(clause.begin(), clause.end());
  clause.erase(std::unique(clause.begin(), clause.end()), clause.end());
  for (std::size_t i = 0; i + 1 < clause.size(); ++i) {
    // Sorted, so x and -x can only meet through a binary search.
    if (std::binary_search(clause.begin(), clause.end(), -clause[i])) return;  // tautology
  }
  if (clause.empty()) {
    has_empty_clause_ = true;
    return;
  }
  if (clause.size() == 1) {
    units_.push_back(clause.front());
    return;
  }
  const auto index = clauses_.size();
  watches_[slot(clause[0])].push_back(index);
  watches_[slot(clause[1])].push_back(index);
  clauses_.push_back(std::move(clause));
}

void Solver::reset() {
  std::fill(values_.begin(), values_.end(), kUnassigned);
  trail_.clear();
  queue_head_ = 0;
  levels_.clear();
}

void Solver::assign(Literal l) {
  values_[static_cast<std::size_t>(var_of(l))] = l > 0 ? kTrue : kFalse;
  trail_.push_back(l);
}

void Solver::undo_to(std::size_t trail_size) {
  while (trail_.size() > trail_size) {
    values_[static_cast<std::size_t>(var_of(trail_.back()))] = kUnassigned;
    trail_.pop_back();
  }
  queue_head_ = std::min(queue_head_, trail_.size());
}

// Returns false on conflict.
bool Solver::propagate(const Budget& budget) {
  while (queue_head_ < trail_.size()) {
    if ((++work_ & 0xFFFF) == 0) budget.stop.poll();
    const Literal falsified = -trail_[queue_head_++];
    auto& watching = watches_[slot(falsified)];
    std::size_t keep = 0;
    for (std::size_t i = 0; i < watching.size(); ++i) {
      const auto ci = watching[i];
      auto& c = clauses_[ci];
      if (c[0] == falsified) std::swap(c[0], c[1]);
      if (value(c[0]) == kTrue) {
        watching[keep++] = ci;
        continue;
      }
      bool moved = false;
      for (std::size_t k = 2; k < c.size(); ++k) {
        if (value(c[k]) != kFalse) {
          std::swap(c[1], c[k]);
          watches_[slot(c[1])].push_back(ci);
          moved = true;
          break;
        }
      }
      if (moved) continue;
      watching[keep++] = ci;
      if (value(c[0]) == kFalse) {
        for (++i; i < watching.size(); ++i) watching[keep++] = watching[i];
        watching.resize(keep);
        return false;
      }
      assign(c[0]);
    }
    watching.resize(keep);
  }
  return true;
}

SolveResult Solver::solve(std::span<const Literal> assumptions, const Budget& budget) {
  reset();
  SolveResult result;
  budget.stop.poll();
  if (has_empty_clause_) return result;
  for (const Literal u : units_) {
    const auto v = value(u);
    if (v == kFalse) return result;
    if (v == kUnassigned) assign(u);
  }
  if (!propagate(budget)) return result;

  for (const Literal a : assumptions) {
    const auto v = value(a);
    if (v == kFalse) return result;
    if (v == kTrue) continue;
    levels_.push_back({trail_.size(), a, false});
    assign(a);
    if (!propagate(budget)) return result;
  }
  const std::size_t base = levels_.size();

  int next = 1;
  while (true) {
    while (next <= variable_count_ && values_[static_cast<std::size_t>(next)] != kUnassigned) ++next;
    if (next > variable_count_) break;

    if (++result.decisions > budget.limits.max_decisions) throw LimitError(LimitKind::decisions);
    if ((result.decisions & 0x3FF) == 0) budget.stop.poll();
    levels_.push_back({trail_.size(), -next, true});
    assign(-next);

    while (!propagate(budget)) {
      // Chronological backtracking: flip the deepest decision not yet flipped.
      while (levels_.size() > base && !levels_.back().flippable) {
        undo_to(levels_.back().trail_start);
        levels_.pop_back();
      }
      if (levels_.size() == base) return result;
      auto& level = levels_.back();
      undo_to(level.trail_start);
      level.decision = -level.decision;
      level.flippable = false;
      assign(level.decision);
      // Every variable below the flipped one was assigned before this level.
      next = var_of(level.decision);
    }
  }

  result.satisfiable = true;
  result.model.assign(static_cast<std::size_t>(variable_count_) + 1, false);
  for (int v = 1; v <= variable_count_; ++v) result.model[static_cast<std::size_t>(v)] = values_[static_cast<std::size_t>(v)] == kTrue;
  return result;
}

}  // namespace idp::engine
