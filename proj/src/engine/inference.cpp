#include "idp/engine/inference.hpp"

#include <stdexcept>

#include "idp/engine/solver.hpp"

namespace idp::engine {

namespace {

Clause blocking_clause(const GroundProblem& problem, const std::vector<bool>& model) {
  Clause clause;
  for (int v = 1; v <= problem.atom_count(); ++v) clause.push_back(model[static_cast<std::size_t>(v)] ? -v : v);
  return clause;
}

}  // namespace

std::vector<PartialStructure> modelexpand(const lang::TheoryBlock& theory, const PartialStructure& structure,
                                          std::size_t max_models, const Budget& budget) {
  if (max_models == 0) throw std::invalid_argument("max_models must be at least 1");
  const auto problem = ground(theory, structure, budget);
  Solver solver(problem.variable_count, problem.clauses);
  std::vector<PartialStructure> models;
  while (models.size() < max_models) {
    const auto result = solver.solve({}, budget);
    if (!result.satisfiable) break;
    models.push_back(structure_from_model(problem, structure, result.model));
    // Without atoms there is exactly one model.
    if (problem.atom_count() == 0) break;
    solver.add_clause(blocking_clause(problem, result.model));
  }
  return models;
}

std::optional<PartialStructure> propagate(const lang::TheoryBlock& theory, const PartialStructure& structure,
                                          const Budget& budget) {
  const auto problem = ground(theory, structure, budget);
  Solver solver(problem.variable_count, problem.clauses);
  const auto first = solver.solve({}, budget);
  if (!first.satisfiable) return std::nullopt;

  // Candidates are atoms the input leaves open. A model that disagrees with
  // the first one on a candidate proves that candidate is not entailed.
  const auto& reference = first.model;
  std::vector<bool> open(static_cast<std::size_t>(problem.atom_count()) + 1, false);
  for (int v = 1; v <= problem.atom_count(); ++v) {
    const auto& atom = problem.atoms[static_cast<std::size_t>(v - 1)];
    open[static_cast<std::size_t>(v)] = atom.kind == AtomRef::Kind::constant ||
                                        structure.value(atom.symbol, atom.index) == Truth::unknown;
  }
  std::vector<bool> entailed(open.size(), false);
  for (int v = 1; v <= problem.atom_count(); ++v) {
    const auto index = static_cast<std::size_t>(v);
    if (!open[index]) continue;
    const Literal flipped = reference[index] ? -v : v;
    const auto result = solver.solve(std::span<const Literal>(&flipped, 1), budget);
    if (!result.satisfiable) {
      entailed[index] = true;
      continue;
    }
    for (int w = v + 1; w <= problem.atom_count(); ++w) {
      const auto wi = static_cast<std::size_t>(w);
      if (open[wi] && result.model[wi] != reference[wi]) open[wi] = false;
    }
  }

  PartialStructure out = structure;
  for (int v = 1; v <= problem.atom_count(); ++v) {
    const auto index = static_cast<std::size_t>(v);
    if (!entailed[index]) continue;
    const auto& atom = problem.atoms[index - 1];
    if (atom.kind == AtomRef::Kind::predicate) {
      out.set(atom.symbol, atom.index, reference[index] ? Truth::yes : Truth::no);
    } else if (reference[index]) {
      out.set_constant(atom.symbol, atom.index);
    }
  }
  return out;
}

std::optional<UnsatCore> unsatcore(const lang::TheoryBlock& theory, const PartialStructure& structure,
                                   const Budget& budget) {
  const auto problem = ground(theory, structure, budget);

  // One selector variable per instantiation guards its clauses, so that a
  // subset of instantiations is "switched on" through assumptions.
  const int selector_base = problem.variable_count;
  const auto count = problem.instantiations.size();
  std::vector<Clause> guarded;
  guarded.reserve(problem.clauses.size());
  for (std::size_t i = 0; i < problem.clauses.size(); ++i) {
    Clause c = problem.clauses[i];
    const auto& origin = problem.provenance[i];
    if (origin.origin == Origin::theory) c.push_back(-(selector_base + origin.instantiation + 1));
    guarded.push_back(std::move(c));
  }
  Solver solver(selector_base + static_cast<int>(count), guarded);

  std::vector<bool> active(count, true);
  auto satisfiable_with = [&](std::size_t skip) {
    std::vector<Literal> assumptions;
    for (std::size_t i = 0; i < count; ++i) {
      if (active[i] && i != skip) assumptions.push_back(selector_base + static_cast<int>(i) + 1);
    }
    return solver.solve(assumptions, budget).satisfiable;
  };

  if (satisfiable_with(count)) return std::nullopt;
  for (std::size_t i = 0; i < count; ++i) {
    if (!satisfiable_with(i)) active[i] = false;
  }

  UnsatCore core{theory.name.text, theory.file, {}};
  for (std::size_t i = 0; i < count; ++i) {
    if (!active[i]) continue;
    const auto& inst = problem.instantiations[i];
    core.items.push_back({inst.sentence, inst.range, inst.substitution, inst.render()});
  }
  // The structure alone is inconsistent (cannot happen for resolved input,
  // which rejects contradictory facts), so there is nothing to blame.
  if (core.items.empty()) throw std::logic_error("structure is inconsistent on its own");
  return core;
}

namespace {

using Env = std::vector<std::pair<std::string, std::size_t>>;

std::size_t term_value(const lang::Term& t, const PartialStructure& s, const Env& env) {
  if (t.kind == lang::TermKind::variable) {
    for (auto it = env.rbegin(); it != env.rend(); ++it) {
      if (it->first == t.name.text) return it->second;
    }
    throw std::logic_error("unbound variable " + t.name.text);
  }
  const auto& constants = s.vocabulary().constants;
  const auto* c = s.vocabulary().constant(t.name.text);
  if (!c) throw std::logic_error("unresolved term " + t.name.text);
  const auto value = s.constant(static_cast<std::size_t>(c - constants.data()));
  if (!value) throw std::invalid_argument("constant " + t.name.text + " is not interpreted");
  return *value;
}

bool eval(const lang::Formula& f, const PartialStructure& s, Env& env) {
  using K = lang::FormulaKind;
  switch (f.kind) {
    case K::truth: return f.value;
    case K::atom: {
      const auto p = s.predicate_index(f.symbol.text);
      std::vector<std::size_t> elements;
      for (const auto& t : f.terms) elements.push_back(term_value(t, s, env));
      const auto v = s.value(p, s.atom_index(p, elements));
      if (v == Truth::unknown) throw std::invalid_argument("structure is not total");
      return v == Truth::yes;
    }
    case K::equality: return term_value(f.terms[0], s, env) == term_value(f.terms[1], s, env);
    case K::negation: return !eval(f.operands[0], s, env);
    case K::conjunction: return eval(f.operands[0], s, env) && eval(f.operands[1], s, env);
    case K::disjunction: return eval(f.operands[0], s, env) || eval(f.operands[1], s, env);
    case K::implication: return !eval(f.operands[0], s, env) || eval(f.operands[1], s, env);
    case K::equivalence: return eval(f.operands[0], s, env) == eval(f.operands[1], s, env);
    case K::universal:
    case K::existential: {
      const bool universal = f.kind == K::universal;
      // Iterate over all assignments of the quantified variables.
      std::vector<std::size_t> choice(f.variables.size(), 0);
      std::vector<std::size_t> sizes;
      for (const auto& v : f.variables) sizes.push_back(s.domain(v.type).size());
      const auto depth = env.size();
      while (true) {
        env.resize(depth);
        for (std::size_t k = 0; k < choice.size(); ++k) env.emplace_back(f.variables[k].name.text, choice[k]);
        const bool holds = eval(f.operands[0], s, env);
        if (holds != universal) {
          env.resize(depth);
          return !universal;
        }
        std::size_t k = choice.size();
        while (k-- > 0) {
          if (++choice[k] < sizes[k]) break;
          choice[k] = 0;
        }
        if (k == static_cast<std::size_t>(-1)) break;
      }
      env.resize(depth);
      return universal;
    }
  }
  return false;
}

}  // namespace

bool evaluate(const lang::Formula& sentence, const PartialStructure& structure) {
  Env env;
  return eval(sentence, structure, env);
}

bool evaluate(const lang::Formula& formula, const PartialStructure& structure, const Env& bindings) {
  Env env = bindings;
  return eval(formula, structure, env);
}

}  // namespace idp::engine
