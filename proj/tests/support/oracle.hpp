#pragma once

// Brute-force reference semantics for small theories. Works directly on the
// resolved syntax tree with its own structure representation, so it shares
// no code with the grounder or the solver.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "idp/lang/resolver.hpp"

namespace idp::test {

using Model = std::map<std::string, bool>;                  // every ground atom
using ThreeValued = std::map<std::string, std::optional<bool>>;
using Env = std::vector<std::pair<std::string, std::string>>;  // variable, element

struct OracleInstantiation {
  int sentence = 0;  // 1-based
  const lang::Formula* body = nullptr;
  Env bindings;
};

struct OracleProblem {
  std::map<std::string, std::vector<std::string>> domains;
  std::map<std::string, std::string> constants;
  std::vector<std::string> atoms;
  Model fixed;
  std::vector<std::string> unknown;
  std::vector<OracleInstantiation> instantiations;
};

inline std::string atom_key(const std::string& predicate, const std::vector<std::string>& args) {
  if (args.empty()) return predicate;
  std::string out = predicate + "(";
  for (std::size_t i = 0; i < args.size(); ++i) out += (i ? "," : "") + args[i];
  return out + ")";
}

inline void for_each_tuple(const std::vector<const std::vector<std::string>*>& domains,
                           const std::function<void(const std::vector<std::string>&)>& f) {
  std::vector<std::size_t> idx(domains.size(), 0);
  while (true) {
    std::vector<std::string> tuple;
    for (std::size_t k = 0; k < domains.size(); ++k) tuple.push_back((*domains[k])[idx[k]]);
    f(tuple);
    std::size_t k = domains.size();
    while (k-- > 0) {
      if (++idx[k] < domains[k]->size()) break;
      idx[k] = 0;
    }
    if (k == static_cast<std::size_t>(-1)) return;
  }
}

inline OracleProblem oracle_problem(const lang::TypedProgram& program, const std::string& theory_name,
                                    const std::string& structure_name) {
  OracleProblem out;
  const auto* theory = program.theory(theory_name);
  const auto* structure = program.structure(structure_name);
  if (!theory || !structure) throw std::invalid_argument("missing block");
  const auto* vocab = program.vocabulary(theory->vocabulary.text);

  for (const auto& a : structure->assignments) {
    if (!vocab->has_type(a.symbol.text)) continue;
    for (const auto& tuple : std::get<std::vector<lang::Tuple>>(a.value)) out.domains[a.symbol.text].push_back(tuple[0].text);
  }
  for (const auto& c : vocab->constants) {
    bool found = false;
    for (const auto& a : structure->assignments) {
      if (a.symbol.text == c.name) {
        out.constants[c.name] = std::get<lang::Name>(a.value).text;
        found = true;
      }
    }
    if (!found) throw std::invalid_argument("oracle needs interpreted constants");
  }

  for (const auto& p : vocab->predicates) {
    std::vector<const std::vector<std::string>*> doms;
    for (const auto& t : p.arg_types) doms.push_back(&out.domains.at(t));
    std::map<std::string, bool> facts;
    bool total = false;
    for (const auto& a : structure->assignments) {
      if (a.symbol.text != p.name) continue;
      if (const auto* b = std::get_if<bool>(&a.value)) {
        facts[p.name] = *b;
        continue;
      }
      const bool value = a.qualifier != lang::Qualifier::certainly_false;
      if (a.qualifier == lang::Qualifier::total) total = true;
      for (const auto& tuple : std::get<std::vector<lang::Tuple>>(a.value)) {
        std::vector<std::string> args;
        for (const auto& n : tuple) args.push_back(n.text);
        facts[atom_key(p.name, args)] = value;
      }
    }
    for_each_tuple(doms, [&](const std::vector<std::string>& args) {
      const auto key = atom_key(p.name, args);
      out.atoms.push_back(key);
      if (auto it = facts.find(key); it != facts.end()) {
        out.fixed[key] = it->second;
      } else if (total) {
        out.fixed[key] = false;
      } else {
        out.unknown.push_back(key);
      }
    });
  }

  int index = 0;
  for (const auto& s : theory->sentences) {
    ++index;
    const lang::Formula* body = &s.formula;
    std::vector<const lang::BoundVariable*> prefix;
    while (body->kind == lang::FormulaKind::universal) {
      for (const auto& v : body->variables) prefix.push_back(&v);
      body = &body->operands[0];
    }
    std::vector<const std::vector<std::string>*> doms;
    for (const auto* v : prefix) doms.push_back(&out.domains.at(v->type));
    for_each_tuple(doms, [&](const std::vector<std::string>& tuple) {
      OracleInstantiation inst{index, body, {}};
      for (std::size_t k = 0; k < prefix.size(); ++k) inst.bindings.emplace_back(prefix[k]->name.text, tuple[k]);
      out.instantiations.push_back(std::move(inst));
    });
  }
  return out;
}

class OracleEvaluator {
 public:
  OracleEvaluator(const OracleProblem& problem, const Model& model) : problem_(problem), model_(model) {}

  bool holds(const lang::Formula& f, Env& env) const {
    using K = lang::FormulaKind;
    switch (f.kind) {
      case K::truth: return f.value;
      case K::atom: {
        std::vector<std::string> args;
        for (const auto& t : f.terms) args.push_back(term(t, env));
        return model_.at(atom_key(f.symbol.text, args));
      }
      case K::equality: return term(f.terms[0], env) == term(f.terms[1], env);
      case K::negation: return !holds(f.operands[0], env);
      case K::conjunction: return holds(f.operands[0], env) && holds(f.operands[1], env);
      case K::disjunction: return holds(f.operands[0], env) || holds(f.operands[1], env);
      case K::implication: return !holds(f.operands[0], env) || holds(f.operands[1], env);
      case K::equivalence: return holds(f.operands[0], env) == holds(f.operands[1], env);
      case K::universal:
      case K::existential: return quantified(f, 0, env);
    }
    return false;
  }

 private:
  bool quantified(const lang::Formula& f, std::size_t k, Env& env) const {
    if (k == f.variables.size()) return holds(f.operands[0], env);
    const bool universal = f.kind == lang::FormulaKind::universal;
    for (const auto& e : problem_.domains.at(f.variables[k].type)) {
      env.emplace_back(f.variables[k].name.text, e);
      const bool r = quantified(f, k + 1, env);
      env.pop_back();
      if (r != universal) return r;
    }
    return universal;
  }

  std::string term(const lang::Term& t, const Env& env) const {
    for (auto it = env.rbegin(); it != env.rend(); ++it) {
      if (it->first == t.name.text) return it->second;
    }
    return problem_.constants.at(t.name.text);
  }

  const OracleProblem& problem_;
  const Model& model_;
};

/// Calls `f` for every total expansion of the fixed atoms.
inline void for_each_expansion(const OracleProblem& p, const std::function<void(const Model&)>& f) {
  if (p.unknown.size() > 20) throw std::invalid_argument("too many unknown atoms for brute force");
  Model m = p.fixed;
  const std::uint64_t n = std::uint64_t{1} << p.unknown.size();
  for (std::uint64_t bits = 0; bits < n; ++bits) {
    for (std::size_t i = 0; i < p.unknown.size(); ++i) m[p.unknown[i]] = (bits >> i) & 1U;
    f(m);
  }
}

inline bool satisfies(const OracleProblem& p, const Model& m, const std::vector<bool>& active) {
  OracleEvaluator ev(p, m);
  for (std::size_t i = 0; i < p.instantiations.size(); ++i) {
    if (!active.empty() && !active[i]) continue;
    Env env = p.instantiations[i].bindings;
    if (!ev.holds(*p.instantiations[i].body, env)) return false;
  }
  return true;
}

inline std::vector<Model> all_models(const OracleProblem& p) {
  std::vector<Model> out;
  for_each_expansion(p, [&](const Model& m) {
    if (satisfies(p, m, {})) out.push_back(m);
  });
  return out;
}

/// Atoms with the same value in every model; empty optional when no model.
inline std::optional<ThreeValued> backbone(const OracleProblem& p) {
  const auto models = all_models(p);
  if (models.empty()) return std::nullopt;
  ThreeValued out;
  for (const auto& [atom, value] : models.front()) out[atom] = value;
  for (const auto& m : models) {
    for (auto& [atom, value] : out) {
      if (value && *value != m.at(atom)) value.reset();
    }
  }
  return out;
}

/// Satisfiability of the structure plus the instantiations flagged in `active`.
inline bool satisfiable(const OracleProblem& p, const std::vector<bool>& active) {
  bool found = false;
  for_each_expansion(p, [&](const Model& m) {
    if (!found && satisfies(p, m, active)) found = true;
  });
  return found;
}

}  // namespace idp::test
