#pragma once

// Compares the engine's three inferences with the brute-force oracle on one
// program. Returns an empty string when everything agrees.

#include <algorithm>
#include <set>
#include <sstream>
#include <string>

#include "idp/engine/inference.hpp"
#include "idp/lang/resolver.hpp"
#include "support/oracle.hpp"

namespace idp::test {

inline Model model_of(const engine::PartialStructure& s) {
  Model m;
  for (std::size_t p = 0; p < s.predicate_count(); ++p) {
    for (std::size_t i = 0; i < s.atom_count(p); ++i) m[s.atom_text(p, i)] = s.value(p, i) == engine::Truth::yes;
  }
  return m;
}

inline ThreeValued three_valued_of(const engine::PartialStructure& s) {
  ThreeValued m;
  for (std::size_t p = 0; p < s.predicate_count(); ++p) {
    for (std::size_t i = 0; i < s.atom_count(p); ++i) {
      const auto v = s.value(p, i);
      m[s.atom_text(p, i)] = v == engine::Truth::unknown ? std::nullopt : std::optional<bool>(v == engine::Truth::yes);
    }
  }
  return m;
}

struct CheckStats {
  int consistent = 0;
  int inconsistent = 0;
  std::size_t models = 0;
};

inline std::string check_against_oracle(const std::string& text, CheckStats* stats = nullptr) {
  const auto analysis = lang::analyze({{"main.idp", text}});
  if (!analysis.program) return "program does not resolve:\n" + text;
  const auto& program = *analysis.program;
  const auto& theory = *program.theory("T");
  const auto structure = engine::structure_from(program, *program.structure("S"));
  const auto oracle = oracle_problem(program, "T", "S");
  std::ostringstream err;

  // Model sets.
  const auto models = engine::modelexpand(theory, structure, std::size_t{1} << 22);
  std::set<Model> engine_models, oracle_models;
  for (const auto& m : models) {
    if (!m.is_total()) err << "modelexpand returned a partial structure\n";
    if (!engine_models.insert(model_of(m)).second) err << "modelexpand returned a duplicate model\n";
  }
  for (const auto& m : all_models(oracle)) oracle_models.insert(m);
  if (engine_models != oracle_models) {
    err << "model sets differ: engine " << engine_models.size() << ", oracle " << oracle_models.size() << "\n";
  }
  if (stats) stats->models += oracle_models.size();

  // Backbone.
  const auto refined = engine::propagate(theory, structure);
  const auto expected = backbone(oracle);
  if (refined.has_value() != expected.has_value()) {
    err << "propagate consistency differs\n";
  } else if (refined && three_valued_of(*refined) != *expected) {
    err << "propagate differs from the backbone\n";
  }

  // Core.
  const auto core = engine::unsatcore(theory, structure);
  if (core.has_value() == !oracle_models.empty()) err << "unsatcore satisfiability differs\n";
  if (core) {
    std::vector<bool> active(oracle.instantiations.size(), false);
    for (const auto& item : core->items) {
      bool matched = false;
      for (std::size_t i = 0; i < oracle.instantiations.size(); ++i) {
        const auto& inst = oracle.instantiations[i];
        if (inst.sentence == item.sentence && inst.bindings == item.substitution) {
          if (active[i]) err << "core item repeated\n";
          active[i] = matched = true;
          break;
        }
      }
      if (!matched) err << "core item " << item.sentence << " " << item.substitution_text << " is unknown\n";
    }
    if (satisfiable(oracle, active)) err << "core is satisfiable\n";
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < active.size(); ++i) {
      if (active[i]) members.push_back(i);
    }
    if (members.size() <= 10) {
      // Every proper subset must be satisfiable.
      const std::size_t full = (std::size_t{1} << members.size()) - 1;
      for (std::size_t mask = 0; mask < full; ++mask) {
        std::vector<bool> subset(active.size(), false);
        for (std::size_t k = 0; k < members.size(); ++k) subset[members[k]] = (mask >> k) & 1U;
        if (!satisfiable(oracle, subset)) {
          err << "core is not subset-minimal\n";
          break;
        }
      }
    } else {
      for (auto m : members) {
        auto without = active;
        without[m] = false;
        if (!satisfiable(oracle, without)) {
          err << "core is not subset-minimal\n";
          break;
        }
      }
    }
  }
  if (stats) ++(core ? stats->inconsistent : stats->consistent);

  const auto out = err.str();
  return out.empty() ? out : out + "program:\n" + text;
}

}  // namespace idp::test
