#pragma once

#include <optional>
#include <string>
#include <vector>

#include "idp/engine/ground.hpp"
#include "idp/engine/limits.hpp"
#include "idp/engine/structure.hpp"
#include "idp/lang/ast.hpp"

namespace idp::engine {

/// Total structures that expand `structure` and satisfy `theory`, in the
/// order the solver finds them. Returns fewer than `max_models` only when
/// there are no more models; an empty result means the input is inconsistent.
std::vector<PartialStructure> modelexpand(const lang::TheoryBlock& theory, const PartialStructure& structure,
                                          std::size_t max_models, const Budget& budget = {});

/// Refines `structure` with every atom that has the same value in all models
/// (the backbone). Returns std::nullopt when theory and structure have no
/// model at all.
std::optional<PartialStructure> propagate(const lang::TheoryBlock& theory, const PartialStructure& structure,
                                          const Budget& budget = {});

struct CoreItem {
  int sentence = 0;
  lang::SourceRange range;
  std::vector<Binding> substitution;
  std::string substitution_text;
};

struct UnsatCore {
  std::string theory;
  std::string file;
  std::vector<CoreItem> items;  // in instantiation creation order; never empty
};

/// Subset-minimal set of theory instantiations that is inconsistent with the
/// structure, found by deletion in instantiation order. Structure facts are
/// never part of the core. Returns std::nullopt when the input is satisfiable.
std::optional<UnsatCore> unsatcore(const lang::TheoryBlock& theory, const PartialStructure& structure,
                                   const Budget& budget = {});

/// Truth of `sentence` in a total structure by direct recursive evaluation.
bool evaluate(const lang::Formula& sentence, const PartialStructure& structure);

/// Truth of `formula` with its free variables bound to element indices.
bool evaluate(const lang::Formula& formula, const PartialStructure& structure,
              const std::vector<std::pair<std::string, std::size_t>>& bindings);

}  // namespace idp::engine
