#pragma once

#include <string>
#include <utility>
#include <vector>

#include "idp/engine/limits.hpp"
#include "idp/engine/structure.hpp"
#include "idp/lang/ast.hpp"

namespace idp::engine {

/// DIMACS-style literal: +v or -v for variable v >= 1.
using Literal = int;
using Clause = std::vector<Literal>;

inline int var_of(Literal l) { return l < 0 ? -l : l; }

/// What a non-auxiliary variable stands for.
struct AtomRef {
  enum class Kind { predicate, constant } kind = Kind::predicate;
  std::size_t symbol = 0;  // predicate or constant index in the vocabulary
  std::size_t index = 0;   // atom index, or element index for `constant = element`
};

using Binding = std::pair<std::string, std::string>;  // variable, element

/// One sentence of the theory with its leading universal variables fixed.
struct Instantiation {
  int sentence = 0;  // 1-based position in the theory
  lang::SourceRange range;
  std::vector<Binding> substitution;

  /// "x = penguin, y = eagle"; empty for sentences without a universal prefix.
  std::string render() const;
};

enum class Origin { theory, structure, vocabulary };

struct Provenance {
  Origin origin = Origin::theory;
  int instantiation = -1;  // index into GroundProblem::instantiations for Origin::theory
};

/// Clauses over atoms of a structure plus auxiliary definition variables.
/// Variables 1..atom_count() are atoms (see `atoms`); the rest are auxiliary.
struct GroundProblem {
  std::vector<AtomRef> atoms;
  int variable_count = 0;
  std::vector<Clause> clauses;
  std::vector<Provenance> provenance;  // parallel to `clauses`
  std::vector<Instantiation> instantiations;

  int atom_count() const { return static_cast<int>(atoms.size()); }
  bool is_auxiliary(int var) const { return var > atom_count(); }
};

/// Instantiates the theory over the structure's domains. Every sentence with
/// a leading universal prefix yields one instantiation per assignment of the
/// prefix (first variable varying slowest); other sentences yield one
/// instantiation with an empty substitution. Each instantiation is encoded
/// with polarity-aware definitional clauses. Known atoms of the structure
/// become unit clauses with `structure` provenance.
///
/// Throws LimitError when the number of ground atoms or the size of the
/// grounding exceeds `budget.limits.ground_atoms_max`.
GroundProblem ground(const lang::TheoryBlock& theory, const PartialStructure& structure, const Budget& budget = {});

/// Total structure read off a solver model (index = variable).
PartialStructure structure_from_model(const GroundProblem& problem, const PartialStructure& input,
                                      const std::vector<bool>& model);

}  // namespace idp::engine
