#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "idp/lang/resolver.hpp"

namespace idp::engine {

enum class Truth : std::uint8_t { unknown, yes, no };

/// Three-valued interpretation of a vocabulary over finite domains.
///
/// Ground atoms of a predicate are stored densely; the atom index of a tuple
/// is its mixed-radix number over the argument domains with the first
/// argument most significant, so indices enumerate tuples lexicographically.
class PartialStructure {
 public:
  PartialStructure() = default;
  /// `domains[i]` interprets `vocabulary.types[i]`; every domain must be
  /// nonempty. All atoms start unknown and all constants uninterpreted.
  PartialStructure(std::string name, lang::Vocabulary vocabulary, std::vector<std::vector<std::string>> domains);

  const std::string& name() const { return name_; }
  const lang::Vocabulary& vocabulary() const { return vocabulary_; }

  std::size_t type_index(std::string_view type) const;
  const std::vector<std::string>& domain(std::size_t type) const { return domains_[type]; }
  const std::vector<std::string>& domain(std::string_view type) const { return domains_[type_index(type)]; }
  std::optional<std::size_t> element_index(std::size_t type, std::string_view element) const;

  std::size_t predicate_count() const { return truth_.size(); }
  std::size_t predicate_index(std::string_view name) const;
  std::size_t atom_count(std::size_t predicate) const { return truth_[predicate].size(); }
  std::size_t total_atom_count() const;

  std::size_t atom_index(std::size_t predicate, const std::vector<std::size_t>& elements) const;
  std::vector<std::size_t> atom_tuple(std::size_t predicate, std::size_t index) const;

  Truth value(std::size_t predicate, std::size_t index) const { return truth_[predicate][index]; }
  void set(std::size_t predicate, std::size_t index, Truth value) { truth_[predicate][index] = value; }

  std::optional<std::size_t> constant(std::size_t c) const { return constants_[c]; }
  void set_constant(std::size_t c, std::optional<std::size_t> element) { constants_[c] = element; }

  /// Every atom known and every constant interpreted.
  bool is_total() const;

  /// Human-readable atom such as `fly(penguin)`.
  std::string atom_text(std::size_t predicate, std::size_t index) const;

  friend bool operator==(const PartialStructure& a, const PartialStructure& b) {
    return a.vocabulary_.name == b.vocabulary_.name && a.domains_ == b.domains_ && a.truth_ == b.truth_ &&
           a.constants_ == b.constants_;
  }

 private:
  std::string name_;
  lang::Vocabulary vocabulary_;
  std::vector<std::vector<std::string>> domains_;
  std::vector<std::vector<Truth>> truth_;
  std::vector<std::optional<std::size_t>> constants_;
};

/// Builds the partial structure described by a resolved structure block.
PartialStructure structure_from(const lang::TypedProgram& program, const lang::StructureBlock& block);

/// Canonical structure syntax; the output parses back as a structure block.
/// Predicates with no known atom are omitted; fully known predicates are
/// written as one set, partial ones as `<ct>` / `<cf>` sets.
std::string render(const PartialStructure& structure);

}  // namespace idp::engine
