#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "idp/lang/ast.hpp"
#include "idp/lang/diagnostic.hpp"

namespace idp::lang {

struct PredicateSymbol {
  std::string name;
  std::vector<std::string> arg_types;
  SourceRange range;
};

struct ConstantSymbol {
  std::string name;
  std::string type;
  SourceRange range;
};

/// Symbol table of one vocabulary, in declaration order.
struct Vocabulary {
  std::string name;
  std::string file;
  std::vector<std::string> types;
  std::vector<PredicateSymbol> predicates;
  std::vector<ConstantSymbol> constants;

  bool has_type(std::string_view type) const;
  const PredicateSymbol* predicate(std::string_view name) const;
  const ConstantSymbol* constant(std::string_view name) const;
};

/// A program whose names are resolved: every term is classified as variable
/// or constant and every bound variable carries its type.
struct TypedProgram {
  Program program;
  std::map<std::string, Vocabulary, std::less<>> vocabularies;

  const Vocabulary* vocabulary(std::string_view name) const;
  const TheoryBlock* theory(std::string_view name) const;
  const StructureBlock* structure(std::string_view name) const;
  const ProcedureBlock* procedure(std::string_view name) const;
};

struct ResolveResult {
  std::optional<TypedProgram> program;  // empty iff there are error diagnostics
  std::vector<Diagnostic> diagnostics;
};

ResolveResult resolve(Program program);

/// Checks procedure commands (e.g. one shell line) against a resolved
/// program: only whitelisted commands with the right number of arguments,
/// and inference calls must name an existing theory and structure over the
/// same vocabulary.
std::vector<Diagnostic> check_commands(const std::vector<Command>& commands, const TypedProgram& program,
                                       const std::string& file);

struct SourceFile {
  std::string name;
  std::string content;
};

struct Analysis {
  std::optional<TypedProgram> program;
  std::vector<Diagnostic> diagnostics;
};

/// Parses every file, merges their blocks into one program and resolves it.
/// Resolution only runs when all files parse.
Analysis analyze(const std::vector<SourceFile>& files);

}  // namespace idp::lang
