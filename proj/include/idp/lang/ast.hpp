#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "idp/lang/source.hpp"

namespace idp::lang {

// ---------------------------------------------------------------------------
// Vocabulary

struct TypeDecl {
  Name name;
  SourceRange range;
  friend bool operator==(const TypeDecl&, const TypeDecl&) = default;
};

struct PredicateDecl {
  Name name;
  std::vector<Name> arg_types;
  SourceRange range;
  friend bool operator==(const PredicateDecl&, const PredicateDecl&) = default;
};

struct ConstantDecl {
  Name name;
  Name type;
  SourceRange range;
  friend bool operator==(const ConstantDecl&, const ConstantDecl&) = default;
};

using VocabularyDecl = std::variant<TypeDecl, PredicateDecl, ConstantDecl>;

// ---------------------------------------------------------------------------
// Theory

enum class TermKind { unresolved, variable, constant };

struct Term {
  Name name;
  TermKind kind = TermKind::unresolved;
  std::string type;  // filled by the resolver
  friend bool operator==(const Term&, const Term&) = default;
};

struct BoundVariable {
  Name name;
  std::optional<Name> declared_type;  // `x[T]`
  std::string type;                   // declared or inferred, filled by the resolver
  friend bool operator==(const BoundVariable&, const BoundVariable&) = default;
};

enum class FormulaKind {
  atom,         // symbol(terms...)
  equality,     // terms[0] = terms[1]
  truth,        // true / false
  negation,     // ~operands[0]
  conjunction,  // operands[0] & operands[1]
  disjunction,
  implication,
  equivalence,
  universal,    // !variables: operands[0]
  existential,
};

struct Formula {
  FormulaKind kind = FormulaKind::truth;
  Name symbol;
  std::vector<Term> terms;
  bool value = true;
  std::vector<BoundVariable> variables;
  std::vector<Formula> operands;
  SourceRange range;

  friend bool operator==(const Formula&, const Formula&) = default;
};

struct Sentence {
  Formula formula;
  SourceRange range;  // formula plus its terminating '.'
  friend bool operator==(const Sentence&, const Sentence&) = default;
};

// ---------------------------------------------------------------------------
// Structure

enum class Qualifier { total, certainly_true, certainly_false };

using Tuple = std::vector<Name>;

struct Assignment {
  Name symbol;
  Qualifier qualifier = Qualifier::total;
  // `{ a; b,c }`, `true` / `false` for 0-ary predicates, or a single element
  // for constants.
  std::variant<std::vector<Tuple>, bool, Name> value;
  SourceRange range;
  friend bool operator==(const Assignment&, const Assignment&) = default;
};

// ---------------------------------------------------------------------------
// Procedure

enum class ExprKind { integer, boolean, string, variable, unary, binary, call };

struct Expr {
  ExprKind kind = ExprKind::integer;
  std::int64_t integer = 0;
  bool boolean = false;
  // String literal contents, variable or callee name, or operator spelling.
  std::string text;
  std::vector<Expr> operands;
  SourceRange range;
  friend bool operator==(const Expr&, const Expr&) = default;
};

enum class CommandKind { assign, expression, if_else, while_loop };

struct Command {
  CommandKind kind = CommandKind::expression;
  Name target;  // assign
  Expr expr;    // assigned value, evaluated expression, or condition
  std::vector<Command> body;
  std::vector<Command> else_body;
  SourceRange range;
  friend bool operator==(const Command&, const Command&) = default;
};

// ---------------------------------------------------------------------------
// Blocks

struct VocabularyBlock {
  Name name;
  std::vector<VocabularyDecl> decls;
  SourceRange range;
  std::string file;
  friend bool operator==(const VocabularyBlock&, const VocabularyBlock&) = default;
};

struct TheoryBlock {
  Name name;
  Name vocabulary;
  std::vector<Sentence> sentences;
  SourceRange range;
  std::string file;
  friend bool operator==(const TheoryBlock&, const TheoryBlock&) = default;
};

struct StructureBlock {
  Name name;
  Name vocabulary;
  std::vector<Assignment> assignments;
  SourceRange range;
  std::string file;
  friend bool operator==(const StructureBlock&, const StructureBlock&) = default;
};

struct ProcedureBlock {
  Name name;
  std::vector<Command> body;
  SourceRange range;
  std::string file;
  friend bool operator==(const ProcedureBlock&, const ProcedureBlock&) = default;
};

using Block = std::variant<VocabularyBlock, TheoryBlock, StructureBlock, ProcedureBlock>;

struct Program {
  std::vector<Block> blocks;
  friend bool operator==(const Program&, const Program&) = default;
};

const Name& block_name(const Block& block);
const std::string& block_file(const Block& block);
const char* block_kind(const Block& block);

/// Copy of `program` with every source range and file name reset, so that
/// two programs can be compared by structure alone.
Program without_locations(Program program);

}  // namespace idp::lang
