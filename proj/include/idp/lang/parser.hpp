#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "idp/lang/ast.hpp"
#include "idp/lang/diagnostic.hpp"

namespace idp::lang {

struct ParseResult {
  // Blocks that parsed cleanly; blocks containing a syntax error are dropped.
  Program program;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return !has_errors(diagnostics); }
};

/// Parses a whole document. Syntax errors never throw: each one becomes an
/// error diagnostic at the offending token and parsing resumes at the next
/// block keyword, so every block can report its own first error.
ParseResult parse(std::string_view text, const std::string& file = "main.idp");

struct CommandParseResult {
  std::vector<Command> commands;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return !has_errors(diagnostics); }
};

/// Parses a sequence of procedure commands, e.g. one line typed into the shell.
CommandParseResult parse_commands(std::string_view text, const std::string& file = "<shell>");

}  // namespace idp::lang
