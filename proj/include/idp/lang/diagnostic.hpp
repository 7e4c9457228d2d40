#pragma once

#include <string>
#include <vector>

#include "idp/lang/source.hpp"

namespace idp::lang {

enum class Severity { error, warning, core };

const char* to_string(Severity severity);

struct Diagnostic {
  Severity severity = Severity::error;
  std::string file;
  SourceRange range;
  std::string message;
  // Only filled for `core` diagnostics: one rendered substitution per
  // instantiation of the sentence that takes part in the core.
  std::vector<std::string> instantiations;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

bool has_errors(const std::vector<Diagnostic>& diagnostics);

}  // namespace idp::lang
