#pragma once

#include <string>

#include "idp/lang/ast.hpp"

namespace idp::lang {

/// Canonical ASCII rendering. Reparsing the output yields a program equal to
/// `program` up to source locations.
std::string print(const Program& program);

std::string print(const Block& block);
std::string print(const Formula& formula);
std::string print(const Expr& expr);
std::string print(const Command& command, int indent = 0);

std::string quote(std::string_view text);

}  // namespace idp::lang
