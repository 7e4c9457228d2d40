#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "idp/lang/source.hpp"

namespace idp::lang {

enum class TokenKind {
  keyword,
  identifier,
  logical,
  punct,
  number,
  string,
  comment,
  whitespace,
  error,
};

const char* to_string(TokenKind kind);

struct Token {
  TokenKind kind = TokenKind::error;
  std::string lexeme;
  int line = 1;
  int col = 1;
  // End position (exclusive), derived from the lexeme.
  int end_line = 1;
  int end_col = 1;

  SourceRange range() const { return {line, col, end_line, end_col}; }
  bool is(TokenKind k, std::string_view text) const { return kind == k && lexeme == text; }

  friend bool operator==(const Token&, const Token&) = default;
};

/// Splits `text` into a lossless token stream: the lexemes, concatenated in
/// order, reproduce `text` byte for byte. Never fails; characters outside the
/// language become `error` tokens.
std::vector<Token> tokenize(std::string_view text);

bool is_keyword(std::string_view word);

/// Byte length of the Unicode scalar value starting at byte `i`; 1 for an
/// invalid UTF-8 byte.
std::size_t scalar_length(std::string_view text, std::size_t i);

/// Number of Unicode scalar values in `text`. Invalid UTF-8 bytes count as one
/// column each.
int column_width(std::string_view text);

/// End position of `text` when it starts at `from`.
Position position_after(Position from, std::string_view text);

/// Position one past the last character of `text`.
Position end_of(std::string_view text);

}  // namespace idp::lang
