#pragma once

#include <compare>
#include <string>

namespace idp::lang {

/// 1-based position in a document, counted in Unicode scalar values.
struct Position {
  int line = 1;
  int col = 1;

  friend auto operator<=>(const Position&, const Position&) = default;
};

/// Half-open range [start, end) of a document; all coordinates 1-based.
struct SourceRange {
  int line = 1;
  int col = 1;
  int end_line = 1;
  int end_col = 1;

  Position start() const { return {line, col}; }
  Position end() const { return {end_line, end_col}; }

  static SourceRange between(Position from, Position to) {
    return {from.line, from.col, to.line, to.col};
  }
  static SourceRange span(const SourceRange& first, const SourceRange& last) {
    return {first.line, first.col, last.end_line, last.end_col};
  }

  friend bool operator==(const SourceRange&, const SourceRange&) = default;
};

/// An identifier together with where it was written.
struct Name {
  std::string text;
  SourceRange range;

  friend bool operator==(const Name&, const Name&) = default;
};

}  // namespace idp::lang
