#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "idp/lang/source.hpp"
#include "idp/lang/token.hpp"

namespace idp::editor {

// ---------------------------------------------------------------------------
// Highlighting

struct Span {
  lang::SourceRange range;
  std::string css_class;
  friend bool operator==(const Span&, const Span&) = default;
};

/// One span per non-whitespace token, in document order. Classes are
/// keyword, logical, punct, comment, number, string, identifier and error.
std::vector<Span> classify(const std::vector<lang::Token>& tokens);

// ---------------------------------------------------------------------------
// Symbol replacement

/// ASCII spelling to display glyph, applied to whole `logical` tokens only.
class SymbolMap {
 public:
  /// `!` `?` `=>` `<=>` `&` `|` `~` to their mathematical glyphs.
  static SymbolMap standard();

  /// Throws std::invalid_argument unless both sides are nonempty and the
  /// mapping is injective in both directions. Pairs are kept longest ASCII
  /// spelling first.
  explicit SymbolMap(std::vector<std::pair<std::string, std::string>> pairs);

  const std::vector<std::pair<std::string, std::string>>& pairs() const { return pairs_; }
  const std::string* display(std::string_view ascii) const;
  const std::string* ascii(std::string_view display) const;

 private:
  std::vector<std::pair<std::string, std::string>> pairs_;
};

struct DisplayText {
  std::string text;
  /// For every display offset 0..length (in Unicode scalar values) the
  /// corresponding source offset. A replaced symbol maps all of its display
  /// offsets to the start of its ASCII spelling.
  std::vector<std::size_t> position_map;
};

DisplayText replace_symbols(std::string_view source, const SymbolMap& map = SymbolMap::standard());

/// Inverse of replace_symbols.
std::string restore_symbols(std::string_view display, const SymbolMap& map = SymbolMap::standard());

/// Display offset of a source offset: the first display offset that maps to
/// a source offset >= `source_offset`.
std::size_t display_offset(const std::vector<std::size_t>& position_map, std::size_t source_offset);

// ---------------------------------------------------------------------------
// Indentation

inline constexpr int kIndentWidth = 4;

/// Column (0-based) at which `line_no` (1-based) should start: four spaces
/// per `{` open at the start of the line, one level less when the line
/// starts with `}`. Lines that begin inside a block comment keep their
/// current indentation.
int indent_line(std::string_view document, int line_no);

/// Applies indent_line to every line, replacing leading spaces and tabs.
/// Blank lines become empty.
std::string reindent(std::string_view document);

// ---------------------------------------------------------------------------
// Completion

struct Snippet {
  std::string trigger;
  std::string body;  // `$0` marks the cursor position after insertion
  std::string description;
  friend bool operator==(const Snippet&, const Snippet&) = default;
};

const std::vector<Snippet>& builtin_snippets();

/// Parses a `snippets.json` array of {trigger, body, description}. Throws
/// std::invalid_argument on malformed input or a trigger that is not an
/// identifier.
std::vector<Snippet> load_snippets(std::string_view json);

struct Completion {
  std::string label;
  enum class Kind { snippet, word } kind = Kind::word;
  std::string insert_text;
  std::string description;
  friend bool operator==(const Completion&, const Completion&) = default;
};

/// Candidates for the identifier prefix that ends at `cursor`: snippet
/// triggers first, then words of the document, each group alphabetical and
/// free of duplicates. The occurrence under the cursor is not offered. An
/// empty prefix yields no candidates.
std::vector<Completion> completions(std::string_view document, lang::Position cursor,
                                    const std::vector<Snippet>& snippets = builtin_snippets());

}  // namespace idp::editor
