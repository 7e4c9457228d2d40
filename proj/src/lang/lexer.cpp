#include <array>
#include <cctype>

#include "idp/lang/diagnostic.hpp"
#include "idp/lang/token.hpp"

namespace idp::lang {

namespace {

constexpr std::array kKeywords{
    std::string_view{"vocabulary"}, std::string_view{"theory"}, std::string_view{"structure"},
    std::string_view{"procedure"},  std::string_view{"type"},   std::string_view{"true"},
    std::string_view{"false"},      std::string_view{"if"},     std::string_view{"else"},
    std::string_view{"while"},
};

// Longest spellings first so that "<=>" wins over "<=" and "=>" over "=".
constexpr std::array kLogical{
    std::string_view{"<=>"}, std::string_view{"=>"},     std::string_view{"!"},
    std::string_view{"?"},   std::string_view{"&"},      std::string_view{"|"},
    std::string_view{"~"},   std::string_view{"="},      std::string_view{"∀"},
    std::string_view{"∃"}, std::string_view{"⇒"}, std::string_view{"⇔"},
    std::string_view{"∧"}, std::string_view{"∨"}, std::string_view{"¬"},
};

constexpr std::array kPunct{
    std::string_view{":="}, std::string_view{"<="}, std::string_view{">="},
    std::string_view{"{"},  std::string_view{"}"},  std::string_view{"("},
    std::string_view{")"},  std::string_view{"["},  std::string_view{"]"},
    std::string_view{","},  std::string_view{";"},  std::string_view{":"},
    std::string_view{"."},  std::string_view{"<"},  std::string_view{">"},
    std::string_view{"+"},  std::string_view{"-"},  std::string_view{"*"},
    std::string_view{"/"},  std::string_view{"%"},
};

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

// Length of the UTF-8 sequence starting at `i`, or 1 for an invalid byte.
std::size_t sequence_length(std::string_view text, std::size_t i) {
  const auto lead = static_cast<unsigned char>(text[i]);
  std::size_t n = 1;
  if (lead >= 0xC2 && lead <= 0xDF) n = 2;
  else if (lead >= 0xE0 && lead <= 0xEF) n = 3;
  else if (lead >= 0xF0 && lead <= 0xF4) n = 4;
  else return 1;
  if (i + n > text.size()) return 1;
  for (std::size_t k = 1; k < n; ++k) {
    if ((static_cast<unsigned char>(text[i + k]) & 0xC0) != 0x80) return 1;
  }
  return n;
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    while (pos_ < text_.size()) {
      const std::size_t start = pos_;
      const TokenKind kind = scan();
      emit(kind, start);
    }
    return std::move(tokens_);
  }

 private:
  TokenKind scan() {
    const char c = text_[pos_];
    if (is_space(c)) {
      while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
      return TokenKind::whitespace;
    }
    if (starts_with("//")) {
      while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      return TokenKind::comment;
    }
    if (starts_with("/*")) {
      const auto close = text_.find("*/", pos_ + 2);
      if (close == std::string_view::npos) {
        pos_ = text_.size();
        return TokenKind::error;
      }
      pos_ = close + 2;
      return TokenKind::comment;
    }
    if (c == '"') return scan_string();
    if (is_ident_start(c)) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
      return is_keyword(text_.substr(start, pos_ - start)) ? TokenKind::keyword
                                                           : TokenKind::identifier;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      return TokenKind::number;
    }
    if (auto n = match(kLogical)) {
      pos_ += n;
      return TokenKind::logical;
    }
    if (auto n = match(kPunct)) {
      pos_ += n;
      return TokenKind::punct;
    }
    // Run of characters the language does not know.
    while (pos_ < text_.size() && unknown_at(pos_)) pos_ += sequence_length(text_, pos_);
    return TokenKind::error;
  }

  TokenKind scan_string() {
    ++pos_;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '\n') return TokenKind::error;
      if (c == '\\' && pos_ + 1 < text_.size() && text_[pos_ + 1] != '\n') {
        pos_ += 2;
        continue;
      }
      ++pos_;
      if (c == '"') return TokenKind::string;
    }
    return TokenKind::error;
  }

  bool unknown_at(std::size_t i) const {
    const char c = text_[i];
    if (is_space(c) || is_ident_start(c) || c == '"' ||
        std::isdigit(static_cast<unsigned char>(c))) {
      return false;
    }
    const auto rest = text_.substr(i);
    for (auto s : kLogical) if (rest.starts_with(s)) return false;
    for (auto s : kPunct) if (rest.starts_with(s)) return false;
    return true;
  }

  template <std::size_t N>
  std::size_t match(const std::array<std::string_view, N>& table) const {
    const auto rest = text_.substr(pos_);
    for (auto s : table) {
      if (rest.starts_with(s)) return s.size();
    }
    return 0;
  }

  bool starts_with(std::string_view s) const { return text_.substr(pos_).starts_with(s); }

  void emit(TokenKind kind, std::size_t start) {
    Token token;
    token.kind = kind;
    token.lexeme = std::string(text_.substr(start, pos_ - start));
    token.line = at_.line;
    token.col = at_.col;
    at_ = position_after(at_, token.lexeme);
    token.end_line = at_.line;
    token.end_col = at_.col;
    tokens_.push_back(std::move(token));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  Position at_;
  std::vector<Token> tokens_;
};

}  // namespace

const char* to_string(TokenKind kind) {
  switch (kind) {
    case TokenKind::keyword: return "keyword";
    case TokenKind::identifier: return "identifier";
    case TokenKind::logical: return "logical";
    case TokenKind::punct: return "punct";
    case TokenKind::number: return "number";
    case TokenKind::string: return "string";
    case TokenKind::comment: return "comment";
    case TokenKind::whitespace: return "whitespace";
    case TokenKind::error: return "error";
  }
  return "error";
}

const char* to_string(Severity severity) {
  switch (severity) {
    case Severity::error: return "error";
    case Severity::warning: return "warning";
    case Severity::core: return "core";
  }
  return "error";
}

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
  for (const auto& d : diagnostics) {
    if (d.severity == Severity::error) return true;
  }
  return false;
}

bool is_keyword(std::string_view word) {
  for (auto k : kKeywords) {
    if (k == word) return true;
  }
  return false;
}

std::size_t scalar_length(std::string_view text, std::size_t i) { return sequence_length(text, i); }

int column_width(std::string_view text) {
  int width = 0;
  for (std::size_t i = 0; i < text.size(); i += sequence_length(text, i)) ++width;
  return width;
}

Position position_after(Position from, std::string_view text) {
  Position at = from;
  for (std::size_t i = 0; i < text.size();) {
    if (text[i] == '\n') {
      ++at.line;
      at.col = 1;
      ++i;
      continue;
    }
    ++at.col;
    i += sequence_length(text, i);
  }
  return at;
}

Position end_of(std::string_view text) { return position_after(Position{}, text); }

std::vector<Token> tokenize(std::string_view text) { return Lexer(text).run(); }

}  // namespace idp::lang
