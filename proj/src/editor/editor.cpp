#include "idp/editor/editor.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace idp::editor {

using lang::Token;
using lang::TokenKind;

std::vector<Span> classify(const std::vector<Token>& tokens) {
  std::vector<Span> spans;
  for (const auto& t : tokens) {
    if (t.kind == TokenKind::whitespace) continue;
    spans.push_back({t.range(), lang::to_string(t.kind)});
  }
  return spans;
}

SymbolMap SymbolMap::standard() {
  return SymbolMap({{"!", "∀"}, {"?", "∃"}, {"=>", "⇒"}, {"<=>", "⇔"}, {"&", "∧"}, {"|", "∨"}, {"~", "¬"}});
}

SymbolMap::SymbolMap(std::vector<std::pair<std::string, std::string>> pairs) : pairs_(std::move(pairs)) {
  std::set<std::string> ascii, display;
  for (const auto& [a, d] : pairs_) {
    if (a.empty() || d.empty()) throw std::invalid_argument("symbol map entries must be nonempty");
    if (!ascii.insert(a).second) throw std::invalid_argument("duplicate ASCII spelling " + a);
    if (!display.insert(d).second) throw std::invalid_argument("duplicate display symbol " + d);
  }
  std::stable_sort(pairs_.begin(), pairs_.end(),
                   [](const auto& x, const auto& y) { return x.first.size() > y.first.size(); });
}

const std::string* SymbolMap::display(std::string_view ascii) const {
  for (const auto& [a, d] : pairs_) {
    if (a == ascii) return &d;
  }
  return nullptr;
}

const std::string* SymbolMap::ascii(std::string_view display) const {
  for (const auto& [a, d] : pairs_) {
    if (d == display) return &a;
  }
  return nullptr;
}

DisplayText replace_symbols(std::string_view source, const SymbolMap& map) {
  DisplayText out;
  std::size_t offset = 0;
  for (const auto& t : lang::tokenize(source)) {
    const int width = lang::column_width(t.lexeme);
    const auto* glyph = t.kind == TokenKind::logical ? map.display(t.lexeme) : nullptr;
    if (glyph) {
      out.text += *glyph;
      for (int i = 0; i < lang::column_width(*glyph); ++i) out.position_map.push_back(offset);
    } else {
      out.text += t.lexeme;
      for (int i = 0; i < width; ++i) out.position_map.push_back(offset + static_cast<std::size_t>(i));
    }
    offset += static_cast<std::size_t>(width);
  }
  out.position_map.push_back(offset);
  return out;
}

std::string restore_symbols(std::string_view display, const SymbolMap& map) {
  std::string out;
  for (const auto& t : lang::tokenize(display)) {
    const auto* ascii = t.kind == TokenKind::logical ? map.ascii(t.lexeme) : nullptr;
    out += ascii ? *ascii : t.lexeme;
  }
  return out;
}

std::size_t display_offset(const std::vector<std::size_t>& position_map, std::size_t source_offset) {
  const auto it = std::lower_bound(position_map.begin(), position_map.end(), source_offset);
  if (it == position_map.end()) return position_map.empty() ? 0 : position_map.size() - 1;
  return static_cast<std::size_t>(it - position_map.begin());
}

namespace {

struct LineInfo {
  int depth = 0;              // open braces at the start of the line
  bool closes = false;        // first token is `}`
  bool in_comment = false;    // line starts inside a multi-line token
  bool blank = true;
};

std::vector<std::string_view> split_lines(std::string_view doc) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (true) {
    const auto nl = doc.find('\n', start);
    if (nl == std::string_view::npos) {
      lines.push_back(doc.substr(start));
      return lines;
    }
    lines.push_back(doc.substr(start, nl - start));
    start = nl + 1;
  }
}

std::vector<LineInfo> analyze_lines(std::string_view doc, std::size_t line_count) {
  std::vector<LineInfo> info(line_count + 1);
  std::vector<bool> seen(line_count + 1, false);
  int depth = 0;
  int line = 1;
  auto reach = [&](int upto) {
    // Lines before `upto` whose start has been passed get the current depth.
    for (; line <= upto && line <= static_cast<int>(line_count); ++line) info[static_cast<std::size_t>(line)].depth = depth;
  };
  for (const auto& t : lang::tokenize(doc)) {
    reach(t.line);
    if (t.kind == TokenKind::whitespace) {
      reach(t.end_line);
      continue;
    }
    // Multi-line comments (and unterminated ones, lexed as errors).
    for (int l = t.line + 1; l <= t.end_line; ++l) info[static_cast<std::size_t>(l)].in_comment = true;
    auto& first = info[static_cast<std::size_t>(t.line)];
    if (!seen[static_cast<std::size_t>(t.line)]) {
      seen[static_cast<std::size_t>(t.line)] = true;
      first.blank = false;
      first.closes = t.is(TokenKind::punct, "}");
    }
    if (t.is(TokenKind::punct, "{")) ++depth;
    if (t.is(TokenKind::punct, "}")) depth = std::max(0, depth - 1);
    reach(t.end_line);
  }
  reach(static_cast<int>(line_count));
  for (std::size_t l = 1; l <= line_count; ++l) {
    if (info[l].in_comment) info[l].blank = false;
  }
  return info;
}

int target_column(const LineInfo& info) {
  return kIndentWidth * std::max(0, info.depth - (info.closes ? 1 : 0));
}

int leading_width(std::string_view line) {
  int n = 0;
  while (static_cast<std::size_t>(n) < line.size() && (line[static_cast<std::size_t>(n)] == ' ' || line[static_cast<std::size_t>(n)] == '\t')) ++n;
  return n;
}

}  // namespace

int indent_line(std::string_view document, int line_no) {
  const auto lines = split_lines(document);
  if (line_no < 1 || line_no > static_cast<int>(lines.size())) throw std::out_of_range("line number out of range");
  const auto info = analyze_lines(document, lines.size());
  const auto& li = info[static_cast<std::size_t>(line_no)];
  if (li.in_comment) return leading_width(lines[static_cast<std::size_t>(line_no - 1)]);
  return target_column(li);
}

std::string reindent(std::string_view document) {
  const auto lines = split_lines(document);
  const auto info = analyze_lines(document, lines.size());
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i) out += '\n';
    const auto& li = info[i + 1];
    const auto line = lines[i];
    if (li.in_comment) {
      out += line;
      continue;
    }
    const auto rest = line.substr(static_cast<std::size_t>(leading_width(line)));
    if (rest.empty() || rest == "\r") {
      out += rest;
      continue;
    }
    out.append(static_cast<std::size_t>(target_column(li)), ' ');
    out += rest;
  }
  return out;
}

const std::vector<Snippet>& builtin_snippets() {
  static const std::vector<Snippet> snippets = {
      {"vocabulary", "vocabulary V {\n    type $0\n}", "vocabulary block"},
      {"theory", "theory T : V {\n    $0\n}", "theory block"},
      {"structure", "structure S : V {\n    $0\n}", "structure block"},
      {"procedure", "procedure main() {\n    $0\n}", "procedure block"},
      {"reachability",
       "{\n    !x y: reach(x, y) <- edge(x, y).\n    !x y: reach(x, y) <- ?z: reach(x, z) & reach(z, y).\n}$0",
       "reachability relation (inductive definition)"},
  };
  return snippets;
}

namespace {

bool is_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

}  // namespace

std::vector<Snippet> load_snippets(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("snippets: ") + e.what());
  }
  if (!doc.is_array()) throw std::invalid_argument("snippets: expected an array");
  std::vector<Snippet> out;
  for (const auto& item : doc) {
    if (!item.is_object() || !item.contains("trigger") || !item.contains("body") || !item["trigger"].is_string() ||
        !item["body"].is_string()) {
      throw std::invalid_argument("snippets: each entry needs string trigger and body");
    }
    Snippet s{item["trigger"], item["body"], item.value("description", std::string())};
    if (!is_identifier(s.trigger)) throw std::invalid_argument("snippets: trigger is not an identifier: " + s.trigger);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<Completion> completions(std::string_view document, lang::Position cursor,
                                    const std::vector<Snippet>& snippets) {
  const auto tokens = lang::tokenize(document);
  // The identifier-like token ending at (or containing) the cursor.
  const Token* current = nullptr;
  for (const auto& t : tokens) {
    if (t.kind != TokenKind::identifier && t.kind != TokenKind::keyword) continue;
    if (t.line == cursor.line && t.col < cursor.col && cursor.col <= t.end_col) current = &t;
  }
  if (!current) return {};
  const auto prefix_bytes = static_cast<std::size_t>(cursor.col - current->col);
  const std::string prefix = current->lexeme.substr(0, prefix_bytes);

  std::vector<Completion> out;
  std::set<std::string> labels;
  std::map<std::string, const Snippet*> matching;
  for (const auto& s : snippets) {
    if (s.trigger.starts_with(prefix)) matching.emplace(s.trigger, &s);
  }
  for (const auto& [trigger, s] : matching) {
    labels.insert(trigger);
    out.push_back({trigger, Completion::Kind::snippet, s->body, s->description});
  }
  std::set<std::string> words;
  for (const auto& t : tokens) {
    if (&t == current || t.kind != TokenKind::identifier) continue;
    if (t.lexeme.starts_with(prefix) && !labels.count(t.lexeme)) words.insert(t.lexeme);
  }
  for (const auto& w : words) out.push_back({w, Completion::Kind::word, w, ""});
  return out;
}

}  // namespace idp::editor
