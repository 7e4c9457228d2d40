#include <gtest/gtest.h>

#include <random>

#include "idp/lang/token.hpp"
#include "support/random_text.hpp"

namespace idp::lang {
namespace {

using K = TokenKind;

std::vector<std::pair<TokenKind, std::string>> kinds(std::string_view text) {
  std::vector<std::pair<TokenKind, std::string>> out;
  for (const auto& t : tokenize(text)) out.emplace_back(t.kind, t.lexeme);
  return out;
}

std::string concat(const std::vector<Token>& tokens) {
  std::string out;
  for (const auto& t : tokens) out += t.lexeme;
  return out;
}

TEST(Lexer, UniversalSentence) {
  const std::vector<std::pair<TokenKind, std::string>> expected{
      {K::logical, "!"}, {K::identifier, "x"}, {K::punct, ":"},  {K::whitespace, " "}, {K::identifier, "fly"},
      {K::punct, "("},   {K::identifier, "x"}, {K::punct, ")"},  {K::punct, "."},
  };
  EXPECT_EQ(kinds("!x: fly(x)."), expected);
}

TEST(Lexer, EmptyInput) { EXPECT_TRUE(tokenize("").empty()); }

TEST(Lexer, CommentThenNegation) {
  const std::vector<std::pair<TokenKind, std::string>> expected{
      {K::comment, "// hi"}, {K::whitespace, "\n"}, {K::logical, "~"}, {K::identifier, "p"}};
  EXPECT_EQ(kinds("// hi\n~p"), expected);
}

TEST(Lexer, LongestMatchForConnectives) {
  const std::vector<std::pair<TokenKind, std::string>> expected{
      {K::identifier, "a"}, {K::logical, "<=>"}, {K::identifier, "b"}, {K::logical, "=>"},
      {K::identifier, "c"}, {K::punct, "<="},    {K::identifier, "d"}, {K::punct, ":="}, {K::number, "3"}};
  EXPECT_EQ(kinds("a<=>b=>c<=d:=3"), expected);
}

TEST(Lexer, KeywordsAndBlockComments) {
  const std::vector<std::pair<TokenKind, std::string>> expected{
      {K::keyword, "theory"}, {K::whitespace, " "}, {K::comment, "/* a\nb */"}, {K::identifier, "theory2"}};
  EXPECT_EQ(kinds("theory /* a\nb */theory2"), expected);
}

TEST(Lexer, UnknownCharactersBecomeOneErrorToken) {
  const std::vector<std::pair<TokenKind, std::string>> expected{
      {K::identifier, "p"}, {K::error, "#@$"}, {K::identifier, "q"}};
  EXPECT_EQ(kinds("p#@$q"), expected);
}

TEST(Lexer, UnterminatedCommentAndString) {
  EXPECT_EQ(kinds("p /* never closed").back(), std::make_pair(K::error, std::string("/* never closed")));
  const auto string_tokens = kinds("\"open\nnext");
  EXPECT_EQ(string_tokens[0], std::make_pair(K::error, std::string("\"open")));
  EXPECT_EQ(string_tokens[2], std::make_pair(K::identifier, std::string("next")));
}

TEST(Lexer, StringWithEscapes) {
  EXPECT_EQ(kinds(R"("a \"b\" c")"), (std::vector<std::pair<TokenKind, std::string>>{{K::string, R"("a \"b\" c")"}}));
}

TEST(Lexer, UnicodeConnectivesAreLogical) {
  for (const char* symbol : {"∀", "∃", "⇒", "⇔", "∧", "∨", "¬"}) {
    const auto tokens = tokenize(symbol);
    ASSERT_EQ(tokens.size(), 1u) << symbol;
    EXPECT_EQ(tokens[0].kind, K::logical) << symbol;
    EXPECT_EQ(tokens[0].end_col, 2) << symbol;
  }
}

TEST(Lexer, PositionsAreOneBasedInScalarValues) {
  const auto tokens = tokenize("∀x:\n  p");
  ASSERT_EQ(tokens.size(), 5u);
  EXPECT_EQ(tokens[1].lexeme, "x");
  EXPECT_EQ(tokens[1].col, 2);
  EXPECT_EQ(tokens[4].line, 2);
  EXPECT_EQ(tokens[4].col, 3);
  EXPECT_EQ(tokens[4].end_col, 4);
}

TEST(Lexer, LosslessOnFuzzedInput) {
  std::mt19937 rng(7);
  for (int i = 0; i < 2000; ++i) {
    const auto text = (i % 2) ? test::random_source(rng, 40) : test::random_bytes(rng, 60);
    const auto tokens = tokenize(text);
    ASSERT_EQ(concat(tokens), text);
    Position at;
    for (const auto& t : tokens) {
      ASSERT_FALSE(t.lexeme.empty());
      ASSERT_EQ(t.line, at.line);
      ASSERT_EQ(t.col, at.col);
      at = position_after(at, t.lexeme);
      ASSERT_EQ(t.end_line, at.line);
      ASSERT_EQ(t.end_col, at.col);
    }
  }
}

}  // namespace
}  // namespace idp::lang
