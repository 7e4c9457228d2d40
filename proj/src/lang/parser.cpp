#include "idp/lang/parser.hpp"

#include <charconv>
#include <stdexcept>

#include "idp/lang/token.hpp"

namespace idp::lang {

namespace {

constexpr int kMaxNesting = 256;

struct SyntaxError {
  SourceRange range;
  std::string message;
};

bool is_block_keyword(const Token& t) {
  return t.kind == TokenKind::keyword &&
         (t.lexeme == "vocabulary" || t.lexeme == "theory" || t.lexeme == "structure" ||
          t.lexeme == "procedure");
}

std::string describe(const Token& t) {
  if (t.lexeme.empty()) return "end of input";
  if (t.kind == TokenKind::error) {
    if (t.lexeme.starts_with("/*")) return "unterminated comment";
    if (t.lexeme.starts_with("\"")) return "unterminated string";
    return "unknown character '" + t.lexeme + "'";
  }
  return "'" + t.lexeme + "'";
}

std::string unescape(std::string_view quoted) {
  std::string out;
  const auto body = quoted.substr(1, quoted.size() - 2);
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (body[i] == '\\' && i + 1 < body.size()) {
      const char next = body[++i];
      switch (next) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        default: out += next; break;
      }
    } else {
      out += body[i];
    }
  }
  return out;
}

class Parser {
 public:
  Parser(std::string_view text, std::string file) : file_(std::move(file)) {
    for (auto& t : tokenize(text)) {
      if (t.kind == TokenKind::whitespace || t.kind == TokenKind::comment) continue;
      tokens_.push_back(std::move(t));
    }
    const Position end = end_of(text);
    eof_.kind = TokenKind::punct;
    eof_.line = eof_.end_line = end.line;
    eof_.col = eof_.end_col = end.col;
  }

  ParseResult program() {
    ParseResult result;
    while (!at_end()) {
      const std::size_t start = pos_;
      try {
        result.program.blocks.push_back(block());
      } catch (const SyntaxError& e) {
        report(e);
        pos_ = std::max(pos_, start + 1);
        while (!at_end() && !is_block_keyword(peek())) ++pos_;
      }
    }
    result.diagnostics = std::move(diagnostics_);
    return result;
  }

  CommandParseResult commands() {
    CommandParseResult result;
    try {
      while (!at_end()) result.commands.push_back(command());
    } catch (const SyntaxError& e) {
      report(e);
      result.commands.clear();
    }
    result.diagnostics = std::move(diagnostics_);
    return result;
  }

 private:
  // -- token helpers --------------------------------------------------------

  bool at_end() const { return pos_ >= tokens_.size(); }
  const Token& peek(std::size_t ahead = 0) const {
    return pos_ + ahead < tokens_.size() ? tokens_[pos_ + ahead] : eof_;
  }
  const Token& previous() const { return tokens_[pos_ - 1]; }

  bool check(TokenKind kind, std::string_view text, std::size_t ahead = 0) const {
    return peek(ahead).is(kind, text);
  }
  bool check_punct(std::string_view text, std::size_t ahead = 0) const {
    return check(TokenKind::punct, text, ahead);
  }
  bool check_logical(std::string_view a, std::string_view b = {}) const {
    return peek().kind == TokenKind::logical &&
           (peek().lexeme == a || (!b.empty() && peek().lexeme == b));
  }
  bool check_keyword(std::string_view text) const { return check(TokenKind::keyword, text); }

  const Token& take() {
    if (at_end()) fail(eof_, "unexpected end of input");
    return tokens_[pos_++];
  }

  bool accept_punct(std::string_view text) {
    if (!check_punct(text)) return false;
    ++pos_;
    return true;
  }

  const Token& expect_punct(std::string_view text) {
    if (!check_punct(text)) fail(peek(), "expected '" + std::string(text) + "' but found " + describe(peek()));
    return take();
  }

  void expect_keyword(std::string_view text) {
    if (!check_keyword(text)) fail(peek(), "expected '" + std::string(text) + "' but found " + describe(peek()));
    take();
  }

  Name expect_identifier(std::string_view what) {
    if (peek().kind != TokenKind::identifier) {
      fail(peek(), "expected " + std::string(what) + " but found " + describe(peek()));
    }
    const Token& t = take();
    return Name{t.lexeme, t.range()};
  }

  [[noreturn]] void fail(const Token& at, std::string message) const {
    throw SyntaxError{at.range(), std::move(message)};
  }
  [[noreturn]] void fail(const SourceRange& at, std::string message) const {
    throw SyntaxError{at, std::move(message)};
  }

  void report(const SyntaxError& e) {
    diagnostics_.push_back(Diagnostic{Severity::error, file_, e.range, e.message, {}});
  }

  SourceRange from(const Token& first) const {
    return SourceRange::span(first.range(), pos_ > 0 ? previous().range() : first.range());
  }

  struct DepthGuard {
    explicit DepthGuard(Parser& p) : parser(p) {
      if (++parser.depth_ > kMaxNesting) parser.fail(parser.peek(), "nesting too deep");
    }
    ~DepthGuard() { --parser.depth_; }
    Parser& parser;
  };

  // -- blocks ---------------------------------------------------------------

  Block block() {
    const Token& t = peek();
    if (!is_block_keyword(t)) {
      fail(t, "expected a block (vocabulary, theory, structure or procedure) but found " + describe(t));
    }
    if (t.lexeme == "vocabulary") return vocabulary();
    if (t.lexeme == "theory") return theory();
    if (t.lexeme == "structure") return structure();
    return procedure();
  }

  VocabularyBlock vocabulary() {
    const Token& first = take();
    VocabularyBlock block;
    block.file = file_;
    block.name = expect_identifier("a vocabulary name");
    expect_punct("{");
    while (!check_punct("}")) block.decls.push_back(vocabulary_decl());
    take();
    block.range = from(first);
    return block;
  }

  VocabularyDecl vocabulary_decl() {
    const Token& first = peek();
    if (check_keyword("type")) {
      take();
      TypeDecl decl{expect_identifier("a type name"), {}};
      if (check_logical("=")) fail(peek(), "type definitions in the vocabulary are not supported");
      decl.range = from(first);
      return decl;
    }
    Name name = expect_identifier("a declaration");
    if (accept_punct("(")) {
      PredicateDecl decl{std::move(name), {}, {}};
      if (!check_punct(")")) {
        decl.arg_types.push_back(expect_identifier("a type name"));
        while (accept_punct(",")) decl.arg_types.push_back(expect_identifier("a type name"));
      }
      expect_punct(")");
      if (check_punct(":")) fail(decl.name.range, "functions are not supported");
      decl.range = from(first);
      return decl;
    }
    if (accept_punct(":")) {
      ConstantDecl decl{std::move(name), expect_identifier("a type name"), {}};
      if (check_punct("(")) fail(decl.name.range, "functions are not supported");
      decl.range = from(first);
      return decl;
    }
    PredicateDecl decl{std::move(name), {}, {}};
    decl.range = from(first);
    return decl;
  }

  TheoryBlock theory() {
    const Token& first = take();
    TheoryBlock block;
    block.file = file_;
    block.name = expect_identifier("a theory name");
    expect_punct(":");
    block.vocabulary = expect_identifier("a vocabulary name");
    expect_punct("{");
    while (!check_punct("}")) {
      if (at_end()) fail(eof_, "expected '}' but found end of input");
      if (check_punct("{")) fail(peek(), "inductive definitions are not supported");
      const Token& start = peek();
      Sentence sentence;
      sentence.formula = formula();
      if (!check_punct(".")) {
        fail(peek(), "expected '.' at the end of the sentence but found " + describe(peek()));
      }
      take();
      sentence.range = from(start);
      block.sentences.push_back(std::move(sentence));
    }
    take();
    block.range = from(first);
    return block;
  }

  StructureBlock structure() {
    const Token& first = take();
    StructureBlock block;
    block.file = file_;
    block.name = expect_identifier("a structure name");
    expect_punct(":");
    block.vocabulary = expect_identifier("a vocabulary name");
    expect_punct("{");
    while (!check_punct("}")) {
      if (at_end()) fail(eof_, "expected '}' but found end of input");
      block.assignments.push_back(assignment());
    }
    take();
    block.range = from(first);
    return block;
  }

  Assignment assignment() {
    const Token& first = peek();
    Assignment a;
    a.symbol = expect_identifier("a symbol name");
    bool split_ge = false;
    if (accept_punct("<")) {
      const Token& q = peek();
      if (q.is(TokenKind::identifier, "ct")) a.qualifier = Qualifier::certainly_true;
      else if (q.is(TokenKind::identifier, "cf")) a.qualifier = Qualifier::certainly_false;
      else fail(q, "expected 'ct' or 'cf' but found " + describe(q));
      take();
      // `p<ct>={...}` lexes the closing bracket and '=' together as ">=".
      if (check_punct(">=")) {
        take();
        split_ge = true;
      } else {
        expect_punct(">");
      }
    }
    if (!split_ge) {
      if (!check_logical("=")) fail(peek(), "expected '=' but found " + describe(peek()));
      take();
    }
    if (accept_punct("{")) {
      std::vector<Tuple> tuples;
      while (!check_punct("}")) {
        tuples.push_back(tuple());
        if (!accept_punct(";")) break;
      }
      expect_punct("}");
      a.value = std::move(tuples);
    } else if (check_keyword("true") || check_keyword("false")) {
      a.value = take().lexeme == "true";
    } else {
      a.value = element();
    }
    a.range = from(first);
    return a;
  }

  Tuple tuple() {
    Tuple t;
    const bool parenthesized = accept_punct("(");
    t.push_back(element());
    while (accept_punct(",")) t.push_back(element());
    if (parenthesized) expect_punct(")");
    return t;
  }

  Name element() {
    const Token& t = peek();
    if (t.kind != TokenKind::identifier && t.kind != TokenKind::number) {
      fail(t, "expected a domain element but found " + describe(t));
    }
    take();
    return Name{t.lexeme, t.range()};
  }

  ProcedureBlock procedure() {
    const Token& first = take();
    ProcedureBlock block;
    block.file = file_;
    block.name = expect_identifier("a procedure name");
    expect_punct("(");
    if (!check_punct(")")) fail(peek(), "procedure parameters are not supported");
    expect_punct(")");
    block.body = command_block();
    block.range = from(first);
    return block;
  }

  // -- formulas -------------------------------------------------------------

  static bool is_quantifier(const Token& t) {
    return t.kind == TokenKind::logical &&
           (t.lexeme == "!" || t.lexeme == "?" || t.lexeme == "∀" || t.lexeme == "∃");
  }

  Formula formula() {
    DepthGuard guard(*this);
    if (is_quantifier(peek())) return quantified();
    return equivalence();
  }

  Formula quantified() {
    const Token& first = take();
    Formula f;
    f.kind = (first.lexeme == "!" || first.lexeme == "∀") ? FormulaKind::universal
                                                           : FormulaKind::existential;
    f.variables.push_back(bound_variable());
    while (!check_punct(":")) {
      const Token& t = peek();
      if (t.kind != TokenKind::identifier) {
        fail(t, "expected ':' after the quantified variables but found " + describe(t));
      }
      // An identifier directly followed by '(' starts an atom, so the ':' is
      // missing in front of it.
      const Token& after = peek(1);
      const bool continues = after.kind == TokenKind::identifier || after.is(TokenKind::punct, "[") ||
                             after.is(TokenKind::punct, ":");
      if (!continues) fail(t, "expected ':' after the quantified variables but found " + describe(t));
      f.variables.push_back(bound_variable());
    }
    take();
    f.operands.push_back(formula());
    f.range = from(first);
    return f;
  }

  BoundVariable bound_variable() {
    BoundVariable v;
    v.name = expect_identifier("a variable name");
    if (accept_punct("[")) {
      v.declared_type = expect_identifier("a type name");
      expect_punct("]");
    }
    return v;
  }

  Formula binary(FormulaKind kind, Formula lhs, Formula rhs) {
    Formula f;
    f.kind = kind;
    f.range = SourceRange::span(lhs.range, rhs.range);
    f.operands.push_back(std::move(lhs));
    f.operands.push_back(std::move(rhs));
    return f;
  }

  Formula equivalence() {
    Formula lhs = implication();
    while (check_logical("<=>", "⇔")) {
      take();
      lhs = binary(FormulaKind::equivalence, std::move(lhs), operand(&Parser::implication));
    }
    return lhs;
  }

  Formula implication() {
    Formula lhs = disjunction();
    if (check_logical("=>", "⇒")) {
      take();
      DepthGuard guard(*this);
      return binary(FormulaKind::implication, std::move(lhs), operand(&Parser::implication));
    }
    return lhs;
  }

  Formula disjunction() {
    Formula lhs = conjunction();
    while (check_logical("|", "∨")) {
      take();
      lhs = binary(FormulaKind::disjunction, std::move(lhs), operand(&Parser::conjunction));
    }
    return lhs;
  }

  Formula conjunction() {
    Formula lhs = unary();
    while (check_logical("&", "∧")) {
      take();
      lhs = binary(FormulaKind::conjunction, std::move(lhs), operand(&Parser::unary));
    }
    return lhs;
  }

  // A quantifier may appear as the right operand of any connective; its body
  // then extends as far right as possible.
  Formula operand(Formula (Parser::*next)()) {
    if (is_quantifier(peek())) return quantified();
    return (this->*next)();
  }

  Formula unary() {
    DepthGuard guard(*this);
    if (check_logical("~", "¬")) {
      const Token& first = take();
      Formula f;
      f.kind = FormulaKind::negation;
      f.operands.push_back(operand(&Parser::unary));
      f.range = from(first);
      return f;
    }
    return primary();
  }

  Formula primary() {
    const Token& t = peek();
    if (accept_punct("(")) {
      Formula inner = formula();
      expect_punct(")");
      inner.range = from(t);
      return inner;
    }
    if (is_quantifier(t)) return quantified();
    if (check_keyword("true") || check_keyword("false")) {
      take();
      Formula f;
      f.kind = FormulaKind::truth;
      f.value = t.lexeme == "true";
      f.range = t.range();
      return f;
    }
    if (t.kind == TokenKind::number) fail(t, "arithmetic is not supported");
    if (t.kind != TokenKind::identifier) fail(t, "expected a formula but found " + describe(t));

    Formula f;
    f.symbol = expect_identifier("a predicate");
    if (accept_punct("(")) {
      f.kind = FormulaKind::atom;
      if (!check_punct(")")) {
        f.terms.push_back(term());
        while (accept_punct(",")) f.terms.push_back(term());
      }
      expect_punct(")");
      if (check_logical("=")) fail(f.symbol.range, "functions are not supported");
      reject_arithmetic();
      f.range = from(t);
      return f;
    }
    reject_arithmetic();
    if (check_logical("=")) {
      take();
      f.kind = FormulaKind::equality;
      f.terms.push_back(Term{f.symbol, TermKind::unresolved, {}});
      f.terms.push_back(term());
      f.symbol = Name{};
      f.range = from(t);
      return f;
    }
    f.kind = FormulaKind::atom;
    f.range = from(t);
    return f;
  }

  Term term() {
    const Token& t = peek();
    if (t.kind == TokenKind::number) fail(t, "arithmetic is not supported");
    Term term{expect_identifier("a term"), TermKind::unresolved, {}};
    if (check_punct("(")) fail(term.name.range, "functions are not supported");
    reject_arithmetic();
    return term;
  }

  void reject_arithmetic() {
    const Token& t = peek();
    if (t.kind != TokenKind::punct) return;
    static constexpr std::string_view ops[] = {"+", "-", "*", "/", "%", "<", ">", "<=", ">="};
    for (auto op : ops) {
      if (t.lexeme == op) fail(t, "arithmetic is not supported");
    }
  }

  // -- commands -------------------------------------------------------------

  std::vector<Command> command_block() {
    DepthGuard guard(*this);
    expect_punct("{");
    std::vector<Command> body;
    while (!check_punct("}")) {
      if (at_end()) fail(eof_, "expected '}' but found end of input");
      body.push_back(command());
    }
    take();
    return body;
  }

  Command command() {
    const Token& first = peek();
    Command c;
    if (check_keyword("if")) {
      take();
      c.kind = CommandKind::if_else;
      c.expr = expression();
      c.body = command_block();
      if (check_keyword("else")) {
        take();
        if (check_keyword("if")) {
          c.else_body.push_back(command());
        } else {
          c.else_body = command_block();
        }
      }
    } else if (check_keyword("while")) {
      take();
      c.kind = CommandKind::while_loop;
      c.expr = expression();
      c.body = command_block();
    } else if (peek().kind == TokenKind::identifier && check_punct(":=", 1)) {
      c.kind = CommandKind::assign;
      c.target = expect_identifier("a variable");
      take();
      c.expr = expression();
    } else {
      c.kind = CommandKind::expression;
      c.expr = expression();
      // A bare `exit` is shorthand for `exit()`.
      if (c.expr.kind == ExprKind::variable && c.expr.text == "exit") {
        c.expr.kind = ExprKind::call;
      }
    }
    accept_punct(";");
    c.range = from(first);
    return c;
  }

  Expr make_binary(std::string op, Expr lhs, Expr rhs) {
    Expr e;
    e.kind = ExprKind::binary;
    e.text = std::move(op);
    e.range = SourceRange::span(lhs.range, rhs.range);
    e.operands.push_back(std::move(lhs));
    e.operands.push_back(std::move(rhs));
    return e;
  }

  Expr expression() {
    DepthGuard guard(*this);
    Expr lhs = and_expr();
    while (check_logical("|", "∨")) {
      take();
      lhs = make_binary("|", std::move(lhs), and_expr());
    }
    return lhs;
  }

  Expr and_expr() {
    Expr lhs = not_expr();
    while (check_logical("&", "∧")) {
      take();
      lhs = make_binary("&", std::move(lhs), not_expr());
    }
    return lhs;
  }

  Expr not_expr() {
    DepthGuard guard(*this);
    if (check_logical("~", "¬")) {
      const Token& first = take();
      Expr e;
      e.kind = ExprKind::unary;
      e.text = "~";
      e.operands.push_back(not_expr());
      e.range = from(first);
      return e;
    }
    return comparison();
  }

  Expr comparison() {
    Expr lhs = additive();
    std::string op;
    if (check_logical("=")) op = "=";
    for (auto candidate : {"<", ">", "<=", ">="}) {
      if (check_punct(candidate)) op = candidate;
    }
    if (op.empty()) return lhs;
    take();
    return make_binary(op, std::move(lhs), additive());
  }

  Expr additive() {
    Expr lhs = multiplicative();
    while (check_punct("+") || check_punct("-")) {
      std::string op = take().lexeme;
      lhs = make_binary(op, std::move(lhs), multiplicative());
    }
    return lhs;
  }

  Expr multiplicative() {
    Expr lhs = negated();
    while (check_punct("*") || check_punct("/") || check_punct("%")) {
      std::string op = take().lexeme;
      lhs = make_binary(op, std::move(lhs), negated());
    }
    return lhs;
  }

  Expr negated() {
    DepthGuard guard(*this);
    if (check_punct("-")) {
      const Token& first = take();
      Expr e;
      e.kind = ExprKind::unary;
      e.text = "-";
      e.operands.push_back(negated());
      e.range = from(first);
      return e;
    }
    return atom_expr();
  }

  Expr atom_expr() {
    const Token& t = peek();
    Expr e;
    if (accept_punct("(")) {
      e = expression();
      expect_punct(")");
      e.range = from(t);
      return e;
    }
    switch (t.kind) {
      case TokenKind::number: {
        take();
        e.kind = ExprKind::integer;
        const auto [ptr, ec] = std::from_chars(t.lexeme.data(), t.lexeme.data() + t.lexeme.size(), e.integer);
        if (ec != std::errc{}) fail(t, "integer literal out of range");
        break;
      }
      case TokenKind::string:
        take();
        e.kind = ExprKind::string;
        e.text = unescape(t.lexeme);
        break;
      case TokenKind::keyword:
        if (t.lexeme != "true" && t.lexeme != "false") fail(t, "expected an expression but found " + describe(t));
        take();
        e.kind = ExprKind::boolean;
        e.boolean = t.lexeme == "true";
        break;
      case TokenKind::identifier:
        take();
        e.text = t.lexeme;
        if (accept_punct("(")) {
          e.kind = ExprKind::call;
          if (!check_punct(")")) {
            e.operands.push_back(expression());
            while (accept_punct(",")) e.operands.push_back(expression());
          }
          expect_punct(")");
        } else {
          e.kind = ExprKind::variable;
        }
        break;
      default:
        fail(t, "expected an expression but found " + describe(t));
    }
    e.range = from(t);
    return e;
  }

  std::string file_;
  std::vector<Token> tokens_;
  Token eof_;
  std::size_t pos_ = 0;
  int depth_ = 0;
  std::vector<Diagnostic> diagnostics_;
};

}  // namespace

ParseResult parse(std::string_view text, const std::string& file) {
  return Parser(text, file).program();
}

CommandParseResult parse_commands(std::string_view text, const std::string& file) {
  return Parser(text, file).commands();
}

}  // namespace idp::lang
