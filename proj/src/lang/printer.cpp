#include "idp/lang/printer.hpp"

#include <sstream>

namespace idp::lang {

namespace {

constexpr int kIndent = 4;

std::string pad(int level) { return std::string(static_cast<std::size_t>(level * kIndent), ' '); }

bool is_simple(const Formula& f) {
  return f.kind == FormulaKind::atom || f.kind == FormulaKind::equality ||
         f.kind == FormulaKind::truth || f.kind == FormulaKind::negation;
}

const char* connective(FormulaKind kind) {
  switch (kind) {
    case FormulaKind::conjunction: return " & ";
    case FormulaKind::disjunction: return " | ";
    case FormulaKind::implication: return " => ";
    case FormulaKind::equivalence: return " <=> ";
    default: return " ? ";
  }
}

void print_formula(std::ostream& out, const Formula& f);

void print_operand(std::ostream& out, const Formula& f) {
  if (is_simple(f)) {
    print_formula(out, f);
  } else {
    out << '(';
    print_formula(out, f);
    out << ')';
  }
}

void print_formula(std::ostream& out, const Formula& f) {
  switch (f.kind) {
    case FormulaKind::atom:
      out << f.symbol.text;
      if (!f.terms.empty()) {
        out << '(';
        for (std::size_t i = 0; i < f.terms.size(); ++i) out << (i ? ", " : "") << f.terms[i].name.text;
        out << ')';
      }
      break;
    case FormulaKind::equality:
      out << f.terms[0].name.text << " = " << f.terms[1].name.text;
      break;
    case FormulaKind::truth:
      out << (f.value ? "true" : "false");
      break;
    case FormulaKind::negation:
      out << '~';
      print_operand(out, f.operands[0]);
      break;
    case FormulaKind::conjunction:
    case FormulaKind::disjunction:
    case FormulaKind::implication:
    case FormulaKind::equivalence:
      print_operand(out, f.operands[0]);
      out << connective(f.kind);
      print_operand(out, f.operands[1]);
      break;
    case FormulaKind::universal:
    case FormulaKind::existential:
      out << (f.kind == FormulaKind::universal ? '!' : '?');
      for (std::size_t i = 0; i < f.variables.size(); ++i) {
        const auto& v = f.variables[i];
        out << (i ? " " : "") << v.name.text;
        if (v.declared_type) out << '[' << v.declared_type->text << ']';
      }
      out << ": ";
      print_formula(out, f.operands[0]);
      break;
  }
}

void print_expr(std::ostream& out, const Expr& e);

void print_expr_operand(std::ostream& out, const Expr& e) {
  if (e.kind == ExprKind::binary || e.kind == ExprKind::unary) {
    out << '(';
    print_expr(out, e);
    out << ')';
  } else {
    print_expr(out, e);
  }
}

void print_expr(std::ostream& out, const Expr& e) {
  switch (e.kind) {
    case ExprKind::integer: out << e.integer; break;
    case ExprKind::boolean: out << (e.boolean ? "true" : "false"); break;
    case ExprKind::string: out << quote(e.text); break;
    case ExprKind::variable: out << e.text; break;
    case ExprKind::unary:
      out << e.text;
      print_expr_operand(out, e.operands[0]);
      break;
    case ExprKind::binary:
      print_expr_operand(out, e.operands[0]);
      out << ' ' << e.text << ' ';
      print_expr_operand(out, e.operands[1]);
      break;
    case ExprKind::call:
      out << e.text << '(';
      for (std::size_t i = 0; i < e.operands.size(); ++i) {
        if (i) out << ", ";
        print_expr(out, e.operands[i]);
      }
      out << ')';
      break;
  }
}

void print_commands(std::ostream& out, const std::vector<Command>& commands, int level);

void print_command(std::ostream& out, const Command& c, int level) {
  out << pad(level);
  switch (c.kind) {
    case CommandKind::assign:
      out << c.target.text << " := ";
      print_expr(out, c.expr);
      break;
    case CommandKind::expression:
      print_expr(out, c.expr);
      break;
    case CommandKind::while_loop:
      out << "while ";
      print_expr(out, c.expr);
      out << " {\n";
      print_commands(out, c.body, level + 1);
      out << pad(level) << '}';
      break;
    case CommandKind::if_else:
      out << "if ";
      print_expr(out, c.expr);
      out << " {\n";
      print_commands(out, c.body, level + 1);
      out << pad(level) << '}';
      if (!c.else_body.empty()) {
        out << " else {\n";
        print_commands(out, c.else_body, level + 1);
        out << pad(level) << '}';
      }
      break;
  }
}

void print_commands(std::ostream& out, const std::vector<Command>& commands, int level) {
  for (const auto& c : commands) {
    print_command(out, c, level);
    out << '\n';
  }
}

void print_value(std::ostream& out, const Assignment& a) {
  if (const auto* b = std::get_if<bool>(&a.value)) {
    out << (*b ? "true" : "false");
  } else if (const auto* e = std::get_if<Name>(&a.value)) {
    out << e->text;
  } else {
    const auto& tuples = std::get<std::vector<Tuple>>(a.value);
    if (tuples.empty()) {
      out << "{}";
      return;
    }
    out << "{ ";
    for (std::size_t i = 0; i < tuples.size(); ++i) {
      if (i) out << "; ";
      for (std::size_t k = 0; k < tuples[i].size(); ++k) out << (k ? "," : "") << tuples[i][k].text;
    }
    out << " }";
  }
}

struct BlockPrinter {
  std::ostream& out;

  void operator()(const VocabularyBlock& b) const {
    out << "vocabulary " << b.name.text << " {\n";
    for (const auto& decl : b.decls) {
      out << pad(1);
      if (const auto* t = std::get_if<TypeDecl>(&decl)) {
        out << "type " << t->name.text;
      } else if (const auto* p = std::get_if<PredicateDecl>(&decl)) {
        out << p->name.text;
        if (!p->arg_types.empty()) {
          out << '(';
          for (std::size_t i = 0; i < p->arg_types.size(); ++i) out << (i ? ", " : "") << p->arg_types[i].text;
          out << ')';
        }
      } else {
        const auto& c = std::get<ConstantDecl>(decl);
        out << c.name.text << " : " << c.type.text;
      }
      out << '\n';
    }
    out << "}\n";
  }

  void operator()(const TheoryBlock& b) const {
    out << "theory " << b.name.text << " : " << b.vocabulary.text << " {\n";
    for (const auto& s : b.sentences) {
      out << pad(1);
      print_formula(out, s.formula);
      out << ".\n";
    }
    out << "}\n";
  }

  void operator()(const StructureBlock& b) const {
    out << "structure " << b.name.text << " : " << b.vocabulary.text << " {\n";
    for (const auto& a : b.assignments) {
      out << pad(1) << a.symbol.text;
      if (a.qualifier == Qualifier::certainly_true) out << "<ct>";
      if (a.qualifier == Qualifier::certainly_false) out << "<cf>";
      out << " = ";
      print_value(out, a);
      out << '\n';
    }
    out << "}\n";
  }

  void operator()(const ProcedureBlock& b) const {
    out << "procedure " << b.name.text << "() {\n";
    print_commands(out, b.body, 1);
    out << "}\n";
  }
};

// -- location stripping -----------------------------------------------------

void strip(Name& n) { n.range = {}; }

void strip(Formula& f) {
  f.range = {};
  strip(f.symbol);
  for (auto& t : f.terms) strip(t.name);
  for (auto& v : f.variables) {
    strip(v.name);
    if (v.declared_type) strip(*v.declared_type);
  }
  for (auto& o : f.operands) strip(o);
}

void strip(Expr& e) {
  e.range = {};
  for (auto& o : e.operands) strip(o);
}

void strip(Command& c) {
  c.range = {};
  strip(c.target);
  strip(c.expr);
  for (auto& b : c.body) strip(b);
  for (auto& b : c.else_body) strip(b);
}

struct Stripper {
  void operator()(VocabularyBlock& b) const {
    for (auto& decl : b.decls) {
      std::visit(
          [](auto& d) {
            d.range = {};
            strip(d.name);
            if constexpr (requires { d.arg_types; }) {
              for (auto& t : d.arg_types) strip(t);
            }
            if constexpr (requires { d.type; }) strip(d.type);
          },
          decl);
    }
  }
  void operator()(TheoryBlock& b) const {
    strip(b.vocabulary);
    for (auto& s : b.sentences) {
      s.range = {};
      strip(s.formula);
    }
  }
  void operator()(StructureBlock& b) const {
    strip(b.vocabulary);
    for (auto& a : b.assignments) {
      a.range = {};
      strip(a.symbol);
      if (auto* e = std::get_if<Name>(&a.value)) strip(*e);
      if (auto* tuples = std::get_if<std::vector<Tuple>>(&a.value)) {
        for (auto& t : *tuples) {
          for (auto& e : t) strip(e);
        }
      }
    }
  }
  void operator()(ProcedureBlock& b) const {
    for (auto& c : b.body) strip(c);
  }
};

}  // namespace

std::string quote(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += '"';
  return out;
}

std::string print(const Formula& formula) {
  std::ostringstream out;
  print_formula(out, formula);
  return out.str();
}

std::string print(const Expr& expr) {
  std::ostringstream out;
  print_expr(out, expr);
  return out.str();
}

std::string print(const Command& command, int indent) {
  std::ostringstream out;
  print_command(out, command, indent);
  return out.str();
}

std::string print(const Block& block) {
  std::ostringstream out;
  std::visit(BlockPrinter{out}, block);
  return out.str();
}

std::string print(const Program& program) {
  std::ostringstream out;
  for (std::size_t i = 0; i < program.blocks.size(); ++i) {
    if (i) out << '\n';
    std::visit(BlockPrinter{out}, program.blocks[i]);
  }
  return out.str();
}

const Name& block_name(const Block& block) {
  return std::visit([](const auto& b) -> const Name& { return b.name; }, block);
}

const std::string& block_file(const Block& block) {
  return std::visit([](const auto& b) -> const std::string& { return b.file; }, block);
}

const char* block_kind(const Block& block) {
  switch (block.index()) {
    case 0: return "vocabulary";
    case 1: return "theory";
    case 2: return "structure";
    default: return "procedure";
  }
}

Program without_locations(Program program) {
  for (auto& block : program.blocks) {
    std::visit(
        [](auto& b) {
          b.range = {};
          b.file.clear();
          strip(b.name);
        },
        block);
    std::visit(Stripper{}, block);
  }
  return program;
}

}  // namespace idp::lang
