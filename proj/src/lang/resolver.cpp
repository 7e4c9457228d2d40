#include "idp/lang/resolver.hpp"

#include <algorithm>
#include <set>

#include "idp/lang/parser.hpp"
#include "idp/lang/printer.hpp"

namespace idp::lang {

namespace {

struct CommandSpec {
  std::string_view name;
  std::size_t min_args;
  std::size_t max_args;
};

// The complete set of procedure commands. Nothing here reaches the file
// system or the network.
constexpr CommandSpec kCommands[] = {
    {"print", 0, 64},       {"ask", 0, 1},       {"int", 1, 1},          {"exit", 0, 1},
    {"modelexpand", 2, 3},  {"propagate", 2, 2}, {"unsatcore", 2, 2},    {"draw_grid", 2, 2},
    {"draw_cell", 3, 3},    {"draw_label", 3, 3}, {"onclick", 2, 2},
};

const CommandSpec* find_command(std::string_view name) {
  for (const auto& spec : kCommands) {
    if (spec.name == name) return &spec;
  }
  return nullptr;
}

struct ScopedVariable {
  std::string name;
  std::string type;
};

class Resolver {
 public:
  ResolveResult run(Program program) {
    program_ = std::move(program);
    collect_blocks();
    for (auto& block : program_.blocks) {
      if (auto* v = std::get_if<VocabularyBlock>(&block)) declare(*v);
    }
    for (auto& block : program_.blocks) {
      if (auto* t = std::get_if<TheoryBlock>(&block)) resolve(*t);
    }
    for (auto& block : program_.blocks) {
      if (auto* s = std::get_if<StructureBlock>(&block)) resolve(*s);
    }
    warn_unused();

    TypedProgram typed;
    typed.vocabularies = std::move(vocabularies_);
    typed.program = std::move(program_);
    for (auto& block : typed.program.blocks) {
      if (auto* p = std::get_if<ProcedureBlock>(&block)) {
        auto found = check_commands(p->body, typed, p->file);
        diagnostics_.insert(diagnostics_.end(), found.begin(), found.end());
      }
    }

    ResolveResult result;
    if (!has_errors(diagnostics_)) result.program = std::move(typed);
    result.diagnostics = std::move(diagnostics_);
    return result;
  }

 private:
  void error(const std::string& file, const SourceRange& range, std::string message) {
    diagnostics_.push_back({Severity::error, file, range, std::move(message), {}});
  }
  void warning(const std::string& file, const SourceRange& range, std::string message) {
    diagnostics_.push_back({Severity::warning, file, range, std::move(message), {}});
  }

  void collect_blocks() {
    std::set<std::string> seen;
    for (const auto& block : program_.blocks) {
      const auto& name = block_name(block);
      if (!seen.insert(name.text).second) {
        error(block_file(block), name.range, "duplicate block name " + name.text);
      }
    }
  }

  // -- vocabularies -----------------------------------------------------------

  void declare(const VocabularyBlock& block) {
    if (vocabularies_.contains(block.name.text)) return;  // reported as duplicate
    Vocabulary vocab;
    vocab.name = block.name.text;
    vocab.file = block.file;
    std::map<std::string, const Name*> names;

    auto fresh = [&](const Name& name) {
      if (names.contains(name.text)) {
        error(block.file, name.range, "duplicate symbol " + name.text);
        return false;
      }
      names[name.text] = &name;
      return true;
    };
    for (const auto& decl : block.decls) {
      if (const auto* t = std::get_if<TypeDecl>(&decl)) {
        if (fresh(t->name)) {
          vocab.types.push_back(t->name.text);
          declared_at_[{vocab.name, t->name.text}] = t->name.range;
        }
      }
    }
    auto check_type = [&](const Name& type) {
      if (!vocab.has_type(type.text)) {
        error(block.file, type.range, "unknown type " + type.text);
        return;
      }
      used_.insert({vocab.name, type.text});
    };
    for (const auto& decl : block.decls) {
      if (const auto* p = std::get_if<PredicateDecl>(&decl)) {
        for (const auto& type : p->arg_types) check_type(type);
        if (!fresh(p->name)) continue;
        PredicateSymbol symbol{p->name.text, {}, p->name.range};
        for (const auto& type : p->arg_types) symbol.arg_types.push_back(type.text);
        vocab.predicates.push_back(std::move(symbol));
        declared_at_[{vocab.name, p->name.text}] = p->name.range;
      } else if (const auto* c = std::get_if<ConstantDecl>(&decl)) {
        check_type(c->type);
        if (!fresh(c->name)) continue;
        vocab.constants.push_back({c->name.text, c->type.text, c->name.range});
        declared_at_[{vocab.name, c->name.text}] = c->name.range;
      }
    }
    vocabularies_.emplace(vocab.name, std::move(vocab));
  }

  const Vocabulary* lookup_vocabulary(const Name& name, const std::string& file) {
    auto it = vocabularies_.find(name.text);
    if (it == vocabularies_.end()) {
      error(file, name.range, "unknown vocabulary " + name.text);
      return nullptr;
    }
    return &it->second;
  }

  void warn_unused() {
    for (const auto& [name, vocab] : vocabularies_) {
      auto check = [&](const std::string& symbol, const char* what) {
        if (used_.contains({name, symbol})) return;
        warning(vocab.file, declared_at_[{name, symbol}],
                std::string(what) + " " + symbol + " is declared but never used");
      };
      for (const auto& t : vocab.types) check(t, "type");
      for (const auto& p : vocab.predicates) check(p.name, "predicate");
      for (const auto& c : vocab.constants) check(c.name, "constant");
    }
  }

  // -- theories ---------------------------------------------------------------

  void resolve(TheoryBlock& theory) {
    vocab_ = lookup_vocabulary(theory.vocabulary, theory.file);
    if (!vocab_) return;
    file_ = theory.file;
    for (auto& sentence : theory.sentences) {
      scope_.clear();
      resolve(sentence.formula);
    }
  }

  const ScopedVariable* in_scope(std::string_view name) const {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it) {
      if (it->name == name) return &*it;
    }
    return nullptr;
  }

  void resolve(Formula& f) {
    switch (f.kind) {
      case FormulaKind::truth:
        return;
      case FormulaKind::atom:
        resolve_atom(f);
        return;
      case FormulaKind::equality: {
        const auto lhs = resolve_term(f.terms[0]);
        const auto rhs = resolve_term(f.terms[1]);
        if (!lhs.empty() && !rhs.empty() && lhs != rhs) {
          error(file_, f.range, "cannot compare " + f.terms[0].name.text + " of type " + lhs + " with " +
                                    f.terms[1].name.text + " of type " + rhs);
        }
        return;
      }
      case FormulaKind::universal:
      case FormulaKind::existential:
        resolve_quantifier(f);
        return;
      default:
        for (auto& o : f.operands) resolve(o);
    }
  }

  void resolve_atom(Formula& f) {
    const auto* predicate = vocab_->predicate(f.symbol.text);
    if (!predicate) {
      if (vocab_->constant(f.symbol.text) || vocab_->has_type(f.symbol.text)) {
        error(file_, f.symbol.range, f.symbol.text + " is not a predicate");
      } else {
        error(file_, f.symbol.range, "unknown predicate " + f.symbol.text);
      }
      for (auto& t : f.terms) resolve_term(t);
      return;
    }
    used_.insert({vocab_->name, predicate->name});
    if (predicate->arg_types.size() != f.terms.size()) {
      error(file_, f.range,
            "predicate " + predicate->name + " expects " + std::to_string(predicate->arg_types.size()) +
                " argument(s) but got " + std::to_string(f.terms.size()));
      for (auto& t : f.terms) resolve_term(t);
      return;
    }
    for (std::size_t i = 0; i < f.terms.size(); ++i) {
      const auto type = resolve_term(f.terms[i]);
      if (!type.empty() && type != predicate->arg_types[i]) {
        error(file_, f.terms[i].name.range,
              "argument " + std::to_string(i + 1) + " of " + predicate->name + " must be of type " +
                  predicate->arg_types[i] + " but " + f.terms[i].name.text + " has type " + type);
      }
    }
  }

  // Returns the term's type, or "" when it could not be resolved.
  std::string resolve_term(Term& term) {
    if (const auto* v = in_scope(term.name.text)) {
      term.kind = TermKind::variable;
      term.type = v->type;
      return v->type;
    }
    if (const auto* c = vocab_->constant(term.name.text)) {
      used_.insert({vocab_->name, c->name});
      term.kind = TermKind::constant;
      term.type = c->type;
      return c->type;
    }
    if (vocab_->predicate(term.name.text)) {
      error(file_, term.name.range, term.name.text + " is a predicate, not a term");
    } else {
      error(file_, term.name.range, "unbound variable or unknown constant " + term.name.text);
    }
    return {};
  }

  void resolve_quantifier(Formula& f) {
    const std::size_t depth = scope_.size();
    std::set<std::string> local;
    for (auto& v : f.variables) {
      if (!local.insert(v.name.text).second) {
        error(file_, v.name.range, "variable " + v.name.text + " is bound twice by the same quantifier");
      } else if (in_scope(v.name.text)) {
        warning(file_, v.name.range, "variable " + v.name.text + " shadows an outer variable");
      } else if (vocab_->constant(v.name.text)) {
        warning(file_, v.name.range, "variable " + v.name.text + " shadows a constant");
      }
      if (v.declared_type) {
        if (!vocab_->has_type(v.declared_type->text)) {
          error(file_, v.declared_type->range, "unknown type " + v.declared_type->text);
        } else {
          used_.insert({vocab_->name, v.declared_type->text});
          v.type = v.declared_type->text;
        }
      } else {
        v.type = infer_type(v.name, f.variables, f.operands[0]);
      }
      scope_.push_back({v.name.text, v.type});
    }
    // A variable of unknown type is still pushed so that its uses do not
    // produce follow-up "unbound" errors.
    resolve(f.operands[0]);
    scope_.resize(depth);
  }

  // Type of `var` from how the body uses it: predicate argument positions,
  // equalities with constants, and equalities with variables of known type.
  std::string infer_type(const Name& var, const std::vector<BoundVariable>& siblings, const Formula& body) {
    std::set<std::string> found;
    bool in_bad_atom = false;
    collect_uses(var.text, siblings, body, found, in_bad_atom);
    if (found.empty()) {
      // The unknown predicate or arity mismatch is reported on its own.
      if (in_bad_atom) return {};
      error(file_, var.range, "cannot infer the type of variable " + var.text + "; write " + var.text + "[Type]");
      return {};
    }
    if (found.size() > 1) {
      std::string list;
      for (const auto& t : found) list += (list.empty() ? "" : " and ") + t;
      error(file_, var.range, "variable " + var.text + " is used with types " + list);
      return {};
    }
    return *found.begin();
  }

  void collect_uses(const std::string& var, const std::vector<BoundVariable>& siblings, const Formula& f,
                    std::set<std::string>& found, bool& in_bad_atom) const {
    switch (f.kind) {
      case FormulaKind::atom: {
        const auto* p = vocab_->predicate(f.symbol.text);
        const bool valid = p && p->arg_types.size() == f.terms.size();
        for (std::size_t i = 0; i < f.terms.size(); ++i) {
          if (f.terms[i].name.text != var) continue;
          if (valid) found.insert(p->arg_types[i]);
          else in_bad_atom = true;
        }
        return;
      }
      case FormulaKind::equality:
        for (int side = 0; side < 2; ++side) {
          if (f.terms[side].name.text != var) continue;
          const auto& other = f.terms[1 - side].name.text;
          if (other == var) continue;
          if (const auto* v = in_scope(other)) {
            if (!v->type.empty()) found.insert(v->type);
          } else if (auto s = std::find_if(siblings.begin(), siblings.end(),
                                           [&](const BoundVariable& b) { return b.name.text == other; });
                     s != siblings.end()) {
            if (s->declared_type) found.insert(s->declared_type->text);
          } else if (const auto* c = vocab_->constant(other)) {
            found.insert(c->type);
          }
        }
        return;
      case FormulaKind::universal:
      case FormulaKind::existential:
        for (const auto& v : f.variables) {
          if (v.name.text == var) return;  // rebound below this point
        }
        collect_uses(var, siblings, f.operands[0], found, in_bad_atom);
        return;
      default:
        for (const auto& o : f.operands) collect_uses(var, siblings, o, found, in_bad_atom);
    }
  }

  // -- structures -------------------------------------------------------------

  void resolve(const StructureBlock& s) {
    const auto* vocab = lookup_vocabulary(s.vocabulary, s.file);
    if (!vocab) return;
    std::map<std::string, std::set<std::string>> domains;
    std::set<std::pair<std::string, Qualifier>> assigned;
    std::map<std::string, std::map<std::vector<std::string>, std::pair<Qualifier, SourceRange>>> facts;

    for (const auto& a : s.assignments) {
      if (!vocab->has_type(a.symbol.text)) continue;
      if (!assigned.insert({a.symbol.text, a.qualifier}).second) {
        error(s.file, a.range, "type " + a.symbol.text + " is interpreted twice");
        continue;
      }
      const auto* tuples = std::get_if<std::vector<Tuple>>(&a.value);
      if (a.qualifier != Qualifier::total || !tuples) {
        error(s.file, a.range, "type " + a.symbol.text + " must be interpreted as a set of elements");
        continue;
      }
      auto& domain = domains[a.symbol.text];
      for (const auto& t : *tuples) {
        if (t.size() != 1) {
          error(s.file, t.front().range, "elements of type " + a.symbol.text + " must not be tuples");
          continue;
        }
        if (!domain.insert(t.front().text).second) {
          error(s.file, t.front().range, "duplicate element " + t.front().text + " in type " + a.symbol.text);
        }
      }
      if (tuples->empty()) error(s.file, a.range, "type " + a.symbol.text + " must have a nonempty domain");
    }
    for (const auto& type : vocab->types) {
      if (!domains.contains(type)) error(s.file, s.name.range, "type " + type + " is not interpreted");
    }

    auto in_domain = [&](const Name& element, const std::string& type) {
      auto it = domains.find(type);
      if (it == domains.end()) return;  // already reported
      if (!it->second.contains(element.text)) {
        error(s.file, element.range, "element " + element.text + " is not in the domain of " + type);
      }
    };

    for (const auto& a : s.assignments) {
      if (vocab->has_type(a.symbol.text)) continue;
      if (const auto* c = vocab->constant(a.symbol.text)) {
        const auto* element = std::get_if<Name>(&a.value);
        if (a.qualifier != Qualifier::total || !element) {
          error(s.file, a.range, "constant " + c->name + " must be interpreted as a single element");
          continue;
        }
        if (!assigned.insert({a.symbol.text, a.qualifier}).second) {
          error(s.file, a.range, "constant " + c->name + " is interpreted twice");
          continue;
        }
        in_domain(*element, c->type);
        continue;
      }
      const auto* p = vocab->predicate(a.symbol.text);
      if (!p) {
        error(s.file, a.symbol.range, "unknown symbol " + a.symbol.text);
        continue;
      }
      if (!assigned.insert({a.symbol.text, a.qualifier}).second) {
        error(s.file, a.range, "predicate " + p->name + " is interpreted twice");
        continue;
      }
      const bool total = a.qualifier == Qualifier::total;
      if ((total && (assigned.contains({p->name, Qualifier::certainly_true}) ||
                     assigned.contains({p->name, Qualifier::certainly_false}))) ||
          (!total && assigned.contains({p->name, Qualifier::total}))) {
        error(s.file, a.range, "predicate " + p->name + " is interpreted both totally and partially");
        continue;
      }
      if (p->arg_types.empty()) {
        if (!std::holds_alternative<bool>(a.value) || !total) {
          error(s.file, a.range, "0-ary predicate " + p->name + " must be interpreted as true or false");
        }
        continue;
      }
      const auto* tuples = std::get_if<std::vector<Tuple>>(&a.value);
      if (!tuples) {
        error(s.file, a.range, "predicate " + p->name + " must be interpreted as a set of tuples");
        continue;
      }
      for (const auto& t : *tuples) {
        const SourceRange range = SourceRange::span(t.front().range, t.back().range);
        if (t.size() != p->arg_types.size()) {
          error(s.file, range,
                "tuple of " + p->name + " must have " + std::to_string(p->arg_types.size()) + " element(s)");
          continue;
        }
        std::vector<std::string> key;
        for (std::size_t i = 0; i < t.size(); ++i) {
          in_domain(t[i], p->arg_types[i]);
          key.push_back(t[i].text);
        }
        auto [it, inserted] = facts[p->name].emplace(key, std::make_pair(a.qualifier, range));
        if (!inserted && it->second.first != a.qualifier) {
          error(s.file, range, "atom " + p->name + " is both certainly true and certainly false");
        }
      }
    }
  }

  Program program_;
  std::map<std::string, Vocabulary, std::less<>> vocabularies_;
  std::set<std::pair<std::string, std::string>> used_;
  std::map<std::pair<std::string, std::string>, SourceRange> declared_at_;
  std::vector<Diagnostic> diagnostics_;

  const Vocabulary* vocab_ = nullptr;
  std::string file_;
  std::vector<ScopedVariable> scope_;
};

void check_expr(const Expr& e, const TypedProgram& program, const std::string& file,
                std::vector<Diagnostic>& out) {
  for (const auto& o : e.operands) check_expr(o, program, file, out);
  if (e.kind != ExprKind::call) return;
  const auto* spec = find_command(e.text);
  if (!spec) {
    out.push_back({Severity::error, file, e.range, "unknown command " + e.text, {}});
    return;
  }
  const auto n = e.operands.size();
  if (n < spec->min_args || n > spec->max_args) {
    const std::string expected = spec->min_args == spec->max_args
                                     ? std::to_string(spec->min_args)
                                     : std::to_string(spec->min_args) + " to " + std::to_string(spec->max_args);
    out.push_back({Severity::error, file, e.range,
                   e.text + " expects " + expected + " argument(s) but got " + std::to_string(n), {}});
    return;
  }
  if (e.text == "onclick") {
    for (const auto& o : e.operands) {
      if (o.kind != ExprKind::variable) {
        out.push_back({Severity::error, file, o.range, "onclick expects variable names to bind", {}});
      }
    }
  }
  if (e.text == "modelexpand" || e.text == "propagate" || e.text == "unsatcore") {
    const auto& t = e.operands[0];
    const auto& s = e.operands[1];
    const TheoryBlock* theory = t.kind == ExprKind::variable ? program.theory(t.text) : nullptr;
    const StructureBlock* structure = s.kind == ExprKind::variable ? program.structure(s.text) : nullptr;
    if (!theory) out.push_back({Severity::error, file, t.range, "unknown theory " + print(t), {}});
    if (!structure) out.push_back({Severity::error, file, s.range, "unknown structure " + print(s), {}});
    if (theory && structure && theory->vocabulary.text != structure->vocabulary.text) {
      out.push_back({Severity::error, file, e.range,
                     "theory " + t.text + " and structure " + s.text + " have different vocabularies", {}});
    }
  }
}

void check_command(const Command& c, const TypedProgram& program, const std::string& file,
                   std::vector<Diagnostic>& out) {
  check_expr(c.expr, program, file, out);
  for (const auto& b : c.body) check_command(b, program, file, out);
  for (const auto& b : c.else_body) check_command(b, program, file, out);
}

}  // namespace

bool Vocabulary::has_type(std::string_view type) const {
  return std::find(types.begin(), types.end(), type) != types.end();
}

const PredicateSymbol* Vocabulary::predicate(std::string_view n) const {
  for (const auto& p : predicates) {
    if (p.name == n) return &p;
  }
  return nullptr;
}

const ConstantSymbol* Vocabulary::constant(std::string_view n) const {
  for (const auto& c : constants) {
    if (c.name == n) return &c;
  }
  return nullptr;
}

namespace {
template <typename T>
const T* find_block(const Program& program, std::string_view name) {
  for (const auto& block : program.blocks) {
    if (const auto* b = std::get_if<T>(&block); b && b->name.text == name) return b;
  }
  return nullptr;
}
}  // namespace

const Vocabulary* TypedProgram::vocabulary(std::string_view name) const {
  auto it = vocabularies.find(name);
  return it == vocabularies.end() ? nullptr : &it->second;
}
const TheoryBlock* TypedProgram::theory(std::string_view name) const {
  return find_block<TheoryBlock>(program, name);
}
const StructureBlock* TypedProgram::structure(std::string_view name) const {
  return find_block<StructureBlock>(program, name);
}
const ProcedureBlock* TypedProgram::procedure(std::string_view name) const {
  return find_block<ProcedureBlock>(program, name);
}

ResolveResult resolve(Program program) { return Resolver{}.run(std::move(program)); }

std::vector<Diagnostic> check_commands(const std::vector<Command>& commands, const TypedProgram& program,
                                       const std::string& file) {
  std::vector<Diagnostic> out;
  for (const auto& c : commands) check_command(c, program, file, out);
  return out;
}

Analysis analyze(const std::vector<SourceFile>& files) {
  Analysis analysis;
  Program merged;
  for (const auto& f : files) {
    auto parsed = parse(f.content, f.name);
    analysis.diagnostics.insert(analysis.diagnostics.end(), parsed.diagnostics.begin(), parsed.diagnostics.end());
    for (auto& b : parsed.program.blocks) merged.blocks.push_back(std::move(b));
  }
  if (has_errors(analysis.diagnostics)) return analysis;
  auto resolved = resolve(std::move(merged));
  analysis.diagnostics.insert(analysis.diagnostics.end(), resolved.diagnostics.begin(), resolved.diagnostics.end());
  analysis.program = std::move(resolved.program);
  return analysis;
}

}  // namespace idp::lang
