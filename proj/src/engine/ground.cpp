#include "idp/engine/ground.hpp"

#include <algorithm>
#include <stdexcept>

namespace idp::engine {

namespace {

// Ground formula in negation normal form.
struct Node {
  enum class Kind { top, bottom, literal, conjunction, disjunction } kind = Kind::top;
  Literal literal = 0;
  std::vector<Node> children;

  static Node constant(bool value) { return {value ? Kind::top : Kind::bottom, 0, {}}; }
  static Node lit(Literal l) { return {Kind::literal, l, {}}; }
};

// Builds a conjunction or disjunction, folding constants and flattening
// nested connectives of the same kind.
Node junction(Node::Kind kind, std::vector<Node> parts) {
  const auto absorbing = kind == Node::Kind::conjunction ? Node::Kind::bottom : Node::Kind::top;
  const auto neutral = kind == Node::Kind::conjunction ? Node::Kind::top : Node::Kind::bottom;
  Node out{kind, 0, {}};
  for (auto& p : parts) {
    if (p.kind == absorbing) return Node{absorbing, 0, {}};
    if (p.kind == neutral) continue;
    if (p.kind == kind) {
      for (auto& c : p.children) out.children.push_back(std::move(c));
    } else {
      out.children.push_back(std::move(p));
    }
  }
  if (out.children.empty()) return Node{neutral, 0, {}};
  if (out.children.size() == 1) return std::move(out.children.front());
  return out;
}

Node both(Node a, Node b, Node::Kind kind) {
  std::vector<Node> parts;
  parts.push_back(std::move(a));
  parts.push_back(std::move(b));
  return junction(kind, std::move(parts));
}

class Grounder {
 public:
  Grounder(const lang::TheoryBlock& theory, const PartialStructure& s, const Budget& budget)
      : theory_(theory), s_(s), budget_(budget) {}

  GroundProblem run() {
    if (theory_.vocabulary.text != s_.vocabulary().name) {
      throw std::invalid_argument("theory " + theory_.name.text + " and structure " + s_.name() +
                                  " have different vocabularies");
    }
    const auto& vocab = s_.vocabulary();
    if (s_.total_atom_count() > budget_.limits.ground_atoms_max) throw LimitError(LimitKind::ground_atoms);

    // Atoms first, in creation order: predicates in declaration order, then
    // `constant = element` atoms for uninterpreted constants.
    atom_offset_.resize(s_.predicate_count());
    for (std::size_t p = 0; p < s_.predicate_count(); ++p) {
      atom_offset_[p] = static_cast<int>(problem_.atoms.size());
      for (std::size_t i = 0; i < s_.atom_count(p); ++i) {
        problem_.atoms.push_back({AtomRef::Kind::predicate, p, i});
      }
    }
    constant_offset_.assign(vocab.constants.size(), -1);
    for (std::size_t c = 0; c < vocab.constants.size(); ++c) {
      if (s_.constant(c)) continue;
      constant_offset_[c] = static_cast<int>(problem_.atoms.size());
      for (std::size_t e = 0; e < s_.domain(vocab.constants[c].type).size(); ++e) {
        problem_.atoms.push_back({AtomRef::Kind::constant, c, e});
      }
    }
    if (problem_.atoms.size() > budget_.limits.ground_atoms_max) throw LimitError(LimitKind::ground_atoms);
    problem_.variable_count = problem_.atom_count();

    for (std::size_t i = 0; i < theory_.sentences.size(); ++i) ground_sentence(static_cast<int>(i) + 1);
    add_structure_facts();
    return std::move(problem_);
  }

 private:
  struct Bound {
    std::string name;
    std::size_t element;
  };

  void ground_sentence(int id) {
    const auto& sentence = theory_.sentences[static_cast<std::size_t>(id - 1)];
    // Collect the leading universal prefix.
    const lang::Formula* body = &sentence.formula;
    std::vector<const lang::BoundVariable*> prefix;
    while (body->kind == lang::FormulaKind::universal) {
      for (const auto& v : body->variables) prefix.push_back(&v);
      body = &body->operands[0];
    }
    std::vector<std::size_t> sizes;
    for (const auto* v : prefix) sizes.push_back(s_.domain(v->type).size());

    std::vector<std::size_t> choice(prefix.size(), 0);
    while (true) {
      budget_.stop.poll();
      Instantiation inst{id, sentence.range, {}};
      env_.clear();
      for (std::size_t k = 0; k < prefix.size(); ++k) {
        env_.push_back({prefix[k]->name.text, choice[k]});
        inst.substitution.emplace_back(prefix[k]->name.text, s_.domain(prefix[k]->type)[choice[k]]);
      }
      current_ = static_cast<int>(problem_.instantiations.size());
      problem_.instantiations.push_back(std::move(inst));
      clausify_root(ground(*body, true));

      std::size_t k = choice.size();
      while (k-- > 0) {
        if (++choice[k] < sizes[k]) break;
        choice[k] = 0;
      }
      if (k == static_cast<std::size_t>(-1)) break;
    }
  }

  void grow(std::size_t n = 1) {
    size_ += n;
    if (size_ > 64 * std::max<std::size_t>(budget_.limits.ground_atoms_max, 1)) {
      throw LimitError(LimitKind::ground_atoms);
    }
    if ((size_ & 0xFFF) == 0) budget_.stop.poll();
  }

  // -- terms ----------------------------------------------------------------

  // A term evaluates either to a known element or to an uninterpreted
  // constant whose value is encoded by `constant = element` atoms.
  struct TermValue {
    bool known = true;
    std::size_t element = 0;
    std::size_t constant = 0;
  };

  TermValue value_of(const lang::Term& t) const {
    if (t.kind == lang::TermKind::variable) {
      for (auto it = env_.rbegin(); it != env_.rend(); ++it) {
        if (it->name == t.name.text) return {true, it->element, 0};
      }
      throw std::logic_error("unbound variable " + t.name.text);
    }
    const auto* c = s_.vocabulary().constant(t.name.text);
    if (!c) throw std::logic_error("unresolved term " + t.name.text);
    const auto index = static_cast<std::size_t>(c - s_.vocabulary().constants.data());
    if (const auto e = s_.constant(index)) return {true, *e, 0};
    return {false, 0, index};
  }

  Literal constant_atom(std::size_t constant, std::size_t element) const {
    return constant_offset_[constant] + static_cast<int>(element) + 1;
  }

  std::size_t constant_domain_size(std::size_t constant) const {
    return s_.domain(s_.vocabulary().constants[constant].type).size();
  }

  // -- formulas -------------------------------------------------------------

  Node ground(const lang::Formula& f, bool positive) {
    grow();
    using K = lang::FormulaKind;
    switch (f.kind) {
      case K::truth:
        return Node::constant(f.value == positive);
      case K::atom:
        return ground_atom(f, positive);
      case K::equality:
        return ground_equality(f, positive);
      case K::negation:
        return ground(f.operands[0], !positive);
      case K::conjunction:
        return both(ground(f.operands[0], positive), ground(f.operands[1], positive),
                    positive ? Node::Kind::conjunction : Node::Kind::disjunction);
      case K::disjunction:
        return both(ground(f.operands[0], positive), ground(f.operands[1], positive),
                    positive ? Node::Kind::disjunction : Node::Kind::conjunction);
      case K::implication:
        return both(ground(f.operands[0], !positive), ground(f.operands[1], positive),
                    positive ? Node::Kind::disjunction : Node::Kind::conjunction);
      case K::equivalence: {
        // a <=> b   is (a & b) | (~a & ~b);  ~(a <=> b) is (a & ~b) | (~a & b)
        const auto& a = f.operands[0];
        const auto& b = f.operands[1];
        return both(both(ground(a, true), ground(b, positive), Node::Kind::conjunction),
                    both(ground(a, false), ground(b, !positive), Node::Kind::conjunction),
                    Node::Kind::disjunction);
      }
      case K::universal:
      case K::existential: {
        const bool conjunctive = (f.kind == K::universal) == positive;
        std::vector<Node> parts;
        expand(f, 0, positive, parts);
        return junction(conjunctive ? Node::Kind::conjunction : Node::Kind::disjunction, std::move(parts));
      }
    }
    return Node::constant(true);
  }

  void expand(const lang::Formula& f, std::size_t k, bool positive, std::vector<Node>& parts) {
    if (k == f.variables.size()) {
      parts.push_back(ground(f.operands[0], positive));
      return;
    }
    const auto& v = f.variables[k];
    const auto size = s_.domain(v.type).size();
    for (std::size_t e = 0; e < size; ++e) {
      env_.push_back({v.name.text, e});
      expand(f, k + 1, positive, parts);
      env_.pop_back();
    }
  }

  Node ground_atom(const lang::Formula& f, bool positive) {
    const auto p = s_.predicate_index(f.symbol.text);
    std::vector<TermValue> args;
    for (const auto& t : f.terms) args.push_back(value_of(t));
    return atom_over(p, args, 0, {}, positive);
  }

  // Uninterpreted constants among the arguments are split over their
  // possible values: p(c) becomes OR_e (c = e & p(e)), which is exact given
  // that c takes exactly one value.
  Node atom_over(std::size_t p, const std::vector<TermValue>& args, std::size_t k, std::vector<std::size_t> elements,
                 bool positive) {
    if (k == args.size()) {
      const Literal l = atom_offset_[p] + static_cast<int>(s_.atom_index(p, elements)) + 1;
      return Node::lit(positive ? l : -l);
    }
    if (args[k].known) {
      elements.push_back(args[k].element);
      return atom_over(p, args, k + 1, std::move(elements), positive);
    }
    std::vector<Node> cases;
    for (std::size_t e = 0; e < constant_domain_size(args[k].constant); ++e) {
      grow();
      auto next = elements;
      next.push_back(e);
      cases.push_back(both(Node::lit(constant_atom(args[k].constant, e)), atom_over(p, args, k + 1, next, positive),
                           Node::Kind::conjunction));
    }
    return junction(Node::Kind::disjunction, std::move(cases));
  }

  Node ground_equality(const lang::Formula& f, bool positive) {
    const auto a = value_of(f.terms[0]);
    const auto b = value_of(f.terms[1]);
    if (a.known && b.known) return Node::constant((a.element == b.element) == positive);
    if (a.known != b.known) {
      const auto& c = a.known ? b : a;
      const auto& e = a.known ? a : b;
      const Literal l = constant_atom(c.constant, e.element);
      return Node::lit(positive ? l : -l);
    }
    std::vector<Node> cases;
    for (std::size_t e = 0; e < constant_domain_size(a.constant); ++e) {
      grow();
      const Literal lb = constant_atom(b.constant, e);
      cases.push_back(both(Node::lit(constant_atom(a.constant, e)), Node::lit(positive ? lb : -lb),
                           Node::Kind::conjunction));
    }
    return junction(Node::Kind::disjunction, std::move(cases));
  }

  // -- clauses --------------------------------------------------------------

  void add_clause(Clause clause, Provenance provenance) {
    grow(clause.size() + 1);
    problem_.clauses.push_back(std::move(clause));
    problem_.provenance.push_back(provenance);
  }

  void clausify_root(const Node& n) {
    const Provenance here{Origin::theory, current_};
    switch (n.kind) {
      case Node::Kind::top: return;
      case Node::Kind::bottom: add_clause({}, here); return;
      case Node::Kind::literal: add_clause({n.literal}, here); return;
      case Node::Kind::conjunction:
        for (const auto& c : n.children) clausify_root(c);
        return;
      case Node::Kind::disjunction: {
        Clause clause;
        for (const auto& c : n.children) clause.push_back(encode(c));
        add_clause(std::move(clause), here);
        return;
      }
    }
  }

  // Literal that implies `n` (one-sided definitions suffice because every
  // node occurs positively after conversion to negation normal form).
  Literal encode(const Node& n) {
    if (n.kind == Node::Kind::literal) return n.literal;
    const Provenance here{Origin::theory, current_};
    const Literal aux = ++problem_.variable_count;
    if (n.kind == Node::Kind::conjunction) {
      for (const auto& c : n.children) add_clause({-aux, encode(c)}, here);
    } else {
      Clause clause{-aux};
      for (const auto& c : n.children) clause.push_back(encode(c));
      add_clause(std::move(clause), here);
    }
    return aux;
  }

  void add_structure_facts() {
    for (std::size_t p = 0; p < s_.predicate_count(); ++p) {
      for (std::size_t i = 0; i < s_.atom_count(p); ++i) {
        const Literal l = atom_offset_[p] + static_cast<int>(i) + 1;
        if (s_.value(p, i) == Truth::yes) add_clause({l}, {Origin::structure, -1});
        if (s_.value(p, i) == Truth::no) add_clause({-l}, {Origin::structure, -1});
      }
    }
    // Each uninterpreted constant takes exactly one value.
    for (std::size_t c = 0; c < constant_offset_.size(); ++c) {
      if (constant_offset_[c] < 0) continue;
      const auto n = constant_domain_size(c);
      Clause at_least_one;
      for (std::size_t e = 0; e < n; ++e) at_least_one.push_back(constant_atom(c, e));
      add_clause(std::move(at_least_one), {Origin::vocabulary, -1});
      for (std::size_t e = 0; e < n; ++e) {
        for (std::size_t f = e + 1; f < n; ++f) {
          add_clause({-constant_atom(c, e), -constant_atom(c, f)}, {Origin::vocabulary, -1});
        }
      }
    }
  }

  const lang::TheoryBlock& theory_;
  const PartialStructure& s_;
  const Budget& budget_;
  GroundProblem problem_;
  std::vector<int> atom_offset_;
  std::vector<int> constant_offset_;
  std::vector<Bound> env_;
  int current_ = -1;
  std::size_t size_ = 0;
};

}  // namespace

std::string Instantiation::render() const {
  std::string out;
  for (const auto& [var, element] : substitution) {
    if (!out.empty()) out += ", ";
    out += var + " = " + element;
  }
  return out;
}

GroundProblem ground(const lang::TheoryBlock& theory, const PartialStructure& structure, const Budget& budget) {
  return Grounder(theory, structure, budget).run();
}

PartialStructure structure_from_model(const GroundProblem& problem, const PartialStructure& input,
                                      const std::vector<bool>& model) {
  PartialStructure out = input;
  for (int v = 1; v <= problem.atom_count(); ++v) {
    const auto& atom = problem.atoms[static_cast<std::size_t>(v - 1)];
    const bool value = model[static_cast<std::size_t>(v)];
    if (atom.kind == AtomRef::Kind::predicate) {
      out.set(atom.symbol, atom.index, value ? Truth::yes : Truth::no);
    } else if (value) {
      out.set_constant(atom.symbol, atom.index);
    }
  }
  return out;
}

}  // namespace idp::engine
