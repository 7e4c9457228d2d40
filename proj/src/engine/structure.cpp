#include "idp/engine/structure.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>
#include <stdexcept>

namespace idp::engine {

PartialStructure::PartialStructure(std::string name, lang::Vocabulary vocabulary,
                                   std::vector<std::vector<std::string>> domains)
    : name_(std::move(name)), vocabulary_(std::move(vocabulary)), domains_(std::move(domains)) {
  if (domains_.size() != vocabulary_.types.size()) throw std::invalid_argument("one domain per type required");
  for (const auto& d : domains_) {
    if (d.empty()) throw std::invalid_argument("domains must be nonempty");
  }
  for (const auto& p : vocabulary_.predicates) {
    std::size_t size = 1;
    for (const auto& type : p.arg_types) size *= domains_[type_index(type)].size();
    truth_.emplace_back(size, Truth::unknown);
  }
  constants_.assign(vocabulary_.constants.size(), std::nullopt);
}

std::size_t PartialStructure::type_index(std::string_view type) const {
  const auto& types = vocabulary_.types;
  const auto it = std::find(types.begin(), types.end(), type);
  if (it == types.end()) throw std::out_of_range("unknown type " + std::string(type));
  return static_cast<std::size_t>(it - types.begin());
}

std::optional<std::size_t> PartialStructure::element_index(std::size_t type, std::string_view element) const {
  const auto& d = domains_[type];
  const auto it = std::find(d.begin(), d.end(), element);
  if (it == d.end()) return std::nullopt;
  return static_cast<std::size_t>(it - d.begin());
}

std::size_t PartialStructure::predicate_index(std::string_view name) const {
  const auto& ps = vocabulary_.predicates;
  const auto it = std::find_if(ps.begin(), ps.end(), [&](const auto& p) { return p.name == name; });
  if (it == ps.end()) throw std::out_of_range("unknown predicate " + std::string(name));
  return static_cast<std::size_t>(it - ps.begin());
}

std::size_t PartialStructure::total_atom_count() const {
  std::size_t n = 0;
  for (const auto& t : truth_) n += t.size();
  return n;
}

std::size_t PartialStructure::atom_index(std::size_t predicate, const std::vector<std::size_t>& elements) const {
  const auto& types = vocabulary_.predicates[predicate].arg_types;
  assert(types.size() == elements.size());
  std::size_t index = 0;
  for (std::size_t i = 0; i < types.size(); ++i) {
    index = index * domains_[type_index(types[i])].size() + elements[i];
  }
  return index;
}

std::vector<std::size_t> PartialStructure::atom_tuple(std::size_t predicate, std::size_t index) const {
  const auto& types = vocabulary_.predicates[predicate].arg_types;
  std::vector<std::size_t> tuple(types.size());
  for (std::size_t i = types.size(); i-- > 0;) {
    const auto size = domains_[type_index(types[i])].size();
    tuple[i] = index % size;
    index /= size;
  }
  return tuple;
}

bool PartialStructure::is_total() const {
  for (const auto& atoms : truth_) {
    if (std::find(atoms.begin(), atoms.end(), Truth::unknown) != atoms.end()) return false;
  }
  return std::all_of(constants_.begin(), constants_.end(), [](const auto& c) { return c.has_value(); });
}

std::string PartialStructure::atom_text(std::size_t predicate, std::size_t index) const {
  const auto& p = vocabulary_.predicates[predicate];
  if (p.arg_types.empty()) return p.name;
  const auto tuple = atom_tuple(predicate, index);
  std::string out = p.name + "(";
  for (std::size_t i = 0; i < tuple.size(); ++i) {
    out += (i ? "," : "") + domains_[type_index(p.arg_types[i])][tuple[i]];
  }
  return out + ")";
}

PartialStructure structure_from(const lang::TypedProgram& program, const lang::StructureBlock& block) {
  const auto* vocab = program.vocabulary(block.vocabulary.text);
  if (!vocab) throw std::invalid_argument("unknown vocabulary " + block.vocabulary.text);

  std::vector<std::vector<std::string>> domains(vocab->types.size());
  for (const auto& a : block.assignments) {
    const auto it = std::find(vocab->types.begin(), vocab->types.end(), a.symbol.text);
    if (it == vocab->types.end()) continue;
    auto& domain = domains[static_cast<std::size_t>(it - vocab->types.begin())];
    for (const auto& tuple : std::get<std::vector<lang::Tuple>>(a.value)) domain.push_back(tuple.front().text);
  }
  PartialStructure s(block.name.text, *vocab, std::move(domains));

  for (const auto& a : block.assignments) {
    if (vocab->has_type(a.symbol.text)) continue;
    if (vocab->constant(a.symbol.text)) {
      const auto c = static_cast<std::size_t>(vocab->constant(a.symbol.text) - vocab->constants.data());
      const auto type = s.type_index(vocab->constants[c].type);
      s.set_constant(c, s.element_index(type, std::get<lang::Name>(a.value).text));
      continue;
    }
    const auto p = s.predicate_index(a.symbol.text);
    if (const auto* b = std::get_if<bool>(&a.value)) {
      s.set(p, 0, *b ? Truth::yes : Truth::no);
      continue;
    }
    const auto listed = a.qualifier == lang::Qualifier::certainly_false ? Truth::no : Truth::yes;
    if (a.qualifier == lang::Qualifier::total) {
      for (std::size_t i = 0; i < s.atom_count(p); ++i) s.set(p, i, Truth::no);
    }
    const auto& arg_types = vocab->predicates[p].arg_types;
    for (const auto& tuple : std::get<std::vector<lang::Tuple>>(a.value)) {
      std::vector<std::size_t> elements;
      for (std::size_t i = 0; i < tuple.size(); ++i) {
        elements.push_back(*s.element_index(s.type_index(arg_types[i]), tuple[i].text));
      }
      s.set(p, s.atom_index(p, elements), listed);
    }
  }
  return s;
}

std::string render(const PartialStructure& s) {
  const auto& vocab = s.vocabulary();
  std::ostringstream out;
  out << "structure " << s.name() << " : " << vocab.name << " {\n";
  for (std::size_t t = 0; t < vocab.types.size(); ++t) {
    out << "    " << vocab.types[t] << " = { ";
    const auto& d = s.domain(t);
    for (std::size_t i = 0; i < d.size(); ++i) out << (i ? "; " : "") << d[i];
    out << " }\n";
  }
  auto tuple_text = [&](std::size_t p, std::size_t index) {
    const auto& types = vocab.predicates[p].arg_types;
    const auto tuple = s.atom_tuple(p, index);
    std::string text;
    for (std::size_t i = 0; i < tuple.size(); ++i) text += (i ? "," : "") + s.domain(types[i])[tuple[i]];
    return text;
  };
  auto set_text = [&](std::size_t p, Truth wanted) {
    std::vector<std::string> items;
    for (std::size_t i = 0; i < s.atom_count(p); ++i) {
      if (s.value(p, i) == wanted) items.push_back(tuple_text(p, i));
    }
    if (items.empty()) return std::string("{}");
    std::string text = "{ ";
    for (std::size_t i = 0; i < items.size(); ++i) text += (i ? "; " : "") + items[i];
    return text + " }";
  };
  for (std::size_t p = 0; p < s.predicate_count(); ++p) {
    const auto& name = vocab.predicates[p].name;
    std::size_t known_true = 0, known_false = 0;
    for (std::size_t i = 0; i < s.atom_count(p); ++i) {
      known_true += s.value(p, i) == Truth::yes;
      known_false += s.value(p, i) == Truth::no;
    }
    if (known_true + known_false == 0) continue;
    if (vocab.predicates[p].arg_types.empty()) {
      out << "    " << name << " = " << (known_true ? "true" : "false") << "\n";
    } else if (known_true + known_false == s.atom_count(p)) {
      out << "    " << name << " = " << set_text(p, Truth::yes) << "\n";
    } else {
      if (known_true) out << "    " << name << "<ct> = " << set_text(p, Truth::yes) << "\n";
      if (known_false) out << "    " << name << "<cf> = " << set_text(p, Truth::no) << "\n";
    }
  }
  for (std::size_t c = 0; c < vocab.constants.size(); ++c) {
    if (const auto e = s.constant(c)) {
      out << "    " << vocab.constants[c].name << " = " << s.domain(vocab.constants[c].type)[*e] << "\n";
    }
  }
  out << "}\n";
  return out.str();
}

}  // namespace idp::engine
