#include "qtwalk/term.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <optional>
#include <stdexcept>

namespace qtwalk {

struct Term::Rep {
  Kind kind;
  std::string value;
  std::string datatype;
  std::string language;
  std::optional<std::array<Term, 3>> parts;
  int depth = 0;
  std::string canonical;
};

namespace {

void append_escaped_literal(std::string& out, std::string_view lexical) {
  for (const char c : lexical) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20 || c == 0x7f) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04X",
                        static_cast<unsigned>(static_cast<unsigned char>(c)));
          out += buf;
        } else {
          out += c;
        }
    }
  }
}

bool is_forbidden_iri_char(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u <= 0x20 || c == '<' || c == '>' || c == '"' || c == '{' ||
         c == '}' || c == '|' || c == '^' || c == '`' || c == '\\';
}

}  // namespace

Term Term::iri(std::string iri) {
  if (std::any_of(iri.begin(), iri.end(), is_forbidden_iri_char)) {
    throw std::invalid_argument("IRI contains a forbidden character: " + iri);
  }
  auto rep = std::make_shared<Rep>();
  rep->kind = Kind::Iri;
  rep->canonical.reserve(iri.size() + 2);
  rep->canonical += '<';
  rep->canonical += iri;
  rep->canonical += '>';
  rep->value = std::move(iri);
  return Term(std::move(rep));
}

Term Term::literal(std::string lexical, std::string datatype,
                   std::string language) {
  if (!datatype.empty() && !language.empty()) {
    throw std::invalid_argument(
        "literal cannot carry both a datatype and a language tag");
  }
  if (std::any_of(datatype.begin(), datatype.end(), is_forbidden_iri_char)) {
    throw std::invalid_argument("datatype IRI contains a forbidden character");
  }
  auto rep = std::make_shared<Rep>();
  rep->kind = Kind::Literal;
  rep->canonical += '"';
  append_escaped_literal(rep->canonical, lexical);
  rep->canonical += '"';
  if (!language.empty()) {
    rep->canonical += '@';
    rep->canonical += language;
  } else if (!datatype.empty()) {
    rep->canonical += "^^<";
    rep->canonical += datatype;
    rep->canonical += '>';
  }
  rep->value = std::move(lexical);
  rep->datatype = std::move(datatype);
  rep->language = std::move(language);
  return Term(std::move(rep));
}

Term Term::quoted(Term subject, Term predicate, Term object) {
  if (!predicate.is_iri()) {
    throw std::invalid_argument("quoted triple predicate must be an IRI");
  }
  if (subject.is_literal()) {
    throw std::invalid_argument("quoted triple subject cannot be a literal");
  }
  auto rep = std::make_shared<Rep>();
  rep->kind = Kind::QuotedTriple;
  rep->depth = 1 + std::max(subject.depth(), object.depth());
  const auto& s = subject.canonical();
  const auto& p = predicate.canonical();
  const auto& o = object.canonical();
  rep->canonical.reserve(s.size() + p.size() + o.size() + 8);
  rep->canonical += "<< ";
  rep->canonical += s;
  rep->canonical += ' ';
  rep->canonical += p;
  rep->canonical += ' ';
  rep->canonical += o;
  rep->canonical += " >>";
  rep->parts.emplace(std::array<Term, 3>{std::move(subject),
                                         std::move(predicate),
                                         std::move(object)});
  return Term(std::move(rep));
}

Term::Kind Term::kind() const noexcept { return rep_->kind; }
const std::string& Term::value() const noexcept { return rep_->value; }
const std::string& Term::datatype() const noexcept { return rep_->datatype; }
const std::string& Term::language() const noexcept { return rep_->language; }
const Term& Term::subject() const noexcept { return (*rep_->parts)[0]; }
const Term& Term::predicate() const noexcept { return (*rep_->parts)[1]; }
const Term& Term::object() const noexcept { return (*rep_->parts)[2]; }
int Term::depth() const noexcept { return rep_->depth; }
const std::string& Term::canonical() const noexcept { return rep_->canonical; }

std::string serialize_triple(const Triple& t) {
  std::string out;
  out.reserve(t.subject.canonical().size() + t.predicate.canonical().size() +
              t.object.canonical().size() + 4);
  out += t.subject.canonical();
  out += ' ';
  out += t.predicate.canonical();
  out += ' ';
  out += t.object.canonical();
  out += " .";
  return out;
}

}  // namespace qtwalk
