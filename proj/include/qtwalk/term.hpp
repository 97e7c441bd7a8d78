#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <string_view>

namespace qtwalk {

inline constexpr std::string_view kRdfType =
    "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
inline constexpr std::string_view kOwlNothing =
    "http://www.w3.org/2002/07/owl#Nothing";
inline constexpr std::string_view kXsdInteger =
    "http://www.w3.org/2001/XMLSchema#integer";
inline constexpr std::string_view kXsdDecimal =
    "http://www.w3.org/2001/XMLSchema#decimal";
inline constexpr std::string_view kXsdDouble =
    "http://www.w3.org/2001/XMLSchema#double";
inline constexpr std::string_view kXsdBoolean =
    "http://www.w3.org/2001/XMLSchema#boolean";

// A node of an RDF-star graph: an IRI, a literal, or a quoted triple whose
// components are themselves terms. Terms are immutable and cheap to copy
// (shared representation). The canonical text is computed once at
// construction; equality and ordering are defined on it.
class Term {
 public:
  enum class Kind : unsigned char { Iri, Literal, QuotedTriple };

  static Term iri(std::string iri);
  // `datatype` and `language` are mutually exclusive; both empty means a
  // plain string literal.
  static Term literal(std::string lexical, std::string datatype = {},
                      std::string language = {});
  // Throws std::invalid_argument if `predicate` is not an IRI or `subject`
  // is a literal.
  static Term quoted(Term subject, Term predicate, Term object);

  Kind kind() const noexcept;
  bool is_iri() const noexcept { return kind() == Kind::Iri; }
  bool is_literal() const noexcept { return kind() == Kind::Literal; }
  bool is_quoted() const noexcept { return kind() == Kind::QuotedTriple; }

  // IRI string for Iri terms, lexical form for literals.
  const std::string& value() const noexcept;
  const std::string& datatype() const noexcept;
  const std::string& language() const noexcept;

  // Components of a quoted triple. Precondition: is_quoted().
  const Term& subject() const noexcept;
  const Term& predicate() const noexcept;
  const Term& object() const noexcept;

  // 0 for IRIs and literals; 1 for a quoted triple with no quoted triple
  // inside; n + 1 when the deepest component has depth n.
  int depth() const noexcept;

  const std::string& canonical() const noexcept;

  friend bool operator==(const Term& a, const Term& b) noexcept {
    return a.rep_ == b.rep_ || a.canonical() == b.canonical();
  }
  friend std::strong_ordering operator<=>(const Term& a,
                                          const Term& b) noexcept {
    return a.canonical().compare(b.canonical()) <=> 0;
  }

 private:
  struct Rep;
  explicit Term(std::shared_ptr<const Rep> rep) : rep_(std::move(rep)) {}
  std::shared_ptr<const Rep> rep_;
};

// Canonical text form: `<iri>`, `"lexical"` with `^^<dt>` or `@lang`, and
// `<< S P O >>` for quoted triples. Injective on distinct terms.
inline const std::string& serialize_term(const Term& t) noexcept {
  return t.canonical();
}

struct Triple {
  Term subject;
  Term predicate;
  Term object;

  friend bool operator==(const Triple&, const Triple&) = default;
  friend std::strong_ordering operator<=>(const Triple&,
                                          const Triple&) = default;
};

// `S P O .`
std::string serialize_triple(const Triple& t);

struct TermHash {
  std::size_t operator()(const Term& t) const noexcept {
    return std::hash<std::string>{}(t.canonical());
  }
};

}  // namespace qtwalk
