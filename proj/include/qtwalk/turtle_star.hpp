#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qtwalk/errors.hpp"
#include "qtwalk/term.hpp"

namespace qtwalk {

enum class DiagnosticKind { Syntax, UndefinedPrefix, UnbalancedQuote, BadLiteral };

std::string_view to_string(DiagnosticKind kind) noexcept;

struct ParseDiagnostics {
  std::size_t line = 1;    // 1-based
  std::size_t column = 1;  // 1-based, counted in code points
  std::string message;
  DiagnosticKind kind = DiagnosticKind::Syntax;
};

class ParseError : public InputError {
 public:
  explicit ParseError(ParseDiagnostics diagnostics);
  const ParseDiagnostics& diagnostics() const noexcept { return diagnostics_; }

 private:
  ParseDiagnostics diagnostics_;
};

// Parses the supported Turtle-star subset: @prefix, IRIs, prefixed names,
// `a`, `;` and `,` lists, string/number/boolean literals and quoted triples
// in subject and object position. Blank nodes, collections, @base and
// annotation syntax are rejected. Returns asserted triples in document
// order. Throws ParseError on the first problem found.
std::vector<Triple> parse_document(std::string_view source);

// One `S P O .` line per triple in canonical form.
std::string serialize_document(std::span<const Triple> triples);

std::vector<Triple> read_document_file(const std::string& path);
void write_document_file(const std::string& path,
                         std::span<const Triple> triples);

}  // namespace qtwalk
