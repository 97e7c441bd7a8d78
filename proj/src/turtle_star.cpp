#include "qtwalk/turtle_star.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>

namespace qtwalk {

std::string_view to_string(DiagnosticKind kind) noexcept {
  switch (kind) {
    case DiagnosticKind::Syntax: return "Syntax";
    case DiagnosticKind::UndefinedPrefix: return "UndefinedPrefix";
    case DiagnosticKind::UnbalancedQuote: return "UnbalancedQuote";
    case DiagnosticKind::BadLiteral: return "BadLiteral";
  }
  return "Syntax";
}

ParseError::ParseError(ParseDiagnostics diagnostics)
    : InputError(std::to_string(diagnostics.line) + ":" +
                 std::to_string(diagnostics.column) + ": " +
                 std::string(to_string(diagnostics.kind)) + ": " +
                 diagnostics.message),
      diagnostics_(std::move(diagnostics)) {}

namespace {

bool is_ws(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }
bool is_alpha(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_hex(char c) {
  return is_digit(c) || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
}
bool is_high(char c) { return static_cast<unsigned char>(c) >= 0x80; }
bool is_name_char(char c) {
  return is_alpha(c) || is_digit(c) || c == '_' || c == '-' || is_high(c);
}
bool is_local_escapable(char c) {
  static constexpr std::string_view kEsc = "_~.-!$&'()*+,;=/?#@%";
  return kEsc.find(c) != std::string_view::npos;
}

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

class Parser {
 public:
  explicit Parser(std::string_view source) : src_(source) {}

  std::vector<Triple> run() {
    while (true) {
      skip_ws();
      if (at_end()) break;
      if (starts_with("@prefix")) {
        prefix_directive();
      } else if (starts_with("@base")) {
        fail(pos_, DiagnosticKind::Syntax, "@base is not supported");
      } else if (starts_with_keyword("PREFIX") || starts_with_keyword("BASE")) {
        fail(pos_, DiagnosticKind::Syntax,
             "SPARQL-style PREFIX/BASE directives are not supported");
      } else {
        statement();
      }
    }
    return std::move(out_);
  }

 private:
  std::string_view src_;
  std::size_t pos_ = 0;
  std::unordered_map<std::string, std::string> prefixes_;
  std::vector<std::size_t> open_quotes_;
  std::vector<Triple> out_;

  [[noreturn]] void fail(std::size_t offset, DiagnosticKind kind,
                         std::string message) const {
    if (!src_.empty() && offset >= src_.size()) offset = src_.size() - 1;
    ParseDiagnostics d;
    d.kind = kind;
    d.message = std::move(message);
    for (std::size_t i = 0; i < offset; ++i) {
      if (src_[i] == '\n') {
        ++d.line;
        d.column = 1;
      } else if ((static_cast<unsigned char>(src_[i]) & 0xC0) != 0x80) {
        ++d.column;
      }
    }
    throw ParseError(std::move(d));
  }

  // Called wherever a term or punctuation is expected but the input ended or
  // a statement terminator appeared inside an open quoted triple.
  [[noreturn]] void fail_unexpected(std::string_view expected) const {
    if (!open_quotes_.empty() && (at_end() || peek() == '.')) {
      fail(open_quotes_.back(), DiagnosticKind::UnbalancedQuote,
           "'<<' is never closed by '>>'");
    }
    if (at_end()) {
      fail(pos_, DiagnosticKind::Syntax,
           "unexpected end of input, expected " + std::string(expected));
    }
    fail(pos_, DiagnosticKind::Syntax,
         "unexpected '" + std::string(1, peek()) + "', expected " +
             std::string(expected));
  }

  bool at_end() const { return pos_ >= src_.size(); }
  char peek(std::size_t k = 0) const {
    return pos_ + k < src_.size() ? src_[pos_ + k] : '\0';
  }
  bool starts_with(std::string_view s) const {
    return src_.substr(pos_).starts_with(s);
  }
  bool starts_with_keyword(std::string_view kw) const {
    if (src_.size() - pos_ < kw.size()) return false;
    for (std::size_t i = 0; i < kw.size(); ++i) {
      const char c = src_[pos_ + i];
      const char u = (c >= 'a' && c <= 'z') ? static_cast<char>(c - 32) : c;
      if (u != kw[i]) return false;
    }
    return !is_name_char(peek(kw.size())) && peek(kw.size()) != ':';
  }
  bool keyword_here(std::string_view kw) const {
    return starts_with(kw) && !is_name_char(peek(kw.size())) &&
           peek(kw.size()) != ':';
  }

  void skip_ws() {
    while (!at_end()) {
      if (is_ws(peek())) {
        ++pos_;
      } else if (peek() == '#') {
        while (!at_end() && peek() != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  void expect_dot() {
    skip_ws();
    if (peek() == '.') {
      ++pos_;
      return;
    }
    if (peek() == '{' && peek(1) == '|') {
      fail(pos_, DiagnosticKind::Syntax, "annotation syntax is not supported");
    }
    if (peek() == '>' && peek(1) == '>') {
      fail(pos_, DiagnosticKind::UnbalancedQuote,
           "'>>' without a matching '<<'");
    }
    fail_unexpected("'.'");
  }

  void prefix_directive() {
    pos_ += 7;
    skip_ws();
    const std::size_t start = pos_;
    std::string name;
    while (!at_end() && (is_name_char(peek()) || peek() == '.')) {
      name += peek();
      ++pos_;
    }
    if (peek() != ':' || (!name.empty() && !is_alpha(name.front()) &&
                          !is_high(name.front())) ||
        (!name.empty() && name.back() == '.')) {
      fail(start, DiagnosticKind::Syntax, "expected a prefix name like 'ex:'");
    }
    ++pos_;
    skip_ws();
    if (peek() != '<' || peek(1) == '<') {
      fail_unexpected("an IRI after the prefix name");
    }
    prefixes_[name] = iriref();
    expect_dot();
  }

  void statement() {
    const Term subject = subject_term();
    predicate_object_list(subject);
    expect_dot();
  }

  void predicate_object_list(const Term& subject) {
    while (true) {
      const Term predicate = verb();
      object_list(subject, predicate);
      skip_ws();
      if (peek() != ';') return;
      while (peek() == ';') {
        ++pos_;
        skip_ws();
      }
      if (at_end() || peek() == '.') return;
    }
  }

  void object_list(const Term& subject, const Term& predicate) {
    while (true) {
      out_.push_back(Triple{subject, predicate, object_term()});
      skip_ws();
      if (peek() == '{' && peek(1) == '|') {
        fail(pos_, DiagnosticKind::Syntax,
             "annotation syntax is not supported");
      }
      if (peek() != ',') return;
      ++pos_;
    }
  }

  // Rejects constructs outside the supported subset with a clear message.
  void reject_unsupported() const {
    const char c = peek();
    if (c == '_' && peek(1) == ':') {
      fail(pos_, DiagnosticKind::Syntax, "blank nodes are not supported");
    }
    if (c == '[') {
      fail(pos_, DiagnosticKind::Syntax, "blank nodes are not supported");
    }
    if (c == '(') {
      fail(pos_, DiagnosticKind::Syntax, "collections are not supported");
    }
    if (c == '{') {
      fail(pos_, DiagnosticKind::Syntax, "annotation syntax is not supported");
    }
    if (c == '>' && peek(1) == '>') {
      fail(pos_, DiagnosticKind::UnbalancedQuote,
           "'>>' without a matching '<<'");
    }
  }

  Term subject_term() {
    skip_ws();
    reject_unsupported();
    const char c = peek();
    if (c == '<' && peek(1) == '<') return quoted_triple();
    if (c == '<') return Term::iri(iriref());
    if (c == '"' || c == '\'' || is_digit(c) || c == '+' || c == '-') {
      fail(pos_, DiagnosticKind::Syntax, "a literal cannot be a subject");
    }
    if (keyword_here("a")) {
      fail(pos_, DiagnosticKind::Syntax, "'a' is only allowed as a predicate");
    }
    if (is_name_char(c) || c == ':') return prefixed_name();
    fail_unexpected("a subject (IRI, prefixed name or '<<')");
  }

  Term verb() {
    skip_ws();
    const char c = peek();
    if (keyword_here("a")) {
      ++pos_;
      return Term::iri(std::string(kRdfType));
    }
    if (c == '<' && peek(1) == '<') {
      fail(pos_, DiagnosticKind::Syntax,
           "a quoted triple cannot be a predicate");
    }
    if (c == '<') return Term::iri(iriref());
    reject_unsupported();
    if (is_name_char(c) || c == ':') return prefixed_name();
    fail_unexpected("a predicate");
  }

  Term object_term() {
    skip_ws();
    reject_unsupported();
    const char c = peek();
    if (c == '<' && peek(1) == '<') return quoted_triple();
    if (c == '<') return Term::iri(iriref());
    if (c == '"' || c == '\'') return string_literal();
    if (is_digit(c) || c == '+' || c == '-' ||
        (c == '.' && is_digit(peek(1)))) {
      return numeric_literal();
    }
    if (keyword_here("true") || keyword_here("false")) {
      const bool t = peek() == 't';
      pos_ += t ? 4 : 5;
      return Term::literal(t ? "true" : "false", std::string(kXsdBoolean));
    }
    if (keyword_here("a")) {
      fail(pos_, DiagnosticKind::Syntax, "'a' is only allowed as a predicate");
    }
    if (is_name_char(c) || c == ':') return prefixed_name();
    fail_unexpected("an object (IRI, prefixed name, literal or '<<')");
  }

  Term quoted_triple() {
    const std::size_t open = pos_;
    pos_ += 2;
    open_quotes_.push_back(open);
    Term s = subject_term();
    Term p = verb();
    Term o = object_term();
    skip_ws();
    if (peek() != '>' || peek(1) != '>') {
      if (peek() == ';' || peek() == ',') {
        fail(pos_, DiagnosticKind::Syntax,
             "predicate/object lists are not allowed inside '<< >>'");
      }
      if (at_end() || peek() == '.') fail_unexpected("'>>'");
      fail(pos_, DiagnosticKind::UnbalancedQuote,
           "expected '>>' to close the quoted triple");
    }
    pos_ += 2;
    open_quotes_.pop_back();
    return Term::quoted(std::move(s), std::move(p), std::move(o));
  }

  std::uint32_t read_hex(std::size_t digits, std::size_t escape_at,
                         DiagnosticKind kind) {
    std::uint32_t cp = 0;
    for (std::size_t i = 0; i < digits; ++i) {
      const char h = peek();
      if (!is_hex(h)) fail(escape_at, kind, "malformed \\u escape");
      cp = cp * 16 + static_cast<std::uint32_t>(
                         is_digit(h) ? h - '0' : (h | 0x20) - 'a' + 10);
      ++pos_;
    }
    if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      fail(escape_at, kind, "escape is not a valid code point");
    }
    return cp;
  }

  std::string iriref() {
    const std::size_t open = pos_;
    ++pos_;
    std::string iri;
    while (true) {
      if (at_end()) fail(open, DiagnosticKind::Syntax, "unterminated IRI");
      const char c = peek();
      if (c == '>') {
        ++pos_;
        return iri;
      }
      if (c == '\\') {
        const std::size_t esc = pos_;
        ++pos_;
        std::uint32_t cp = 0;
        if (peek() == 'u') {
          ++pos_;
          cp = read_hex(4, esc, DiagnosticKind::Syntax);
        } else if (peek() == 'U') {
          ++pos_;
          cp = read_hex(8, esc, DiagnosticKind::Syntax);
        } else {
          fail(esc, DiagnosticKind::Syntax, "invalid escape in IRI");
        }
        if (cp <= 0x20 || cp == '<' || cp == '>' || cp == '"' || cp == '{' ||
            cp == '}' || cp == '|' || cp == '^' || cp == '`' || cp == '\\') {
          fail(esc, DiagnosticKind::Syntax, "escaped character not allowed in IRI");
        }
        append_utf8(iri, cp);
        continue;
      }
      if (static_cast<unsigned char>(c) <= 0x20 || c == '<' || c == '"' ||
          c == '{' || c == '}' || c == '|' || c == '^' || c == '`') {
        fail(pos_, DiagnosticKind::Syntax,
             "character not allowed in IRI");
      }
      iri += c;
      ++pos_;
    }
  }

  Term prefixed_name() {
    const std::size_t start = pos_;
    std::string prefix;
    while (!at_end() && (is_name_char(peek()) ||
                         (peek() == '.' && is_name_char(peek(1))))) {
      prefix += peek();
      ++pos_;
    }
    if (peek() != ':') {
      if (prefix.empty()) fail_unexpected("a term");
      fail(start, DiagnosticKind::Syntax,
           "unexpected token '" + prefix + "'");
    }
    if (!prefix.empty() && !is_alpha(prefix.front()) && !is_high(prefix.front())) {
      fail(start, DiagnosticKind::Syntax, "invalid prefix name '" + prefix + "'");
    }
    ++pos_;
    std::string local;
    while (!at_end()) {
      const char c = peek();
      if (is_name_char(c) || c == ':') {
        local += c;
        ++pos_;
      } else if (c == '.' && (is_name_char(peek(1)) || peek(1) == ':' ||
                              peek(1) == '%' || peek(1) == '\\')) {
        local += c;
        ++pos_;
      } else if (c == '%') {
        if (!is_hex(peek(1)) || !is_hex(peek(2))) {
          fail(pos_, DiagnosticKind::Syntax, "malformed percent escape");
        }
        local.append(src_.substr(pos_, 3));
        pos_ += 3;
      } else if (c == '\\') {
        if (!is_local_escapable(peek(1))) {
          fail(pos_, DiagnosticKind::Syntax, "invalid escape in local name");
        }
        local += peek(1);
        pos_ += 2;
      } else {
        break;
      }
    }
    const auto it = prefixes_.find(prefix);
    if (it == prefixes_.end()) {
      fail(start, DiagnosticKind::UndefinedPrefix,
           "prefix '" + prefix + ":' is not declared");
    }
    std::string iri = it->second + local;
    for (const char c : local) {
      if (c == '<' || c == '>' || c == '"' || c == '{' || c == '}' ||
          c == '|' || c == '^' || c == '`' || c == '\\') {
        fail(start, DiagnosticKind::Syntax,
             "prefixed name expands to an invalid IRI");
      }
    }
    return Term::iri(std::move(iri));
  }

  Term string_literal() {
    const std::size_t open = pos_;
    const char q = peek();
    const bool long_form = peek(1) == q && peek(2) == q;
    pos_ += long_form ? 3 : 1;
    std::string lexical;
    while (true) {
      if (at_end()) {
        fail(open, DiagnosticKind::BadLiteral, "unterminated string literal");
      }
      const char c = peek();
      if (c == q) {
        if (!long_form) {
          ++pos_;
          break;
        }
        if (peek(1) == q && peek(2) == q) {
          pos_ += 3;
          // """a"""" : extra closing quotes belong to the content.
          while (peek() == q) {
            lexical += q;
            ++pos_;
          }
          break;
        }
        lexical += c;
        ++pos_;
        continue;
      }
      if (!long_form && (c == '\n' || c == '\r')) {
        fail(open, DiagnosticKind::BadLiteral,
             "line break inside a short string literal");
      }
      if (c == '\\') {
        const std::size_t esc = pos_;
        ++pos_;
        const char e = peek();
        ++pos_;
        switch (e) {
          case 't': lexical += '\t'; break;
          case 'b': lexical += '\b'; break;
          case 'n': lexical += '\n'; break;
          case 'r': lexical += '\r'; break;
          case 'f': lexical += '\f'; break;
          case '"': lexical += '"'; break;
          case '\'': lexical += '\''; break;
          case '\\': lexical += '\\'; break;
          case 'u': append_utf8(lexical, read_hex(4, esc, DiagnosticKind::BadLiteral)); break;
          case 'U': append_utf8(lexical, read_hex(8, esc, DiagnosticKind::BadLiteral)); break;
          default:
            fail(esc, DiagnosticKind::BadLiteral, "invalid escape sequence");
        }
        continue;
      }
      lexical += c;
      ++pos_;
    }
    if (peek() == '@') {
      const std::size_t at = pos_;
      ++pos_;
      std::string lang;
      while (is_alpha(peek())) lang += src_[pos_++];
      if (lang.empty()) fail(at, DiagnosticKind::BadLiteral, "empty language tag");
      while (peek() == '-') {
        lang += src_[pos_++];
        const std::size_t before = lang.size();
        while (is_alpha(peek()) || is_digit(peek())) lang += src_[pos_++];
        if (lang.size() == before) {
          fail(at, DiagnosticKind::BadLiteral, "malformed language tag");
        }
      }
      return Term::literal(std::move(lexical), {}, std::move(lang));
    }
    if (peek() == '^') {
      if (peek(1) != '^') fail(pos_, DiagnosticKind::Syntax, "expected '^^'");
      pos_ += 2;
      const char c = peek();
      if (c == '<' && peek(1) != '<') {
        return Term::literal(std::move(lexical), iriref());
      }
      if (is_name_char(c) || c == ':') {
        return Term::literal(std::move(lexical), prefixed_name().value());
      }
      fail_unexpected("a datatype IRI");
    }
    return Term::literal(std::move(lexical));
  }

  Term numeric_literal() {
    const std::size_t start = pos_;
    if (peek() == '+' || peek() == '-') ++pos_;
    std::size_t int_digits = 0;
    while (is_digit(peek())) {
      ++pos_;
      ++int_digits;
    }
    std::string_view datatype = kXsdInteger;
    std::size_t frac_digits = 0;
    if (peek() == '.' && is_digit(peek(1))) {
      ++pos_;
      while (is_digit(peek())) {
        ++pos_;
        ++frac_digits;
      }
      datatype = kXsdDecimal;
    }
    if (int_digits + frac_digits == 0) {
      fail(start, DiagnosticKind::BadLiteral, "malformed number");
    }
    if (peek() == 'e' || peek() == 'E') {
      ++pos_;
      if (peek() == '+' || peek() == '-') ++pos_;
      if (!is_digit(peek())) {
        fail(start, DiagnosticKind::BadLiteral, "malformed exponent");
      }
      while (is_digit(peek())) ++pos_;
      datatype = kXsdDouble;
    }
    if (is_name_char(peek()) || peek() == ':') {
      fail(start, DiagnosticKind::BadLiteral, "malformed number");
    }
    return Term::literal(std::string(src_.substr(start, pos_ - start)),
                         std::string(datatype));
  }
};

}  // namespace

std::vector<Triple> parse_document(std::string_view source) {
  return Parser(source).run();
}

std::string serialize_document(std::span<const Triple> triples) {
  std::string out;
  for (const auto& t : triples) {
    out += serialize_triple(t);
    out += '\n';
  }
  return out;
}

std::vector<Triple> read_document_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_document(buf.str());
  } catch (const ParseError& e) {
    auto d = e.diagnostics();
    d.message = path + ": " + d.message;
    throw ParseError(std::move(d));
  }
}

void write_document_file(const std::string& path,
                         std::span<const Triple> triples) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << serialize_document(triples);
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace qtwalk
