#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "qtwalk/term.hpp"

namespace qtwalk {

// Dense identifier of a term inside one Graph. Ids are assigned in canonical
// order, so comparing ids compares canonical serializations.
using TermId = std::uint32_t;

struct IdTriple {
  TermId subject;
  TermId predicate;
  TermId object;

  friend bool operator==(const IdTriple&, const IdTriple&) = default;
  friend auto operator<=>(const IdTriple&, const IdTriple&) = default;
};

// Immutable, indexed RDF-star graph. Every term that occurs anywhere,
// including inside quoted triples at any nesting level, is a node with an id.
class Graph {
 public:
  Graph() = default;

  std::size_t term_count() const noexcept { return terms_.size(); }
  const Term& term(TermId id) const { return terms_.at(id); }
  std::span<const Term> terms() const noexcept { return terms_; }
  std::optional<TermId> find(const Term& t) const;
  std::optional<TermId> find(std::string_view canonical) const;

  // Asserted triples, deduplicated, sorted by (subject, predicate, object).
  std::span<const IdTriple> triples() const noexcept { return triples_; }

  std::span<const IdTriple> subject_triples(TermId n) const;
  std::span<const IdTriple> object_triples(TermId n) const;
  // Quoted triples occurring anywhere in the graph whose subject (object)
  // is `n`, in canonical order.
  std::span<const TermId> quoted_with_subject(TermId n) const;
  std::span<const TermId> quoted_with_object(TermId n) const;

  // Components of quoted triple `q`; nullopt when `q` is not a quoted triple.
  std::optional<IdTriple> components(TermId q) const;
  bool is_quoted(TermId n) const { return components_.at(n).has_value(); }
  // The quoted triple << s p o >>, if it occurs in the graph.
  std::optional<TermId> quoted_id(TermId s, TermId p, TermId o) const;

  // True when `n` occurs in subject or object position of some asserted or
  // quoted triple (as opposed to only ever being a predicate).
  bool is_node(TermId n) const { return in_node_position_.at(n); }

  // Stable 64-bit FNV-1a hash of the canonical, sorted triple set (hex).
  const std::string& fingerprint() const noexcept { return fingerprint_; }

  friend Graph build_graph(std::span<const Triple> triples);

 private:
  std::vector<Term> terms_;
  std::unordered_map<std::string_view, TermId> ids_;
  std::vector<IdTriple> triples_;
  std::vector<std::vector<IdTriple>> subj_index_;
  std::vector<std::vector<IdTriple>> obj_index_;
  std::vector<std::vector<TermId>> qt_subj_index_;
  std::vector<std::vector<TermId>> qt_obj_index_;
  std::vector<std::optional<IdTriple>> components_;
  std::map<IdTriple, TermId> quoted_lookup_;
  std::vector<bool> in_node_position_;
  std::string fingerprint_;
};

Graph build_graph(std::span<const Triple> triples);

// Term-level views of the indexes; unknown terms yield empty results.
std::vector<Triple> triples_with_subject(const Graph& g, const Term& n);
std::vector<Triple> triples_with_object(const Graph& g, const Term& n);
std::vector<Term> qts_with_subject(const Graph& g, const Term& n);
std::vector<Term> qts_with_object(const Graph& g, const Term& n);

Triple to_triple(const Graph& g, const IdTriple& t);

// Returns a copy of `triples` without those whose predicate is listed.
std::vector<Triple> exclude_predicates(std::span<const Triple> triples,
                                       std::span<const std::string> predicates);

struct StatsOptions {
  // Quoted triples with this predicate wrap a duplicate quoted triple with a
  // unique id. They are left out of the depth counts unless requested, and
  // nesting through them does not add depth.
  std::string id_predicate = "http://kgc.knowledge-graph.jp/ontology/kgc.owl#sid";
  bool include_id_nesting = false;
};

struct GraphStats {
  std::size_t class_count = 0;
  std::size_t instance_count = 0;
  std::size_t property_count = 0;
  std::size_t standard_triple_count = 0;
  std::map<int, std::size_t> qt_count_by_depth;
  std::size_t total = 0;

  friend bool operator==(const GraphStats&, const GraphStats&) = default;
};

GraphStats compute_stats(const Graph& g, const StatsOptions& options = {});

// `metric<TAB>value` rows named after the usual dataset statistics table.
std::string stats_to_tsv(const GraphStats& stats);

}  // namespace qtwalk
