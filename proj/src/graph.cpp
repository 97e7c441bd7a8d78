#include "qtwalk/graph.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "qtwalk/hash.hpp"

namespace qtwalk {

namespace {

void collect_terms(const Term& t,
                   std::unordered_map<std::string_view, Term>& seen) {
  if (seen.contains(t.canonical())) return;
  seen.emplace(t.canonical(), t);
  if (t.is_quoted()) {
    collect_terms(t.subject(), seen);
    collect_terms(t.predicate(), seen);
    collect_terms(t.object(), seen);
  }
}

const std::vector<IdTriple> kNoTriples;
const std::vector<TermId> kNoTerms;

}  // namespace

Graph build_graph(std::span<const Triple> triples) {
  Graph g;
  std::unordered_map<std::string_view, Term> seen;
  for (const auto& t : triples) {
    collect_terms(t.subject, seen);
    collect_terms(t.predicate, seen);
    collect_terms(t.object, seen);
  }
  g.terms_.reserve(seen.size());
  for (auto& [key, term] : seen) g.terms_.push_back(term);
  std::sort(g.terms_.begin(), g.terms_.end());
  g.ids_.reserve(g.terms_.size());
  for (TermId i = 0; i < g.terms_.size(); ++i) {
    g.ids_.emplace(g.terms_[i].canonical(), i);
  }

  const std::size_t n = g.terms_.size();
  g.subj_index_.resize(n);
  g.obj_index_.resize(n);
  g.qt_subj_index_.resize(n);
  g.qt_obj_index_.resize(n);
  g.components_.resize(n);
  g.in_node_position_.assign(n, false);

  for (TermId q = 0; q < n; ++q) {
    const Term& t = g.terms_[q];
    if (!t.is_quoted()) continue;
    const IdTriple parts{g.ids_.at(t.subject().canonical()),
                         g.ids_.at(t.predicate().canonical()),
                         g.ids_.at(t.object().canonical())};
    g.components_[q] = parts;
    g.quoted_lookup_.emplace(parts, q);
    g.qt_subj_index_[parts.subject].push_back(q);
    g.qt_obj_index_[parts.object].push_back(q);
    g.in_node_position_[parts.subject] = true;
    g.in_node_position_[parts.object] = true;
  }

  g.triples_.reserve(triples.size());
  for (const auto& t : triples) {
    g.triples_.push_back(IdTriple{g.ids_.at(t.subject.canonical()),
                                  g.ids_.at(t.predicate.canonical()),
                                  g.ids_.at(t.object.canonical())});
  }
  std::sort(g.triples_.begin(), g.triples_.end());
  g.triples_.erase(std::unique(g.triples_.begin(), g.triples_.end()),
                   g.triples_.end());

  Fnv1a64 hash;
  for (const auto& t : g.triples_) {
    g.subj_index_[t.subject].push_back(t);
    g.obj_index_[t.object].push_back(t);
    g.in_node_position_[t.subject] = true;
    g.in_node_position_[t.object] = true;
    hash.update(serialize_triple(to_triple(g, t)));
    hash.update("\n");
  }
  g.fingerprint_ = hash.hex();
  return g;
}

std::optional<TermId> Graph::find(const Term& t) const {
  return find(t.canonical());
}

std::optional<TermId> Graph::find(std::string_view canonical) const {
  const auto it = ids_.find(canonical);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

std::span<const IdTriple> Graph::subject_triples(TermId n) const {
  return n < subj_index_.size() ? subj_index_[n] : kNoTriples;
}

std::span<const IdTriple> Graph::object_triples(TermId n) const {
  return n < obj_index_.size() ? obj_index_[n] : kNoTriples;
}

std::span<const TermId> Graph::quoted_with_subject(TermId n) const {
  return n < qt_subj_index_.size() ? qt_subj_index_[n] : kNoTerms;
}

std::span<const TermId> Graph::quoted_with_object(TermId n) const {
  return n < qt_obj_index_.size() ? qt_obj_index_[n] : kNoTerms;
}

std::optional<IdTriple> Graph::components(TermId q) const {
  return q < components_.size() ? components_[q] : std::nullopt;
}

std::optional<TermId> Graph::quoted_id(TermId s, TermId p, TermId o) const {
  const auto it = quoted_lookup_.find(IdTriple{s, p, o});
  if (it == quoted_lookup_.end()) return std::nullopt;
  return it->second;
}

Triple to_triple(const Graph& g, const IdTriple& t) {
  return Triple{g.term(t.subject), g.term(t.predicate), g.term(t.object)};
}

std::vector<Triple> triples_with_subject(const Graph& g, const Term& n) {
  std::vector<Triple> out;
  if (const auto id = g.find(n)) {
    for (const auto& t : g.subject_triples(*id)) out.push_back(to_triple(g, t));
  }
  return out;
}

std::vector<Triple> triples_with_object(const Graph& g, const Term& n) {
  std::vector<Triple> out;
  if (const auto id = g.find(n)) {
    for (const auto& t : g.object_triples(*id)) out.push_back(to_triple(g, t));
  }
  return out;
}

std::vector<Term> qts_with_subject(const Graph& g, const Term& n) {
  std::vector<Term> out;
  if (const auto id = g.find(n)) {
    for (const TermId q : g.quoted_with_subject(*id)) out.push_back(g.term(q));
  }
  return out;
}

std::vector<Term> qts_with_object(const Graph& g, const Term& n) {
  std::vector<Term> out;
  if (const auto id = g.find(n)) {
    for (const TermId q : g.quoted_with_object(*id)) out.push_back(g.term(q));
  }
  return out;
}

std::vector<Triple> exclude_predicates(std::span<const Triple> triples,
                                       std::span<const std::string> predicates) {
  std::vector<Triple> out;
  out.reserve(triples.size());
  for (const auto& t : triples) {
    const bool drop = std::any_of(
        predicates.begin(), predicates.end(),
        [&](const std::string& p) { return t.predicate.value() == p; });
    if (!drop) out.push_back(t);
  }
  return out;
}

GraphStats compute_stats(const Graph& g, const StatsOptions& options) {
  GraphStats stats;
  const auto id_pred = g.find(Term::iri(options.id_predicate));
  const auto rdf_type = g.find(Term::iri(std::string(kRdfType)));
  const bool skip_ids = id_pred.has_value() && !options.include_id_nesting;

  // Depth with id wrappers made transparent: a wrapper counts as the quoted
  // triple it wraps.
  std::vector<TermId> by_depth;
  for (TermId q = 0; q < g.term_count(); ++q) {
    if (g.is_quoted(q)) by_depth.push_back(q);
  }
  std::stable_sort(by_depth.begin(), by_depth.end(), [&](TermId a, TermId b) {
    return g.term(a).depth() < g.term(b).depth();
  });
  std::vector<int> depth(g.term_count(), 0);
  for (const TermId q : by_depth) {
    const auto parts = g.components(q);
    if (skip_ids && parts->predicate == *id_pred) {
      depth[q] = depth[parts->subject];
    } else {
      depth[q] = 1 + std::max(depth[parts->subject], depth[parts->object]);
    }
  }

  std::set<TermId> properties;
  for (TermId q = 0; q < g.term_count(); ++q) {
    const auto parts = g.components(q);
    if (!parts) continue;
    if (skip_ids && parts->predicate == *id_pred) continue;
    ++stats.qt_count_by_depth[depth[q]];
    properties.insert(parts->predicate);
  }

  std::set<TermId> classes;
  std::set<TermId> instances;
  for (const auto& t : g.triples()) {
    if (!g.is_quoted(t.subject) && !g.is_quoted(t.object)) {
      ++stats.standard_triple_count;
    }
    if (!(skip_ids && t.predicate == *id_pred)) properties.insert(t.predicate);
    if (rdf_type && t.predicate == *rdf_type) {
      classes.insert(t.object);
      if (!g.is_quoted(t.subject)) instances.insert(t.subject);
    }
  }
  stats.class_count = classes.size();
  stats.instance_count = instances.size();
  stats.property_count = properties.size();
  stats.total = stats.standard_triple_count;
  for (const auto& [d, count] : stats.qt_count_by_depth) stats.total += count;
  return stats;
}

std::string stats_to_tsv(const GraphStats& stats) {
  static constexpr const char* kDepthNames[] = {
      "Single-nested QT", "Double-nested QT", "Triple-nested QT",
      "Quadruple-nested QT"};
  std::string out;
  auto row = [&out](const std::string& name, std::size_t value) {
    out += name;
    out += '\t';
    out += std::to_string(value);
    out += '\n';
  };
  row("Class", stats.class_count);
  row("Instance", stats.instance_count);
  row("Property", stats.property_count);
  row("Standard triple", stats.standard_triple_count);
  int max_depth = 4;
  if (!stats.qt_count_by_depth.empty()) {
    max_depth = std::max(max_depth, stats.qt_count_by_depth.rbegin()->first);
  }
  for (int d = 1; d <= max_depth; ++d) {
    const auto it = stats.qt_count_by_depth.find(d);
    const std::size_t count = it == stats.qt_count_by_depth.end() ? 0 : it->second;
    row(d <= 4 ? kDepthNames[d - 1] : std::to_string(d) + "-nested QT", count);
  }
  row("Total", stats.total);
  return out;
}

}  // namespace qtwalk
