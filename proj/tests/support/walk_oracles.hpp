#pragma once

// Legality checks for walks, phrased on terms and the raw triple list rather
// than on the graph indexes.

#include <functional>
#include <set>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qtwalk/graph.hpp"

namespace oracle {

class WalkRules {
 public:
  explicit WalkRules(const std::vector<Triple>& triples)
      : asserted_(triples.begin(), triples.end()) {
    for (const auto& t : triples) {
      collect_quoted(t.subject, quoted_);
      collect_quoted(t.object, quoted_);
    }
  }

  bool asserted(const Term& s, const Term& p, const Term& o) const {
    return asserted_.contains(Triple{s, p, o});
  }
  bool quoted_exists(const Term& s, const Term& p, const Term& o) const {
    return quoted_.contains(Term::quoted(s, p, o));
  }

  // Random-walk token sequence from `root`: default (p, o) steps along
  // asserted triples, qs steps (s, p, o) out of a quoted current node, and
  // oq steps to the quoted triple formed by the previous three tokens (or,
  // right after the root, to a quoted triple whose object is the root).
  // With `plain` only default steps are allowed.
  bool random_walk_legal(const std::vector<Term>& w, const Term& root, bool plain = false) const {
    if (w.empty() || w[0] != root) return false;
    std::function<bool(std::size_t, const Term&, bool)> from =
        [&](std::size_t i, const Term& cur, bool after_oq) -> bool {
      if (i == w.size()) return true;
      if (!plain) {
        const bool oq_here =
            w[i].is_quoted() && quoted_.contains(w[i]) &&
            ((i == 1 && w[i].object() == root) ||
             (i >= 3 && !after_oq && w[i].subject() == w[i - 3] &&
              w[i].predicate() == w[i - 2] && w[i].object() == w[i - 1]));
        if (oq_here && from(i + 1, w[i], true)) return true;
        if (cur.is_quoted() && i + 2 < w.size() &&
            w[i] == cur.subject() && w[i + 1] == cur.predicate() && w[i + 2] == cur.object() &&
            from(i + 3, w[i + 2], false)) {
          return true;
        }
      }
      if (i + 1 < w.size() && asserted(cur, w[i], w[i + 1]) && from(i + 2, w[i + 1], false)) {
        return true;
      }
      return false;
    };
    return from(1, root, false);
  }

  // Mid-walk token sequence around `focus`: to the left, (s, p) pairs
  // reaching the current leftmost node through an asserted triple or a
  // quoted triple; to the right, (p, o) along asserted triples or (s, p, o)
  // out of a quoted node.
  bool mid_walk_legal(const std::vector<Term>& w, const Term& focus, bool plain = false) const {
    for (std::size_t f = 0; f < w.size(); ++f) {
      if (w[f] != focus || f % 2 != 0) continue;
      if (left_legal(w, f, plain) && right_legal(w, f, plain)) return true;
    }
    return false;
  }

 private:
  bool left_legal(const std::vector<Term>& w, std::size_t f, bool plain) const {
    std::size_t i = f;
    while (i > 0) {
      if (i < 2) return false;
      const Term& s = w[i - 2];
      const Term& p = w[i - 1];
      const Term& np = w[i];
      if (!asserted(s, p, np) && (plain || !quoted_exists(s, p, np))) return false;
      i -= 2;
    }
    return true;
  }

  bool right_legal(const std::vector<Term>& w, std::size_t f, bool plain) const {
    std::function<bool(std::size_t, const Term&)> from = [&](std::size_t i, const Term& ns) {
      if (i == w.size()) return true;
      if (!plain && ns.is_quoted() && i + 2 < w.size() &&
          w[i] == ns.subject() && w[i + 1] == ns.predicate() && w[i + 2] == ns.object() &&
          from(i + 3, w[i + 2])) {
        return true;
      }
      return i + 1 < w.size() && asserted(ns, w[i], w[i + 1]) && from(i + 2, w[i + 1]);
    };
    return from(f + 1, w[f]);
  }

  std::set<Triple> asserted_;
  std::set<Term> quoted_;
};

inline std::vector<Term> to_terms(const qtwalk::Graph& g, const std::vector<qtwalk::TermId>& w) {
  std::vector<Term> out;
  out.reserve(w.size());
  for (const auto id : w) out.push_back(g.term(id));
  return out;
}

inline std::string walk_key(const std::vector<Term>& w) {
  std::string key;
  for (const auto& t : w) {
    key += t.canonical();
    key += '\t';
  }
  return key;
}

}  // namespace oracle
