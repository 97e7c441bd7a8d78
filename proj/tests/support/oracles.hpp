#pragma once

// Reference implementations used as test oracles. None of these call into the
// library beyond Term/Triple construction, so they can catch errors in the
// production code paths they mirror.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "qtwalk/term.hpp"

namespace oracle {

using qtwalk::Term;
using qtwalk::Triple;

inline Term iri(const std::string& local) { return Term::iri("urn:x:" + local); }
inline Term qt(const Term& s, const Term& p, const Term& o) { return Term::quoted(s, p, o); }

// e1 -r1-> << << e2 r2 e3 >> r3 e4 >> -r6-> e7, with the inner triples
// asserted as well and a short tail behind e4.
inline std::vector<Triple> fig2_triples() {
  const Term e1 = iri("e1"), e2 = iri("e2"), e3 = iri("e3"), e4 = iri("e4"),
             e5 = iri("e5"), e6 = iri("e6"), e7 = iri("e7");
  const Term r1 = iri("r1"), r2 = iri("r2"), r3 = iri("r3"), r4 = iri("r4"),
             r5 = iri("r5"), r6 = iri("r6");
  const Term inner = qt(e2, r2, e3);
  const Term outer = qt(inner, r3, e4);
  return {
      {e1, r1, outer}, {outer, r6, e7}, {e2, r2, e3},
      {inner, r3, e4}, {e4, r4, e5},   {e5, r5, e6},
  };
}

// Twenty triples with branching, a dead end, a cycle and quoted triples.
inline std::vector<Triple> twenty_triples() {
  std::vector<Triple> t;
  auto n = [](int i) { return iri("n" + std::to_string(i)); };
  auto p = [](int i) { return iri("p" + std::to_string(i)); };
  t.push_back({n(0), p(0), n(1)});
  t.push_back({n(0), p(1), n(2)});
  t.push_back({n(0), p(0), n(3)});
  t.push_back({n(1), p(2), n(4)});
  t.push_back({n(1), p(0), n(5)});
  t.push_back({n(2), p(1), n(5)});
  t.push_back({n(3), p(2), n(0)});
  t.push_back({n(4), p(0), n(6)});
  t.push_back({n(5), p(1), n(6)});
  t.push_back({n(5), p(2), n(7)});
  t.push_back({n(5), p(0), n(1)});
  t.push_back({n(6), p(1), n(8)});
  t.push_back({n(7), p(0), n(8)});
  t.push_back({n(7), p(2), n(9)});
  const Term q1 = qt(n(1), p(2), n(4));
  const Term q2 = qt(q1, p(3), n(8));
  t.push_back({q1, p(3), n(8)});
  t.push_back({n(9), p(1), q1});
  t.push_back({q2, p(4), n(2)});
  t.push_back({n(8), p(4), q2});
  t.push_back({n(2), p(2), Term::literal("lit")});
  t.push_back({n(6), p(0), n(9)});
  return t;
}

// Random nested term generator shared by parser and graph tests.
class TermGen {
 public:
  explicit TermGen(std::uint64_t seed) : rng_(seed) {}

  Term entity() { return Term::iri("urn:e:" + std::to_string(pick(12))); }
  Term predicate() { return Term::iri("http://example.org/p#r" + std::to_string(pick(5))); }
  Term literal() {
    switch (pick(5)) {
      case 0: return Term::literal("v" + std::to_string(pick(9)));
      case 1: return Term::literal(std::to_string(pick(100)), std::string(qtwalk::kXsdInteger));
      case 2: return Term::literal("say \"hi\"\\\n" + std::to_string(pick(3)), {}, "en");
      case 3: return Term::literal("1." + std::to_string(pick(9)), std::string(qtwalk::kXsdDecimal));
      default: return Term::literal("\xE6\x97\xA5\xE6\x9C\xAC " + std::to_string(pick(4)));
    }
  }
  Term subject(int depth) {
    if (depth > 0 && pick(3) == 0) return quoted(depth - 1);
    return entity();
  }
  Term object(int depth) {
    const auto r = pick(4);
    if (depth > 0 && r == 0) return quoted(depth - 1);
    if (r == 1) return literal();
    return entity();
  }
  Term quoted(int depth) { return Term::quoted(subject(depth), predicate(), object(depth)); }
  Triple triple(int depth) { return {subject(depth), predicate(), object(depth)}; }

  std::size_t pick(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_);
  }
  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

// Every quoted triple reachable inside `t`, including `t` itself.
inline void collect_quoted(const Term& t, std::set<Term>& out) {
  if (!t.is_quoted()) return;
  out.insert(t);
  collect_quoted(t.subject(), out);
  collect_quoted(t.object(), out);
}

// Plain fan-out walker over a triple list: expand every partial walk along
// every outgoing asserted triple, keep dead ends, then keep a uniform random
// subset of at most n walks after each depth. No quoted-triple steps.
class PlainWalker {
 public:
  explicit PlainWalker(const std::vector<Triple>& triples) {
    std::set<Triple> unique(triples.begin(), triples.end());
    for (const auto& t : unique) out_[t.subject].push_back(t);
  }

  std::vector<std::vector<Term>> walks(const Term& root, std::size_t n, std::size_t d,
                                       std::mt19937_64& rng) const {
    std::vector<std::vector<Term>> wl{{root}};
    for (std::size_t depth = 0; depth < d; ++depth) {
      std::vector<std::vector<Term>> next;
      for (const auto& w : wl) {
        const auto it = out_.find(w.back());
        if (it == out_.end()) {
          next.push_back(w);
          continue;
        }
        for (const auto& t : it->second) {
          auto nw = w;
          nw.push_back(t.predicate);
          nw.push_back(t.object);
          next.push_back(std::move(nw));
        }
      }
      while (next.size() > n) {
        const auto victim = std::uniform_int_distribution<std::size_t>(0, next.size() - 1)(rng);
        next.erase(next.begin() + static_cast<std::ptrdiff_t>(victim));
      }
      wl = std::move(next);
    }
    return wl;
  }

  // Exact probability of each single walk when n = 1: the product of
  // 1 / out-degree along the path.
  std::map<std::vector<Term>, double> single_walk_distribution(const Term& root,
                                                               std::size_t d) const {
    std::map<std::vector<Term>, double> dist{{{root}, 1.0}};
    for (std::size_t depth = 0; depth < d; ++depth) {
      std::map<std::vector<Term>, double> next;
      for (const auto& [w, pr] : dist) {
        const auto it = out_.find(w.back());
        if (it == out_.end()) {
          next[w] += pr;
          continue;
        }
        for (const auto& t : it->second) {
          auto nw = w;
          nw.push_back(t.predicate);
          nw.push_back(t.object);
          next[nw] += pr / static_cast<double>(it->second.size());
        }
      }
      dist = std::move(next);
    }
    return dist;
  }

  bool asserted(const Term& s, const Term& p, const Term& o) const {
    const auto it = out_.find(s);
    if (it == out_.end()) return false;
    return std::any_of(it->second.begin(), it->second.end(), [&](const Triple& t) {
      return t.predicate == p && t.object == o;
    });
  }

 private:
  std::map<Term, std::vector<Triple>> out_;
};

struct ChiSquare {
  double statistic = 0;
  double dof = 0;
  double p_value = 1;
};

// Goodness of fit of observed counts against expected probabilities. Cells
// with expected count below 5 are pooled into one cell.
template <typename Key>
ChiSquare chi_square_gof(const std::map<Key, std::size_t>& observed,
                         const std::map<Key, double>& probability, std::size_t total) {
  double stat = 0, pooled_obs = 0, pooled_exp = 0;
  std::size_t cells = 0;
  for (const auto& [key, pr] : probability) {
    const double e = pr * static_cast<double>(total);
    const auto it = observed.find(key);
    const double o = it == observed.end() ? 0.0 : static_cast<double>(it->second);
    if (e < 5) {
      pooled_obs += o;
      pooled_exp += e;
      continue;
    }
    stat += (o - e) * (o - e) / e;
    ++cells;
  }
  for (const auto& [key, count] : observed) {
    if (!probability.count(key)) pooled_obs += static_cast<double>(count);
  }
  if (pooled_exp > 0) {
    stat += (pooled_obs - pooled_exp) * (pooled_obs - pooled_exp) / pooled_exp;
    ++cells;
  } else if (pooled_obs > 0) {
    return {INFINITY, static_cast<double>(cells), 0.0};
  }
  ChiSquare r;
  r.statistic = stat;
  r.dof = static_cast<double>(cells > 1 ? cells - 1 : 1);
  r.p_value = boost::math::cdf(boost::math::complement(
      boost::math::chi_squared_distribution<double>(r.dof), stat));
  return r;
}

// Two-sample test of homogeneity on a 2 x k contingency table. Categories
// with fewer than 10 combined observations are pooled.
template <typename Key>
ChiSquare chi_square_two_sample(const std::map<Key, std::size_t>& a,
                                const std::map<Key, std::size_t>& b) {
  std::map<Key, std::pair<double, double>> table;
  for (const auto& [k, v] : a) table[k].first += static_cast<double>(v);
  for (const auto& [k, v] : b) table[k].second += static_cast<double>(v);
  std::vector<std::pair<double, double>> cells;
  std::pair<double, double> pooled{0, 0};
  for (const auto& [k, v] : table) {
    if (v.first + v.second < 10) {
      pooled.first += v.first;
      pooled.second += v.second;
    } else {
      cells.push_back(v);
    }
  }
  if (pooled.first + pooled.second > 0) cells.push_back(pooled);
  double na = 0, nb = 0;
  for (const auto& c : cells) {
    na += c.first;
    nb += c.second;
  }
  const double n = na + nb;
  double stat = 0;
  for (const auto& c : cells) {
    const double col = c.first + c.second;
    const double ea = col * na / n, eb = col * nb / n;
    stat += (c.first - ea) * (c.first - ea) / ea + (c.second - eb) * (c.second - eb) / eb;
  }
  ChiSquare r;
  r.statistic = stat;
  r.dof = static_cast<double>(cells.size() > 1 ? cells.size() - 1 : 1);
  r.p_value = cells.size() < 2 ? 1.0
                               : boost::math::cdf(boost::math::complement(
                                     boost::math::chi_squared_distribution<double>(r.dof), stat));
  return r;
}

// Definitional statistics.

inline double mean(const std::vector<double>& x) {
  return std::accumulate(x.begin(), x.end(), 0.0L) / static_cast<long double>(x.size());
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2) return 0;
  long double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  long double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0 || syy == 0) return 0;
  return static_cast<double>(sxy / std::sqrt(sxx * syy));
}

// Rank of x[i] is 1 + (#smaller) + (#equal - 1) / 2, counted pairwise.
inline std::vector<double> ranks(const std::vector<double>& x) {
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double less = 0, equal = 0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (x[j] < x[i]) ++less;
      if (x[j] == x[i]) ++equal;
    }
    r[i] = 1 + less + (equal - 1) / 2;
  }
  return r;
}

inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  return pearson(ranks(x), ranks(y));
}

// Tau-b from the O(n^2) pair classification.
inline double kendall_tau_b(const std::vector<double>& x, const std::vector<double>& y) {
  long long concordant = 0, discordant = 0, tied_x = 0, tied_y = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double dx = x[i] - x[j], dy = y[i] - y[j];
      if (dx == 0 && dy == 0) continue;
      if (dx == 0) {
        ++tied_x;
      } else if (dy == 0) {
        ++tied_y;
      } else if ((dx > 0) == (dy > 0)) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  const long double denom = std::sqrt(static_cast<long double>(concordant + discordant + tied_x) *
                                      static_cast<long double>(concordant + discordant + tied_y));
  if (denom == 0) return 0;
  return static_cast<double>((concordant - discordant) / denom);
}

// Best accuracy over every bijection between cluster ids and labels.
inline double clustering_accuracy(const std::vector<std::size_t>& clusters,
                                  const std::vector<std::size_t>& labels, std::size_t k) {
  std::vector<std::size_t> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  std::size_t best = 0;
  do {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < clusters.size(); ++i) {
      if (perm[clusters[i]] == labels[i]) ++hits;
    }
    best = std::max(best, hits);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return clusters.empty() ? 0.0 : static_cast<double>(best) / static_cast<double>(clusters.size());
}

// ARI from pair counting over all item pairs.
inline double adjusted_rand_index(const std::vector<std::size_t>& a,
                                  const std::vector<std::size_t>& b) {
  const std::size_t n = a.size();
  long double both = 0, only_a = 0, only_b = 0, pairs = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool sa = a[i] == a[j], sb = b[i] == b[j];
      if (sa && sb) ++both;
      if (sa) ++only_a;
      if (sb) ++only_b;
      ++pairs;
    }
  }
  const long double expected = only_a * only_b / pairs;
  const long double max_index = (only_a + only_b) / 2;
  if (max_index == expected) return 1.0;
  return static_cast<double>((both - expected) / (max_index - expected));
}

inline double cosine(const std::vector<double>& u, const std::vector<double>& v) {
  long double uv = 0, uu = 0, vv = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    uv += u[i] * v[i];
    uu += u[i] * u[i];
    vv += v[i] * v[i];
  }
  if (uu == 0 || vv == 0) return 0;
  return static_cast<double>(uv / std::sqrt(uu * vv));
}

}  // namespace oracle
