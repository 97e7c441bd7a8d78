#include "qtwalk/walks.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <deque>
#include <fstream>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "qtwalk/errors.hpp"
#include "qtwalk/format.hpp"
#include "qtwalk/hash.hpp"

namespace qtwalk {

std::string_view to_string(WalkStrategy s) {
  return s == WalkStrategy::RandomWalk ? "random" : "mid";
}

WalkStrategy parse_walk_strategy(std::string_view s) {
  if (s == "random") return WalkStrategy::RandomWalk;
  if (s == "mid") return WalkStrategy::MidWalk;
  throw InputError("unknown walk strategy '" + std::string(s) + "'");
}

void WalkParams::validate() const {
  if (n == 0) throw InputError("number of walks must be positive");
  if (d == 0) throw InputError("walk depth must be positive");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InputError("alpha must be in [0, 1]");
  if (!(beta >= 0.0 && beta <= 1.0)) throw InputError("beta must be in [0, 1]");
}

namespace {

TermId require_root(const Graph& g, const Term& root) {
  const auto id = g.find(root);
  if (!id || !g.is_node(*id)) {
    throw UnknownRoot("node not in graph: " + root.canonical());
  }
  return *id;
}

struct Partial {
  Walk tokens;
  // The walk just climbed into a quoted triple; its last three tokens are
  // not a triple and cannot yield another climb.
  bool after_oq = false;
};

// Keeps a uniformly random subset of `n` items, preserving their order.
// Equivalent to removing random items one at a time until n remain.
template <typename T>
void trim(std::vector<T>& items, std::size_t n, Rng& rng) {
  if (items.size() <= n) return;
  std::vector<std::size_t> idx(items.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  for (std::size_t i = 0; i < n; ++i) {
    std::swap(idx[i], idx[i + rng.index(idx.size() - i)]);
  }
  idx.resize(n);
  std::sort(idx.begin(), idx.end());
  std::vector<T> kept;
  kept.reserve(n);
  for (const auto i : idx) kept.push_back(std::move(items[i]));
  items = std::move(kept);
}

}  // namespace

std::vector<Walk> random_walks(const Graph& g, TermId root,
                               const WalkParams& p, Rng& rng,
                               const StepObserver& observer) {
  p.validate();
  std::vector<Partial> wl;
  for (std::size_t depth = 0; depth < p.d; ++depth) {
    std::vector<Partial> next;
    auto expand = [&](const Partial& walk) {
      const bool first = walk.tokens.empty();
      const TermId current = first ? root : walk.tokens.back();

      std::optional<TermId> oq;
      if (first) {
        const auto qts = g.quoted_with_object(root);
        if (!qts.empty()) oq = qts[rng.index(qts.size())];
      } else if (!walk.after_oq && walk.tokens.size() >= 3) {
        const auto n = walk.tokens.size();
        oq = g.quoted_id(walk.tokens[n - 3], walk.tokens[n - 2],
                         walk.tokens[n - 1]);
      }
      const auto qs = g.components(current);

      StepEvent ev;
      ev.rand_oq = rng.uniform();
      ev.rand_qs = rng.uniform();
      ev.oq_available = oq.has_value();
      ev.qs_available = qs.has_value();

      if (oq && ev.rand_oq < p.beta) {
        ev.taken = StepKind::OqWalk;
        Partial nw = walk;
        if (first) nw.tokens.push_back(root);
        nw.tokens.push_back(*oq);
        nw.after_oq = true;
        next.push_back(std::move(nw));
      } else if (qs && ev.rand_qs < p.alpha) {
        ev.taken = StepKind::QsWalk;
        if (!first) next.push_back(walk);
        Partial nw = walk;
        if (first) nw.tokens.push_back(current);
        nw.tokens.push_back(qs->subject);
        nw.tokens.push_back(qs->predicate);
        nw.tokens.push_back(qs->object);
        nw.after_oq = false;
        next.push_back(std::move(nw));
      } else {
        ev.taken = StepKind::Default;
        const auto out = g.subject_triples(current);
        if (out.empty()) {
          Partial nw = walk;
          if (first) nw.tokens.push_back(root);
          next.push_back(std::move(nw));
        }
        for (const auto& t : out) {
          Partial nw = walk;
          if (first) nw.tokens.push_back(root);
          nw.tokens.push_back(t.predicate);
          nw.tokens.push_back(t.object);
          nw.after_oq = false;
          next.push_back(std::move(nw));
        }
      }
      if (observer) observer(ev);
    };
    if (depth == 0) {
      expand(Partial{});
    } else {
      for (const auto& walk : wl) expand(walk);
    }
    wl = std::move(next);
    trim(wl, p.n, rng);
  }
  std::vector<Walk> out;
  out.reserve(wl.size());
  for (auto& w : wl) out.push_back(std::move(w.tokens));
  return out;
}

std::vector<Walk> random_walks(const Graph& g, const Term& root,
                               const WalkParams& p,
                               const StepObserver& observer) {
  const TermId id = require_root(g, root);
  Rng rng(root_seed(p.seed, root));
  return random_walks(g, id, p, rng, observer);
}

std::vector<Walk> mid_walks(const Graph& g, TermId focus, const WalkParams& p,
                            Rng& rng) {
  p.validate();
  std::vector<Walk> wl;
  wl.reserve(p.n);
  while (wl.size() < p.n) {
    std::deque<TermId> walk{focus};
    TermId np = focus;
    TermId ns = focus;
    for (std::size_t depth = 0; depth < p.d; ++depth) {
      const double rand_oq = rng.uniform();
      const double rand_qs = rng.uniform();
      const bool backward = rng.index(2) == 0;
      if (backward) {
        const auto qts = g.quoted_with_object(np);
        const auto in = g.object_triples(np);
        std::optional<TermId> oq;
        if (!qts.empty()) oq = qts[rng.index(qts.size())];
        if (oq && rand_oq < p.beta) {
          const auto parts = *g.components(*oq);
          walk.push_front(parts.predicate);
          walk.push_front(parts.subject);
          np = parts.subject;
        } else if (!in.empty()) {
          const auto& t = in[rng.index(in.size())];
          walk.push_front(t.predicate);
          walk.push_front(t.subject);
          np = t.subject;
        }
      } else {
        const auto qs = g.components(ns);
        const auto out = g.subject_triples(ns);
        if (qs && rand_qs < p.alpha) {
          walk.push_back(qs->subject);
          walk.push_back(qs->predicate);
          walk.push_back(qs->object);
          ns = qs->object;
        } else if (!out.empty()) {
          const auto& t = out[rng.index(out.size())];
          walk.push_back(t.predicate);
          walk.push_back(t.object);
          ns = t.object;
        }
      }
    }
    wl.emplace_back(walk.begin(), walk.end());
  }
  return wl;
}

std::vector<Walk> mid_walks(const Graph& g, const Term& focus,
                            const WalkParams& p) {
  const TermId id = require_root(g, focus);
  Rng rng(root_seed(p.seed, focus));
  return mid_walks(g, id, p, rng);
}

std::vector<TermId> walk_roots(const Graph& g) {
  std::vector<TermId> roots;
  for (TermId id = 0; id < g.term_count(); ++id) {
    if (g.is_node(id) && !g.term(id).is_literal()) roots.push_back(id);
  }
  return roots;
}

std::uint64_t root_seed(std::uint64_t master, const Term& root) {
  return mix_seed(master, fnv1a64(root.canonical()));
}

std::size_t WalkCorpus::token_count() const {
  std::size_t total = 0;
  for (const auto& w : walks) total += w.size();
  return total;
}

WalkCorpus generate_corpus(const Graph& g, const WalkParams& p,
                           unsigned threads) {
  p.validate();
  const auto roots = walk_roots(g);
  std::vector<std::vector<Walk>> per_root(roots.size());
  std::atomic<std::size_t> cursor{0};
  auto worker = [&] {
    for (std::size_t i = cursor++; i < roots.size(); i = cursor++) {
      const TermId root = roots[i];
      Rng rng(root_seed(p.seed, g.term(root)));
      per_root[i] = p.strategy == WalkStrategy::RandomWalk
                        ? random_walks(g, root, p, rng)
                        : mid_walks(g, root, p, rng);
    }
  };
  threads = std::max(1u, threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  WalkCorpus corpus;
  corpus.params = p;
  corpus.fingerprint = g.fingerprint();
  corpus.dictionary.reserve(g.term_count());
  for (const auto& t : g.terms()) corpus.dictionary.push_back(t.canonical());
  for (auto& walks : per_root) {
    for (auto& w : walks) corpus.walks.emplace_back(w.begin(), w.end());
  }
  return corpus;
}

std::string corpus_header(const WalkParams& p) {
  return "#qtwalk-corpus v1 seed=" + std::to_string(p.seed) +
         " alpha=" + format_double(p.alpha) + " beta=" + format_double(p.beta) +
         " n=" + std::to_string(p.n) + " d=" + std::to_string(p.d) +
         " strategy=" + std::string(to_string(p.strategy));
}

std::string serialize_corpus(const WalkCorpus& corpus) {
  std::string out = corpus_header(corpus.params);
  out += '\n';
  for (const auto& walk : corpus.walks) {
    for (std::size_t i = 0; i < walk.size(); ++i) {
      if (i) out += '\t';
      out += corpus.dictionary.at(walk[i]);
    }
    out += '\n';
  }
  return out;
}

void write_corpus(const std::filesystem::path& path, const WalkCorpus& corpus) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << serialize_corpus(corpus);
  if (!out) throw IoError("write failed: " + path.string());
}

namespace {

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T v{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    throw FormatError("corpus header: bad value for " + std::string(key));
  }
  return v;
}

WalkParams parse_header(std::string_view line) {
  constexpr std::string_view kMagic = "#qtwalk-corpus v1";
  if (!line.starts_with(kMagic)) {
    throw FormatError("not a walk corpus (missing '#qtwalk-corpus v1' header)");
  }
  WalkParams p;
  std::istringstream in{std::string(line.substr(kMagic.size()))};
  std::string field;
  while (in >> field) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) throw FormatError("corpus header: bad field " + field);
    const std::string_view key = std::string_view(field).substr(0, eq);
    const std::string_view value = std::string_view(field).substr(eq + 1);
    if (key == "seed") p.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "alpha") p.alpha = parse_number<double>(key, value);
    else if (key == "beta") p.beta = parse_number<double>(key, value);
    else if (key == "n") p.n = parse_number<std::size_t>(key, value);
    else if (key == "d") p.d = parse_number<std::size_t>(key, value);
    else if (key == "strategy") p.strategy = parse_walk_strategy(value);
  }
  return p;
}

}  // namespace

WalkCorpus parse_corpus(std::string_view text) {
  WalkCorpus corpus;
  std::unordered_map<std::string, std::uint32_t> index;
  bool header = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!header) {
      corpus.params = parse_header(line);
      header = true;
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::uint32_t> walk;
    std::size_t start = 0;
    while (true) {
      const auto tab = line.find('\t', start);
      const auto tok = line.substr(start, tab == std::string_view::npos
                                              ? std::string_view::npos
                                              : tab - start);
      auto [it, inserted] = index.emplace(
          std::string(tok), static_cast<std::uint32_t>(corpus.dictionary.size()));
      if (inserted) corpus.dictionary.emplace_back(tok);
      walk.push_back(it->second);
      if (tab == std::string_view::npos) break;
      start = tab + 1;
    }
    corpus.walks.push_back(std::move(walk));
  }
  if (!header) throw FormatError("empty corpus file");
  return corpus;
}

WalkCorpus read_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_corpus(buf.str());
}

}  // namespace qtwalk
