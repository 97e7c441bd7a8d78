#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qtwalk/graph.hpp"
#include "qtwalk/rng.hpp"
#include "qtwalk/term.hpp"

namespace qtwalk {

enum class WalkStrategy { RandomWalk, MidWalk };

std::string_view to_string(WalkStrategy s);
WalkStrategy parse_walk_strategy(std::string_view s);

struct WalkParams {
  WalkStrategy strategy = WalkStrategy::MidWalk;
  std::size_t n = 100;
  std::size_t d = 8;
  // Probability of descending from a quoted triple into its components.
  double alpha = 0.5;
  // Probability of climbing from an object to a quoted triple containing it.
  double beta = 0.5;
  std::uint64_t seed = 42;

  // Throws InputError when a field is out of range.
  void validate() const;
};

using Walk = std::vector<TermId>;

enum class StepKind { OqWalk, QsWalk, Default };

// One expansion decision of the random-walk procedure, for instrumentation.
struct StepEvent {
  bool oq_available = false;
  bool qs_available = false;
  double rand_oq = 0;
  double rand_qs = 0;
  StepKind taken = StepKind::Default;
};

using StepObserver = std::function<void(const StepEvent&)>;

// Fan-out walks from `root` with quoted-triple steps. Throws UnknownRoot.
std::vector<Walk> random_walks(const Graph& g, const Term& root,
                               const WalkParams& p,
                               const StepObserver& observer = {});
std::vector<Walk> random_walks(const Graph& g, TermId root,
                               const WalkParams& p, Rng& rng,
                               const StepObserver& observer = {});

// Walks grown in both directions around `focus`. Throws UnknownRoot.
std::vector<Walk> mid_walks(const Graph& g, const Term& focus,
                            const WalkParams& p);
std::vector<Walk> mid_walks(const Graph& g, TermId focus, const WalkParams& p,
                            Rng& rng);

// Nodes walks start from: IRIs and quoted triples in subject or object
// position, in id order.
std::vector<TermId> walk_roots(const Graph& g);

// Seed of the random stream used for one root.
std::uint64_t root_seed(std::uint64_t master, const Term& root);

struct WalkCorpus {
  // Token text per dictionary index.
  std::vector<std::string> dictionary;
  std::vector<std::vector<std::uint32_t>> walks;
  WalkParams params;
  std::string fingerprint;

  std::size_t token_count() const;
};

// Walks from every root. Roots are processed on `threads` workers but the
// output only depends on the graph and the parameters.
WalkCorpus generate_corpus(const Graph& g, const WalkParams& p,
                           unsigned threads = 1);

std::string corpus_header(const WalkParams& p);
void write_corpus(const std::filesystem::path& path, const WalkCorpus& corpus);
std::string serialize_corpus(const WalkCorpus& corpus);
WalkCorpus read_corpus(const std::filesystem::path& path);
WalkCorpus parse_corpus(std::string_view text);

}  // namespace qtwalk
