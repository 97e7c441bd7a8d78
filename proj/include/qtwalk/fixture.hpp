#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "qtwalk/eval.hpp"
#include "qtwalk/term.hpp"

namespace qtwalk {

// Seeded generator of a small scene graph in the reified kgc vocabulary,
// together with its RDF-star conversion and gold standards for the four
// evaluation tasks. Stands in for the real dataset in tests.
struct FixtureOptions {
  std::uint64_t seed = 1;
  std::size_t persons = 30;
  std::size_t objects = 30;
  std::size_t places = 30;
  std::size_t scenes = 400;
  std::size_t story_length = 10;
  // Deepest quoted-triple nesting produced by scenes quoting scenes.
  int max_depth = 4;
  double nested_rate = 0.35;
  double duplicate_rate = 0.05;
  double missing_role_rate = 0.03;
  std::size_t relatedness_seeds = 10;
  std::size_t relatedness_candidates = 10;
  std::size_t similarity_qts = 20;
};

struct Fixture {
  std::vector<Triple> reified;
  std::vector<Triple> rdf_star;
  LabeledSet entity_labels;
  LabeledSet qt_labels;
  RelatednessGold relatedness;
  SimilarityGold similarity;
};

inline constexpr std::string_view kFixtureNamespace = "http://example.org/synth/";

Fixture generate_fixture(const FixtureOptions& options = {});

// Writes reified.ttl, graph.ttls and gold/{entity_labels,qt_labels,
// relatedness,similarity}.tsv into `dir`.
void write_fixture(const std::filesystem::path& dir, const Fixture& fixture);

std::string serialize_labels(const LabeledSet& set);
std::string serialize_relatedness(const RelatednessGold& gold);
std::string serialize_similarity(const SimilarityGold& gold);

}  // namespace qtwalk
