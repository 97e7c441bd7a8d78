#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qtwalk/eval.hpp"
#include "qtwalk/graph.hpp"
#include "qtwalk/manifest.hpp"
#include "qtwalk/skipgram.hpp"
#include "qtwalk/walks.hpp"

namespace qtwalk {

struct GoldSet {
  std::optional<LabeledSet> entity_labels;
  std::optional<LabeledSet> qt_labels;
  std::optional<RelatednessGold> relatedness;
  std::optional<SimilarityGold> similarity;
};

// Loads whichever of entity_labels.tsv, qt_labels.tsv, relatedness.tsv and
// similarity.tsv exist in `dir`.
GoldSet load_gold_dir(const std::filesystem::path& dir);

struct PipelineConfig {
  WalkParams walk;
  TrainConfig train;
  EvalOptions eval;
  // Predicates removed from the graph before walking.
  std::vector<std::string> exclude_predicates;
  unsigned walk_threads = 1;
};

// Default configuration: mid walks, depth 8, 100 walks per node,
// alpha = beta = 0.5, window 5, dimension 100.
PipelineConfig default_pipeline_config();

struct EvalTasks {
  bool classification = true;
  bool clustering = true;
  bool relatedness = true;
  bool similarity = true;
};

// Runs every selected task for which gold data is present.
EvalReport evaluate(const EmbeddingModel& model, const GoldSet& gold,
                    const EvalOptions& options, const EvalTasks& tasks = {});

struct PipelineResult {
  WalkCorpus corpus;
  EmbeddingModel model;
  EvalReport report;
};

PipelineResult run_pipeline(std::span<const Triple> triples,
                            const PipelineConfig& config, const GoldSet& gold,
                            const EvalTasks& tasks = {});

Manifest walk_manifest(const WalkCorpus& corpus,
                       const std::vector<std::string>& exclude_predicates);
Manifest train_manifest(const Manifest& corpus_manifest, const TrainConfig& cfg);

// True when the manifest records that rdf:type triples were removed.
bool type_triples_excluded(const Manifest& m);

}  // namespace qtwalk
