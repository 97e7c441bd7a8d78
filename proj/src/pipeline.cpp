#include "qtwalk/pipeline.hpp"

#include <sstream>

#include "qtwalk/format.hpp"

namespace qtwalk {

GoldSet load_gold_dir(const std::filesystem::path& dir) {
  GoldSet gold;
  if (std::filesystem::exists(dir / "entity_labels.tsv")) {
    gold.entity_labels = read_labels(dir / "entity_labels.tsv");
  }
  if (std::filesystem::exists(dir / "qt_labels.tsv")) {
    gold.qt_labels = read_labels(dir / "qt_labels.tsv");
  }
  if (std::filesystem::exists(dir / "relatedness.tsv")) {
    gold.relatedness = read_relatedness(dir / "relatedness.tsv");
  }
  if (std::filesystem::exists(dir / "similarity.tsv")) {
    gold.similarity = read_similarity(dir / "similarity.tsv");
  }
  return gold;
}

PipelineConfig default_pipeline_config() {
  PipelineConfig c;
  c.walk.strategy = WalkStrategy::MidWalk;
  c.walk.d = 8;
  c.walk.n = 100;
  c.walk.alpha = 0.5;
  c.walk.beta = 0.5;
  c.train.window = 5;
  c.train.dim = 100;
  return c;
}

EvalReport evaluate(const EmbeddingModel& model, const GoldSet& gold,
                    const EvalOptions& options, const EvalTasks& tasks) {
  EvalReport report;
  if (tasks.classification && gold.entity_labels) {
    report.append(eval_classification(model, *gold.entity_labels,
                                      "entity_classification", options));
  }
  if (tasks.classification && gold.qt_labels) {
    report.append(eval_classification(model, *gold.qt_labels, "qt_classification",
                                      options));
  }
  if (tasks.clustering && gold.entity_labels) {
    report.append(eval_clustering(model, *gold.entity_labels, "entity_clustering",
                                  options));
  }
  if (tasks.relatedness && gold.relatedness) {
    report.append(eval_relatedness(model, *gold.relatedness, "entity_relatedness",
                                   options));
  }
  if (tasks.similarity && gold.similarity) {
    report.append(eval_qt_similarity(model, *gold.similarity, "qt_similarity",
                                     options));
  }
  return report;
}

PipelineResult run_pipeline(std::span<const Triple> triples,
                            const PipelineConfig& config, const GoldSet& gold,
                            const EvalTasks& tasks) {
  const auto kept = exclude_predicates(triples, config.exclude_predicates);
  const Graph g = build_graph(kept);
  PipelineResult r;
  r.corpus = generate_corpus(g, config.walk, config.walk_threads);
  const auto vocab = build_vocabulary(r.corpus, config.train.min_count);
  r.model = train(r.corpus, vocab, config.train);
  EvalOptions options = config.eval;
  options.leak_guard = type_triples_excluded(walk_manifest(r.corpus, config.exclude_predicates))
                           ? "type-triples-removed"
                           : "type-triples-kept";
  r.report = evaluate(r.model, gold, options, tasks);
  return r;
}

namespace {

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ' ';
    out += items[i];
  }
  return out;
}

}  // namespace

Manifest walk_manifest(const WalkCorpus& corpus,
                       const std::vector<std::string>& exclude_predicates) {
  Manifest m;
  m["graph_fingerprint"] = corpus.fingerprint;
  m["walk.strategy"] = std::string(to_string(corpus.params.strategy));
  m["walk.n"] = std::to_string(corpus.params.n);
  m["walk.d"] = std::to_string(corpus.params.d);
  m["walk.alpha"] = format_double(corpus.params.alpha);
  m["walk.beta"] = format_double(corpus.params.beta);
  m["walk.seed"] = std::to_string(corpus.params.seed);
  m["exclude_predicates"] = join(exclude_predicates);
  return m;
}

Manifest train_manifest(const Manifest& corpus_manifest, const TrainConfig& cfg) {
  Manifest m = corpus_manifest;
  m["train.mode"] = std::string(to_string(cfg.mode));
  m["train.softmax"] =
      cfg.softmax == SoftmaxMode::NegativeSampling ? "negative-sampling" : "full";
  m["train.dim"] = std::to_string(cfg.dim);
  m["train.window"] = std::to_string(cfg.window);
  m["train.epochs"] = std::to_string(cfg.epochs);
  m["train.negatives"] = std::to_string(cfg.negatives);
  m["train.learning_rate"] = format_double(cfg.learning_rate);
  m["train.min_count"] = std::to_string(cfg.min_count);
  m["train.seed"] = std::to_string(cfg.seed);
  m["train.threads"] = std::to_string(cfg.threads);
  return m;
}

bool type_triples_excluded(const Manifest& m) {
  const auto it = m.find("exclude_predicates");
  if (it == m.end()) return false;
  std::istringstream in(it->second);
  std::string iri;
  while (in >> iri) {
    if (iri == kRdfType) return true;
  }
  return false;
}

}  // namespace qtwalk
