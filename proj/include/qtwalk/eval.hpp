#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qtwalk/skipgram.hpp"

namespace qtwalk {

double cosine_similarity(std::span<const double> u, std::span<const double> v);

struct LabeledItem {
  std::string token;
  std::string label;
};

struct LabeledSet {
  std::vector<LabeledItem> items;
  std::size_t label_count() const;
};

struct RelatednessEntry {
  std::string seed;
  // Most related first.
  std::vector<std::string> candidates;
};

struct RelatednessGold {
  std::vector<RelatednessEntry> entries;
};

struct SimilarityPair {
  std::string qt1;
  std::string qt2;
  double score = 0;
};

struct SimilarityGold {
  std::vector<SimilarityPair> pairs;
};

// Gold tokens are canonical terms; bare IRIs are accepted and wrapped in <>.
std::string normalize_token(std::string_view text);

LabeledSet parse_labels(std::string_view text);
RelatednessGold parse_relatedness(std::string_view text);
SimilarityGold parse_similarity(std::string_view text);
LabeledSet read_labels(const std::filesystem::path& path);
RelatednessGold read_relatedness(const std::filesystem::path& path);
SimilarityGold read_similarity(const std::filesystem::path& path);

struct ReportRow {
  std::string task;
  std::string metric;
  std::string value;
};

struct EvalReport {
  std::vector<ReportRow> rows;

  void add(std::string task, std::string metric, double value);
  void add(std::string task, std::string metric, std::string value);
  void append(const EvalReport& other);
  // Value of the first row matching task and metric; NaN when absent.
  double value(std::string_view task, std::string_view metric) const;
  std::string to_tsv() const;
};

struct EvalOptions {
  std::uint64_t seed = 7;
  std::size_t folds = 10;
  std::size_t knn_k = 3;
  std::size_t kmeans_restarts = 10;
  std::size_t kmeans_max_iterations = 300;
  // Smallest fraction of gold items that must have a vector.
  double min_coverage = 0.9;
  // Whether the embeddings were trained with label-revealing triples removed.
  // Only echoed in the report.
  std::string leak_guard = "unknown";
};

// Stratified k-fold, k-nearest-neighbour classification (cosine distance).
// Throws TooFewPerClass or MissingToken.
EvalReport eval_classification(const EmbeddingModel& emb, const LabeledSet& gold,
                               std::string_view task,
                               const EvalOptions& options = {});

// k-means on unit vectors with k = number of labels; accuracy under the best
// one-to-one cluster/label matching and the adjusted Rand index.
EvalReport eval_clustering(const EmbeddingModel& emb, const LabeledSet& gold,
                           std::string_view task, const EvalOptions& options = {});

// Mean Kendall tau-b between gold rank and cosine similarity to the seed.
// Throws MissingSeed.
EvalReport eval_relatedness(const EmbeddingModel& emb, const RelatednessGold& gold,
                            std::string_view task,
                            const EvalOptions& options = {});

// Pearson, Spearman and their harmonic mean between gold scores and cosine
// similarity. Throws MissingToken.
EvalReport eval_qt_similarity(const EmbeddingModel& emb, const SimilarityGold& gold,
                              std::string_view task,
                              const EvalOptions& options = {});

// Building blocks, exposed for testing.

// Fold index per item; classes are spread evenly over the folds.
std::vector<std::size_t> stratified_folds(std::span<const std::size_t> labels,
                                          std::size_t folds, std::uint64_t seed);

// Majority vote of the k nearest training points; ties between labels go to
// the label of the nearest neighbour. Returns the predicted label.
std::size_t knn_predict(std::span<const double> distances,
                        std::span<const std::size_t> train_labels, std::size_t k);

// Assignment maximizing the total weight of a square matrix (row-major).
// Returns the column assigned to each row.
std::vector<std::size_t> max_weight_assignment(std::span<const double> weights,
                                               std::size_t n);

// Fraction of items whose cluster maps to their label under the best
// one-to-one mapping. Clusters and labels are in [0, k).
double clustering_accuracy(std::span<const std::size_t> clusters,
                           std::span<const std::size_t> labels, std::size_t k);

double adjusted_rand_index(std::span<const std::size_t> clusters,
                           std::span<const std::size_t> labels);

struct KMeansResult {
  std::vector<std::size_t> assignment;
  double inertia = 0;
};

// Lloyd's algorithm with k-means++ seeding, best of `restarts`.
KMeansResult kmeans(std::span<const std::vector<double>> points, std::size_t k,
                    std::size_t restarts, std::size_t max_iterations,
                    std::uint64_t seed);

struct HarmonicMean {
  double value = 0;
  // True when the mean was forced to 0 because a correlation was not positive.
  bool clamped = false;
};

HarmonicMean harmonic_mean(double a, double b);

}  // namespace qtwalk
