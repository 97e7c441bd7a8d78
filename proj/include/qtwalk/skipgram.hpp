#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "qtwalk/walks.hpp"

namespace qtwalk {

class Vocabulary {
 public:
  Vocabulary() = default;
  // Tokens must be distinct; counts are parallel to tokens.
  Vocabulary(std::vector<std::string> tokens, std::vector<std::uint64_t> counts);

  std::size_t size() const noexcept { return tokens_.size(); }
  const std::string& token(std::uint32_t i) const { return tokens_.at(i); }
  std::span<const std::string> tokens() const noexcept { return tokens_; }
  std::uint64_t count(std::uint32_t i) const { return counts_.at(i); }
  std::span<const std::uint64_t> counts() const noexcept { return counts_; }
  std::optional<std::uint32_t> find(std::string_view token) const;

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.tokens_ == b.tokens_ && a.counts_ == b.counts_;
  }

 private:
  std::vector<std::string> tokens_;
  std::vector<std::uint64_t> counts_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

// Indexes ordered by descending count, then ascending token text.
Vocabulary build_vocabulary(const WalkCorpus& corpus, std::uint64_t min_count = 1);

// Walks as vocabulary indexes; tokens below min_count are dropped.
std::vector<std::vector<std::uint32_t>> encode_walks(const WalkCorpus& corpus,
                                                     const Vocabulary& vocab);

struct ContextPair {
  std::uint32_t center;
  std::uint32_t context;
  int offset;

  friend bool operator==(const ContextPair&, const ContextPair&) = default;
};

// Every (center, context) pair with 1 <= |offset| <= window.
std::vector<ContextPair> extract_pairs(std::span<const std::uint32_t> walk,
                                       int window);

enum class SkipGramMode { Classic, Structured };
enum class SoftmaxMode { NegativeSampling, FullSoftmax };

std::string_view to_string(SkipGramMode m);
SkipGramMode parse_skipgram_mode(std::string_view s);

struct TrainConfig {
  std::size_t dim = 100;
  int window = 5;
  std::size_t epochs = 5;
  std::size_t negatives = 5;
  double learning_rate = 0.025;
  // Floor of the linearly decaying rate, as a fraction of the initial rate.
  double min_rate_fraction = 1e-4;
  std::uint64_t min_count = 1;
  std::uint64_t seed = 1;
  SkipGramMode mode = SkipGramMode::Classic;
  SoftmaxMode softmax = SoftmaxMode::NegativeSampling;
  // Largest vocabulary FullSoftmax accepts.
  std::size_t full_softmax_cap = 5000;
  // More than one thread updates shared parameters without locking, so the
  // result is no longer reproducible.
  unsigned threads = 1;

  void validate() const;
};

class EmbeddingModel {
 public:
  EmbeddingModel() = default;
  // Zero-initialized parameters.
  EmbeddingModel(Vocabulary vocab, SkipGramMode mode, std::size_t dim, int window);

  const Vocabulary& vocab() const noexcept { return vocab_; }
  SkipGramMode mode() const noexcept { return mode_; }
  std::size_t dim() const noexcept { return dim_; }
  int window() const noexcept { return window_; }
  std::size_t size() const noexcept { return vocab_.size(); }

  std::span<double> input(std::uint32_t w);
  std::span<const double> input(std::uint32_t w) const;
  std::span<double> input_matrix() noexcept { return input_; }
  std::span<const double> input_matrix() const noexcept { return input_; }

  // 1 matrix in classic mode, 2 * window in structured mode.
  std::size_t output_count() const noexcept { return outputs_.size(); }
  // Matrix used for context offset `offset` (ignored in classic mode).
  std::size_t output_index(int offset) const;
  // Offset that output matrix `k` serves; 0 in classic mode.
  int output_offset(std::size_t k) const;
  std::span<double> output(std::size_t k, std::uint32_t w);
  std::span<const double> output(std::size_t k, std::uint32_t w) const;
  std::span<double> output_matrix(std::size_t k) { return outputs_.at(k); }
  std::span<const double> output_matrix(std::size_t k) const { return outputs_.at(k); }
  bool has_outputs() const noexcept { return !outputs_.empty(); }
  void drop_outputs() { outputs_.clear(); }

  // Input vector of `token`, or empty when it is not in the vocabulary.
  std::span<const double> vector(std::string_view token) const;

  friend bool operator==(const EmbeddingModel&, const EmbeddingModel&) = default;

 private:
  Vocabulary vocab_;
  SkipGramMode mode_ = SkipGramMode::Classic;
  std::size_t dim_ = 0;
  int window_ = 0;
  std::vector<double> input_;
  std::vector<std::vector<double>> outputs_;
};

// Input vectors uniform in [-0.5/dim, 0.5/dim], output matrices zero.
EmbeddingModel initialize_model(const Vocabulary& vocab, const TrainConfig& cfg);

// Throws EmptyCorpus when the vocabulary or the pair set is empty.
EmbeddingModel train(const WalkCorpus& corpus, const Vocabulary& vocab,
                     const TrainConfig& cfg);
// Continues training `model` in place. Throws DimensionMismatch when the
// configuration does not match the model.
void train_into(EmbeddingModel& model,
                const std::vector<std::vector<std::uint32_t>>& walks,
                const TrainConfig& cfg);

// p(context | center) under the full softmax, using the output matrix of
// `offset` in structured mode.
double softmax_probability(const EmbeddingModel& model, std::uint32_t center,
                           std::uint32_t context, int offset = 1);

// Average log-likelihood over all context pairs, divided by the number of
// tokens, under the full softmax.
double log_likelihood(const EmbeddingModel& model,
                      const std::vector<std::vector<std::uint32_t>>& walks);

struct Gradient {
  std::vector<double> input;
  std::vector<std::vector<double>> outputs;
};

// Analytic gradient of log_likelihood.
Gradient log_likelihood_gradient(
    const EmbeddingModel& model,
    const std::vector<std::vector<std::uint32_t>>& walks);

// Embedding files. Output matrices are appended after the input vectors when
// requested and restored by load_embeddings when present.
void save_embeddings(const EmbeddingModel& model, const std::filesystem::path& path,
                     bool with_outputs = false);
std::string serialize_embeddings(const EmbeddingModel& model,
                                 bool with_outputs = false);
EmbeddingModel load_embeddings(const std::filesystem::path& path);
EmbeddingModel parse_embeddings(std::string_view text);

}  // namespace qtwalk
