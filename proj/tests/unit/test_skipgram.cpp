#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "oracles.hpp"
#include "qtwalk/errors.hpp"
#include "qtwalk/eval.hpp"
#include "qtwalk/skipgram.hpp"
#include "skipgram_oracle.hpp"

using namespace qtwalk;

namespace {

WalkCorpus make_corpus(const std::vector<std::vector<std::string>>& walks) {
  WalkCorpus c;
  std::map<std::string, std::uint32_t> index;
  for (const auto& w : walks) {
    std::vector<std::uint32_t> ids;
    for (const auto& t : w) {
      const auto [it, inserted] = index.emplace(t, static_cast<std::uint32_t>(c.dictionary.size()));
      if (inserted) c.dictionary.push_back(t);
      ids.push_back(it->second);
    }
    c.walks.push_back(ids);
  }
  return c;
}

std::vector<ContextPair> sorted(std::vector<ContextPair> v) {
  std::sort(v.begin(), v.end(), [](const ContextPair& a, const ContextPair& b) {
    return std::tie(a.center, a.context, a.offset) < std::tie(b.center, b.context, b.offset);
  });
  return v;
}

TrainConfig small_config() {
  TrainConfig c;
  c.dim = 8;
  c.window = 2;
  c.epochs = 5;
  c.seed = 3;
  return c;
}

bool all_finite(const EmbeddingModel& m) {
  auto finite = [](std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
  };
  if (!finite(m.input_matrix())) return false;
  for (std::size_t k = 0; k < m.output_count(); ++k) {
    if (!finite(m.output_matrix(k))) return false;
  }
  return true;
}

}  // namespace

TEST(Vocabulary, CountsAndOrdering) {
  const auto c = make_corpus({{"a", "b", "c"}});
  EXPECT_EQ(build_vocabulary(c).size(), 3u);
  const auto d = make_corpus({{"a", "b", "a"}, {"a", "c", "c"}});
  const auto v = build_vocabulary(d);
  ASSERT_EQ(v.size(), 3u);
  EXPECT_EQ(v.token(0), "a");
  EXPECT_EQ(v.count(0), 3u);
  EXPECT_EQ(v.token(1), "c");
  EXPECT_EQ(v.token(2), "b");
  EXPECT_EQ(*v.find("b"), 2u);
  EXPECT_FALSE(v.find("z").has_value());
}

TEST(Vocabulary, MinCountThreshold) {
  const auto c = make_corpus({{"a", "a", "b", "a"}});
  const auto v = build_vocabulary(c, 2);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v.token(0), "a");
  const auto enc = encode_walks(c, v);
  EXPECT_EQ(enc, (std::vector<std::vector<std::uint32_t>>{{0, 0, 0}}));
}

TEST(ExtractPairs, ThreeTokensWindowOne) {
  const std::vector<std::uint32_t> w{0, 1, 2};
  const std::vector<ContextPair> expected{{0, 1, 1}, {1, 0, -1}, {1, 2, 1}, {2, 1, -1}};
  EXPECT_EQ(sorted(extract_pairs(w, 1)), sorted(expected));
  EXPECT_TRUE(extract_pairs(std::vector<std::uint32_t>{4}, 5).empty());
}

TEST(ExtractPairs, LengthEightWindowFive) {
  const std::vector<std::uint32_t> w{0, 1, 2, 3, 4, 5, 6, 7};
  EXPECT_EQ(extract_pairs(w, 5).size(), 50u);
}

TEST(ExtractPairs, MatchesBruteForce) {
  std::mt19937_64 rng(1);
  for (int round = 0; round < 200; ++round) {
    const std::size_t len = rng() % 15;
    const int c = 1 + static_cast<int>(rng() % 6);
    std::vector<std::uint32_t> w(len);
    for (auto& x : w) x = static_cast<std::uint32_t>(rng() % 5);
    std::vector<ContextPair> brute;
    for (std::size_t i = 0; i < len; ++i) {
      for (std::size_t j = 0; j < len; ++j) {
        const int off = static_cast<int>(j) - static_cast<int>(i);
        if (off != 0 && std::abs(off) <= c) brute.push_back({w[i], w[j], off});
      }
    }
    EXPECT_EQ(sorted(extract_pairs(w, c)), sorted(brute));
  }
}

TEST(Model, OutputMatrixLayout) {
  const auto vocab = oracle::numbered_vocab(4);
  const EmbeddingModel classic(vocab, SkipGramMode::Classic, 3, 2);
  EXPECT_EQ(classic.output_count(), 1u);
  EXPECT_EQ(classic.output_index(-2), 0u);
  EXPECT_EQ(classic.output_index(1), 0u);
  const EmbeddingModel structured(vocab, SkipGramMode::Structured, 3, 3);
  ASSERT_EQ(structured.output_count(), 6u);
  const int offsets[] = {-3, -2, -1, 1, 2, 3};
  for (std::size_t k = 0; k < 6; ++k) {
    EXPECT_EQ(structured.output_index(offsets[k]), k);
    EXPECT_EQ(structured.output_offset(k), offsets[k]);
  }
}

TEST(Softmax, ZeroVectorsAreUniform) {
  const EmbeddingModel m(oracle::numbered_vocab(7), SkipGramMode::Classic, 4, 2);
  for (std::uint32_t c = 0; c < 7; ++c) EXPECT_DOUBLE_EQ(softmax_probability(m, 0, c), 1.0 / 7);
}

TEST(Softmax, HandSetThreeWords) {
  EmbeddingModel m(oracle::numbered_vocab(3), SkipGramMode::Classic, 2, 1);
  const double in[] = {1, 0, 0.5, -1, 0, 0};
  const double out[] = {0, 0, 1, 0, 0, 2};
  std::copy(std::begin(in), std::end(in), m.input_matrix().begin());
  std::copy(std::begin(out), std::end(out), m.output_matrix(0).begin());
  // Scores for center w0 = (1, 0): 0, 1, 0.
  const double z0 = 2 + std::exp(1.0);
  EXPECT_NEAR(softmax_probability(m, 0, 0), 1 / z0, 1e-12);
  EXPECT_NEAR(softmax_probability(m, 0, 1), std::exp(1.0) / z0, 1e-12);
  EXPECT_NEAR(softmax_probability(m, 0, 2), 1 / z0, 1e-12);
  // Scores for center w1 = (0.5, -1): 0, 0.5, -2.
  const double z1 = 1 + std::exp(0.5) + std::exp(-2.0);
  EXPECT_NEAR(softmax_probability(m, 1, 0), 1 / z1, 1e-12);
  EXPECT_NEAR(softmax_probability(m, 1, 1), std::exp(0.5) / z1, 1e-12);
  EXPECT_NEAR(softmax_probability(m, 1, 2), std::exp(-2.0) / z1, 1e-12);
  EXPECT_NEAR(softmax_probability(m, 2, 1), 1.0 / 3, 1e-12);
}

TEST(Softmax, SumsToOne) {
  std::mt19937_64 rng(8);
  for (const auto mode : {SkipGramMode::Classic, SkipGramMode::Structured}) {
    EmbeddingModel m(oracle::numbered_vocab(30), mode, 6, 2);
    oracle::randomize(m, rng, 3.0);
    for (std::uint32_t c = 0; c < 30; ++c) {
      for (const int off : {-2, -1, 1, 2}) {
        double sum = 0;
        for (std::uint32_t o = 0; o < 30; ++o) {
          const double p = softmax_probability(m, c, o, off);
          EXPECT_GT(p, 0.0);
          EXPECT_LT(p, 1.0);
          sum += p;
        }
        EXPECT_NEAR(sum, 1.0, 1e-9);
      }
    }
  }
}

TEST(Softmax, StructuredDependsOnPosition) {
  EmbeddingModel m(oracle::numbered_vocab(3), SkipGramMode::Structured, 2, 1);
  m.input(0)[0] = 1;
  m.output(m.output_index(1), 1)[0] = 2;
  m.output(m.output_index(-1), 2)[0] = 2;
  EXPECT_GT(softmax_probability(m, 0, 1, 1), softmax_probability(m, 0, 1, -1));
  EXPECT_LT(softmax_probability(m, 0, 2, 1), softmax_probability(m, 0, 2, -1));
  EmbeddingModel c(oracle::numbered_vocab(3), SkipGramMode::Classic, 2, 1);
  c.input(0)[0] = 1;
  c.output(0, 1)[0] = 2;
  EXPECT_EQ(softmax_probability(c, 0, 1, 1), softmax_probability(c, 0, 1, -1));
}

TEST(Objective, LogLikelihoodMatchesOracle) {
  std::mt19937_64 rng(17);
  for (const auto mode : {SkipGramMode::Classic, SkipGramMode::Structured}) {
    EmbeddingModel m(oracle::numbered_vocab(12), mode, 5, 3);
    oracle::randomize(m, rng, 1.0);
    const auto walks = oracle::random_walks(4, 9, 12, rng);
    EXPECT_NEAR(log_likelihood(m, walks),
                static_cast<double>(oracle::objective(oracle::copy_params(m), walks)), 1e-12);
  }
}

TEST(Objective, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(2);
  for (const auto mode : {SkipGramMode::Classic, SkipGramMode::Structured}) {
    for (int point = 0; point < 10; ++point) {
      EmbeddingModel m(oracle::numbered_vocab(20), mode, 10, 2);
      oracle::randomize(m, rng, 1.0);
      const auto walks = oracle::random_walks(3, 6, 20, rng);
      const auto check = oracle::check_gradient(m, log_likelihood_gradient(m, walks), walks, 1e-5L, 1e-7);
      EXPECT_LE(check.max_relative_error, 1e-4);
      EXPECT_EQ(check.parameters, 20u * 10u * (1 + m.output_count()));
    }
  }
}

TEST(Train, FullSoftmaxLearnsDeterministicPair) {
  const auto corpus = make_corpus(std::vector<std::vector<std::string>>(500, {"a", "b"}));
  const auto vocab = build_vocabulary(corpus);
  TrainConfig cfg = small_config();
  cfg.softmax = SoftmaxMode::FullSoftmax;
  const auto m = train(corpus, vocab, cfg);
  EXPECT_GT(softmax_probability(m, *vocab.find("a"), *vocab.find("b")), 0.9);
  EXPECT_TRUE(all_finite(m));
}

TEST(Train, CoOccurrenceShapesInputSpace) {
  std::vector<std::vector<std::string>> walks;
  for (int i = 0; i < 100; ++i) {
    walks.push_back({"x", "y", "a", "b"});
    walks.push_back({"y", "x", "a", "b"});
    walks.push_back({"z", "c", "d", "e"});
  }
  const auto corpus = make_corpus(walks);
  const auto vocab = build_vocabulary(corpus);
  for (const auto softmax : {SoftmaxMode::NegativeSampling, SoftmaxMode::FullSoftmax}) {
    auto cfg = small_config();
    cfg.softmax = softmax;
    const auto m = train(corpus, vocab, cfg);
    EXPECT_GT(cosine_similarity(m.vector("x"), m.vector("y")),
              cosine_similarity(m.vector("x"), m.vector("z")));
  }
}

TEST(Train, ZeroEpochsLeavesInitialization) {
  const auto corpus = make_corpus({{"a", "b", "c"}, {"c", "b"}});
  const auto vocab = build_vocabulary(corpus);
  auto cfg = small_config();
  cfg.epochs = 0;
  const auto m = train(corpus, vocab, cfg);
  EXPECT_EQ(m, initialize_model(vocab, cfg));
  for (const double x : m.input_matrix()) {
    EXPECT_LE(std::fabs(x), 0.5 / static_cast<double>(cfg.dim));
  }
  for (const double x : m.output_matrix(0)) EXPECT_EQ(x, 0.0);
}

TEST(Train, DeterministicSingleThreaded) {
  std::mt19937_64 rng(4);
  WalkCorpus corpus;
  for (int i = 0; i < 40; ++i) corpus.dictionary.push_back("t" + std::to_string(i));
  corpus.walks = oracle::random_walks(200, 12, 40, rng);
  const auto vocab = build_vocabulary(corpus);
  for (const auto mode : {SkipGramMode::Classic, SkipGramMode::Structured}) {
    auto cfg = small_config();
    cfg.mode = mode;
    const auto a = train(corpus, vocab, cfg);
    const auto b = train(corpus, vocab, cfg);
    EXPECT_EQ(serialize_embeddings(a, true), serialize_embeddings(b, true));
    EXPECT_TRUE(all_finite(a));
    EXPECT_EQ(a.output_count(), mode == SkipGramMode::Structured ? 4u : 1u);
    cfg.threads = 4;
    const auto c = train(corpus, vocab, cfg);
    EXPECT_TRUE(all_finite(c));
    EXPECT_EQ(c.size(), a.size());
  }
}

TEST(Train, NegativeSamplingAgreesWithFullSoftmaxOnTopContext) {
  std::vector<std::vector<std::string>> walks;
  for (int i = 0; i < 10; ++i) {
    const std::string c = "c" + std::to_string(i);
    for (int r = 0; r < 30; ++r) walks.push_back({c, "t" + std::to_string((i * 3) % 10)});
    for (int r = 0; r < 8; ++r) walks.push_back({c, "t" + std::to_string((i * 3 + 1) % 10)});
  }
  const auto corpus = make_corpus(walks);
  const auto vocab = build_vocabulary(corpus);
  auto cfg = small_config();
  cfg.window = 1;
  cfg.dim = 16;
  cfg.epochs = 40;
  const auto ns = train(corpus, vocab, cfg);
  cfg.softmax = SoftmaxMode::FullSoftmax;
  const auto fs = train(corpus, vocab, cfg);
  const auto top = [&](const EmbeddingModel& m, std::uint32_t center) {
    std::uint32_t best = 0;
    for (std::uint32_t o = 1; o < m.size(); ++o) {
      if (softmax_probability(m, center, o) > softmax_probability(m, center, best)) best = o;
    }
    return best;
  };
  // Each c token has one dominant context.
  std::size_t agree = 0, centers = 0;
  for (int i = 0; i < 10; ++i) {
    const auto c = *vocab.find("c" + std::to_string(i));
    const auto dominant = *vocab.find("t" + std::to_string((i * 3) % 10));
    agree += top(ns, c) == dominant && top(fs, c) == dominant;
    ++centers;
  }
  EXPECT_GE(static_cast<double>(agree) / static_cast<double>(centers), 0.9);
}

TEST(Train, Errors) {
  const auto corpus = make_corpus({{"a", "b"}});
  const auto vocab = build_vocabulary(corpus);
  auto cfg = small_config();
  EXPECT_THROW(train(make_corpus({{"a"}}), build_vocabulary(make_corpus({{"a"}})), cfg), EmptyCorpus);
  EXPECT_THROW(train(WalkCorpus{}, Vocabulary{}, cfg), EmptyCorpus);
  auto capped = cfg;
  capped.softmax = SoftmaxMode::FullSoftmax;
  capped.full_softmax_cap = 1;
  EXPECT_THROW(train(corpus, vocab, capped), InputError);
  auto m = train(corpus, vocab, cfg);
  auto wider = cfg;
  wider.dim = cfg.dim + 1;
  EXPECT_THROW(train_into(m, encode_walks(corpus, vocab), wider), DimensionMismatch);
  auto bad = cfg;
  bad.dim = 0;
  EXPECT_THROW(bad.validate(), InputError);
}

TEST(EmbeddingFile, RoundTripIsBitExact) {
  std::mt19937_64 rng(5);
  for (const auto mode : {SkipGramMode::Classic, SkipGramMode::Structured}) {
    std::vector<std::string> tokens{"<urn:a>", "<< <urn:a> <urn:p> \"x y\" >>", "\"lit\"@en"};
    EmbeddingModel m(Vocabulary(tokens, {3, 2, 1}), mode, 5, 2);
    oracle::randomize(m, rng, 1e3);
    m.input(0)[0] = 1e-300;
    m.input(0)[1] = -0.1;
    const auto path = std::filesystem::temp_directory_path() / "qtwalk_emb_roundtrip.txt";
    save_embeddings(m, path, true);
    const auto back = load_embeddings(path);
    EXPECT_TRUE(std::ranges::equal(back.vocab().tokens(), m.vocab().tokens()));
    EXPECT_EQ(back.mode(), m.mode());
    EXPECT_EQ(back.dim(), m.dim());
    EXPECT_TRUE(std::ranges::equal(back.input_matrix(), m.input_matrix()));
    ASSERT_EQ(back.output_count(), m.output_count());
    for (std::size_t k = 0; k < m.output_count(); ++k) {
      EXPECT_TRUE(std::ranges::equal(back.output_matrix(k), m.output_matrix(k)));
    }
    if (mode == SkipGramMode::Structured) EXPECT_EQ(back.window(), 2);
    save_embeddings(m, path, false);
    const auto inputs_only = load_embeddings(path);
    EXPECT_FALSE(inputs_only.has_outputs());
    EXPECT_TRUE(std::equal(inputs_only.input_matrix().begin(), inputs_only.input_matrix().end(),
                           m.input_matrix().begin()));
    EXPECT_EQ(inputs_only.vocab().tokens()[1], tokens[1]);
    std::filesystem::remove(path);
  }
}

TEST(EmbeddingFile, HeaderAndErrors) {
  EmbeddingModel m(oracle::numbered_vocab(2), SkipGramMode::Classic, 2, 1);
  m.input(0)[0] = 0.5;
  EXPECT_EQ(serialize_embeddings(m), "#qtwalk-emb v1 count=2 dim=2 mode=classic\nw0\t0.5 0\nw1\t0 0\n");
  EXPECT_THROW(parse_embeddings("#qtwalk-emb v1 count=1 dim=3 mode=classic\nw0\t1 2\n"), DimensionMismatch);
  EXPECT_THROW(parse_embeddings("#qtwalk-emb v1 count=1 dim=2 mode=classic\nw0\t1 2 3\n"), DimensionMismatch);
  EXPECT_THROW(parse_embeddings("hello\n"), FormatError);
  EXPECT_THROW(parse_embeddings("#qtwalk-emb v1 count=2 dim=1 mode=classic\nw0\t1\n"), FormatError);
  EXPECT_THROW(load_embeddings("/nonexistent/emb.txt"), InputError);
  EXPECT_TRUE(m.vector("missing").empty());
}
