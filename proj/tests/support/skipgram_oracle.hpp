#pragma once

// Independent evaluation of the skip-gram objective under the full softmax
// and its central-difference gradient, in long double.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "qtwalk/skipgram.hpp"

namespace oracle {

struct SkipGramParams {
  std::size_t words = 0;
  std::size_t dim = 0;
  int window = 0;
  bool structured = false;
  std::vector<long double> input;                 // words x dim
  std::vector<std::vector<long double>> outputs;  // 1 or 2c matrices

  std::size_t matrix_for(int offset) const {
    if (!structured) return 0;
    return offset < 0 ? static_cast<std::size_t>(offset + window)
                      : static_cast<std::size_t>(window + offset - 1);
  }
};

inline SkipGramParams copy_params(const qtwalk::EmbeddingModel& m) {
  SkipGramParams p;
  p.words = m.size();
  p.dim = m.dim();
  p.window = m.window();
  p.structured = m.mode() == qtwalk::SkipGramMode::Structured;
  p.input.assign(m.input_matrix().begin(), m.input_matrix().end());
  for (std::size_t k = 0; k < m.output_count(); ++k) {
    p.outputs.emplace_back(m.output_matrix(k).begin(), m.output_matrix(k).end());
  }
  return p;
}

// (1/T) sum over tokens t and offsets -c..c (j != 0) of log p(w_{t+j} | w_t).
inline long double objective(const SkipGramParams& p,
                             const std::vector<std::vector<std::uint32_t>>& walks) {
  long double sum = 0;
  std::size_t tokens = 0;
  std::vector<long double> scores(p.words);
  for (const auto& w : walks) {
    tokens += w.size();
    const long n = static_cast<long>(w.size());
    for (long t = 0; t < n; ++t) {
      for (long j = -p.window; j <= p.window; ++j) {
        if (j == 0 || t + j < 0 || t + j >= n) continue;
        const auto& out = p.outputs[p.matrix_for(static_cast<int>(j))];
        const long double* h = &p.input[w[t] * p.dim];
        long double max_score = -INFINITY;
        for (std::size_t u = 0; u < p.words; ++u) {
          long double s = 0;
          for (std::size_t d = 0; d < p.dim; ++d) s += out[u * p.dim + d] * h[d];
          scores[u] = s;
          max_score = std::max(max_score, s);
        }
        long double z = 0;
        for (const auto s : scores) z += std::exp(s - max_score);
        sum += scores[w[t + j]] - max_score - std::log(z);
      }
    }
  }
  return tokens == 0 ? 0 : sum / static_cast<long double>(tokens);
}

struct GradientCheck {
  double max_relative_error = 0;
  std::size_t parameters = 0;
};

// Compares an analytic gradient with central differences of `objective`
// for every parameter. Relative error is |a - n| / max(|a|, |n|, floor).
inline GradientCheck check_gradient(const qtwalk::EmbeddingModel& model,
                                    const qtwalk::Gradient& analytic,
                                    const std::vector<std::vector<std::uint32_t>>& walks,
                                    long double h, double floor) {
  SkipGramParams p = copy_params(model);
  GradientCheck r;
  auto compare = [&](long double& x, double a) {
    const long double saved = x;
    x = saved + h;
    const long double up = objective(p, walks);
    x = saved - h;
    const long double down = objective(p, walks);
    x = saved;
    const double numeric = static_cast<double>((up - down) / (2 * h));
    const double denom = std::max({std::fabs(a), std::fabs(numeric), floor});
    r.max_relative_error = std::max(r.max_relative_error, std::fabs(a - numeric) / denom);
    ++r.parameters;
  };
  for (std::size_t i = 0; i < p.input.size(); ++i) compare(p.input[i], analytic.input[i]);
  for (std::size_t k = 0; k < p.outputs.size(); ++k) {
    for (std::size_t i = 0; i < p.outputs[k].size(); ++i) compare(p.outputs[k][i], analytic.outputs[k][i]);
  }
  return r;
}

// Vocabulary of `words` tokens w0, w1, ... with unit counts.
inline qtwalk::Vocabulary numbered_vocab(std::size_t words) {
  std::vector<std::string> tokens;
  for (std::size_t i = 0; i < words; ++i) tokens.push_back("w" + std::to_string(i));
  return qtwalk::Vocabulary(tokens, std::vector<std::uint64_t>(words, 1));
}

inline void randomize(qtwalk::EmbeddingModel& m, std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  for (auto& x : m.input_matrix()) x = u(rng);
  for (std::size_t k = 0; k < m.output_count(); ++k) {
    for (auto& x : m.output_matrix(k)) x = u(rng);
  }
}

inline std::vector<std::vector<std::uint32_t>> random_walks(std::size_t count, std::size_t length,
                                                            std::size_t words, std::mt19937_64& rng) {
  std::vector<std::vector<std::uint32_t>> walks(count);
  for (auto& w : walks) {
    for (std::size_t i = 0; i < length; ++i) {
      w.push_back(static_cast<std::uint32_t>(rng() % words));
    }
  }
  return walks;
}

}  // namespace oracle
