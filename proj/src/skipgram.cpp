#include "qtwalk/skipgram.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "qtwalk/errors.hpp"
#include "qtwalk/format.hpp"
#include "qtwalk/rng.hpp"

namespace qtwalk {

Vocabulary::Vocabulary(std::vector<std::string> tokens,
                       std::vector<std::uint64_t> counts)
    : tokens_(std::move(tokens)), counts_(std::move(counts)) {
  if (counts_.size() != tokens_.size()) counts_.resize(tokens_.size(), 0);
  index_.reserve(tokens_.size());
  for (std::uint32_t i = 0; i < tokens_.size(); ++i) {
    if (!index_.emplace(tokens_[i], i).second) {
      throw FormatError("duplicate vocabulary token " + tokens_[i]);
    }
  }
}

std::optional<std::uint32_t> Vocabulary::find(std::string_view token) const {
  const auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Vocabulary build_vocabulary(const WalkCorpus& corpus, std::uint64_t min_count) {
  std::vector<std::uint64_t> counts(corpus.dictionary.size(), 0);
  for (const auto& walk : corpus.walks) {
    for (const auto t : walk) ++counts.at(t);
  }
  std::vector<std::uint32_t> order;
  for (std::uint32_t i = 0; i < counts.size(); ++i) {
    if (counts[i] > 0 && counts[i] >= min_count) order.push_back(i);
  }
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (counts[a] != counts[b]) return counts[a] > counts[b];
    return corpus.dictionary[a] < corpus.dictionary[b];
  });
  std::vector<std::string> tokens;
  std::vector<std::uint64_t> kept;
  tokens.reserve(order.size());
  kept.reserve(order.size());
  for (const auto i : order) {
    tokens.push_back(corpus.dictionary[i]);
    kept.push_back(counts[i]);
  }
  return Vocabulary(std::move(tokens), std::move(kept));
}

std::vector<std::vector<std::uint32_t>> encode_walks(const WalkCorpus& corpus,
                                                     const Vocabulary& vocab) {
  std::vector<std::optional<std::uint32_t>> map(corpus.dictionary.size());
  for (std::size_t i = 0; i < map.size(); ++i) map[i] = vocab.find(corpus.dictionary[i]);
  std::vector<std::vector<std::uint32_t>> out;
  out.reserve(corpus.walks.size());
  for (const auto& walk : corpus.walks) {
    std::vector<std::uint32_t> w;
    w.reserve(walk.size());
    for (const auto t : walk) {
      if (map.at(t)) w.push_back(*map[t]);
    }
    out.push_back(std::move(w));
  }
  return out;
}

std::vector<ContextPair> extract_pairs(std::span<const std::uint32_t> walk,
                                       int window) {
  std::vector<ContextPair> pairs;
  const auto n = static_cast<std::ptrdiff_t>(walk.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    for (std::ptrdiff_t j = i - window; j <= i + window; ++j) {
      if (j == i || j < 0 || j >= n) continue;
      pairs.push_back(ContextPair{walk[i], walk[j], static_cast<int>(j - i)});
    }
  }
  return pairs;
}

std::string_view to_string(SkipGramMode m) {
  return m == SkipGramMode::Classic ? "classic" : "structured";
}

SkipGramMode parse_skipgram_mode(std::string_view s) {
  if (s == "classic") return SkipGramMode::Classic;
  if (s == "structured") return SkipGramMode::Structured;
  throw InputError("unknown skip-gram mode '" + std::string(s) + "'");
}

void TrainConfig::validate() const {
  if (dim == 0) throw InputError("dimension must be positive");
  if (window <= 0) throw InputError("window must be positive");
  if (softmax == SoftmaxMode::NegativeSampling && negatives == 0) {
    throw InputError("negative sampling needs at least one negative");
  }
  if (!(learning_rate > 0)) throw InputError("learning rate must be positive");
  if (min_count == 0) throw InputError("min_count must be positive");
}

EmbeddingModel::EmbeddingModel(Vocabulary vocab, SkipGramMode mode,
                               std::size_t dim, int window)
    : vocab_(std::move(vocab)), mode_(mode), dim_(dim), window_(window) {
  input_.assign(vocab_.size() * dim_, 0.0);
  const std::size_t k =
      mode_ == SkipGramMode::Classic ? 1 : 2 * static_cast<std::size_t>(window_);
  outputs_.assign(k, std::vector<double>(vocab_.size() * dim_, 0.0));
}

std::span<double> EmbeddingModel::input(std::uint32_t w) {
  return std::span<double>(input_).subspan(std::size_t{w} * dim_, dim_);
}

std::span<const double> EmbeddingModel::input(std::uint32_t w) const {
  return std::span<const double>(input_).subspan(std::size_t{w} * dim_, dim_);
}

std::size_t EmbeddingModel::output_index(int offset) const {
  if (mode_ == SkipGramMode::Classic) return 0;
  if (offset == 0 || offset < -window_ || offset > window_) {
    throw std::out_of_range("context offset outside the window");
  }
  return static_cast<std::size_t>(offset < 0 ? offset + window_
                                             : offset + window_ - 1);
}

int EmbeddingModel::output_offset(std::size_t k) const {
  if (mode_ == SkipGramMode::Classic) return 0;
  const int i = static_cast<int>(k);
  return i < window_ ? i - window_ : i - window_ + 1;
}

std::span<double> EmbeddingModel::output(std::size_t k, std::uint32_t w) {
  return std::span<double>(outputs_.at(k)).subspan(std::size_t{w} * dim_, dim_);
}

std::span<const double> EmbeddingModel::output(std::size_t k,
                                               std::uint32_t w) const {
  return std::span<const double>(outputs_.at(k)).subspan(std::size_t{w} * dim_, dim_);
}

std::span<const double> EmbeddingModel::vector(std::string_view token) const {
  const auto id = vocab_.find(token);
  if (!id) return {};
  return input(*id);
}

EmbeddingModel initialize_model(const Vocabulary& vocab, const TrainConfig& cfg) {
  cfg.validate();
  EmbeddingModel model(vocab, cfg.mode, cfg.dim, cfg.window);
  Rng rng(cfg.seed);
  const double scale = 1.0 / static_cast<double>(cfg.dim);
  for (auto& x : model.input_matrix()) x = (rng.uniform() - 0.5) * scale;
  return model;
}

namespace {

struct PlainAccess {
  static double load(const double& x) noexcept { return x; }
  static void store(double& x, double v) noexcept { x = v; }
};

// Unsynchronized shared updates without a data race in the language sense.
struct RelaxedAccess {
  static double load(const double& x) noexcept {
    return std::atomic_ref<double>(const_cast<double&>(x))
        .load(std::memory_order_relaxed);
  }
  static void store(double& x, double v) noexcept {
    std::atomic_ref<double>(x).store(v, std::memory_order_relaxed);
  }
};

class NoiseTable {
 public:
  explicit NoiseTable(std::span<const std::uint64_t> counts) {
    cumulative_.reserve(counts.size());
    double total = 0;
    for (const auto c : counts) {
      total += std::pow(static_cast<double>(c), 0.75);
      cumulative_.push_back(total);
    }
    total_ = total;
  }
  std::uint32_t sample(Rng& rng) const {
    const double x = rng.uniform() * total_;
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), x);
    const auto i = static_cast<std::size_t>(it - cumulative_.begin());
    return static_cast<std::uint32_t>(std::min(i, cumulative_.size() - 1));
  }

 private:
  std::vector<double> cumulative_;
  double total_ = 0;
};

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

template <typename A>
void negative_sampling_step(EmbeddingModel& m, const ContextPair& pr, double lr,
                            std::size_t negatives, const NoiseTable& noise,
                            Rng& rng, std::vector<double>& grad) {
  const std::size_t dim = m.dim();
  double* h = m.input(pr.center).data();
  const std::size_t k = m.output_index(pr.offset);
  std::fill(grad.begin(), grad.end(), 0.0);
  for (std::size_t s = 0; s <= negatives; ++s) {
    std::uint32_t target = pr.context;
    double label = 1.0;
    if (s > 0) {
      target = noise.sample(rng);
      if (target == pr.context) continue;
      label = 0.0;
    }
    double* u = m.output(k, target).data();
    double dot = 0;
    for (std::size_t d = 0; d < dim; ++d) dot += A::load(h[d]) * A::load(u[d]);
    const double g = (label - sigmoid(dot)) * lr;
    for (std::size_t d = 0; d < dim; ++d) grad[d] += g * A::load(u[d]);
    for (std::size_t d = 0; d < dim; ++d) {
      A::store(u[d], A::load(u[d]) + g * A::load(h[d]));
    }
  }
  for (std::size_t d = 0; d < dim; ++d) A::store(h[d], A::load(h[d]) + grad[d]);
}

// Softmax over the whole vocabulary for one center vector and output matrix.
void softmax_scores(const EmbeddingModel& m, std::span<const double> h,
                    std::size_t k, std::vector<double>& p) {
  const std::size_t n = m.size();
  p.resize(n);
  double best = -INFINITY;
  for (std::uint32_t t = 0; t < n; ++t) {
    const auto u = m.output(k, t);
    double dot = 0;
    for (std::size_t d = 0; d < h.size(); ++d) dot += u[d] * h[d];
    p[t] = dot;
    best = std::max(best, dot);
  }
  double z = 0;
  for (auto& v : p) {
    v = std::exp(v - best);
    z += v;
  }
  for (auto& v : p) v /= z;
}

template <typename A>
void full_softmax_step(EmbeddingModel& m, const ContextPair& pr, double lr,
                       std::vector<double>& p, std::vector<double>& grad) {
  const std::size_t dim = m.dim();
  const std::size_t k = m.output_index(pr.offset);
  auto h = m.input(pr.center);
  softmax_scores(m, h, k, p);
  const auto uo = m.output(k, pr.context);
  for (std::size_t d = 0; d < dim; ++d) grad[d] = uo[d];
  for (std::uint32_t t = 0; t < m.size(); ++t) {
    const auto u = m.output(k, t);
    for (std::size_t d = 0; d < dim; ++d) grad[d] -= p[t] * u[d];
  }
  for (std::uint32_t t = 0; t < m.size(); ++t) {
    auto u = m.output(k, t);
    const double g = lr * ((t == pr.context ? 1.0 : 0.0) - p[t]);
    for (std::size_t d = 0; d < dim; ++d) A::store(u[d], A::load(u[d]) + g * h[d]);
  }
  for (std::size_t d = 0; d < dim; ++d) A::store(h[d], A::load(h[d]) + lr * grad[d]);
}

template <typename A>
void run_worker(EmbeddingModel& model,
                const std::vector<std::vector<std::uint32_t>>& walks,
                const TrainConfig& cfg, const NoiseTable& noise,
                std::size_t first, std::size_t stride, std::uint64_t seed,
                std::atomic<std::uint64_t>& processed, std::uint64_t total) {
  Rng rng(seed);
  std::vector<double> grad(model.dim());
  std::vector<double> probs;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t w = first; w < walks.size(); w += stride) {
      const auto pairs = extract_pairs(walks[w], cfg.window);
      for (const auto& pr : pairs) {
        const double done =
            static_cast<double>(processed.fetch_add(1, std::memory_order_relaxed));
        const double lr = cfg.learning_rate *
                          std::max(1.0 - done / static_cast<double>(total),
                                   cfg.min_rate_fraction);
        if (cfg.softmax == SoftmaxMode::NegativeSampling) {
          negative_sampling_step<A>(model, pr, lr, cfg.negatives, noise, rng, grad);
        } else {
          full_softmax_step<A>(model, pr, lr, probs, grad);
        }
      }
    }
  }
}

std::uint64_t count_pairs(const std::vector<std::vector<std::uint32_t>>& walks,
                          int window) {
  std::uint64_t total = 0;
  for (const auto& w : walks) {
    const auto n = static_cast<std::int64_t>(w.size());
    for (std::int64_t i = 0; i < n; ++i) {
      total += static_cast<std::uint64_t>(std::min<std::int64_t>(i, window) +
                                          std::min<std::int64_t>(n - 1 - i, window));
    }
  }
  return total;
}

}  // namespace

void train_into(EmbeddingModel& model,
                const std::vector<std::vector<std::uint32_t>>& walks,
                const TrainConfig& cfg) {
  cfg.validate();
  if (model.dim() != cfg.dim) throw DimensionMismatch(model.dim(), cfg.dim);
  if (model.mode() != cfg.mode || model.window() != cfg.window) {
    throw InputError("training configuration does not match the model");
  }
  if (model.size() == 0) throw EmptyCorpus("vocabulary is empty");
  if (cfg.softmax == SoftmaxMode::FullSoftmax && model.size() > cfg.full_softmax_cap) {
    throw InputError("vocabulary too large for the full softmax (" +
                     std::to_string(model.size()) + " > " +
                     std::to_string(cfg.full_softmax_cap) + ")");
  }
  const std::uint64_t pairs = count_pairs(walks, cfg.window);
  if (pairs == 0) throw EmptyCorpus("corpus has no context pairs");
  if (cfg.epochs == 0) return;

  std::vector<std::uint64_t> counts(model.size(), 0);
  for (const auto& w : walks) {
    for (const auto t : w) ++counts.at(t);
  }
  const NoiseTable noise(counts);
  const std::uint64_t total = pairs * cfg.epochs;
  std::atomic<std::uint64_t> processed{0};

  if (cfg.threads <= 1) {
    run_worker<PlainAccess>(model, walks, cfg, noise, 0, 1,
                            mix_seed(cfg.seed, 1), processed, total);
    return;
  }
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < cfg.threads; ++t) {
    pool.emplace_back([&, t] {
      run_worker<RelaxedAccess>(model, walks, cfg, noise, t, cfg.threads,
                                mix_seed(cfg.seed, 1 + t), processed, total);
    });
  }
}

EmbeddingModel train(const WalkCorpus& corpus, const Vocabulary& vocab,
                     const TrainConfig& cfg) {
  if (vocab.size() == 0) throw EmptyCorpus("vocabulary is empty");
  auto model = initialize_model(vocab, cfg);
  train_into(model, encode_walks(corpus, vocab), cfg);
  return model;
}

double softmax_probability(const EmbeddingModel& model, std::uint32_t center,
                           std::uint32_t context, int offset) {
  std::vector<double> p;
  softmax_scores(model, model.input(center), model.output_index(offset), p);
  return p.at(context);
}

double log_likelihood(const EmbeddingModel& model,
                      const std::vector<std::vector<std::uint32_t>>& walks) {
  double sum = 0;
  std::size_t tokens = 0;
  std::vector<double> p;
  for (const auto& w : walks) {
    tokens += w.size();
    for (const auto& pr : extract_pairs(w, model.window())) {
      softmax_scores(model, model.input(pr.center), model.output_index(pr.offset), p);
      sum += std::log(p[pr.context]);
    }
  }
  return tokens == 0 ? 0.0 : sum / static_cast<double>(tokens);
}

Gradient log_likelihood_gradient(
    const EmbeddingModel& model,
    const std::vector<std::vector<std::uint32_t>>& walks) {
  const std::size_t dim = model.dim();
  Gradient g;
  g.input.assign(model.input_matrix().size(), 0.0);
  g.outputs.assign(model.output_count(),
                   std::vector<double>(model.size() * dim, 0.0));
  std::size_t tokens = 0;
  for (const auto& w : walks) tokens += w.size();
  if (tokens == 0) return g;
  const double scale = 1.0 / static_cast<double>(tokens);
  std::vector<double> p;
  for (const auto& w : walks) {
    for (const auto& pr : extract_pairs(w, model.window())) {
      const std::size_t k = model.output_index(pr.offset);
      const auto h = model.input(pr.center);
      softmax_scores(model, h, k, p);
      double* gh = g.input.data() + std::size_t{pr.center} * dim;
      for (std::uint32_t t = 0; t < model.size(); ++t) {
        const auto u = model.output(k, t);
        const double coef = ((t == pr.context ? 1.0 : 0.0) - p[t]) * scale;
        double* gu = g.outputs[k].data() + std::size_t{t} * dim;
        for (std::size_t d = 0; d < dim; ++d) {
          gu[d] += coef * h[d];
          gh[d] += coef * u[d];
        }
      }
    }
  }
  return g;
}

namespace {

void append_vector(std::string& out, std::span<const double> v) {
  for (std::size_t d = 0; d < v.size(); ++d) {
    if (d) out += ' ';
    out += format_double(v[d]);
  }
}

}  // namespace

std::string serialize_embeddings(const EmbeddingModel& model, bool with_outputs) {
  std::string out = "#qtwalk-emb v1 count=" + std::to_string(model.size()) +
                    " dim=" + std::to_string(model.dim()) +
                    " mode=" + std::string(to_string(model.mode())) + "\n";
  for (std::uint32_t w = 0; w < model.size(); ++w) {
    out += model.vocab().token(w);
    out += '\t';
    append_vector(out, model.input(w));
    out += '\n';
  }
  if (with_outputs) {
    for (std::size_t k = 0; k < model.output_count(); ++k) {
      out += "#output offset=" + std::to_string(model.output_offset(k)) + "\n";
      for (std::uint32_t w = 0; w < model.size(); ++w) {
        out += model.vocab().token(w);
        out += '\t';
        append_vector(out, model.output(k, w));
        out += '\n';
      }
    }
  }
  return out;
}

void save_embeddings(const EmbeddingModel& model, const std::filesystem::path& path,
                     bool with_outputs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << serialize_embeddings(model, with_outputs);
  if (!out) throw IoError("write failed: " + path.string());
}

namespace {

std::size_t header_number(std::string_view line, std::string_view key) {
  const std::string needle = " " + std::string(key) + "=";
  const auto at = line.find(needle);
  if (at == std::string_view::npos) {
    throw FormatError("embedding header lacks " + std::string(key));
  }
  const char* begin = line.data() + at + needle.size();
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(begin, line.data() + line.size(), v);
  if (ec != std::errc{} || (ptr != line.data() + line.size() && *ptr != ' ')) {
    throw FormatError("embedding header: bad " + std::string(key));
  }
  return v;
}

std::vector<double> parse_vector(std::string_view text, std::size_t dim,
                                 std::size_t line_no) {
  std::vector<double> v;
  v.reserve(dim);
  const char* p = text.data();
  const char* end = text.data() + text.size();
  while (p < end) {
    while (p < end && *p == ' ') ++p;
    if (p == end) break;
    double x = 0;
    const auto [ptr, ec] = std::from_chars(p, end, x);
    if (ec != std::errc{} || (ptr != end && *ptr != ' ')) {
      throw FormatError("line " + std::to_string(line_no) + ": bad number");
    }
    v.push_back(x);
    p = ptr;
  }
  if (v.size() != dim) throw DimensionMismatch(dim, v.size());
  return v;
}

}  // namespace

EmbeddingModel parse_embeddings(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    pos = end + 1;
  }
  if (lines.empty() || !lines[0].starts_with("#qtwalk-emb v1")) {
    throw FormatError("not an embedding file (missing '#qtwalk-emb v1' header)");
  }
  const std::string_view header = lines[0];
  const std::size_t count = header_number(header, "count");
  const std::size_t dim = header_number(header, "dim");
  const auto mode_at = header.find(" mode=");
  if (mode_at == std::string_view::npos) throw FormatError("embedding header lacks mode");
  auto mode_text = header.substr(mode_at + 6);
  mode_text = mode_text.substr(0, mode_text.find(' '));
  const SkipGramMode mode = parse_skipgram_mode(mode_text);

  struct Row {
    std::string token;
    std::vector<double> values;
  };
  std::vector<Row> inputs;
  std::map<int, std::vector<Row>> outputs;
  std::vector<Row>* current = &inputs;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto line = lines[i];
    if (line.empty()) continue;
    if (line.starts_with("#output offset=")) {
      int offset = 0;
      const auto digits = line.substr(15);
      const auto [ptr, ec] =
          std::from_chars(digits.data(), digits.data() + digits.size(), offset);
      if (ec != std::errc{} || ptr != digits.data() + digits.size()) {
        throw FormatError("line " + std::to_string(i + 1) + ": bad output header");
      }
      current = &outputs[offset];
      continue;
    }
    const auto tab = line.rfind('\t');
    if (tab == std::string_view::npos) {
      throw FormatError("line " + std::to_string(i + 1) + ": missing TAB");
    }
    current->push_back(Row{std::string(line.substr(0, tab)),
                           parse_vector(line.substr(tab + 1), dim, i + 1)});
  }
  if (inputs.size() != count) {
    throw FormatError("embedding file declares " + std::to_string(count) +
                      " tokens but has " + std::to_string(inputs.size()));
  }

  std::vector<std::string> tokens;
  tokens.reserve(inputs.size());
  for (const auto& r : inputs) tokens.push_back(r.token);
  int window = 0;
  if (mode == SkipGramMode::Structured) {
    window = static_cast<int>(outputs.size() / 2);
  }
  EmbeddingModel model(Vocabulary(std::move(tokens), {}), mode, dim, window);
  for (std::uint32_t w = 0; w < inputs.size(); ++w) {
    std::copy(inputs[w].values.begin(), inputs[w].values.end(),
              model.input(w).begin());
  }
  if (outputs.empty()) {
    model.drop_outputs();
    return model;
  }
  if (outputs.size() != model.output_count()) {
    throw FormatError("unexpected number of output matrices");
  }
  for (std::size_t k = 0; k < model.output_count(); ++k) {
    const auto it = outputs.find(model.output_offset(k));
    if (it == outputs.end() || it->second.size() != count) {
      throw FormatError("incomplete output matrix");
    }
    for (std::uint32_t w = 0; w < count; ++w) {
      if (it->second[w].token != model.vocab().token(w)) {
        throw FormatError("output matrix rows out of order");
      }
      std::copy(it->second[w].values.begin(), it->second[w].values.end(),
                model.output(k, w).begin());
    }
  }
  return model;
}

EmbeddingModel load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_embeddings(buf.str());
}

}  // namespace qtwalk
