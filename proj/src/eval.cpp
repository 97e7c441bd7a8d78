#include "qtwalk/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "qtwalk/correlation.hpp"
#include "qtwalk/errors.hpp"
#include "qtwalk/format.hpp"
#include "qtwalk/rng.hpp"
#include "qtwalk/turtle_star.hpp"

namespace qtwalk {

double cosine_similarity(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw DimensionMismatch(u.size(), v.size());
  double dot = 0, nu = 0, nv = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu == 0 || nv == 0) return 0.0;
  return std::clamp(dot / (std::sqrt(nu) * std::sqrt(nv)), -1.0, 1.0);
}

std::size_t LabeledSet::label_count() const {
  std::set<std::string_view> labels;
  for (const auto& item : items) labels.insert(item.label);
  return labels.size();
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_lines(std::string_view text) {
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
  return lines;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

bool skip_line(std::string_view line) {
  const auto t = trim(line);
  return t.empty() || t.front() == '#';
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

std::string normalize_token(std::string_view text) {
  const auto t = trim(text);
  if (t.starts_with("<<")) {
    const auto triples =
        parse_document(std::string(t) + " <urn:qtwalk:p> <urn:qtwalk:o> .");
    return triples.at(0).subject.canonical();
  }
  if (t.starts_with("<") || t.starts_with("\"")) return std::string(t);
  return "<" + std::string(t) + ">";
}

LabeledSet parse_labels(std::string_view text) {
  LabeledSet set;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  for (const auto line : split_lines(text)) {
    ++line_no;
    if (skip_line(line)) continue;
    const auto fields = split_tabs(line);
    if (fields.size() < 2) {
      throw FormatError("labels line " + std::to_string(line_no) +
                        ": expected token<TAB>label");
    }
    auto token = normalize_token(fields[0]);
    if (!seen.insert(token).second) {
      throw FormatError("labels line " + std::to_string(line_no) +
                        ": duplicate token " + token);
    }
    set.items.push_back(LabeledItem{std::move(token), std::string(trim(fields[1]))});
  }
  return set;
}

RelatednessGold parse_relatedness(std::string_view text) {
  RelatednessGold gold;
  std::size_t line_no = 0;
  for (const auto line : split_lines(text)) {
    ++line_no;
    if (skip_line(line)) continue;
    const bool indented = line.front() == ' ' || line.front() == '\t';
    if (!indented) {
      gold.entries.push_back(RelatednessEntry{normalize_token(line), {}});
    } else {
      if (gold.entries.empty()) {
        throw FormatError("relatedness line " + std::to_string(line_no) +
                          ": candidate before any seed");
      }
      gold.entries.back().candidates.push_back(normalize_token(line));
    }
  }
  for (const auto& e : gold.entries) {
    if (e.candidates.size() < 2) {
      throw FormatError("relatedness seed " + e.seed + " has fewer than 2 candidates");
    }
  }
  return gold;
}

SimilarityGold parse_similarity(std::string_view text) {
  SimilarityGold gold;
  std::size_t line_no = 0;
  for (const auto line : split_lines(text)) {
    ++line_no;
    if (skip_line(line)) continue;
    const auto fields = split_tabs(line);
    if (fields.size() < 3) {
      throw FormatError("similarity line " + std::to_string(line_no) +
                        ": expected qt1<TAB>qt2<TAB>score");
    }
    double score = 0;
    const auto s = trim(fields[2]);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), score);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
      throw FormatError("similarity line " + std::to_string(line_no) + ": bad score");
    }
    gold.pairs.push_back(
        SimilarityPair{normalize_token(fields[0]), normalize_token(fields[1]), score});
  }
  return gold;
}

LabeledSet read_labels(const std::filesystem::path& path) {
  return parse_labels(read_text(path));
}
RelatednessGold read_relatedness(const std::filesystem::path& path) {
  return parse_relatedness(read_text(path));
}
SimilarityGold read_similarity(const std::filesystem::path& path) {
  return parse_similarity(read_text(path));
}

void EvalReport::add(std::string task, std::string metric, double value) {
  rows.push_back(ReportRow{std::move(task), std::move(metric), format_double(value)});
}

void EvalReport::add(std::string task, std::string metric, std::string value) {
  rows.push_back(ReportRow{std::move(task), std::move(metric), std::move(value)});
}

void EvalReport::append(const EvalReport& other) {
  rows.insert(rows.end(), other.rows.begin(), other.rows.end());
}

double EvalReport::value(std::string_view task, std::string_view metric) const {
  for (const auto& r : rows) {
    if (r.task == task && r.metric == metric) {
      double v = 0;
      const auto [ptr, ec] =
          std::from_chars(r.value.data(), r.value.data() + r.value.size(), v);
      if (ec == std::errc{} && ptr == r.value.data() + r.value.size()) return v;
      return std::numeric_limits<double>::quiet_NaN();
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

std::string EvalReport::to_tsv() const {
  std::string out = "task\tmetric\tvalue\n";
  for (const auto& r : rows) out += r.task + "\t" + r.metric + "\t" + r.value + "\n";
  return out;
}

std::vector<std::size_t> stratified_folds(std::span<const std::size_t> labels,
                                          std::size_t folds, std::uint64_t seed) {
  std::map<std::size_t, std::vector<std::size_t>> by_label;
  for (std::size_t i = 0; i < labels.size(); ++i) by_label[labels[i]].push_back(i);
  Rng rng(seed);
  std::vector<std::size_t> fold(labels.size(), 0);
  std::size_t next = 0;
  for (auto& [label, members] : by_label) {
    rng.shuffle(std::span<std::size_t>(members));
    for (const auto i : members) {
      fold[i] = next;
      next = (next + 1) % folds;
    }
  }
  return fold;
}

std::size_t knn_predict(std::span<const double> distances,
                        std::span<const std::size_t> train_labels, std::size_t k) {
  std::vector<std::size_t> order(distances.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  k = std::min(k, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k),
                    order.end(), [&](std::size_t a, std::size_t b) {
                      if (distances[a] != distances[b]) return distances[a] < distances[b];
                      return a < b;
                    });
  std::map<std::size_t, std::size_t> votes;
  std::size_t best = 0;
  for (std::size_t i = 0; i < k; ++i) best = std::max(best, ++votes[train_labels[order[i]]]);
  for (std::size_t i = 0; i < k; ++i) {
    const auto label = train_labels[order[i]];
    if (votes[label] == best) return label;
  }
  return 0;
}

std::vector<std::size_t> max_weight_assignment(std::span<const double> weights,
                                               std::size_t n) {
  // Hungarian algorithm (potentials form) on costs = -weights, 1-based.
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0), v(n + 1, 0), minv(n + 1);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  auto cost = [&](std::size_t i, std::size_t j) { return -weights[(i - 1) * n + (j - 1)]; };
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0, j) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> assignment(n, 0);
  for (std::size_t j = 1; j <= n; ++j) {
    if (p[j] != 0) assignment[p[j] - 1] = j - 1;
  }
  return assignment;
}

double clustering_accuracy(std::span<const std::size_t> clusters,
                           std::span<const std::size_t> labels, std::size_t k) {
  if (clusters.size() != labels.size()) throw std::invalid_argument("length mismatch");
  if (clusters.empty() || k == 0) return 0.0;
  std::vector<double> counts(k * k, 0.0);
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    counts.at(clusters[i] * k + labels[i]) += 1.0;
  }
  const auto assignment = max_weight_assignment(counts, k);
  double matched = 0;
  for (std::size_t c = 0; c < k; ++c) matched += counts[c * k + assignment[c]];
  return matched / static_cast<double>(clusters.size());
}

double adjusted_rand_index(std::span<const std::size_t> clusters,
                           std::span<const std::size_t> labels) {
  if (clusters.size() != labels.size()) throw std::invalid_argument("length mismatch");
  auto comb2 = [](double x) { return x * (x - 1) / 2; };
  std::map<std::pair<std::size_t, std::size_t>, double> cells;
  std::map<std::size_t, double> rows, cols;
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    cells[{clusters[i], labels[i]}] += 1;
    rows[clusters[i]] += 1;
    cols[labels[i]] += 1;
  }
  double index = 0, a = 0, b = 0;
  for (const auto& [key, c] : cells) index += comb2(c);
  for (const auto& [key, c] : rows) a += comb2(c);
  for (const auto& [key, c] : cols) b += comb2(c);
  const double total = comb2(static_cast<double>(clusters.size()));
  if (total == 0) return 1.0;
  const double expected = a * b / total;
  const double max_index = (a + b) / 2;
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

KMeansResult kmeans_once(std::span<const std::vector<double>> points, std::size_t k,
                         std::size_t max_iterations, Rng& rng) {
  const std::size_t n = points.size();
  const std::size_t dim = points[0].size();
  std::vector<std::vector<double>> centers;
  centers.push_back(points[rng.index(n)]);
  std::vector<double> d2(n);
  while (centers.size() < k) {
    double total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : centers) best = std::min(best, squared_distance(points[i], c));
      d2[i] = best;
      total += best;
    }
    std::size_t pick = 0;
    if (total <= 0) {
      pick = rng.index(n);
    } else {
      double x = rng.uniform() * total;
      for (pick = 0; pick + 1 < n; ++pick) {
        if (x < d2[pick]) break;
        x -= d2[pick];
      }
    }
    centers.push_back(points[pick]);
  }

  KMeansResult result;
  result.assignment.assign(n, k);
  for (std::size_t iter = 0; iter < max_iterations; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        const double d = squared_distance(points[i], centers[c]);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (result.assignment[i] != best) {
        result.assignment[i] = best;
        changed = true;
      }
    }
    if (!changed) break;
    std::vector<std::vector<double>> sums(k, std::vector<double>(dim, 0.0));
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      auto& s = sums[result.assignment[i]];
      for (std::size_t d = 0; d < dim; ++d) s[d] += points[i][d];
      ++sizes[result.assignment[i]];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] == 0) continue;
      for (std::size_t d = 0; d < dim; ++d) {
        centers[c][d] = sums[c][d] / static_cast<double>(sizes[c]);
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    result.inertia += squared_distance(points[i], centers[result.assignment[i]]);
  }
  return result;
}

}  // namespace

KMeansResult kmeans(std::span<const std::vector<double>> points, std::size_t k,
                    std::size_t restarts, std::size_t max_iterations,
                    std::uint64_t seed) {
  if (points.empty() || k == 0) return {};
  k = std::min(k, points.size());
  Rng rng(seed);
  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < std::max<std::size_t>(1, restarts); ++r) {
    auto run = kmeans_once(points, k, max_iterations, rng);
    if (run.inertia < best.inertia) best = std::move(run);
  }
  return best;
}

HarmonicMean harmonic_mean(double a, double b) {
  if (!(a > 0) || !(b > 0)) return HarmonicMean{0.0, true};
  return HarmonicMean{2 * a * b / (a + b), false};
}

namespace {

struct Present {
  std::vector<std::span<const double>> vectors;
  std::vector<std::size_t> labels;
  std::vector<std::string> label_names;
  std::size_t missing = 0;
};

Present collect_labeled(const EmbeddingModel& emb, const LabeledSet& gold,
                        const EvalOptions& options) {
  Present out;
  std::map<std::string, std::size_t> label_index;
  for (const auto& item : gold.items) label_index.emplace(item.label, 0);
  for (auto& [name, idx] : label_index) {
    idx = out.label_names.size();
    out.label_names.push_back(name);
  }
  for (const auto& item : gold.items) {
    const auto v = emb.vector(item.token);
    if (v.empty()) {
      ++out.missing;
      continue;
    }
    out.vectors.push_back(v);
    out.labels.push_back(label_index.at(item.label));
  }
  const double coverage =
      gold.items.empty() ? 0.0
                         : static_cast<double>(out.vectors.size()) /
                               static_cast<double>(gold.items.size());
  if (coverage < options.min_coverage) {
    throw MissingToken(std::to_string(out.missing) + " of " +
                       std::to_string(gold.items.size()) +
                       " gold tokens have no embedding");
  }
  return out;
}

}  // namespace

EvalReport eval_classification(const EmbeddingModel& emb, const LabeledSet& gold,
                               std::string_view task, const EvalOptions& options) {
  const auto data = collect_labeled(emb, gold, options);
  std::vector<std::size_t> per_class(data.label_names.size(), 0);
  for (const auto l : data.labels) ++per_class[l];
  for (std::size_t l = 0; l < per_class.size(); ++l) {
    if (per_class[l] < options.folds) {
      throw TooFewPerClass("class '" + data.label_names[l] + "' has " +
                           std::to_string(per_class[l]) + " items, need " +
                           std::to_string(options.folds));
    }
  }
  const std::size_t n = data.vectors.size();
  const auto fold = stratified_folds(data.labels, options.folds, options.seed);
  double accuracy_sum = 0;
  std::vector<double> distances;
  std::vector<std::size_t> train_labels;
  std::vector<std::size_t> train_index;
  for (std::size_t f = 0; f < options.folds; ++f) {
    train_labels.clear();
    train_index.clear();
    for (std::size_t i = 0; i < n; ++i) {
      if (fold[i] != f) {
        train_index.push_back(i);
        train_labels.push_back(data.labels[i]);
      }
    }
    std::size_t correct = 0, tested = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (fold[i] != f) continue;
      distances.clear();
      for (const auto j : train_index) {
        distances.push_back(1.0 - cosine_similarity(data.vectors[i], data.vectors[j]));
      }
      if (knn_predict(distances, train_labels, options.knn_k) == data.labels[i]) ++correct;
      ++tested;
    }
    accuracy_sum += static_cast<double>(correct) / static_cast<double>(tested);
  }
  EvalReport report;
  const std::string t(task);
  report.add(t, "accuracy", accuracy_sum / static_cast<double>(options.folds));
  report.add(t, "items", static_cast<double>(n));
  report.add(t, "missing", static_cast<double>(data.missing));
  report.add(t, "folds", static_cast<double>(options.folds));
  report.add(t, "k", static_cast<double>(options.knn_k));
  report.add(t, "leak_guard", options.leak_guard);
  return report;
}

EvalReport eval_clustering(const EmbeddingModel& emb, const LabeledSet& gold,
                           std::string_view task, const EvalOptions& options) {
  const auto data = collect_labeled(emb, gold, options);
  std::vector<std::vector<double>> points;
  points.reserve(data.vectors.size());
  for (const auto v : data.vectors) {
    double norm = 0;
    for (const double x : v) norm += x * x;
    norm = std::sqrt(norm);
    std::vector<double> p(v.begin(), v.end());
    if (norm > 0) {
      for (auto& x : p) x /= norm;
    }
    points.push_back(std::move(p));
  }
  const std::size_t k = data.label_names.size();
  const auto result = kmeans(points, k, options.kmeans_restarts,
                             options.kmeans_max_iterations, options.seed);
  EvalReport report;
  const std::string t(task);
  report.add(t, "accuracy", clustering_accuracy(result.assignment, data.labels, k));
  report.add(t, "ari", adjusted_rand_index(result.assignment, data.labels));
  report.add(t, "items", static_cast<double>(points.size()));
  report.add(t, "missing", static_cast<double>(data.missing));
  report.add(t, "clusters", static_cast<double>(k));
  report.add(t, "leak_guard", options.leak_guard);
  return report;
}

EvalReport eval_relatedness(const EmbeddingModel& emb, const RelatednessGold& gold,
                            std::string_view task, const EvalOptions& options) {
  double sum = 0;
  std::size_t scored = 0, missing_seeds = 0, missing_candidates = 0;
  for (const auto& entry : gold.entries) {
    const auto seed = emb.vector(entry.seed);
    if (seed.empty()) {
      ++missing_seeds;
      continue;
    }
    std::vector<double> truth, predicted;
    for (std::size_t i = 0; i < entry.candidates.size(); ++i) {
      truth.push_back(static_cast<double>(entry.candidates.size() - i));
      const auto v = emb.vector(entry.candidates[i]);
      if (v.empty()) ++missing_candidates;
      predicted.push_back(v.empty() ? 0.0 : cosine_similarity(seed, v));
    }
    sum += kendall_tau_b(truth, predicted);
    ++scored;
  }
  const double coverage = gold.entries.empty()
                              ? 0.0
                              : static_cast<double>(scored) /
                                    static_cast<double>(gold.entries.size());
  if (scored == 0 || coverage < options.min_coverage) {
    throw MissingSeed(std::to_string(missing_seeds) + " of " +
                      std::to_string(gold.entries.size()) +
                      " relatedness seeds have no embedding");
  }
  EvalReport report;
  const std::string t(task);
  report.add(t, "kendall_tau_b", sum / static_cast<double>(scored));
  report.add(t, "seeds", static_cast<double>(scored));
  report.add(t, "missing_seeds", static_cast<double>(missing_seeds));
  report.add(t, "missing_candidates", static_cast<double>(missing_candidates));
  return report;
}

EvalReport eval_qt_similarity(const EmbeddingModel& emb, const SimilarityGold& gold,
                              std::string_view task, const EvalOptions& options) {
  std::vector<double> truth, predicted;
  std::size_t missing = 0;
  for (const auto& pair : gold.pairs) {
    const auto a = emb.vector(pair.qt1);
    const auto b = emb.vector(pair.qt2);
    if (a.empty() || b.empty()) {
      ++missing;
      continue;
    }
    truth.push_back(pair.score);
    predicted.push_back(cosine_similarity(a, b));
  }
  const double coverage = gold.pairs.empty()
                              ? 0.0
                              : static_cast<double>(truth.size()) /
                                    static_cast<double>(gold.pairs.size());
  if (truth.empty() || coverage < options.min_coverage) {
    throw MissingToken(std::to_string(missing) + " of " +
                       std::to_string(gold.pairs.size()) +
                       " similarity pairs lack an embedding");
  }
  const double p = pearson(truth, predicted);
  const double s = spearman(truth, predicted);
  const auto h = harmonic_mean(p, s);
  EvalReport report;
  const std::string t(task);
  report.add(t, "pearson", p);
  report.add(t, "spearman", s);
  report.add(t, "harmonic_mean", h.value);
  report.add(t, "harmonic_mean_clamped", h.clamped ? "yes" : "no");
  report.add(t, "pairs", static_cast<double>(truth.size()));
  report.add(t, "missing", static_cast<double>(missing));
  return report;
}

}  // namespace qtwalk
